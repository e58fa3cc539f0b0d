#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "modgame/error.hpp"
#include "modgame/modgame_multivariate.hpp"
#include "support.hpp"

using namespace modgame;

namespace {

// Writes 1..d cyclically, cuts the sequence into runs of the sorted budgets
// and counts each coordinate per run.
struct SlicedMatrix {
  std::vector<int> entries;
  std::vector<int> permutation;
};

SlicedMatrix slice_sequence(const std::vector<int>& budgets, int d) {
  SlicedMatrix out;
  out.permutation.resize(budgets.size());
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](int a, int b) { return budgets[a] < budgets[b]; });
  std::int64_t position = 0;
  for (const int slot : out.permutation) {
    std::vector<int> row(static_cast<std::size_t>(d), 0);
    for (int t = 0; t < budgets[slot]; ++t, ++position) ++row[position % d];
    out.entries.insert(out.entries.end(), row.begin(), row.end());
  }
  return out;
}

std::vector<Transcript> encode_all(const MultivariatePlan& plan,
                                   const std::vector<std::vector<double>>& xs) {
  std::vector<Transcript> out;
  for (int i = 0; i < plan.machine_count(); ++i) {
    out.push_back(encode_local_multi(plan, i + 1, xs[i]));
  }
  return out;
}

}  // namespace

TEST_CASE("coordinate budget examples") {
  const auto three = allocate_coordinate_budgets(std::vector<int>{2, 3, 4}, 3);
  CHECK(three.entries == std::vector<int>{1, 1, 0, 1, 1, 1, 1, 1, 2});
  CHECK(three.permutation == std::vector<int>{0, 1, 2});

  const auto two = allocate_coordinate_budgets(std::vector<int>{1, 1}, 2);
  CHECK(two.entries == std::vector<int>{1, 0, 0, 1});

  const auto unsorted = allocate_coordinate_budgets(std::vector<int>{4, 2, 3}, 3);
  CHECK(unsorted.permutation == std::vector<int>{1, 2, 0});
  CHECK(unsorted.for_machine(0, 2) == 2);
  CHECK(unsorted.for_machine(1, 2) == 0);
  CHECK(unsorted.column_sum(0) == 3);

  CHECK_THROWS_AS(allocate_coordinate_budgets(std::vector<int>{}, 2), Error);
  CHECK_THROWS_AS(allocate_coordinate_budgets(std::vector<int>{1}, 0), Error);
}

TEST_CASE("closed form matches the worked example") {
  // Sorted budgets (2,3,4): S = 2, 5, 9.
  CHECK(closed_form_budget(0, 2, 3, 3) == 0);
  CHECK(closed_form_budget(5, 9, 3, 3) == 2);
  CHECK(closed_form_budget(2, 5, 1, 3) == 1);
}

TEST_CASE("effective sample size examples") {
  CHECK(effective_sample_size(std::vector<int>(21, 1), 2) == 10.5);
  CHECK(effective_sample_size(std::vector<int>(7, 5), 3) == 7.0);
  CHECK(effective_sample_size(std::vector<int>{1, 2}, 2) == 1.5);
}

TEST_CASE("allocation matches the sequence slicer") {
  auto rng = test::make_rng(201);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = test::uniform_int(rng, 1, 30);
    const int d = test::uniform_int(rng, 1, 12);
    const auto budgets = test::random_budgets(rng, m, test::uniform_int(rng, 1, 40));
    const auto matrix = allocate_coordinate_budgets(budgets, d);
    const auto oracle = slice_sequence(budgets, d);
    CHECK(matrix.entries == oracle.entries);
    CHECK(matrix.permutation == oracle.permutation);

    // Row sums are the budgets, rows are balanced, columns differ by at most 1.
    for (int slot = 0; slot < m; ++slot) {
      int sum = 0, lo = 1 << 30, hi = 0;
      for (int k = 0; k < d; ++k) {
        const int v = matrix.for_machine(slot, k);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(sum == budgets[slot]);
      CHECK(hi - lo <= 1);
    }
    std::int64_t total = 0, lo = INT64_MAX, hi = 0;
    for (int k = 0; k < d; ++k) {
      const std::int64_t c = matrix.column_sum(k);
      total += c;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(total == std::accumulate(budgets.begin(), budgets.end(), std::int64_t{0}));
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("one dimension reproduces the univariate protocol bit for bit") {
  auto rng = test::make_rng(203);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = test::uniform_int(rng, 1, 40);
    const double sigma = std::exp2(test::uniform(rng, -12.0, 1.0));
    const ProtocolConfig cfg{sigma, test::random_budgets(rng, m, 6), 1};
    const UnivariatePlan uni = plan_budget(cfg);
    const MultivariatePlan multi = plan_multivariate(cfg);
    const double theta = test::uniform(rng, 0.0, 1.0);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<Transcript> a, b;
    for (int i = 1; i <= m; ++i) {
      const double x = theta + noise(rng);
      a.push_back(encode_local(uni, i, x));
      b.push_back(encode_local_multi(multi, i, std::vector<double>{x}));
    }
    CHECK(a == b);
    const double u = decode_central(uni, a).value;
    const auto v = decode_central_multi(multi, b).value;
    REQUIRE(v.size() == 1);
    CHECK(u == v[0]);
  }
}

TEST_CASE("coordinates without bits are estimated at one half") {
  const MultivariatePlan plan = plan_multivariate({0x1p-8, {1}, 3});
  CHECK(plan.coordinate(0).plan.has_value());
  CHECK_FALSE(plan.coordinate(1).plan.has_value());
  CHECK_FALSE(plan.coordinate(2).plan.has_value());
  CHECK(plan.sub_slot(0, 1) == -1);
  const auto t = encode_local_multi(plan, 1, std::vector<double>{0.7, 0.1, 0.9});
  CHECK(t.bits == std::vector<Bit>{1});
  const auto est = decode_central_multi(plan, std::vector<Transcript>{t});
  CHECK(est.value == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(est.diagnostics[0].has_value());
  CHECK_FALSE(est.diagnostics[1].has_value());
}

TEST_CASE("noise-free localization in two dimensions") {
  const MultivariatePlan plan = plan_multivariate({0x1p-8, {2, 2}, 2});
  const std::vector<std::vector<double>> xs{{0.3, 0.6}, {0.3, 0.6}};
  const auto ts = encode_all(plan, xs);
  CHECK(ts[0].bits == std::vector<Bit>{0, 1});
  CHECK(ts[1].bits == std::vector<Bit>{1, 1});
  const auto est = decode_central_multi(plan, ts);
  CHECK(est.value == std::vector<double>{0.25, 0.5});
}

TEST_CASE("sub-transcripts are laid out coordinate by coordinate") {
  auto rng = test::make_rng(207);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = test::uniform_int(rng, 1, 20);
    const int d = test::uniform_int(rng, 1, 6);
    const ProtocolConfig cfg{0x1p-10, test::random_budgets(rng, m, 12), d};
    const MultivariatePlan plan = plan_multivariate(cfg);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(m));
    for (auto& x : xs) {
      x.resize(static_cast<std::size_t>(d));
      for (double& v : x) v = test::uniform(rng, 0.0, 1.0);
    }
    const auto ts = encode_all(plan, xs);
    for (int slot = 0; slot < m; ++slot) {
      CHECK(static_cast<int>(ts[slot].bits.size()) == cfg.budgets[slot]);
      int offset = 0;
      for (int k = 0; k < d; ++k) {
        CHECK(plan.offset(slot, k) == offset);
        const int width = plan.matrix().for_machine(slot, k);
        if (width > 0) {
          const auto& coord = plan.coordinate(k);
          const int sub = plan.sub_slot(slot, k);
          REQUIRE(sub >= 0);
          CHECK(coord.machines[sub] == slot);
          const auto expect = encode_local(*coord.plan, sub + 1, xs[slot][k]);
          CHECK(std::equal(expect.bits.begin(), expect.bits.end(),
                           ts[slot].bits.begin() + offset));
        }
        offset += width;
      }
    }
    const auto est = decode_central_multi(plan, ts);
    CHECK(static_cast<int>(est.value.size()) == d);
    for (const double v : est.value) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("multivariate input validation") {
  const MultivariatePlan plan = plan_multivariate({0x1p-8, {3, 3}, 2});
  CHECK_THROWS_AS(encode_local_multi(plan, 1, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(encode_local_multi(plan, 3, std::vector<double>{0.5, 0.5}), Error);
  auto ts = encode_all(plan, {{0.2, 0.4}, {0.2, 0.4}});
  ts.pop_back();
  try {
    decode_central_multi(plan, ts);
    FAIL("expected protocol violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kProtocolViolation);
  }
}
