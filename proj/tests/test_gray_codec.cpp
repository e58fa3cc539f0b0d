#include <doctest.h>

#include <set>
#include <vector>

#include "modgame/error.hpp"
#include "modgame/gray_codec.hpp"
#include "support.hpp"

using namespace modgame;
using modgame::test::conj_gray_bit_on_grid;
using modgame::test::gray_bit_on_grid;

namespace {

std::vector<Bit> gray_string(double x, int resolution) {
  std::vector<Bit> bits;
  for (int k = 1; k <= resolution; ++k) bits.push_back(gray_bit(k, x));
  return bits;
}

std::set<double> scan_change_points(int k, bool conjugate, int grid_exponent) {
  std::set<double> out;
  const std::int64_t points = std::int64_t{1} << grid_exponent;
  for (std::int64_t s = 1; s < points; ++s) {
    const auto f = conjugate ? conj_gray_bit_on_grid : gray_bit_on_grid;
    if (f(k, s, grid_exponent) != f(k, s - 1, grid_exponent)) {
      out.insert(std::ldexp(static_cast<double>(s), -grid_exponent));
    }
  }
  return out;
}

std::set<double> as_set(const ChangePointSet& set) {
  const auto points = set.points();
  return {points.begin(), points.end()};
}

}  // namespace

TEST_CASE("truncate clamps to the interval") {
  CHECK(truncate(-0.2, 0.0, 1.0) == 0.0);
  CHECK(truncate(0.4, 0.0, 1.0) == 0.4);
  CHECK(truncate(0.9, 0.2, 0.5) == 0.5);
  CHECK(truncate(0.3, 0.3, 0.3) == 0.3);
  try {
    truncate(0.5, 1.0, 0.0);
    FAIL("expected invalid-interval");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidInterval);
  }
}

TEST_CASE("gray_bit examples") {
  CHECK(gray_bit(1, 0.3) == 0);
  CHECK(gray_bit(2, 0.3) == 1);
  CHECK(gray_bit(1, 1.0) == 1);
  CHECK(gray_bit(-3, 0.7) == 0);
  CHECK(gray_bit(0, 0.7) == 0);
  CHECK(gray_bit(0, 1.0) == 1);
  // Arguments outside [0,1] are clamped first.
  CHECK(gray_bit(1, -5.0) == gray_bit(1, 0.0));
  CHECK(gray_bit(3, 7.0) == gray_bit(3, 1.0));
}

TEST_CASE("conj_gray_bit examples") {
  CHECK(conj_gray_bit(2, 0.6) == 1);
  CHECK(conj_gray_bit(1, 0.3) == 0);
  CHECK(conj_gray_bit(2, 0.1) == 0);
  CHECK(conj_gray_bit(-1, 0.9) == 0);
}

TEST_CASE("gray functions reject indices above the cap") {
  CHECK_NOTHROW(gray_bit(kMaxResolution, 0.5));
  try {
    gray_bit(kMaxResolution + 1, 0.5);
    FAIL("expected resolution-overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kResolutionOverflow);
  }
  CHECK_THROWS_AS(conj_gray_bit(49, 0.5), Error);
  CHECK_THROWS_AS(change_points(49, false), Error);
}

TEST_CASE("periodic gray functions agree on [0,1) and repeat with period 4 cells") {
  auto rng = test::make_rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = test::uniform_int(rng, 0, 20);
    const double x = test::uniform(rng, 0.0, 1.0);
    CHECK(periodic_gray_bit(k, x) == gray_bit(k, x));
    CHECK(periodic_conj_gray_bit(k, x) == conj_gray_bit(k, x));
    const double period = std::ldexp(4.0, -k);
    CHECK(periodic_gray_bit(k, x + period) == periodic_gray_bit(k, x));
    CHECK(periodic_conj_gray_bit(k, x - period) == periodic_conj_gray_bit(k, x));
  }
}

TEST_CASE("gray_bit matches the integer definition on dyadic grids") {
  const int grid = 14;
  for (std::int64_t s = 0; s <= (1 << grid); ++s) {
    const double x = std::ldexp(static_cast<double>(s), -grid);
    for (int k = 0; k <= grid; ++k) {
      REQUIRE(gray_bit(k, x) == gray_bit_on_grid(k, s, grid));
      REQUIRE(conj_gray_bit(k, x) == conj_gray_bit_on_grid(k, s, grid));
    }
  }
}

TEST_CASE("decode examples agree with a brute-force grid scan") {
  const std::vector<std::vector<Bit>> cases = {{0, 1, 1}, {0}, {1, 1}};
  const std::vector<DyadicInterval> expected = {
      {2, 3, 3, false}, {0, 1, 1, false}, {2, 3, 2, false}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const DyadicInterval got = decode(cases[i]);
    CHECK(got == expected[i]);
    const auto scan = test::scan_decode(cases[i], 12);
    REQUIRE(scan.found);
    CHECK(got.lower() == scan.lower);
    CHECK(got.upper() == scan.upper);
  }
  CHECK(decode(std::vector<Bit>{0, 1, 1}).lower() == 0.25);
  CHECK(decode(std::vector<Bit>{0, 1, 1}).upper() == 0.375);
}

TEST_CASE("decode: the cell at x = 1 is closed") {
  // Binary 111 is Gray 100.
  const DyadicInterval last = decode(std::vector<Bit>{1, 0, 0});
  CHECK(last.lower() == 0.875);
  CHECK(last.upper() == 1.0);
  CHECK(last.closed_upper());
  CHECK(last.contains(1.0));
  CHECK_FALSE(decode(std::vector<Bit>{0, 1, 1}).contains(0.375));
}

TEST_CASE("decode rejects bad input") {
  CHECK_THROWS_AS(decode(std::vector<Bit>{}), Error);
  CHECK_THROWS_AS(decode(std::vector<Bit>(49, 0)), Error);
  CHECK_THROWS_AS(decode(std::vector<Bit>{0, 2}), Error);
  CHECK_NOTHROW(decode(std::vector<Bit>(48, 1)));
}

TEST_CASE("decode matches the grid scan for every string up to K = 8") {
  for (int resolution = 1; resolution <= 8; ++resolution) {
    for (std::int64_t word = 0; word < (std::int64_t{1} << resolution); ++word) {
      std::vector<Bit> bits(static_cast<std::size_t>(resolution));
      for (int k = 0; k < resolution; ++k) bits[k] = (word >> k) & 1;
      const auto scan = test::scan_decode(bits, resolution + 2);
      REQUIRE(scan.found);
      const DyadicInterval got = decode(bits);
      CHECK(got.lower() == scan.lower);
      CHECK(got.upper() == scan.upper);
    }
  }
}

TEST_CASE("adjacency and bijectivity for all K <= 12") {
  for (int resolution = 1; resolution <= 12; ++resolution) {
    const std::int64_t cells = std::int64_t{1} << resolution;
    std::set<std::int64_t> seen;
    std::vector<Bit> previous;
    for (std::int64_t s = 0; s < cells; ++s) {
      const double x = (static_cast<double>(s) + 0.5) / static_cast<double>(cells);
      const auto bits = gray_string(x, resolution);
      if (!previous.empty()) {
        int differences = 0;
        for (int k = 0; k < resolution; ++k) differences += bits[k] != previous[k];
        REQUIRE(differences == 1);
      }
      const DyadicInterval cell = decode(bits);
      REQUIRE(cell.lower_numerator() == s);
      REQUIRE(cell.exponent() == resolution);
      seen.insert(cell.lower_numerator());
      previous = bits;
    }
    CHECK(static_cast<std::int64_t>(seen.size()) == cells);
  }
}

TEST_CASE("roundtrip: x lies in the decoded cell of its own Gray string") {
  auto rng = test::make_rng(3);
  for (int trial = 0; trial < 5000; ++trial) {
    const int resolution = test::uniform_int(rng, 1, 40);
    const double x = test::uniform(rng, 0.0, 1.0);
    CHECK(decode(gray_string(x, resolution)).contains(x));
  }
  CHECK(decode(gray_string(1.0, 10)).contains(1.0));
  CHECK(decode(gray_string(0.0, 10)).contains(0.0));
}

TEST_CASE("change point examples") {
  CHECK(change_points(1, false).points() == std::vector<double>{0.5});
  CHECK(change_points(2, false).points() == std::vector<double>{0.25, 0.75});
  CHECK(change_points(3, true).points() == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(change_points(1, true).empty());
  CHECK_THROWS_AS(change_points(0, false), Error);
}

TEST_CASE("change point sets equal the flips found by scanning") {
  for (int k = 1; k <= 10; ++k) {
    CHECK(as_set(change_points(k, false)) == scan_change_points(k, false, 12));
    CHECK(as_set(change_points(k, true)) == scan_change_points(k, true, 12));
  }
}

TEST_CASE("lattice property for k <= 11") {
  for (int k = 1; k <= 11; ++k) {
    std::set<double> union_of_plain;
    std::size_t total = 0;
    for (int i = 1; i <= k; ++i) {
      const auto points = change_points(i, false).points();
      total += points.size();
      union_of_plain.insert(points.begin(), points.end());
    }
    CHECK(union_of_plain.size() == total);  // pairwise disjoint
    CHECK(as_set(change_points(k + 1, true)) == union_of_plain);
  }
}

TEST_CASE("large change point sets stay lazy") {
  const ChangePointSet set = change_points(48, false);
  CHECK(set.size() == (std::int64_t{1} << 47));
  CHECK(set[0] == std::ldexp(1.0, -48));
  CHECK_THROWS_AS(set.points(), Error);
  CHECK(dist_to_set(0.5, set) == std::ldexp(1.0, -48));
}

TEST_CASE("dist_to_set examples") {
  CHECK(dist_to_set(0.3, change_points(1, false)) == doctest::Approx(0.2).epsilon(1e-15));
  const DyadicInterval cell{2, 3, 3, false};
  CHECK(dist_to_set(0.5, cell) == 0.125);
  CHECK(dist_to_set(0.3, cell) == 0.0);
  CHECK(dist_to_set(0.1, cell) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK_THROWS_AS(dist_to_set(0.3, change_points(1, true)), Error);
  CHECK_THROWS_AS(dist_to_set(0.3, DyadicInterval{1, 1, 2, false}), Error);
}

TEST_CASE("dist_to_set against brute force") {
  auto rng = test::make_rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = test::uniform_int(rng, 1, 10);
    const bool conjugate = trial % 2 == 1;
    const ChangePointSet set = change_points(k, conjugate);
    if (set.empty()) continue;
    const double x = test::uniform(rng, -0.2, 1.2);
    double best = 1e9;
    for (const double p : set.points()) best = std::min(best, std::abs(x - p));
    CHECK(dist_to_set(x, set) == best);
  }
}

TEST_CASE("Gray robustness: far from change points the decoded cell is near x") {
  auto rng = test::make_rng(8);
  int checked = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const int resolution = test::uniform_int(rng, 1, 12);
    const double x = test::uniform(rng, 0.0, 1.0);
    const double margin = std::ldexp(1.0, -(resolution + 2));
    bool far = true;
    for (int k = 1; k <= resolution && far; ++k) {
      far = dist_to_set(x, change_points(k, false)) > margin;
    }
    if (!far) continue;
    ++checked;
    CHECK(dist_to_set(x, decode(gray_string(x, resolution))) <= margin);
  }
  CHECK(checked > 1000);
}

TEST_CASE("DyadicInterval arithmetic") {
  const DyadicInterval cell{1, 2, 2, false};  // [0.25, 0.5)
  const DyadicInterval wide = cell.stretched(3);
  CHECK(wide.lower() == 0.125);
  CHECK(wide.upper() == 0.625);
  CHECK_FALSE(wide.closed_upper());
  CHECK(wide.encloses(cell));
  CHECK_FALSE(cell.encloses(wide));
  CHECK(cell.stretched(1).lower() == -0.25);
  CHECK(cell == DyadicInterval(4, 8, 4, false));
  CHECK_FALSE(cell == DyadicInterval(4, 8, 4, true));
  CHECK(cell.intersect(DyadicInterval{3, 5, 3, false}) == DyadicInterval{3, 4, 3, false});
  CHECK(cell.intersect(DyadicInterval{3, 4, 2, false}).empty());
  CHECK(DyadicInterval::unit().contains(1.0));
  CHECK_THROWS_AS(DyadicInterval(3, 2, 2, false), Error);
  CHECK_THROWS_AS(cell.stretched(-1), Error);
  CHECK_THROWS_AS(cell.rescaled(1), Error);
}
