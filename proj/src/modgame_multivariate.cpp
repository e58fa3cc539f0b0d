#include "modgame/modgame_multivariate.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "modgame/error.hpp"

namespace modgame {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

int CoordinateBudgetMatrix::for_machine(int slot, int k) const {
  const auto row = std::find(permutation.begin(), permutation.end(), slot);
  return at(static_cast<int>(row - permutation.begin()), k);
}

std::int64_t CoordinateBudgetMatrix::column_sum(int k) const {
  std::int64_t sum = 0;
  for (int row = 0; row < machines; ++row) sum += at(row, k);
  return sum;
}

int closed_form_budget(std::int64_t cumulative_before, std::int64_t cumulative,
                       int k, int dimension) {
  return static_cast<int>(floor_div(cumulative - k, dimension) -
                          floor_div(cumulative_before - k, dimension));
}

CoordinateBudgetMatrix allocate_coordinate_budgets(std::span<const int> budgets,
                                                   int dimension) {
  require(dimension >= 1, ErrorKind::kInvalidArgument, "dimension must be >= 1");
  require(!budgets.empty(), ErrorKind::kInvalidArgument, "need at least one machine");
  for (const int b : budgets) {
    require(b >= 1, ErrorKind::kInvalidArgument, "every budget must be >= 1 bit");
  }

  CoordinateBudgetMatrix out;
  out.machines = static_cast<int>(budgets.size());
  out.dimension = dimension;
  out.permutation.resize(budgets.size());
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](int a, int b) { return budgets[a] < budgets[b]; });
  out.entries.assign(budgets.size() * dimension, 0);

  // Walk the sequence 1, 2, ..., d, 1, 2, ... one run per sorted machine.
  std::int64_t position = 0;
  for (int row = 0; row < out.machines; ++row) {
    const int b = budgets[out.permutation[row]];
    const std::int64_t before = position;
    for (int step = 0; step < b; ++step, ++position) {
      ++out.entries[std::size_t(row) * dimension + position % dimension];
    }
    for (int k = 0; k < dimension; ++k) {
      if (out.at(row, k) != closed_form_budget(before, position, k + 1, dimension)) {
        fail(ErrorKind::kProtocolInvariantViolation,
             "coordinate budget disagrees with closed form at row " +
                 std::to_string(row));
      }
    }
  }
  return out;
}

double effective_sample_size(std::span<const int> budgets, int dimension) {
  require(dimension >= 1, ErrorKind::kInvalidArgument, "dimension must be >= 1");
  std::int64_t sum = 0;
  for (const int b : budgets) {
    require(b >= 1, ErrorKind::kInvalidArgument, "every budget must be >= 1 bit");
    sum += std::min(b, dimension);
  }
  return static_cast<double>(sum) / dimension;
}

MultivariatePlan plan_multivariate(const ProtocolConfig& config) {
  config.validate();
  const int d = config.dimension;
  const int m = config.machine_count();
  MultivariatePlan plan;
  plan.sigma_ = config.sigma;
  plan.budgets_ = config.budgets;
  plan.matrix_ = allocate_coordinate_budgets(config.budgets, d);

  std::vector<int> row_of(static_cast<std::size_t>(m));
  for (int row = 0; row < m; ++row) row_of[plan.matrix_.permutation[row]] = row;

  plan.offsets_.assign(std::size_t(m) * d, 0);
  plan.sub_slots_.assign(std::size_t(m) * d, -1);
  for (int slot = 0; slot < m; ++slot) {
    int offset = 0;
    for (int k = 0; k < d; ++k) {
      plan.offsets_[std::size_t(slot) * d + k] = offset;
      offset += plan.matrix_.at(row_of[slot], k);
    }
  }

  plan.coordinates_.resize(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto& coord = plan.coordinates_[k];
    ProtocolConfig sub{config.sigma, {}, 1};
    for (int slot = 0; slot < m; ++slot) {
      const int b = plan.matrix_.at(row_of[slot], k);
      if (b == 0) continue;
      plan.sub_slots_[std::size_t(slot) * d + k] = static_cast<int>(coord.machines.size());
      coord.machines.push_back(slot);
      sub.budgets.push_back(b);
    }
    if (!sub.budgets.empty()) coord.plan = plan_budget(sub);
  }
  return plan;
}

void encode_local_multi_into(const MultivariatePlan& plan, int slot,
                             std::span<const double> x, std::span<Bit> out) {
  require(static_cast<int>(x.size()) == plan.dimension(), ErrorKind::kInvalidArgument,
          "sample dimension does not match plan");
  require(out.size() == static_cast<std::size_t>(plan.budgets()[slot]),
          ErrorKind::kInvalidArgument, "output span does not match machine budget");
  for (int k = 0; k < plan.dimension(); ++k) {
    const int sub = plan.sub_slot(slot, k);
    if (sub < 0) continue;
    const UnivariatePlan& coord = *plan.coordinate(k).plan;
    const auto length = coord.roles(sub).size();
    encode_local_into(coord, sub, x[k], out.subspan(plan.offset(slot, k), length));
  }
}

Transcript encode_local_multi(const MultivariatePlan& plan, int machine,
                              std::span<const double> x) {
  require(machine >= 1 && machine <= plan.machine_count(),
          ErrorKind::kInvalidArgument, "machine index out of range");
  Transcript out;
  out.machine_index = static_cast<std::uint32_t>(machine);
  out.bits.resize(static_cast<std::size_t>(plan.budgets()[machine - 1]));
  encode_local_multi_into(plan, machine - 1, x, out.bits);
  return out;
}

MultivariateEstimate decode_central_multi(const MultivariatePlan& plan,
                                          const TranscriptBatch& batch) {
  require(batch.machine_count() == static_cast<std::size_t>(plan.machine_count()),
          ErrorKind::kProtocolViolation, "transcript count does not match plan");
  for (int slot = 0; slot < plan.machine_count(); ++slot) {
    if (batch.machine(slot).size() != static_cast<std::size_t>(plan.budgets()[slot])) {
      fail(ErrorKind::kProtocolViolation,
           "machine " + std::to_string(slot + 1) + " transcript length differs from budget");
    }
  }

  const int d = plan.dimension();
  MultivariateEstimate out;
  out.value.assign(static_cast<std::size_t>(d), 0.5);
  out.diagnostics.resize(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const auto& coord = plan.coordinate(k);
    if (!coord.plan) continue;
    TranscriptBatch sub(coord.plan->budgets());
    for (std::size_t s = 0; s < coord.machines.size(); ++s) {
      const int slot = coord.machines[s];
      const auto source = batch.machine(slot).subspan(plan.offset(slot, k),
                                                      sub.machine(s).size());
      std::copy(source.begin(), source.end(), sub.machine(s).begin());
    }
    UnivariateEstimate estimate = decode_central(*coord.plan, sub);
    out.value[k] = estimate.value;
    out.diagnostics[k] = std::move(estimate.diagnostics);
  }
  return out;
}

MultivariateEstimate decode_central_multi(const MultivariatePlan& plan,
                                          std::span<const Transcript> transcripts) {
  return decode_central_multi(plan,
                              TranscriptBatch::collect(transcripts, plan.budgets()));
}

}  // namespace modgame
