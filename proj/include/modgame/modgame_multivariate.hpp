#pragma once

// Multivariate MODGAME: split each machine's budget across the d coordinates,
// run one univariate protocol per coordinate, stack the estimates.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "modgame/modgame_univariate.hpp"
#include "modgame/transcript.hpp"

namespace modgame {

/// b_i^(k) for every machine i and coordinate k.
///
/// Rows follow the stable nondecreasing sort of the budgets; row r belongs to
/// caller-facing machine slot permutation[r] (0-based).
struct CoordinateBudgetMatrix {
  int machines = 0;
  int dimension = 0;
  std::vector<int> entries;      // row-major, machines x dimension
  std::vector<int> permutation;  // sorted row -> original slot

  int at(int row, int k) const { return entries[std::size_t(row) * dimension + k]; }
  /// Budget of original machine `slot` for coordinate k (0-based).
  int for_machine(int slot, int k) const;
  std::int64_t column_sum(int k) const;
};

/// Writes 1..d repeatedly and cuts the sequence into runs of the sorted
/// budgets; entry (i,k) counts the k's in run i. Checked against the closed
/// form before returning.
CoordinateBudgetMatrix allocate_coordinate_budgets(std::span<const int> budgets,
                                                   int dimension);

/// floor((S_i - k)/d) - floor((S_{i-1} - k)/d), with k 1-based and S the
/// cumulative sums of the sorted budgets (S_0 = 0).
int closed_form_budget(std::int64_t cumulative_before, std::int64_t cumulative,
                       int k, int dimension);

/// m' = (1/d) sum_i min(b_i, d).
double effective_sample_size(std::span<const int> budgets, int dimension);

class MultivariatePlan {
 public:
  struct Coordinate {
    std::optional<UnivariatePlan> plan;  // empty when no machine has bits for k
    std::vector<int> machines;           // original slots, increasing
  };

  const CoordinateBudgetMatrix& matrix() const { return matrix_; }
  double sigma() const { return sigma_; }
  int dimension() const { return matrix_.dimension; }
  int machine_count() const { return static_cast<int>(budgets_.size()); }
  const std::vector<int>& budgets() const { return budgets_; }
  const Coordinate& coordinate(int k) const { return coordinates_[k]; }

  /// Position of machine `slot`'s coordinate-k sub-transcript inside its
  /// transcript, and that coordinate's sub-protocol slot (-1 if none).
  int offset(int slot, int k) const { return offsets_[std::size_t(slot) * dimension() + k]; }
  int sub_slot(int slot, int k) const { return sub_slots_[std::size_t(slot) * dimension() + k]; }

  friend MultivariatePlan plan_multivariate(const ProtocolConfig& config);

 private:
  MultivariatePlan() = default;

  CoordinateBudgetMatrix matrix_;
  double sigma_ = 1.0;
  std::vector<int> budgets_;
  std::vector<Coordinate> coordinates_;
  std::vector<int> offsets_;
  std::vector<int> sub_slots_;
};

/// Sub-protocols list their machines in caller-facing order, so d = 1 gives
/// exactly the univariate plan.
MultivariatePlan plan_multivariate(const ProtocolConfig& config);

Transcript encode_local_multi(const MultivariatePlan& plan, int machine,
                              std::span<const double> x);
void encode_local_multi_into(const MultivariatePlan& plan, int slot,
                             std::span<const double> x, std::span<Bit> out);

struct MultivariateEstimate {
  std::vector<double> value;
  std::vector<std::optional<DecodeDiagnostics>> diagnostics;
};

/// Coordinates without any bits are estimated at 0.5.
MultivariateEstimate decode_central_multi(const MultivariatePlan& plan,
                                          const TranscriptBatch& batch);
MultivariateEstimate decode_central_multi(const MultivariatePlan& plan,
                                          std::span<const Transcript> transcripts);

}  // namespace modgame
