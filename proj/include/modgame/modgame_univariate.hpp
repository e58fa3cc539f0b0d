#pragma once

// Univariate MODGAME: budget planning, local encoding and central decoding.
//
// For sigma < 1 the total budget B = sum b_i is split between crude Gray
// bits (coarse location), finer Gray bits (each function evaluated on
// floor(log2 n) machines and majority-voted) and 2n refinement bits (square
// waves whose averages are inverted through their Gaussian smoothing).
// For sigma >= 1 every machine sends the sign of its sample.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modgame/gray_codec.hpp"
#include "modgame/refinement_kernel.hpp"
#include "modgame/transcript.hpp"

namespace modgame {

/// Smallest supported noise level; keeps every Gray index within range.
inline constexpr double kMinSigma = 0x1p-40;

struct ProtocolConfig {
  double sigma = 1.0;
  std::vector<int> budgets;
  int dimension = 1;

  int machine_count() const { return static_cast<int>(budgets.size()); }
  std::int64_t total_budget() const;
  /// Throws invalid-argument unless sigma >= 2^-40, m >= 1, all b_i >= 1 and
  /// d >= 1.
  void validate() const;
};

enum class PlanCase { kLocalizeOnly, kTwoStage, kBudgetCapped, kOneBitSign };

const char* to_string(PlanCase plan_case);

enum class RoleKind : std::uint8_t {
  kCrude,            // index: global Gray index
  kFiner,            // index: finer function j, vote: 1..floor(log2 n)
  kRefinePlain,      // vote: 1..n
  kRefineConjugate,  // vote: 1..n
  kSign,
  kPadding,
};

struct BitRole {
  RoleKind kind = RoleKind::kPadding;
  int index = 0;
  int vote = 0;

  friend bool operator==(const BitRole&, const BitRole&) = default;
};

/// Gray function backing finer function f_j: f_1 = g_{E-L-2},
/// f_2 = conj g_{E-L-2}, f_j = g_{E-L-4+j} for j >= 3 (L = floor(log2 n)).
struct GrayFunction {
  int index = 0;
  bool conjugate = false;
};
GrayFunction finer_function(int precision, int log_n, int j);

/// Resolved protocol for one configuration. Immutable once built.
class UnivariatePlan {
 public:
  PlanCase plan_case() const { return plan_case_; }
  /// Procedure actually run: kLocalizeOnly, kTwoStage or kOneBitSign. Differs
  /// from plan_case() only for budget-capped plans.
  PlanCase effective_case() const { return effective_case_; }
  double sigma() const { return sigma_; }
  /// E = floor(log2(1/sigma)); meaningless for one-bit-sign plans.
  int crude_precision() const { return precision_; }
  int n() const { return n_; }
  int log_n() const { return log_n_; }
  int machine_count() const { return static_cast<int>(budgets_.size()); }
  const std::vector<int>& budgets() const { return budgets_; }
  /// b'_i actually used (equals budgets() unless budget-capped).
  const std::vector<int>& effective_budgets() const { return effective_; }
  /// Number of crude Gray indices emitted, 1..crude_count().
  int crude_count() const { return crude_count_; }

  /// f_j, 1 <= j <= log_n() (two-stage plans only).
  const GrayFunction& finer(int j) const { return finer_[j - 1]; }
  /// Plain or conjugate refinement wave (two-stage plans only).
  const RefinementWave& wave(bool conjugate) const { return waves_[conjugate ? 1 : 0]; }

  /// Roles of the bits of machine `slot` (0-based), in transmission order.
  std::span<const BitRole> roles(int slot) const {
    return {roles_.data() + role_offsets_[slot],
            role_offsets_[slot + 1] - role_offsets_[slot]};
  }

  friend UnivariatePlan plan_budget(const ProtocolConfig& config);

 private:
  UnivariatePlan() = default;

  PlanCase plan_case_ = PlanCase::kLocalizeOnly;
  PlanCase effective_case_ = PlanCase::kLocalizeOnly;
  double sigma_ = 1.0;
  int precision_ = 0;
  int n_ = 0;
  int log_n_ = 0;
  int crude_count_ = 0;
  std::vector<int> budgets_;
  std::vector<int> effective_;
  std::vector<GrayFunction> finer_;
  std::array<RefinementWave, 2> waves_{};
  std::vector<BitRole> roles_;
  std::vector<std::size_t> role_offsets_;
};

/// Resolves the protocol case and the per-machine bit roles.
/// Throws resolution-overflow if a crude Gray index would exceed 48.
UnivariatePlan plan_budget(const ProtocolConfig& config);

/// Greedy budget reduction for the capped case: lower the largest budgets one
/// bit at a time (lowest machine first among ties) until the sum is `target`.
std::vector<int> cap_budgets(std::span<const int> budgets, std::int64_t target);

/// Largest s with floor(log2 s)^2 + 2 s <= spare_bits (spare_bits >= 2).
int refinement_sample_size(std::int64_t spare_bits);

/// Evaluates one bit role at a local sample.
Bit evaluate_role(const UnivariatePlan& plan, const BitRole& role, double x);

/// Transcript of machine `machine` (1-based) holding sample x.
Transcript encode_local(const UnivariatePlan& plan, int machine, double x);
/// Same, written into a preallocated slot (0-based) of length b_slot.
void encode_local_into(const UnivariatePlan& plan, int slot, double x,
                       std::span<Bit> out);

Bit majority_vote(std::span<const Bit> votes);

struct DecodeDiagnostics {
  PlanCase plan_case = PlanCase::kLocalizeOnly;
  PlanCase effective_case = PlanCase::kLocalizeOnly;
  std::optional<DyadicInterval> crude_core;    // I_1'
  std::optional<DyadicInterval> crude;         // I_1
  std::optional<DyadicInterval> finer_core;    // I_2'
  std::optional<DyadicInterval> finer;         // I_2
  std::optional<Alignment> branch;
  std::vector<Bit> majority;                   // W_1..W_L
  std::optional<double> refinement_mean;
  std::optional<double> sign_fraction;
  /// Unclamped estimate before the final projection onto [0,1].
  double raw_estimate = 0.0;
};

struct UnivariateEstimate {
  double value = 0.0;
  DecodeDiagnostics diagnostics;
};

UnivariateEstimate decode_central(const UnivariatePlan& plan,
                                  const TranscriptBatch& batch);
/// Validates completeness and lengths (protocol-violation) before decoding.
UnivariateEstimate decode_central(const UnivariatePlan& plan,
                                  std::span<const Transcript> transcripts);

std::string describe(const DecodeDiagnostics& diagnostics);

}  // namespace modgame
