#include "modgame/modgame_univariate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "modgame/error.hpp"
#include "modgame/normal.hpp"

namespace modgame {

namespace {

int floor_log2(std::int64_t value) {
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(value))) - 1;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

DyadicInterval empty_interval() { return {0, 0, 0, false}; }

// {x in set : f(x) == want}, with f continued periodically outside [0,1].
// The result must again be a single interval.
DyadicInterval restrict_to(const DyadicInterval& set, GrayFunction f, Bit want) {
  if (f.index < 0) return want == 0 ? set : empty_interval();
  require(f.index <= kMaxResolution, ErrorKind::kResolutionOverflow,
          "finer Gray index out of range");

  const int exponent = std::max(set.exponent(), f.index);
  const DyadicInterval scaled = set.rescaled(exponent);
  const std::int64_t step = std::int64_t{1} << (exponent - f.index);
  const std::int64_t lo = scaled.lower_numerator();
  const std::int64_t hi = scaled.upper_numerator();
  require((hi - lo) / step < (std::int64_t{1} << 20),
          ErrorKind::kResolutionOverflow, "finer interval search too wide");

  std::int64_t kept_lo = 0;
  std::int64_t kept_hi = 0;
  bool found = false;
  bool gap = false;
  for (std::int64_t piece = lo; piece < hi;) {
    const std::int64_t next = std::min(hi, (floor_div(piece, step) + 1) * step);
    const double x = std::ldexp(static_cast<double>(piece), -exponent);
    const Bit value = f.conjugate ? periodic_conj_gray_bit(f.index, x)
                                  : periodic_gray_bit(f.index, x);
    if (value == want) {
      if (!found) {
        kept_lo = piece;
        found = true;
      } else if (gap) {
        fail(ErrorKind::kProtocolInvariantViolation,
             "finer localization set is not an interval");
      }
      kept_hi = next;
    } else if (found) {
      gap = true;
    }
    piece = next;
  }
  require(found, ErrorKind::kProtocolInvariantViolation,
          "finer localization set is empty");
  return {kept_lo, kept_hi, exponent, false};
}

// Index k of the finer function equal to the plain Gray function g_t, for the
// branch where the finer votes alone pin down a cell of width 2^-(E-4).
int finer_slot_for_gray(int precision, int log_n, int t) {
  if (precision - log_n == 3 && t == 1) return 1;
  return t - precision + log_n + 4;
}

struct Tallies {
  std::vector<Bit> crude;           // crude[k-1] = U_k
  std::vector<int> finer_ones;      // per finer function
  std::int64_t plain_ones = 0;
  std::int64_t conj_ones = 0;
  std::int64_t sign_ones = 0;
};

Tallies collect_tallies(const UnivariatePlan& plan, const TranscriptBatch& batch,
                        int crude_needed) {
  require(batch.machine_count() == static_cast<std::size_t>(plan.machine_count()),
          ErrorKind::kProtocolViolation, "transcript count does not match plan");
  Tallies t;
  t.crude.assign(static_cast<std::size_t>(std::max(crude_needed, 0)), 0);
  t.finer_ones.assign(static_cast<std::size_t>(plan.log_n()), 0);
  for (int slot = 0; slot < plan.machine_count(); ++slot) {
    const auto roles = plan.roles(slot);
    const auto bits = batch.machine(static_cast<std::size_t>(slot));
    if (bits.size() != roles.size()) {
      fail(ErrorKind::kProtocolViolation,
           "machine " + std::to_string(slot + 1) + " transcript has " +
               std::to_string(bits.size()) + " bits, budget is " +
               std::to_string(roles.size()));
    }
    for (std::size_t i = 0; i < roles.size(); ++i) {
      const Bit bit = bits[i];
      if (bit > 1) fail(ErrorKind::kProtocolViolation, "bit value outside {0,1}");
      const BitRole& role = roles[i];
      switch (role.kind) {
        case RoleKind::kCrude:
          if (role.index <= crude_needed) t.crude[role.index - 1] = bit;
          break;
        case RoleKind::kFiner:
          t.finer_ones[role.index - 1] += bit;
          break;
        case RoleKind::kRefinePlain:
          t.plain_ones += bit;
          break;
        case RoleKind::kRefineConjugate:
          t.conj_ones += bit;
          break;
        case RoleKind::kSign:
          t.sign_ones += bit;
          break;
        case RoleKind::kPadding:
          break;
      }
    }
  }
  return t;
}

UnivariateEstimate decode_two_stage(const UnivariatePlan& plan,
                                    const TranscriptBatch& batch,
                                    DecodeDiagnostics diag) {
  const int e = plan.crude_precision();
  const int l = plan.log_n();
  const int crude_needed = e - l - 3;
  const Tallies t = collect_tallies(plan, batch, crude_needed);

  // Crude interval.
  DyadicInterval crude = DyadicInterval::unit();
  if (e - l >= 4) {
    const DyadicInterval core = decode(t.crude);
    diag.crude_core = core;
    crude = core.stretched(e - l - 2);
  } else {
    diag.crude_core = crude;
  }
  diag.crude = crude;

  // Majority votes and finer interval.
  diag.majority.resize(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) {
    diag.majority[k] = 2 * t.finer_ones[k] >= l ? 1 : 0;
  }
  DyadicInterval finer = DyadicInterval::unit();
  if (e - l <= 3 && e <= 4) {
    diag.finer_core = finer;
  } else if (e - l <= 3) {
    std::vector<Bit> gray(static_cast<std::size_t>(e - 4));
    for (int g = 1; g <= e - 4; ++g) {
      gray[g - 1] = diag.majority[finer_slot_for_gray(e, l, g) - 1];
    }
    const DyadicInterval core = decode(gray);
    diag.finer_core = core;
    finer = core.stretched(e - 3);
  } else {
    DyadicInterval core = crude;
    for (int k = 1; k <= l; ++k) {
      core = restrict_to(core, finer_function(e, l, k), diag.majority[k - 1]);
    }
    diag.finer_core = core;
    finer = core.stretched(e - 3);
  }
  diag.finer = finer;

  // Refinement through the aligned monotone branch.
  const Alignment branch = alignment_case(finer, plan.sigma());
  diag.branch = branch;
  const bool conjugate = branch == Alignment::kConjugate;
  const MonotoneBranch monotone(finer, refinement_wave(e, conjugate), plan.sigma());
  const double mean = static_cast<double>(conjugate ? t.conj_ones : t.plain_ones) /
                      static_cast<double>(plan.n());
  diag.refinement_mean = mean;
  diag.raw_estimate = invert_phi(monotone, mean);
  return {truncate(diag.raw_estimate, 0.0, 1.0), std::move(diag)};
}

}  // namespace

std::int64_t ProtocolConfig::total_budget() const {
  return std::accumulate(budgets.begin(), budgets.end(), std::int64_t{0});
}

void ProtocolConfig::validate() const {
  require(std::isfinite(sigma) && sigma >= kMinSigma, ErrorKind::kInvalidArgument,
          "sigma must be finite and at least 2^-40");
  require(!budgets.empty(), ErrorKind::kInvalidArgument, "need at least one machine");
  for (const int b : budgets) {
    require(b >= 1, ErrorKind::kInvalidArgument, "every budget must be >= 1 bit");
  }
  require(dimension >= 1, ErrorKind::kInvalidArgument, "dimension must be >= 1");
}

const char* to_string(PlanCase plan_case) {
  switch (plan_case) {
    case PlanCase::kLocalizeOnly:
      return "LOCALIZE_ONLY";
    case PlanCase::kTwoStage:
      return "TWO_STAGE";
    case PlanCase::kBudgetCapped:
      return "BUDGET_CAPPED";
    case PlanCase::kOneBitSign:
      return "ONE_BIT_SIGN";
  }
  return "UNKNOWN";
}

GrayFunction finer_function(int precision, int log_n, int j) {
  const int base = precision - log_n;
  if (j == 1) return {base - 2, false};
  if (j == 2) return {base - 2, true};
  return {base - 4 + j, false};
}

std::vector<int> cap_budgets(std::span<const int> budgets, std::int64_t target) {
  const auto m = static_cast<std::int64_t>(budgets.size());
  require(target >= m, ErrorKind::kInvalidArgument,
          "cap target below one bit per machine");
  const auto level_sum = [&](std::int64_t level) {
    std::int64_t sum = 0;
    for (const int b : budgets) sum += std::min<std::int64_t>(b, level);
    return sum;
  };
  require(level_sum(std::numeric_limits<int>::max()) >= target,
          ErrorKind::kInvalidArgument, "cap target exceeds total budget");

  // Largest level whose clipped sum stays within the target.
  std::int64_t lo = 1;
  std::int64_t hi = *std::max_element(budgets.begin(), budgets.end());
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (level_sum(mid) <= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  std::vector<int> out(budgets.size());
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    out[i] = static_cast<int>(std::min<std::int64_t>(budgets[i], lo));
  }
  // Remaining bits sit one level up on the highest-indexed machines, which
  // the one-at-a-time reduction reaches last.
  std::int64_t remaining = target - level_sum(lo);
  for (std::size_t i = budgets.size(); i-- > 0 && remaining > 0;) {
    if (budgets[i] > lo) {
      ++out[i];
      --remaining;
    }
  }
  return out;
}

int refinement_sample_size(std::int64_t spare_bits) {
  require(spare_bits >= 2, ErrorKind::kInvalidArgument,
          "two-stage plan needs at least two spare bits");
  std::int64_t s = 1;
  while (true) {
    const std::int64_t next = s + 1;
    const std::int64_t log_next = floor_log2(next);
    if (log_next * log_next + 2 * next > spare_bits) break;
    s = next;
  }
  return static_cast<int>(s);
}

UnivariatePlan plan_budget(const ProtocolConfig& config) {
  config.validate();
  UnivariatePlan plan;
  plan.sigma_ = config.sigma;
  plan.budgets_ = config.budgets;
  const int m = config.machine_count();
  plan.role_offsets_.reserve(static_cast<std::size_t>(m) + 1);
  plan.role_offsets_.push_back(0);

  const auto close_machine = [&](int slot) {
    for (int pad = plan.effective_[slot]; pad < plan.budgets_[slot]; ++pad) {
      plan.roles_.push_back({RoleKind::kPadding, 0, 0});
    }
    plan.role_offsets_.push_back(plan.roles_.size());
  };

  if (config.sigma >= 1.0) {
    plan.plan_case_ = plan.effective_case_ = PlanCase::kOneBitSign;
    plan.effective_.assign(static_cast<std::size_t>(m), 1);
    for (int slot = 0; slot < m; ++slot) {
      plan.roles_.push_back({RoleKind::kSign, 0, 0});
      close_machine(slot);
    }
    return plan;
  }

  const int e = crude_precision(config.sigma);
  plan.precision_ = e;
  const std::int64_t total = config.total_budget();
  if (total < e + 2) {
    plan.plan_case_ = PlanCase::kLocalizeOnly;
    plan.effective_ = config.budgets;
  } else if (total <= static_cast<std::int64_t>(e) + m) {
    plan.plan_case_ = PlanCase::kTwoStage;
    plan.effective_ = config.budgets;
  } else {
    plan.plan_case_ = PlanCase::kBudgetCapped;
    plan.effective_ = cap_budgets(config.budgets, static_cast<std::int64_t>(e) + m);
  }
  const std::int64_t effective_total =
      std::accumulate(plan.effective_.begin(), plan.effective_.end(), std::int64_t{0});
  plan.effective_case_ =
      effective_total < e + 2 ? PlanCase::kLocalizeOnly : PlanCase::kTwoStage;

  int special = 0;
  if (plan.effective_case_ == PlanCase::kTwoStage) {
    plan.n_ = refinement_sample_size(effective_total - e);
    plan.log_n_ = floor_log2(plan.n_);
    special = plan.log_n_ * plan.log_n_ + 2 * plan.n_;
    for (int j = 1; j <= plan.log_n_; ++j) {
      plan.finer_.push_back(finer_function(e, plan.log_n_, j));
    }
    plan.waves_ = {refinement_wave(e, false), refinement_wave(e, true)};
  }

  int crude = 0;
  const auto push_crude = [&](int count) {
    for (int k = 0; k < count; ++k) {
      ++crude;
      if (crude > kMaxResolution) {
        fail(ErrorKind::kResolutionOverflow,
             "crude Gray index " + std::to_string(crude) + " exceeds " +
                 std::to_string(kMaxResolution));
      }
      plan.roles_.push_back({RoleKind::kCrude, crude, 0});
    }
  };

  const int l = plan.log_n_;
  const int n = plan.n_;
  for (int slot = 0; slot < m; ++slot) {
    const int budget = plan.effective_[slot];
    if (slot < special) {
      push_crude(budget - 1);
      if (slot < l * l) {
        plan.roles_.push_back({RoleKind::kFiner, slot / l + 1, slot % l + 1});
      } else if (slot < l * l + n) {
        plan.roles_.push_back({RoleKind::kRefinePlain, 0, slot - l * l + 1});
      } else {
        plan.roles_.push_back({RoleKind::kRefineConjugate, 0, slot - l * l - n + 1});
      }
    } else {
      push_crude(budget);
    }
    close_machine(slot);
  }
  plan.crude_count_ = crude;
  return plan;
}

Bit evaluate_role(const UnivariatePlan& plan, const BitRole& role, double x) {
  switch (role.kind) {
    case RoleKind::kCrude:
      return gray_bit(role.index, x);
    case RoleKind::kFiner: {
      const GrayFunction& f = plan.finer(role.index);
      return f.conjugate ? conj_gray_bit(f.index, x) : gray_bit(f.index, x);
    }
    case RoleKind::kRefinePlain:
      return wave_bit(plan.wave(false), x);
    case RoleKind::kRefineConjugate:
      return wave_bit(plan.wave(true), x);
    case RoleKind::kSign:
      return x >= 0.0 ? 1 : 0;
    case RoleKind::kPadding:
      return 0;
  }
  return 0;
}

void encode_local_into(const UnivariatePlan& plan, int slot, double x,
                       std::span<Bit> out) {
  const auto roles = plan.roles(slot);
  require(out.size() == roles.size(), ErrorKind::kInvalidArgument,
          "output span does not match machine budget");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    out[i] = evaluate_role(plan, roles[i], x);
  }
}

Transcript encode_local(const UnivariatePlan& plan, int machine, double x) {
  require(machine >= 1 && machine <= plan.machine_count(),
          ErrorKind::kInvalidArgument, "machine index out of range");
  Transcript out;
  out.machine_index = static_cast<std::uint32_t>(machine);
  out.bits.resize(plan.roles(machine - 1).size());
  encode_local_into(plan, machine - 1, x, out.bits);
  return out;
}

Bit majority_vote(std::span<const Bit> votes) {
  require(!votes.empty(), ErrorKind::kInvalidArgument, "majority of no votes");
  std::size_t ones = 0;
  for (const Bit v : votes) ones += v;
  return 2 * ones >= votes.size() ? 1 : 0;
}

UnivariateEstimate decode_central(const UnivariatePlan& plan,
                                  const TranscriptBatch& batch) {
  DecodeDiagnostics diag;
  diag.plan_case = plan.plan_case();
  diag.effective_case = plan.effective_case();

  switch (plan.effective_case()) {
    case PlanCase::kOneBitSign: {
      const Tallies t = collect_tallies(plan, batch, 0);
      const double fraction =
          static_cast<double>(t.sign_ones) / static_cast<double>(plan.machine_count());
      diag.sign_fraction = fraction;
      diag.raw_estimate = plan.sigma() * normal::quantile(fraction);
      return {truncate(diag.raw_estimate, 0.0, 1.0), std::move(diag)};
    }
    case PlanCase::kLocalizeOnly: {
      const Tallies t = collect_tallies(plan, batch, plan.crude_count());
      const DyadicInterval cell = decode(t.crude);
      diag.crude_core = cell;
      diag.raw_estimate = cell.lower();
      return {diag.raw_estimate, std::move(diag)};
    }
    default:
      return decode_two_stage(plan, batch, std::move(diag));
  }
}

UnivariateEstimate decode_central(const UnivariatePlan& plan,
                                  std::span<const Transcript> transcripts) {
  return decode_central(plan, TranscriptBatch::collect(transcripts, plan.budgets()));
}

std::string describe(const DecodeDiagnostics& d) {
  std::ostringstream out;
  const auto interval = [&](const char* name, const std::optional<DyadicInterval>& i) {
    if (!i) return;
    out << name << "=[" << i->lower() << ", " << i->upper()
        << (i->closed_upper() ? "]" : ")") << "\n";
  };
  out.precision(17);
  out << "case=" << to_string(d.plan_case) << "\n";
  out << "effective_case=" << to_string(d.effective_case) << "\n";
  interval("I1_core", d.crude_core);
  interval("I1", d.crude);
  interval("I2_core", d.finer_core);
  interval("I2", d.finer);
  if (!d.majority.empty()) {
    out << "majority=";
    for (const Bit b : d.majority) out << int{b};
    out << "\n";
  }
  if (d.branch) out << "branch=" << to_string(*d.branch) << "\n";
  if (d.refinement_mean) out << "refinement_mean=" << *d.refinement_mean << "\n";
  if (d.sign_fraction) out << "sign_fraction=" << *d.sign_fraction << "\n";
  out << "raw_estimate=" << d.raw_estimate << "\n";
  return out.str();
}

}  // namespace modgame
