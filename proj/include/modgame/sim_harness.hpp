#pragma once

// Seeded Monte Carlo estimation of the worst-case MSE over a grid of true
// means, for MODGAME and the reference estimators.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modgame/baselines.hpp"
#include "modgame/modgame_univariate.hpp"
#include "modgame/rates.hpp"

namespace modgame {

inline constexpr const char* kLibraryVersion = "0.1.0";
/// Environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "MODGAME_WORKERS";

enum class Estimator { kModgame, kMultiModgame, kNaiveQuant, kSampleMean };

/// "modgame", "multi-modgame", "naive-quant", "sample-mean".
const char* to_string(Estimator estimator);
Estimator parse_estimator(std::string_view name);

/// Decimal or "2^-k" / "2^k".
double parse_sigma(std::string_view text);

struct ExperimentSpec {
  Estimator estimator = Estimator::kModgame;
  ProtocolConfig config;
  std::vector<std::vector<double>> theta_grid;  // points of dimension d
  std::int64_t replications = 1;
  std::uint64_t seed = 1;
  Reconstruction reconstruction = Reconstruction::kMidpoint;  // naive-quant only

  void validate() const;
};

/// j/32 for j = 0..32 when d = 1; nine points t(1,...,1), t = j/8, otherwise.
std::vector<std::vector<double>> default_theta_grid(int dimension);
/// 10^4 for d = 1, 10^3 otherwise.
std::int64_t default_replications(int dimension);

struct ThetaResult {
  std::vector<double> theta;
  double mse = 0.0;
  std::optional<double> standard_error;  // empty when R = 1
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ThetaResult> per_theta;
  double max_mse = 0.0;
  std::size_t argmax = 0;
  double mean_mse = 0.0;
  RatePhase theory;
  double wall_seconds = 0.0;
};

/// Reusable per-thread state for one spec.
class TrialRunner {
 public:
  explicit TrialRunner(const ExperimentSpec& spec);
  ~TrialRunner();
  TrialRunner(TrialRunner&&) noexcept;

  /// Squared error of one replication at grid point theta_index.
  double run(std::size_t theta_index, std::int64_t replication);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

double run_trial(const ExperimentSpec& spec, std::size_t theta_index,
                 std::int64_t replication);

/// Counter for sample `coordinate` of machine `machine` (both 0-based) in a
/// given trial; the block yields that sample and its neighbour in the pair.
struct SampleStream {
  std::uint64_t seed;
  std::size_t theta_index;
  std::int64_t replication;
  int dimension;

  /// Fills out[g] with the g-th standard normal, g = machine * d + coordinate.
  void fill(std::span<double> out) const;
};

/// From the environment variable, else the hardware thread count.
int default_worker_count();

/// Results are identical for every worker count.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 0);

/// fig5a, fig5b, fig5c, fig6.
std::vector<ExperimentSpec> preset(std::string_view name);
std::vector<std::string> preset_names();

RatePhase theory_rate(const ExperimentSpec& spec);

// Output formats. The summary CSV has one row per experiment (theta is the
// grid point attaining the max MSE); the per-theta CSV one row per grid point.
// Neither contains timing, so reruns are byte-identical.
void write_summary_csv(std::ostream& out, std::span<const ExperimentResult> results);
void write_theta_csv(std::ostream& out, std::span<const ExperimentResult> results);
nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(std::span<const ExperimentResult> results);

nlohmann::json spec_to_json(const ExperimentSpec& spec);
/// Missing fields take the documented defaults; see README for the schema.
ExperimentSpec spec_from_json(const nlohmann::json& doc);

/// Shortest decimal that reads back to the same double.
std::string format_real(double value);

}  // namespace modgame
