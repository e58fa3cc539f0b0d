#include "cli_app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "modgame/error.hpp"
#include "modgame/modgame_univariate.hpp"
#include "modgame/rates.hpp"
#include "modgame/sim_harness.hpp"
#include "modgame/transcript.hpp"

namespace modgame::cli {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct RateArgs {
  std::string sigma;
  int machines = 0;
  long long total_bits = 0;
  int dim = 1;
  std::vector<int> budgets;
};

struct SimulateArgs {
  std::string config;
  std::string estimator = "modgame";
  std::string sigma = "2^-8";
  int machines = 100;
  int bits = 5;
  std::vector<int> budgets;
  int dim = 1;
  long long reps = 0;
  unsigned long long seed = 1;
  std::vector<double> theta;
  std::string reconstruction = "midpoint";
  std::string out = "-";
  std::string format = "csv";
  bool summary = false;
  int workers = 0;
};

struct PresetArgs {
  std::string name;
  std::string out = "results";
  long long reps = 0;
  unsigned long long seed = 1;
  int workers = 0;
};

struct InspectArgs {
  std::string sigma = "2^-8";
  std::vector<int> budgets;
  double theta = 0.5;
  unsigned long long seed = 1;
  long long rep = 0;
  bool noise_free = false;
};

// Equal split of `total` bits over `machines`, remainder on the first ones.
std::vector<int> spread(long long total, int machines) {
  require(machines >= 1, ErrorKind::kInvalidArgument, "--machines must be >= 1");
  require(total >= machines, ErrorKind::kInvalidArgument,
          "--total-bits must be at least --machines");
  std::vector<int> out(static_cast<std::size_t>(machines),
                       static_cast<int>(total / machines));
  for (long long i = 0; i < total % machines; ++i) ++out[i];
  return out;
}

int cmd_rate(const RateArgs& a, const CLI::App& sub, std::ostream& out) {
  const double sigma = parse_sigma(a.sigma);
  std::vector<int> budgets = a.budgets;
  if (budgets.empty()) {
    require(sub.count("--machines") && sub.count("--total-bits"),
            ErrorKind::kInvalidArgument,
            "give --machines and --total-bits, or --budgets");
    budgets = spread(a.total_bits, a.machines);
  } else {
    const long long sum = std::accumulate(budgets.begin(), budgets.end(), 0LL);
    require(!sub.count("--machines") || a.machines == static_cast<int>(budgets.size()),
            ErrorKind::kInvalidArgument, "--machines disagrees with --budgets");
    require(!sub.count("--total-bits") || a.total_bits == sum,
            ErrorKind::kInvalidArgument, "--total-bits disagrees with --budgets");
  }
  const long long total = std::accumulate(budgets.begin(), budgets.end(), 0LL);
  const RatePhase r = a.dim == 1
                          ? univariate_rate(total, static_cast<long long>(budgets.size()), sigma)
                          : multivariate_rate(budgets, a.dim, sigma);
  out << "phase " << to_string(r.phase) << "\n";
  out << "rate " << format_real(r.rate) << "\n";
  return 0;
}

ExperimentSpec simulate_spec(const SimulateArgs& a, const CLI::App& sub) {
  ExperimentSpec spec;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    require(static_cast<bool>(in), ErrorKind::kInvalidArgument,
            "cannot open config '" + a.config + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kInvalidArgument, std::string("bad config: ") + e.what());
    }
    spec = spec_from_json(doc);
    if (sub.count("--reps")) spec.replications = a.reps;
    if (sub.count("--seed")) spec.seed = a.seed;
  } else {
    spec.estimator = parse_estimator(a.estimator);
    spec.config.sigma = parse_sigma(a.sigma);
    spec.config.dimension = a.dim;
    spec.config.budgets = a.budgets.empty()
                              ? std::vector<int>(static_cast<std::size_t>(
                                                     std::max(a.machines, 0)),
                                                 a.bits)
                              : a.budgets;
    if (a.theta.empty()) {
      spec.theta_grid = default_theta_grid(a.dim);
    } else {
      for (const double t : a.theta) {
        spec.theta_grid.emplace_back(static_cast<std::size_t>(std::max(a.dim, 1)), t);
      }
    }
    spec.replications = a.reps > 0 ? a.reps : default_replications(a.dim);
    spec.seed = a.seed;
    require(a.reconstruction == "midpoint" || a.reconstruction == "left-endpoint",
            ErrorKind::kInvalidArgument,
            "--reconstruction must be midpoint or left-endpoint");
    spec.reconstruction = a.reconstruction == "midpoint" ? Reconstruction::kMidpoint
                                                         : Reconstruction::kLeftEndpoint;
  }
  spec.validate();
  return spec;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  require(static_cast<bool>(file), ErrorKind::kInvalidArgument,
          "cannot write '" + path + "'");
  file << text;
}

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, std::ostream& out) {
  const ExperimentSpec spec = simulate_spec(a, sub);
  require(a.format == "csv" || a.format == "json", ErrorKind::kInvalidArgument,
          "--format must be csv or json");
  const std::vector<ExperimentResult> results{run_experiment(spec, a.workers)};
  std::ostringstream text;
  if (a.format == "json") {
    text << to_json(std::span<const ExperimentResult>(results)).dump(2) << "\n";
  } else if (a.summary) {
    write_summary_csv(text, results);
  } else {
    write_theta_csv(text, results);
  }
  write_output(a.out, text.str(), out);
  return 0;
}

int cmd_preset(const PresetArgs& a, const CLI::App& sub, std::ostream& out) {
  std::vector<ExperimentSpec> specs = preset(a.name);
  for (auto& spec : specs) {
    if (sub.count("--reps")) spec.replications = a.reps;
    spec.seed = a.seed;
  }
  std::vector<ExperimentResult> results;
  results.reserve(specs.size());
  for (const auto& spec : specs) results.push_back(run_experiment(spec, a.workers));

  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  const auto write = [&](const std::string& file, const std::string& text) {
    const auto path = (dir / file).string();
    write_output(path, text, out);
    out << path << "\n";
  };
  std::ostringstream summary, theta;
  write_summary_csv(summary, results);
  write_theta_csv(theta, results);
  write(a.name + ".csv", summary.str());
  write(a.name + "_theta.csv", theta.str());
  write(a.name + ".json",
        to_json(std::span<const ExperimentResult>(results)).dump(2) + "\n");
  return 0;
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  ProtocolConfig cfg{parse_sigma(a.sigma), a.budgets, 1};
  require(!cfg.budgets.empty(), ErrorKind::kInvalidArgument, "--budgets is required");
  require(a.theta >= 0.0 && a.theta <= 1.0, ErrorKind::kInvalidArgument,
          "--theta must lie in [0,1]");
  require(a.rep >= 0 && a.rep <= 0xFFFFFFFFLL, ErrorKind::kInvalidArgument,
          "--rep out of range");
  const UnivariatePlan plan = plan_budget(cfg);

  std::vector<double> noise(cfg.budgets.size(), 0.0);
  if (!a.noise_free) SampleStream{a.seed, 0, a.rep, 1}.fill(noise);

  std::vector<Transcript> transcripts;
  for (int i = 0; i < plan.machine_count(); ++i) {
    const double x = a.theta + cfg.sigma * noise[i];
    transcripts.push_back(encode_local(plan, i + 1, x));
  }
  out.precision(17);
  out << "sigma " << format_real(cfg.sigma) << "\n";
  out << "theta " << format_real(a.theta) << "\n";
  if (plan.effective_case() == PlanCase::kTwoStage) {
    out << "n " << plan.n() << "\n";
  }
  for (const Transcript& t : transcripts) {
    std::string bits;
    for (const Bit b : t.bits) bits.push_back(b ? '1' : '0');
    out << "machine " << t.machine_index << " bits " << bits << " frame "
        << to_hex(encode_frame(t)) << "\n";
  }
  const UnivariateEstimate est = decode_central(plan, transcripts);
  out << describe(est.diagnostics);
  out << "estimate " << format_real(est.value) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Communication-constrained Gaussian mean estimation (MODGAME)"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate", "Print the minimax rate and its phase");
  rate_cmd->add_option("--sigma", rate.sigma, "Noise level, decimal or 2^-k")->required();
  rate_cmd->add_option("--machines", rate.machines, "Number of machines m");
  rate_cmd->add_option("--total-bits", rate.total_bits, "Total budget B");
  rate_cmd->add_option("--dim", rate.dim, "Dimension d")->default_val(1);
  rate_cmd->add_option("--budgets", rate.budgets, "Per-machine budgets, comma separated")
      ->delimiter(',');

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one Monte Carlo sweep");
  sim_cmd->add_option("--config", sim.config, "JSON experiment file (overrides spec flags)");
  sim_cmd->add_option("--estimator", sim.estimator,
                      "modgame | multi-modgame | naive-quant | sample-mean")
      ->default_val("modgame");
  sim_cmd->add_option("--sigma", sim.sigma, "Noise level, decimal or 2^-k")
      ->default_val("2^-8");
  sim_cmd->add_option("--machines", sim.machines, "Number of machines m")->default_val(100);
  auto* bits_opt =
      sim_cmd->add_option("--bits", sim.bits, "Bits per machine")->default_val(5);
  sim_cmd->add_option("--budgets", sim.budgets, "Per-machine budgets, comma separated")
      ->delimiter(',')
      ->excludes(bits_opt);
  sim_cmd->add_option("--dim", sim.dim, "Dimension d")->default_val(1);
  sim_cmd->add_option("--reps", sim.reps,
                      "Replications per grid point (default 10000, or 1000 for d > 1)");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->default_val(1);
  sim_cmd->add_option("--theta", sim.theta,
                      "Grid values, comma separated (default j/32, or j/8 for d > 1)")
      ->delimiter(',');
  sim_cmd->add_option("--reconstruction", sim.reconstruction,
                      "naive-quant cell value: midpoint | left-endpoint")
      ->default_val("midpoint");
  sim_cmd->add_option("--out", sim.out, "Output file, - for stdout")->default_val("-");
  sim_cmd->add_option("--format", sim.format, "csv | json")->default_val("csv");
  sim_cmd->add_flag("--summary", sim.summary, "CSV with one max-MSE row instead of one row per theta");
  sim_cmd->add_option("--workers", sim.workers,
                      "Worker threads (default $MODGAME_WORKERS or all cores)")
      ->default_val(0);

  PresetArgs pre;
  auto* pre_cmd = app.add_subcommand("preset", "Run one of the standard sweeps");
  pre_cmd->add_option("--name", pre.name, "fig5a | fig5b | fig5c | fig6")->required();
  pre_cmd->add_option("--out", pre.out, "Output directory")->default_val("results");
  pre_cmd->add_option("--reps", pre.reps, "Override replications");
  pre_cmd->add_option("--seed", pre.seed, "RNG seed")->default_val(1);
  pre_cmd->add_option("--workers", pre.workers,
                      "Worker threads (default $MODGAME_WORKERS or all cores)")
      ->default_val(0);

  InspectArgs ins;
  auto* ins_cmd = app.add_subcommand("inspect", "Run one univariate trial and dump it");
  ins_cmd->add_option("--sigma", ins.sigma, "Noise level, decimal or 2^-k")
      ->default_val("2^-8");
  ins_cmd->add_option("--budgets", ins.budgets, "Per-machine budgets, comma separated")
      ->delimiter(',')
      ->required();
  ins_cmd->add_option("--theta", ins.theta, "True mean")->default_val(0.5);
  ins_cmd->add_option("--seed", ins.seed, "RNG seed")->default_val(1);
  ins_cmd->add_option("--rep", ins.rep, "Replication index")->default_val(0);
  ins_cmd->add_flag("--noise-free", ins.noise_free, "Feed every machine x = theta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    // Help requests; exit() prints the help of the subcommand that asked.
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*rate_cmd) return cmd_rate(rate, *rate_cmd, out);
    if (*sim_cmd) return cmd_simulate(sim, *sim_cmd, out);
    if (*pre_cmd) return cmd_preset(pre, *pre_cmd, out);
    if (*ins_cmd) return cmd_inspect(ins, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool usage = e.kind() == ErrorKind::kInvalidArgument ||
                       e.kind() == ErrorKind::kInvalidInterval;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace modgame::cli
