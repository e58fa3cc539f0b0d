#include "modgame/sim_harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include "modgame/error.hpp"
#include "modgame/modgame_multivariate.hpp"
#include "modgame/rng.hpp"

namespace modgame {

namespace {

constexpr double kSigma2m8 = 0x1p-8;

bool uniform_budgets(const std::vector<int>& budgets) {
  return std::adjacent_find(budgets.begin(), budgets.end(),
                            std::not_equal_to<>()) == budgets.end();
}

std::string budget_label(const std::vector<int>& budgets) {
  if (uniform_budgets(budgets)) return std::to_string(budgets.front());
  // FNV-1a over the decimal list.
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const int b : budgets) {
    for (const char c : std::to_string(b) + ",") {
      hash = (hash ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "list-%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string theta_label(const std::vector<double>& theta, std::size_t index) {
  if (std::all_of(theta.begin(), theta.end(),
                  [&](double t) { return t == theta.front(); })) {
    return format_real(theta.front());
  }
  return "grid-" + std::to_string(index);
}

ProtocolConfig uniform_config(double sigma, int machines, int bits, int dimension) {
  return {sigma, std::vector<int>(static_cast<std::size_t>(machines), bits), dimension};
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

const char* to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::kModgame:
      return "modgame";
    case Estimator::kMultiModgame:
      return "multi-modgame";
    case Estimator::kNaiveQuant:
      return "naive-quant";
    case Estimator::kSampleMean:
      return "sample-mean";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  for (const Estimator e : {Estimator::kModgame, Estimator::kMultiModgame,
                            Estimator::kNaiveQuant, Estimator::kSampleMean}) {
    if (name == to_string(e)) return e;
  }
  fail(ErrorKind::kInvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

double parse_sigma(std::string_view text) {
  const auto bad = [&] {
    fail(ErrorKind::kInvalidArgument, "cannot parse sigma '" + std::string(text) + "'");
  };
  if (text.starts_with("2^")) {
    int k = 0;
    const char* first = text.data() + 2;
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, k);
    if (res.ec != std::errc() || res.ptr != last) bad();
    return std::ldexp(1.0, k);
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) bad();
  if (!(value > 0.0) || !std::isfinite(value)) bad();
  return value;
}

void ExperimentSpec::validate() const {
  config.validate();
  require(replications >= 1, ErrorKind::kInvalidArgument, "replications must be >= 1");
  require(replications <= std::numeric_limits<std::uint32_t>::max(),
          ErrorKind::kInvalidArgument, "replications must fit in 32 bits");
  require(!theta_grid.empty(), ErrorKind::kInvalidArgument, "theta grid is empty");
  for (const auto& theta : theta_grid) {
    require(theta.size() == static_cast<std::size_t>(config.dimension),
            ErrorKind::kInvalidArgument, "theta dimension does not match config");
    for (const double t : theta) {
      require(t >= 0.0 && t <= 1.0, ErrorKind::kInvalidArgument,
              "theta must lie in [0,1]");
    }
  }
  switch (estimator) {
    case Estimator::kModgame:
      require(config.dimension == 1, ErrorKind::kInvalidArgument,
              "modgame is univariate; use multi-modgame for d > 1");
      break;
    case Estimator::kNaiveQuant:
      require(config.dimension == 1, ErrorKind::kInvalidArgument,
              "naive quantization is univariate");
      require(uniform_budgets(config.budgets), ErrorKind::kInvalidArgument,
              "naive quantization needs equal budgets");
      QuantizerSpec{config.budgets.front(), reconstruction}.validate();
      break;
    default:
      break;
  }
}

std::vector<std::vector<double>> default_theta_grid(int dimension) {
  std::vector<std::vector<double>> grid;
  const int steps = dimension == 1 ? 32 : 8;
  for (int j = 0; j <= steps; ++j) {
    grid.emplace_back(static_cast<std::size_t>(dimension),
                      static_cast<double>(j) / steps);
  }
  return grid;
}

std::int64_t default_replications(int dimension) {
  return dimension == 1 ? 10000 : 1000;
}

void SampleStream::fill(std::span<double> out) const {
  const Philox4x32 rng = Philox4x32::from_seed(seed);
  const auto rep = static_cast<std::uint32_t>(replication);
  const auto point = static_cast<std::uint32_t>(theta_index);
  for (std::size_t g = 0; g < out.size(); g += 2) {
    const std::uint64_t pair = g / 2;
    const auto z = normal_pair(rng, {static_cast<std::uint32_t>(pair),
                                     static_cast<std::uint32_t>(pair >> 32), rep, point});
    out[g] = z[0];
    if (g + 1 < out.size()) out[g + 1] = z[1];
  }
}

// --- trials -----------------------------------------------------------------

struct TrialRunner::State {
  explicit State(const ExperimentSpec& s) : spec(s) {
    spec.validate();
    const auto& cfg = spec.config;
    noise.resize(static_cast<std::size_t>(cfg.machine_count()) * cfg.dimension);
    samples.resize(static_cast<std::size_t>(cfg.dimension));
    switch (spec.estimator) {
      case Estimator::kModgame:
        univariate.emplace(plan_budget(cfg));
        batch = TranscriptBatch(cfg.budgets);
        break;
      case Estimator::kMultiModgame:
        multivariate.emplace(plan_multivariate(cfg));
        batch = TranscriptBatch(cfg.budgets);
        break;
      case Estimator::kNaiveQuant:
        batch = TranscriptBatch(cfg.budgets);
        break;
      case Estimator::kSampleMean:
        break;
    }
  }

  ExperimentSpec spec;
  std::optional<UnivariatePlan> univariate;
  std::optional<MultivariatePlan> multivariate;
  TranscriptBatch batch;
  std::vector<double> noise;
  std::vector<double> samples;
  std::vector<double> column;
};

TrialRunner::TrialRunner(const ExperimentSpec& spec)
    : state_(std::make_unique<State>(spec)) {}
TrialRunner::~TrialRunner() = default;
TrialRunner::TrialRunner(TrialRunner&&) noexcept = default;

double TrialRunner::run(std::size_t theta_index, std::int64_t replication) {
  State& s = *state_;
  const auto& cfg = s.spec.config;
  require(theta_index < s.spec.theta_grid.size(), ErrorKind::kInvalidArgument,
          "theta index out of range");
  require(replication >= 0 && replication < s.spec.replications,
          ErrorKind::kInvalidArgument, "replication index out of range");
  const std::vector<double>& theta = s.spec.theta_grid[theta_index];
  const int m = cfg.machine_count();
  const int d = cfg.dimension;
  SampleStream{s.spec.seed, theta_index, replication, d}.fill(s.noise);
  const auto sample = [&](int machine, int k) {
    return theta[k] + cfg.sigma * s.noise[std::size_t(machine) * d + k];
  };

  std::vector<double> estimate(static_cast<std::size_t>(d));
  switch (s.spec.estimator) {
    case Estimator::kModgame: {
      for (int i = 0; i < m; ++i) {
        encode_local_into(*s.univariate, i, sample(i, 0), s.batch.machine(i));
      }
      estimate[0] = decode_central(*s.univariate, s.batch).value;
      break;
    }
    case Estimator::kMultiModgame: {
      for (int i = 0; i < m; ++i) {
        for (int k = 0; k < d; ++k) s.samples[k] = sample(i, k);
        encode_local_multi_into(*s.multivariate, i, s.samples, s.batch.machine(i));
      }
      estimate = decode_central_multi(*s.multivariate, s.batch).value;
      break;
    }
    case Estimator::kNaiveQuant: {
      const QuantizerSpec q{cfg.budgets.front(), s.spec.reconstruction};
      for (int i = 0; i < m; ++i) {
        quantize_encode_into(q, sample(i, 0), s.batch.machine(i));
      }
      estimate[0] = quantize_decode(q, s.batch);
      break;
    }
    case Estimator::kSampleMean: {
      s.column.resize(static_cast<std::size_t>(m));
      for (int k = 0; k < d; ++k) {
        for (int i = 0; i < m; ++i) s.column[i] = sample(i, k);
        estimate[k] = sample_mean(s.column);
      }
      break;
    }
  }

  double squared = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = estimate[k] - theta[k];
    squared += diff * diff;
  }
  return squared;
}

double run_trial(const ExperimentSpec& spec, std::size_t theta_index,
                 std::int64_t replication) {
  return TrialRunner(spec).run(theta_index, replication);
}

int default_worker_count() {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    int value = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    require(res.ec == std::errc() && res.ptr == text.data() + text.size() && value >= 1,
            ErrorKind::kInvalidArgument,
            std::string(kWorkersEnv) + " must be a positive integer");
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RatePhase theory_rate(const ExperimentSpec& spec) {
  const auto& cfg = spec.config;
  if (cfg.dimension == 1) {
    return univariate_rate(cfg.total_budget(), cfg.machine_count(), cfg.sigma);
  }
  return multivariate_rate(cfg.budgets, cfg.dimension, cfg.sigma);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t points = spec.theta_grid.size();
  const auto reps = static_cast<std::size_t>(spec.replications);
  const std::size_t total = points * reps;
  std::vector<double> squared(total);

  if (workers <= 0) workers = default_worker_count();
  const auto count = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), total));
  std::vector<std::exception_ptr> errors(count);
  const auto work = [&](std::size_t w) {
    try {
      TrialRunner runner(spec);
      const std::size_t lo = total * w / count;
      const std::size_t hi = total * (w + 1) / count;
      for (std::size_t t = lo; t < hi; ++t) {
        squared[t] = runner.run(t / reps, static_cast<std::int64_t>(t % reps));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (count == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (std::size_t w = 0; w < count; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.spec = spec;
  result.theory = theory_rate(spec);
  result.per_theta.reserve(points);
  double mse_sum = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    const double* values = squared.data() + p * reps;
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) sum += values[r];
    const double mean = sum / static_cast<double>(reps);
    ThetaResult row{spec.theta_grid[p], mean, std::nullopt};
    if (reps > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) ss += (values[r] - mean) * (values[r] - mean);
      row.standard_error = std::sqrt(ss / static_cast<double>(reps - 1)) /
                           std::sqrt(static_cast<double>(reps));
    }
    if (p == 0 || mean > result.max_mse) {
      result.max_mse = mean;
      result.argmax = p;
    }
    mse_sum += mean;
    result.per_theta.push_back(std::move(row));
  }
  result.mean_mse = mse_sum / static_cast<double>(points);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// --- presets ----------------------------------------------------------------

std::vector<std::string> preset_names() { return {"fig5a", "fig5b", "fig5c", "fig6"}; }

std::vector<ExperimentSpec> preset(std::string_view name) {
  std::vector<ExperimentSpec> specs;
  const auto add = [&](Estimator e, ProtocolConfig cfg) {
    ExperimentSpec spec;
    spec.estimator = e;
    spec.theta_grid = default_theta_grid(cfg.dimension);
    spec.replications = default_replications(cfg.dimension);
    spec.config = std::move(cfg);
    specs.push_back(std::move(spec));
  };
  const auto add_univariate = [&](ProtocolConfig cfg) {
    for (const Estimator e :
         {Estimator::kModgame, Estimator::kNaiveQuant, Estimator::kSampleMean}) {
      add(e, cfg);
    }
  };

  if (name == "fig5a") {
    for (int b = 1; b <= 7; ++b) add_univariate(uniform_config(kSigma2m8, 100, b, 1));
  } else if (name == "fig5b") {
    for (int j = 0; j <= 12; ++j) {
      add_univariate(uniform_config(kSigma2m8, 10 << j, 5, 1));
    }
  } else if (name == "fig5c") {
    for (int k = 1; k <= 13; ++k) {
      add_univariate(uniform_config(std::ldexp(1.0, -k), 100, 5, 1));
    }
  } else if (name == "fig6") {
    for (int b = 2; b <= 21; ++b) {
      const auto cfg = uniform_config(kSigma2m8, 25, b, 50);
      add(Estimator::kMultiModgame, cfg);
      add(Estimator::kSampleMean, cfg);
    }
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  return specs;
}

// --- output -----------------------------------------------------------------

namespace {

constexpr const char* kCsvHeader =
    "estimator,d,sigma,m,b,theta,mse,stderr,theory_rate,phase\n";

void write_row(std::ostream& out, const ExperimentResult& r, std::size_t point,
               double mse, const std::optional<double>& se) {
  const auto& cfg = r.spec.config;
  out << to_string(r.spec.estimator) << ',' << cfg.dimension << ','
      << format_real(cfg.sigma) << ',' << cfg.machine_count() << ','
      << budget_label(cfg.budgets) << ','
      << theta_label(r.spec.theta_grid[point], point) << ',' << format_real(mse) << ','
      << (se ? format_real(*se) : std::string("NA")) << ','
      << format_real(r.theory.rate) << ',' << to_string(r.theory.phase) << '\n';
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const ExperimentResult> results) {
  out << kCsvHeader;
  for (const auto& r : results) {
    write_row(out, r, r.argmax, r.max_mse, r.per_theta[r.argmax].standard_error);
  }
}

void write_theta_csv(std::ostream& out, std::span<const ExperimentResult> results) {
  out << kCsvHeader;
  for (const auto& r : results) {
    for (std::size_t p = 0; p < r.per_theta.size(); ++p) {
      write_row(out, r, p, r.per_theta[p].mse, r.per_theta[p].standard_error);
    }
  }
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  const auto& cfg = spec.config;
  nlohmann::json doc;
  doc["estimator"] = to_string(spec.estimator);
  doc["sigma"] = cfg.sigma;
  doc["dim"] = cfg.dimension;
  doc["machines"] = cfg.machine_count();
  if (uniform_budgets(cfg.budgets)) {
    doc["bits"] = cfg.budgets.front();
  } else {
    doc["budgets"] = cfg.budgets;
  }
  doc["theta_grid"] = spec.theta_grid;
  doc["replications"] = spec.replications;
  doc["seed"] = spec.seed;
  doc["reconstruction"] =
      spec.reconstruction == Reconstruction::kMidpoint ? "midpoint" : "left-endpoint";
  return doc;
}

ExperimentSpec spec_from_json(const nlohmann::json& doc) {
  require(doc.is_object(), ErrorKind::kInvalidArgument, "config must be a JSON object");
  try {
    ExperimentSpec spec;
    spec.estimator = parse_estimator(doc.value("estimator", std::string("modgame")));
    const auto& sigma = doc.at("sigma");
    spec.config.sigma = sigma.is_string() ? parse_sigma(sigma.get<std::string>())
                                          : sigma.get<double>();
    spec.config.dimension = doc.value("dim", 1);
    if (doc.contains("budgets")) {
      spec.config.budgets = doc.at("budgets").get<std::vector<int>>();
      if (doc.contains("machines")) {
        require(doc.at("machines").get<int>() == spec.config.machine_count(),
                ErrorKind::kInvalidArgument, "machines disagrees with budgets list");
      }
    } else {
      const int m = doc.at("machines").get<int>();
      require(m >= 1, ErrorKind::kInvalidArgument, "machines must be >= 1");
      spec.config.budgets.assign(static_cast<std::size_t>(m), doc.at("bits").get<int>());
    }
    if (doc.contains("theta_grid")) {
      for (const auto& point : doc.at("theta_grid")) {
        if (point.is_number()) {
          spec.theta_grid.emplace_back(static_cast<std::size_t>(spec.config.dimension),
                                       point.get<double>());
        } else {
          spec.theta_grid.push_back(point.get<std::vector<double>>());
        }
      }
    } else {
      spec.theta_grid = default_theta_grid(spec.config.dimension);
    }
    spec.replications =
        doc.value("replications", default_replications(spec.config.dimension));
    spec.seed = doc.value("seed", std::uint64_t{1});
    const std::string rule = doc.value("reconstruction", std::string("midpoint"));
    require(rule == "midpoint" || rule == "left-endpoint", ErrorKind::kInvalidArgument,
            "reconstruction must be midpoint or left-endpoint");
    spec.reconstruction =
        rule == "midpoint" ? Reconstruction::kMidpoint : Reconstruction::kLeftEndpoint;
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("bad config: ") + e.what());
  }
}

nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json doc;
  doc["spec"] = spec_to_json(r.spec);
  auto& rows = doc["per_theta"] = nlohmann::json::array();
  for (const auto& row : r.per_theta) {
    nlohmann::json item{{"theta", row.theta}, {"mse", row.mse}};
    item["stderr"] = row.standard_error ? nlohmann::json(*row.standard_error)
                                        : nlohmann::json(nullptr);
    rows.push_back(std::move(item));
  }
  doc["max_mse"] = r.max_mse;
  doc["argmax_theta"] = r.per_theta[r.argmax].theta;
  doc["mean_mse"] = r.mean_mse;
  doc["theory_rate"] = r.theory.rate;
  doc["phase"] = to_string(r.theory.phase);
  doc["wall_seconds"] = r.wall_seconds;
  return doc;
}

nlohmann::json to_json(std::span<const ExperimentResult> results) {
  nlohmann::json doc;
  doc["rng"] = kRngName;
  doc["version"] = kLibraryVersion;
  doc["results"] = nlohmann::json::array();
  for (const auto& r : results) doc["results"].push_back(to_json(r));
  return doc;
}

}  // namespace modgame
