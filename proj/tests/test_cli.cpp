#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "modgame");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = modgame::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("modgame_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("rate subcommand") {
  const Outcome r = run({"rate", "--sigma", "2^-8", "--machines", "100", "--total-bits", "500"});
  CHECK(r.code == 0);
  CHECK(r.out == "phase OPTIMAL\nrate 1.52587890625e-07\n");

  const Outcome multi = run({"rate", "--sigma", "2^-8", "--dim", "2", "--budgets", "1,1,1,1"});
  CHECK(multi.code == 0);
  CHECK(multi.out.rfind("phase LOCALIZATION\n", 0) == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"rate"}).code == 2);
  CHECK(run({"rate", "--sigma", "abc", "--machines", "3", "--total-bits", "3"}).code == 2);
  CHECK(run({"rate", "--sigma", "0.1", "--machines", "3", "--total-bits", "2"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  const Outcome bad = run({"simulate", "--estimator", "median"});
  CHECK(bad.code == 2);
  CHECK(bad.err.rfind("error: ", 0) == 0);
  CHECK(line_count(bad.err) == 1);
}

TEST_CASE("help exits with 0") {
  const Outcome top = run({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("simulate") != std::string::npos);
  const Outcome sub = run({"inspect", "--help"});
  CHECK(sub.code == 0);
  CHECK(sub.out.find("--noise-free") != std::string::npos);
}

TEST_CASE("inspect a noise-free localization round") {
  const Outcome r = run({"inspect", "--sigma", "2^-8", "--budgets", "1,1,1", "--theta", "0.3",
                         "--noise-free"});
  CHECK(r.code == 0);
  CHECK(r.out.find("machine 1 bits 0 frame 00000001000100\n") != std::string::npos);
  CHECK(r.out.find("machine 2 bits 1 frame 00000002000180\n") != std::string::npos);
  CHECK(r.out.find("case=LOCALIZE_ONLY") != std::string::npos);
  CHECK(r.out.find("estimate 0.25\n") != std::string::npos);

  const Outcome noisy = run({"inspect", "--sigma", "2^-8", "--budgets", "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1",
                             "--theta", "0.3"});
  CHECK(noisy.code == 0);
  CHECK(noisy.out.find("case=TWO_STAGE") != std::string::npos);
  CHECK(noisy.out.find("n 4\n") != std::string::npos);
}

TEST_CASE("simulate writes per-theta csv, summary csv and json") {
  const std::vector<std::string> base{"simulate", "--estimator", "naive-quant", "--sigma",
                                      "2^-8",     "--machines",  "20",          "--bits",
                                      "2",        "--reps",      "50",          "--theta",
                                      "0.1,0.5"};
  const Outcome csv = run(base);
  CHECK(csv.code == 0);
  CHECK(line_count(csv.out) == 3);
  CHECK(csv.out.rfind("estimator,d,sigma,m,b,theta,mse,stderr,theory_rate,phase\n", 0) == 0);

  auto summary_args = base;
  summary_args.push_back("--summary");
  CHECK(line_count(run(summary_args).out) == 2);

  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Outcome json = run(json_args);
  CHECK(json.code == 0);
  CHECK(json.out.find("\"rng\"") != std::string::npos);
}

TEST_CASE("simulate from a json config") {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  const auto path = dir / "spec.json";
  std::ofstream(path) << R"({"estimator":"modgame","sigma":"2^-8","machines":20,"bits":1,
                             "theta_grid":[0.25,0.75],"replications":10,"seed":4})";
  const Outcome r = run({"simulate", "--config", path.string()});
  CHECK(r.code == 0);
  CHECK(line_count(r.out) == 3);
  CHECK(r.out.find("modgame,1,0.00390625,20,1,0.25,") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{";
  CHECK(run({"simulate", "--config", (dir / "broken.json").string()}).code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("preset output is byte-identical across runs and worker counts") {
  const auto a = scratch("preset_a");
  const auto b = scratch("preset_b");
  const Outcome first = run({"preset", "--name", "fig6", "--reps", "3", "--out", a.string(),
                             "--workers", "1"});
  const Outcome second = run({"preset", "--name", "fig6", "--reps", "3", "--out", b.string(),
                              "--workers", "3"});
  REQUIRE(first.code == 0);
  REQUIRE(second.code == 0);
  for (const char* file : {"fig6.csv", "fig6_theta.csv"}) {
    CHECK(slurp(a / file) == slurp(b / file));
  }
  CHECK(line_count(slurp(a / "fig6.csv")) == 41);
  CHECK(line_count(slurp(a / "fig6_theta.csv")) == 1 + 40 * 9);
  CHECK(std::filesystem::exists(a / "fig6.json"));
  CHECK(first.out.find("fig6.csv") != std::string::npos);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("unknown preset is a usage error") {
  CHECK(run({"preset", "--name", "fig9", "--out", scratch("none").string()}).code == 2);
}
