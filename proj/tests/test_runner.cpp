#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adaopt/errors.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/runner.hpp"

using adaopt::ConfigError;
using adaopt::FormatError;
namespace optim = adaopt::optim;
namespace runner = adaopt::runner;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

runner::RunConfig thm1_config(optim::Method method, std::int64_t T) {
  runner::RunConfig cfg;
  cfg.scenario = runner::ScenarioKind::kThm1;
  cfg.c = 4.0;
  cfg.method = method;
  cfg.schedule.alpha = 0.5;
  cfg.schedule.alpha_mode = optim::AlphaMode::kInvSqrtT;
  cfg.schedule.beta1 = 0.0;
  cfg.schedule.beta2 = 1.0 / 17.0;
  cfg.schedule.epsilon = 0.0;
  cfg.T = T;
  return cfg;
}

const std::string kDir = "/tmp/adaopt_runner_test";

}  // namespace

TEST_CASE("scenario run writes the documented header and one row per record") {
  runner::RunConfig cfg = thm1_config(optim::Method::kAdam, 1);
  cfg.out = kDir + "/single.csv";
  const runner::RunResult r = runner::run(cfg);
  CHECK(r.csv_path == cfg.out);

  const std::vector<std::string> lines = lines_of(slurp(cfg.out));
  REQUIRE(lines.size() == 2);  // header + the t=1 row
  CHECK(lines[0] == "t,x_0,loss,cum_regret,avg_regret");
  const std::vector<std::string> row = split_csv(lines[1]);
  REQUIRE(row.size() == 5);
  CHECK(row[0] == "1");
  CHECK(row[1] == "1");  // x recorded before the update
  CHECK(row[2] == "4");  // f_1(x_1) = 4 * 1
}

TEST_CASE("identical configs write byte-identical csv files") {
  runner::RunConfig a = thm1_config(optim::Method::kAmsgrad, 500);
  a.out = kDir + "/det_a.csv";
  runner::RunConfig b = a;
  b.out = kDir + "/det_b.csv";
  runner::run(a);
  runner::run(b);
  CHECK(slurp(a.out) == slurp(b.out));
}

TEST_CASE("recording cadence follows record_every and always keeps step T") {
  runner::RunConfig cfg = thm1_config(optim::Method::kAdam, 101);
  cfg.record_every = 10;
  cfg.out = kDir + "/cadence.csv";
  runner::run(cfg);
  const std::vector<std::string> lines = lines_of(slurp(cfg.out));
  REQUIRE(lines.size() == 12);  // header, t=10..100, t=101
  CHECK(split_csv(lines[1])[0] == "10");
  CHECK(split_csv(lines[10])[0] == "100");
  CHECK(split_csv(lines[11])[0] == "101");

  cfg.record_every = -1;
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);

  // Auto cadence: T = 10^4 records every step, larger T records every 100.
  runner::RunConfig big = thm1_config(optim::Method::kAdam, 10'001);
  big.record_every = 0;
  big.out = kDir + "/auto.csv";
  runner::run(big);
  const std::vector<std::string> big_lines = lines_of(slurp(big.out));
  REQUIRE(big_lines.size() == 102);  // header, t=100..10000, t=10001
  CHECK(split_csv(big_lines[1])[0] == "100");
  CHECK(split_csv(big_lines.back())[0] == "10001");
}

TEST_CASE("erm run writes the loss-trace header") {
  runner::RunConfig cfg;
  cfg.scenario = runner::ScenarioKind::kErmSynthetic;
  cfg.erm_n = 64;
  cfg.erm_p = 3;
  cfg.erm_k = 2;
  cfg.method = optim::Method::kAmsgrad;
  cfg.schedule.alpha = 0.01;
  cfg.schedule.alpha_mode = optim::AlphaMode::kConstant;
  cfg.schedule.epsilon = 1e-8;
  cfg.T = 50;
  cfg.out = kDir + "/erm.csv";
  const runner::RunResult r = runner::run(cfg);

  CHECK(std::isnan(r.regret));  // regret is a scenario-run concept
  CHECK(std::isfinite(r.final_loss));
  CHECK(r.final_x.size() == 2 * 4);
  const std::vector<std::string> lines = lines_of(slurp(cfg.out));
  CHECK(lines[0] == "step,train_loss");
  CHECK(split_csv(lines[1])[0] == "0");  // pre-training evaluation
  CHECK(split_csv(lines.back())[0] == "50");

  // Bound traces exist for scenario runs only.
  runner::RunConfig dumped = cfg;
  dumped.trace_dump = kDir + "/erm_dump.json";
  CHECK_THROWS_AS(runner::run(dumped), ConfigError);
}

TEST_CASE("starting an online run outside the box is rejected") {
  runner::RunConfig cfg = thm1_config(optim::Method::kAdam, 10);
  cfg.x0 = 1.5;
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);
  cfg.x0 = 1.5;
  cfg.unprojected = true;  // no projection, so any finite start is usable
  cfg.out = kDir + "/unprojected.csv";
  CHECK_NOTHROW(runner::run(cfg));
  runner::RunConfig zero_t = thm1_config(optim::Method::kAdam, 0);
  CHECK_THROWS_AS(runner::run(zero_t), ConfigError);
}

TEST_CASE("compare aligns runs and duplicates produce identical groups") {
  runner::RunConfig a = thm1_config(optim::Method::kAdam, 60);
  runner::RunConfig b = a;
  const runner::CompareResult cmp =
      runner::compare({a, b}, kDir + "/cmp_dup.csv");
  const std::vector<std::string> lines = lines_of(slurp(cmp.csv_path));
  const std::vector<std::string> header = split_csv(lines[0]);
  REQUIRE(header.size() == 9);  // t + two groups of four
  CHECK(header[0] == "t");
  CHECK(header[1] == "x_0.g0");
  CHECK(header[5] == "x_0.g1");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> row = split_csv(lines[i]);
    REQUIRE(row.size() == 9);
    for (int j = 0; j < 4; ++j) REQUIRE(row[1 + j] == row[5 + j]);
  }
}

TEST_CASE("matched adam and rmsprop runs produce identical compare groups") {
  runner::RunConfig adam = thm1_config(optim::Method::kAdam, 80);
  adam.schedule.beta1 = 0.0;
  runner::RunConfig rms = adam;
  rms.method = optim::Method::kRmsprop;
  const runner::CompareResult cmp =
      runner::compare({adam, rms}, kDir + "/cmp_rms.csv");
  const std::vector<std::string> lines = lines_of(slurp(cmp.csv_path));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> row = split_csv(lines[i]);
    for (int j = 0; j < 4; ++j) REQUIRE(row[1 + j] == row[5 + j]);
  }
}

TEST_CASE("compare rejects mismatched identities and trivial input") {
  runner::RunConfig a = thm1_config(optim::Method::kAdam, 60);
  runner::RunConfig longer = a;
  longer.T = 61;
  CHECK_THROWS_AS(runner::compare({a, longer}, kDir + "/bad.csv"),
                  ConfigError);
  runner::RunConfig other = a;
  other.c = 8.0;  // different scenario parameters, same kind
  CHECK_THROWS_AS(runner::compare({a, other}, kDir + "/bad.csv"), ConfigError);
  CHECK_THROWS_AS(runner::compare({a}, kDir + "/bad.csv"), ConfigError);
}

TEST_CASE("config files accept comments and reject malformed lines") {
  const std::string path = kDir + "/good.conf";
  std::filesystem::create_directories(kDir);
  {
    std::ofstream out(path);
    out << "# experiment setup\n"
        << "\n"
        << "scenario = thm3\n"
        << "c = 512\n"
        << "delta = 0.05\n"
        << "optimizer = amsgrad\n"
        << "alpha = 0.25\n"
        << "alpha_mode = inv_sqrt_t\n"
        << "beta1_mode = exp_decay\n"
        << "lambda = 0.75\n"
        << "epsilon = 1e-8\n"
        << "T = 1234\n"
        << "seed = 42\n"
        << "x0 = 0.5\n"
        << "unprojected = true\n"
        << "debias = false\n"
        << "label = tuned\n";
  }
  const runner::RunConfig cfg = runner::parse_config_file(path);
  CHECK(cfg.scenario == runner::ScenarioKind::kThm3);
  CHECK(cfg.c == 512.0);
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.method == optim::Method::kAmsgrad);
  CHECK(cfg.schedule.alpha == 0.25);
  CHECK(cfg.schedule.beta1_mode == optim::Beta1Mode::kExpDecay);
  CHECK(cfg.schedule.lambda == 0.75);
  CHECK(cfg.schedule.epsilon == 1e-8);
  CHECK(cfg.T == 1234);
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.x0.has_value());
  CHECK(*cfg.x0 == 0.5);
  CHECK(cfg.unprojected);
  CHECK(cfg.label == "tuned");

  const std::string bad = kDir + "/bad.conf";
  {
    std::ofstream out(bad);
    out << "scenario = thm1\n"
        << "T 100\n";
  }
  try {
    runner::parse_config_file(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("overrides validate keys, values, and enum names") {
  runner::RunConfig cfg;
  runner::apply_override(cfg, "beta2", "0.75");
  CHECK(cfg.schedule.beta2 == 0.75);
  runner::apply_override(cfg, "beta2_mode", "one_minus_inv_t");
  CHECK(cfg.schedule.beta2_mode == optim::Beta2Mode::kOneMinusInvT);
  runner::apply_override(cfg, "record_every", "7");
  CHECK(cfg.record_every == 7);
  runner::apply_override(cfg, "mnist_images", "/data/img.gz");
  CHECK(cfg.mnist_images == "/data/img.gz");

  CHECK_THROWS_AS(runner::apply_override(cfg, "gamma", "1"), ConfigError);
  CHECK_THROWS_AS(runner::apply_override(cfg, "alpha", "fast"), ConfigError);
  CHECK_THROWS_AS(runner::apply_override(cfg, "optimizer", "adamw"),
                  ConfigError);
  CHECK_THROWS_AS(runner::apply_override(cfg, "debias", "maybe"), ConfigError);
  CHECK_THROWS_AS(runner::apply_override(cfg, "erm_n", "0"), ConfigError);
  CHECK_THROWS_AS(runner::apply_override(cfg, "seed", "-3"), ConfigError);
}

TEST_CASE("auto-named output lands in the directory the environment picks") {
  const std::string outdir = kDir + "/envout";
  REQUIRE(setenv("ADAOPT_OUT_DIR", outdir.c_str(), 1) == 0);
  CHECK(runner::output_dir() == outdir);
  runner::RunConfig cfg = thm1_config(optim::Method::kAdam, 5);
  cfg.out.clear();
  const runner::RunResult r = runner::run(cfg);
  REQUIRE(unsetenv("ADAOPT_OUT_DIR") == 0);
  CHECK(r.csv_path == outdir + "/thm1_adam_T5_seed1.csv");
  CHECK(std::filesystem::exists(r.csv_path));
  CHECK(runner::output_dir() == ".");
}

TEST_CASE("bound check round-trips through the json trace dump") {
  runner::RunConfig good = thm1_config(optim::Method::kAmsgrad, 50);
  good.out = kDir + "/bound_run.csv";
  good.trace_dump = kDir + "/bound_trace.json";
  const runner::RunResult gr = runner::run(good);
  const runner::CheckedBound checked =
      runner::check_bound_file(good.trace_dump);
  CHECK(checked.method == "amsgrad");
  CHECK(checked.report.all_satisfied());
  CHECK(checked.empirical_regret == gr.regret);
  CHECK(checked.empirical_regret <= checked.report.bound_value);

  // Adam on the same scenario violates the nondecreasing-denominator
  // condition of the time-varying-beta2 evaluator.
  runner::RunConfig adam = thm1_config(optim::Method::kAdam, 50);
  adam.out = kDir + "/bound_adam.csv";
  adam.trace_dump = kDir + "/bound_adam.json";
  runner::run(adam);
  const runner::CheckedBound failed =
      runner::check_bound_file(adam.trace_dump);
  CHECK(failed.method == "adam");
  CHECK_FALSE(failed.report.all_satisfied());
  CHECK(std::isinf(failed.report.bound_value));

  const std::string garbage = kDir + "/garbage.json";
  {
    std::ofstream out(garbage);
    out << "not json {";
  }
  CHECK_THROWS_AS(runner::check_bound_file(garbage), FormatError);
}

TEST_CASE("verify dispatch knows every suite name") {
  CHECK_THROWS_AS(runner::verify_suite("nonsense"), ConfigError);
  const runner::VerifyReport lemmas = runner::verify_suite("lemmas");
  CHECK(lemmas.suite == "lemmas");
  CHECK(lemmas.all_passed());
  CHECK(!lemmas.properties.empty());
}
