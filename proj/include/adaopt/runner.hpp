#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaopt/analysis.hpp"
#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"

namespace adaopt::runner {

using numcore::RealVec;

enum class ScenarioKind {
  kThm1,
  kThm2,
  kThm3,
  kThm6,
  kSynthOnline,
  kSynthStochastic,
  kErmSynthetic,
  kErmMnist,
};

std::string_view scenario_kind_name(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from_name(std::string_view name);

// Everything one experiment needs. Parsed from a flat key=value file plus
// command-line overrides; every field has a config key of the same name
// (documented in the README).
struct RunConfig {
  ScenarioKind scenario = ScenarioKind::kThm1;
  // Scenario parameters; each kind reads the ones it declares.
  double c = 4.0;        // thm1, thm3, thm6
  double delta = 0.1;    // thm3
  double eps = 1.0;      // thm6 (the construction's epsilon; the update's
                         // epsilon is schedule.epsilon)
  std::size_t erm_n = 600;
  std::size_t erm_p = 12;
  std::size_t erm_k = 3;
  double erm_margin = 10.0;
  std::size_t batch_size = 128;
  std::string mnist_images;
  std::string mnist_labels;

  optim::Method method = optim::Method::kAdam;
  optim::Schedule schedule;
  std::int64_t T = 1000;
  std::uint64_t seed = 1;
  // Start iterate for 1-D scenarios; +1 when unset. ERM always starts at
  // zero parameters.
  std::optional<double> x0;
  bool unprojected = false;  // skip projection (regret still uses the box)
  std::int64_t record_every = 0;  // 0 = auto: 100 when T > 10^4, else 1
  std::string out;         // CSV path; empty = auto name under output_dir()
  std::string trace_dump;  // optional JSON dump for check-bound (scenarios)
  std::string label;       // compare summary-row name; empty = method name
};

// Key=value lines, '#' comments, blank lines ignored. ConfigError names the
// offending key or value.
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

struct RunResult {
  RealVec final_x;  // iterate after step T (ERM: final parameter vector)
  double regret = std::numeric_limits<double>::quiet_NaN();  // NaN for ERM
  double avg_regret = std::numeric_limits<double>::quiet_NaN();
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  std::int64_t gamma_violations = 0;
  std::vector<optim::GammaViolation> first_violations;
  double wall_seconds = 0.0;
  std::string csv_path;
};

// Executes the configured experiment: T steps, CSV trace, regret or loss
// accounting, gamma monitoring, optional JSON trace dump. Identical configs
// produce byte-identical CSV files.
RunResult run(const RunConfig& cfg);

struct CompareResult {
  std::string csv_path;
  std::vector<RunResult> results;  // by config index
};

// Runs every config and writes one aligned CSV with a column group per
// config (suffix .g<i>). Configs must share the scenario identity, T, and
// recording cadence; ConfigError otherwise.
CompareResult compare(const std::vector<RunConfig>& cfgs,
                      const std::string& out_path);

struct PropertyResult {
  std::string name;
  bool passed;
  std::string detail;  // counterexample dump on failure, summary on pass
};

struct VerifyReport {
  std::string suite;
  std::vector<PropertyResult> properties;
  bool all_passed() const;
};

// Property batteries behind `verify <suite>`; also reused by the test
// binaries so the CLI and CI check the same predicates.
VerifyReport verify_gamma();
VerifyReport verify_bounds();
VerifyReport verify_lemmas();
VerifyReport verify_conditions();
// Dispatch by name; "all" concatenates every suite. ConfigError on unknown.
VerifyReport verify_suite(std::string_view name);

// $ADAOPT_OUT_DIR when set, else "."; the only thing the environment
// controls.
std::string output_dir();

// Re-evaluates the matching regret bound on a run's JSON trace dump
// (amsgrad -> the max-stabilized bound; adam/rmsprop/adamnc -> the
// time-varying-beta2 bound). ConfigError for methods with no evaluator.
struct CheckedBound {
  analysis::BoundReport report;
  double empirical_regret;
  std::string method;
};
CheckedBound check_bound_file(const std::string& trace_json_path);

}  // namespace adaopt::runner
