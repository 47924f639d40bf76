#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaopt/analysis.hpp"
#include "adaopt/errors.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/runner.hpp"
#include "adaopt/scenarios.hpp"

namespace {

using adaopt::runner::RunConfig;

RunConfig build_config(const std::string& config_path,
                       const std::vector<std::string>& sets) {
  RunConfig cfg;
  if (!config_path.empty())
    cfg = adaopt::runner::parse_config_file(config_path);
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw adaopt::ConfigError("--set expects key=value, got '" + kv + "'");
    adaopt::runner::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void print_iterate(const adaopt::numcore::RealVec& x) {
  if (x.size() > 8) {
    std::printf("final parameters: %zu values\n", x.size());
    return;
  }
  std::printf("final iterate:");
  for (double xi : x) std::printf(" %.17g", xi);
  std::printf("\n");
}

void print_gamma(const adaopt::runner::RunResult& r) {
  if (r.gamma_violations == 0) {
    std::printf("step-size rate decreases: 0\n");
    return;
  }
  const adaopt::optim::GammaViolation& v = r.first_violations.front();
  std::printf("step-size rate decreases: %lld (first at t=%lld, coord %zu)\n",
              static_cast<long long>(r.gamma_violations),
              static_cast<long long>(v.t), v.coord);
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& sets) {
  const RunConfig cfg = build_config(config_path, sets);
  const adaopt::runner::RunResult r = adaopt::runner::run(cfg);
  std::printf("wrote %s\n", r.csv_path.c_str());
  print_iterate(r.final_x);
  // regret is NaN exactly when the run was ERM training
  if (r.regret == r.regret)
    std::printf("regret: %.17g (avg %.17g)\n", r.regret, r.avg_regret);
  else
    std::printf("final train loss: %.17g\n", r.final_loss);
  print_gamma(r);
  std::printf("wall time: %.3f s\n", r.wall_seconds);
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                const std::vector<std::string>& sets,
                const std::string& out_path) {
  std::vector<RunConfig> cfgs;
  cfgs.reserve(config_paths.size());
  for (const std::string& path : config_paths)
    cfgs.push_back(build_config(path, sets));
  const adaopt::runner::CompareResult cmp =
      adaopt::runner::compare(cfgs, out_path);
  std::printf("wrote %s\n", cmp.csv_path.c_str());
  std::printf("%-6s %-12s %-22s %-22s %s\n", "config", "label",
              "final_avg_regret", "final_x0_or_loss", "rate_decreases");
  for (std::size_t i = 0; i < cmp.results.size(); ++i) {
    const adaopt::runner::RunResult& r = cmp.results[i];
    const std::string label =
        !cfgs[i].label.empty()
            ? cfgs[i].label
            : std::string(adaopt::optim::method_name(cfgs[i].method));
    const double head =
        r.regret == r.regret ? r.final_x.front() : r.final_loss;
    std::printf("%-6zu %-12s %-22.15g %-22.15g %lld\n", i, label.c_str(),
                r.avg_regret, head,
                static_cast<long long>(r.gamma_violations));
  }
  return 0;
}

int cmd_verify(const std::string& suite) {
  const adaopt::runner::VerifyReport report =
      adaopt::runner::verify_suite(suite);
  int failures = 0;
  for (const adaopt::runner::PropertyResult& p : report.properties) {
    std::printf("%s %s: %s\n", p.passed ? "PASS" : "FAIL", p.name.c_str(),
                p.detail.c_str());
    if (!p.passed) ++failures;
  }
  std::printf("suite %s: %zu/%zu properties passed\n", report.suite.c_str(),
              report.properties.size() - failures, report.properties.size());
  return failures == 0 ? 0 : 1;
}

int cmd_find_c(double beta1, double beta2, std::int64_t c_max) {
  const adaopt::scenarios::PeriodSearch found =
      adaopt::scenarios::thm2_sequence(beta1, beta2, c_max);
  std::printf("smallest feasible even period C = %lld\n",
              static_cast<long long>(found.C));
  std::printf("scenario: %s (slopes %g then %lld rounds of -1)\n",
              found.scenario.name.c_str(), found.scenario.cycle.front(),
              static_cast<long long>(found.C - 1));
  return 0;
}

int cmd_check_bound(const std::string& path) {
  const adaopt::runner::CheckedBound chk =
      adaopt::runner::check_bound_file(path);
  std::printf("optimizer: %s\n", chk.method.c_str());
  for (const adaopt::analysis::HypothesisFlag& f : chk.report.flags)
    std::printf("  [%s] %s (slack %.17g)\n", f.satisfied ? "ok" : "VIOLATED",
                f.name.c_str(), f.slack);
  for (const auto& [name, value] : chk.report.terms)
    std::printf("  %s = %.17g\n", name.c_str(), value);
  if (!chk.report.note.empty())
    std::printf("  note: %s\n", chk.report.note.c_str());
  std::printf("bound: %.17g\n", chk.report.bound_value);
  std::printf("empirical regret: %.17g\n", chk.empirical_regret);
  const bool holds = chk.report.all_satisfied() &&
                     chk.empirical_regret <= chk.report.bound_value;
  std::printf("regret within bound: %s\n", holds ? "yes" : "no");
  return holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive gradient method experiment harness"};
  app.require_subcommand(1);

  std::string run_config;
  std::vector<std::string> run_sets;
  CLI::App* run = app.add_subcommand(
      "run", "execute one configured experiment and write its CSV trace");
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--set", run_sets, "override one config key (key=value)");

  std::vector<std::string> cmp_configs;
  std::vector<std::string> cmp_sets;
  std::string cmp_out;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run several configs on one scenario, aligned CSV output");
  cmp->add_option("--config", cmp_configs, "config file, one per column group")
      ->required();
  cmp->add_option("--set", cmp_sets, "override applied to every config");
  cmp->add_option("--out", cmp_out, "compare CSV path");

  std::string verify_suite = "all";
  CLI::App* verify = app.add_subcommand(
      "verify", "run a property battery; exit 1 if any property fails");
  verify->add_option("suite", verify_suite,
                     "gamma, bounds, lemmas, conditions, or all");

  double fc_beta1 = 0.0;
  double fc_beta2 = 0.0;
  std::int64_t fc_cmax = 1'000'000;
  CLI::App* findc = app.add_subcommand(
      "find-c", "smallest even period defeating the given beta pair");
  findc->add_option("--beta1", fc_beta1, "first-moment decay")->required();
  findc->add_option("--beta2", fc_beta2, "second-moment decay")->required();
  findc->add_option("--c-max", fc_cmax, "search cap (default 10^6)");

  std::string bound_path;
  CLI::App* chk = app.add_subcommand(
      "check-bound", "evaluate the regret guarantee on a saved trace dump");
  chk->add_option("trace", bound_path, "JSON trace dump from run trace_dump")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_sets);
    if (cmp->parsed()) return cmd_compare(cmp_configs, cmp_sets, cmp_out);
    if (verify->parsed()) return cmd_verify(verify_suite);
    if (findc->parsed()) return cmd_find_c(fc_beta1, fc_beta2, fc_cmax);
    if (chk->parsed()) return cmd_check_bound(bound_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
