#include "adaopt/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "adaopt/erm.hpp"
#include "adaopt/errors.hpp"
#include "adaopt/rng.hpp"
#include "adaopt/scenarios.hpp"

namespace adaopt::runner {

namespace {

using json = nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_erm(ScenarioKind kind) {
  return kind == ScenarioKind::kErmSynthetic ||
         kind == ScenarioKind::kErmMnist;
}

std::int64_t resolved_record_every(const RunConfig& cfg) {
  if (cfg.record_every < 0)
    throw ConfigError("config key 'record_every': must be >= 0, got " +
                      std::to_string(cfg.record_every));
  if (cfg.record_every > 0) return cfg.record_every;
  return cfg.T > 10'000 ? 100 : 1;
}

void validate_config(const RunConfig& cfg) {
  try {
    optim::validate(cfg.schedule);
  } catch (const ParamError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.T < 1)
    throw ConfigError("config key 'T': must be >= 1, got " +
                      std::to_string(cfg.T));
  if (is_erm(cfg.scenario) && !cfg.trace_dump.empty())
    throw ConfigError("config key 'trace_dump': bound traces exist for "
                      "scenario runs only");
}

// The scenario a config names, as the union the generators return.
struct BuiltScenario {
  std::optional<scenarios::OnlineScenario> online;
  std::optional<scenarios::StochasticScenario> stochastic;

  const std::string& name() const {
    return online ? online->name : stochastic->name;
  }
  const numcore::BoxSet& box() const {
    return online ? online->box : stochastic->box;
  }
  double g_inf() const { return online ? online->g_inf : stochastic->g_inf; }
};

BuiltScenario build_scenario(const RunConfig& cfg) {
  BuiltScenario out;
  switch (cfg.scenario) {
    case ScenarioKind::kThm1:
      out.online = scenarios::thm1_sequence(cfg.c);
      return out;
    case ScenarioKind::kThm2:
      out.online = scenarios::thm2_sequence(cfg.schedule.beta1,
                                            cfg.schedule.beta2)
                       .scenario;
      return out;
    case ScenarioKind::kThm3:
      out.stochastic = scenarios::thm3_stochastic(cfg.c, cfg.delta, cfg.seed);
      return out;
    case ScenarioKind::kThm6:
      out.online = scenarios::thm6_epsilon(cfg.c, cfg.eps);
      return out;
    case ScenarioKind::kSynthOnline:
      out.online = scenarios::synth_online();
      return out;
    case ScenarioKind::kSynthStochastic:
      out.stochastic = scenarios::synth_stochastic(cfg.seed);
      return out;
    case ScenarioKind::kErmSynthetic:
    case ScenarioKind::kErmMnist:
      throw ParamError("build_scenario: ERM kinds have no slope scenario");
  }
  throw ParamError("build_scenario: unknown scenario kind");
}

struct RecordedRow {
  std::int64_t t;
  RealVec x;        // empty for ERM rows
  double loss;      // f_t(x_t), or full-data train loss for ERM
  double cum_regret = 0.0;
  double avg_regret = 0.0;
};

struct CoreResult {
  std::vector<RecordedRow> rows;
  RunResult result;
  std::string scenario_name;
  std::int64_t record_every = 1;
  bool erm = false;
};

void write_trace_dump(const RunConfig& cfg, const BuiltScenario& sc,
                      const RunResult& result,
                      const std::vector<RealVec>& grads,
                      const std::vector<RealVec>& moments);

CoreResult scenario_core(const RunConfig& cfg, std::int64_t record_every) {
  BuiltScenario sc = build_scenario(cfg);
  const numcore::BoxSet& box = sc.box();
  const optim::FeasibleSet feasible =
      cfg.unprojected ? optim::FeasibleSet::unbounded(1)
                      : optim::FeasibleSet::boxed(box);
  const double x0 = cfg.x0.value_or(1.0);
  numcore::require_finite(x0, "config key 'x0'");
  RealVec x{x0};
  if (!cfg.unprojected && !box.contains(x))
    throw ConfigError("config key 'x0': " + fmt17(x0) +
                      " lies outside the feasible box");

  optim::OptimizerState state = optim::make_state(cfg.method, 1);
  analysis::RegretLedger ledger(box);
  optim::GammaMonitor monitor(cfg.schedule);
  std::optional<scenarios::SlopeSampler> sampler;
  if (sc.stochastic) sampler.emplace(*sc.stochastic);

  const bool dump = !cfg.trace_dump.empty();
  std::vector<RealVec> grads_dump, moment_dump;
  if (dump) {
    grads_dump.reserve(static_cast<std::size_t>(cfg.T));
    moment_dump.reserve(static_cast<std::size_t>(cfg.T));
  }

  CoreResult core;
  core.erm = false;
  core.scenario_name = sc.name();
  core.record_every = record_every;

  RealVec g(1);
  const auto started = std::chrono::steady_clock::now();
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    g[0] = sc.online ? sc.online->slope(t) : sampler->next();
    const double loss = g[0] * x[0];
    ledger.record(g, x);
    optim::StepResult res =
        optim::step(cfg.method, std::move(state), x, g, cfg.schedule,
                    feasible);
    state = std::move(res.state);
    monitor.observe(optim::denominator_sq(cfg.method, state, cfg.schedule));
    if (dump) {
      grads_dump.push_back(g);
      moment_dump.push_back(cfg.method == optim::Method::kAmsgrad
                                ? state.vhat
                                : state.v);
    }
    if (t % record_every == 0 || t == cfg.T) {
      const double cum = ledger.regret();
      core.rows.push_back(
          {t, x, loss, cum, cum / static_cast<double>(t)});
    }
    x = std::move(res.x);
  }
  const auto finished = std::chrono::steady_clock::now();

  core.result.final_x = std::move(x);
  core.result.regret = ledger.regret();
  core.result.avg_regret = core.result.regret / static_cast<double>(cfg.T);
  core.result.final_loss = core.rows.back().loss;
  core.result.gamma_violations = monitor.violation_count();
  core.result.first_violations = monitor.first_violations();
  core.result.wall_seconds =
      std::chrono::duration<double>(finished - started).count();
  if (dump)
    write_trace_dump(cfg, sc, core.result, grads_dump, moment_dump);
  return core;
}

CoreResult erm_core(const RunConfig& cfg, std::int64_t record_every) {
  erm::Dataset data = [&] {
    if (cfg.scenario == ScenarioKind::kErmSynthetic)
      return erm::make_synthetic(cfg.erm_n, cfg.erm_p, cfg.erm_k,
                                 cfg.erm_margin,
                                 SplitMix64::salt_seed(cfg.seed, 1));
    if (cfg.mnist_images.empty() || cfg.mnist_labels.empty())
      throw ConfigError("config keys 'mnist_images'/'mnist_labels': required "
                        "for scenario erm_mnist");
    return erm::load_idx_files(cfg.mnist_images, cfg.mnist_labels);
  }();
  erm::MinibatchSampler sampler(SplitMix64::salt_seed(cfg.seed, 2),
                                cfg.batch_size);
  const optim::FeasibleSet feasible =
      optim::FeasibleSet::unbounded(data.k * (data.p + 1));
  optim::GammaMonitor monitor(cfg.schedule);

  const auto started = std::chrono::steady_clock::now();
  erm::TrainResult tr = erm::train(data, sampler, cfg.method, cfg.schedule,
                                   feasible, cfg.T, record_every, &monitor);
  const auto finished = std::chrono::steady_clock::now();

  CoreResult core;
  core.erm = true;
  core.scenario_name =
      std::string(scenario_kind_name(cfg.scenario)) +
      (cfg.scenario == ScenarioKind::kErmSynthetic
           ? "(n=" + std::to_string(cfg.erm_n) +
                 ",p=" + std::to_string(cfg.erm_p) +
                 ",k=" + std::to_string(cfg.erm_k) + ")"
           : "");
  core.record_every = record_every;
  for (const erm::TracePoint& pt : tr.trace)
    core.rows.push_back({pt.step, {}, pt.loss, 0.0, 0.0});
  core.result.final_x = std::move(tr.final_theta);
  core.result.final_loss = tr.trace.back().loss;
  core.result.gamma_violations = monitor.violation_count();
  core.result.first_violations = monitor.first_violations();
  core.result.wall_seconds =
      std::chrono::duration<double>(finished - started).count();
  return core;
}

CoreResult run_core(const RunConfig& cfg) {
  validate_config(cfg);
  const std::int64_t record_every = resolved_record_every(cfg);
  return is_erm(cfg.scenario) ? erm_core(cfg, record_every)
                              : scenario_core(cfg, record_every);
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec)
    throw IoError("cannot create directory " + parent.string() + ": " +
                  ec.message());
}

std::string join_out(const std::string& name) {
  return (std::filesystem::path(output_dir()) / name).string();
}

class CsvFile {
 public:
  explicit CsvFile(const std::string& path) : path_(path) {
    ensure_parent_dir(path);
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw IoError("cannot open " + path + " for writing");
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void line(const std::string& s) {
    if (std::fputs(s.c_str(), f_) == EOF || std::fputc('\n', f_) == EOF)
      throw IoError("write failure on " + path_);
  }
  void close() {
    if (std::fclose(f_) != 0) {
      f_ = nullptr;
      throw IoError("write failure closing " + path_);
    }
    f_ = nullptr;
  }

 private:
  std::string path_;
  std::FILE* f_ = nullptr;
};

std::string auto_csv_name(const RunConfig& cfg) {
  return std::string(scenario_kind_name(cfg.scenario)) + "_" +
         std::string(optim::method_name(cfg.method)) + "_T" +
         std::to_string(cfg.T) + "_seed" + std::to_string(cfg.seed) + ".csv";
}

void write_run_csv(const std::string& path, const CoreResult& core) {
  CsvFile csv(path);
  if (core.erm) {
    csv.line("step,train_loss");
    for (const RecordedRow& row : core.rows)
      csv.line(std::to_string(row.t) + "," + fmt17(row.loss));
  } else {
    std::string header = "t";
    for (std::size_t i = 0; i < core.rows.front().x.size(); ++i)
      header += ",x_" + std::to_string(i);
    header += ",loss,cum_regret,avg_regret";
    csv.line(header);
    for (const RecordedRow& row : core.rows) {
      std::string line = std::to_string(row.t);
      for (double xi : row.x) line += "," + fmt17(xi);
      line += "," + fmt17(row.loss) + "," + fmt17(row.cum_regret) + "," +
              fmt17(row.avg_regret);
      csv.line(line);
    }
  }
  csv.close();
}

json schedule_json(const optim::Schedule& s) {
  return json{{"alpha", s.alpha},
              {"alpha_mode", std::string(optim::alpha_mode_name(s.alpha_mode))},
              {"beta1", s.beta1},
              {"beta1_mode",
               std::string(optim::beta1_mode_name(s.beta1_mode))},
              {"lambda", s.lambda},
              {"beta2", s.beta2},
              {"beta2_mode",
               std::string(optim::beta2_mode_name(s.beta2_mode))},
              {"epsilon", s.epsilon},
              {"debias", s.debias}};
}

void write_trace_dump(const RunConfig& cfg, const BuiltScenario& sc,
                      const RunResult& result,
                      const std::vector<RealVec>& grads,
                      const std::vector<RealVec>& moments) {
  json j;
  j["method"] = std::string(optim::method_name(cfg.method));
  j["schedule"] = schedule_json(cfg.schedule);
  j["scenario"] = sc.name();
  j["T"] = cfg.T;
  j["dim"] = 1;
  j["d_inf"] = sc.box().diameter_inf();
  j["g_inf"] = sc.g_inf();
  j["regret"] = result.regret;
  j["avg_regret"] = result.avg_regret;
  j["moment_kind"] =
      cfg.method == optim::Method::kAmsgrad ? "vhat" : "v";
  j["grads"] = grads;
  j["moment_trace"] = moments;
  ensure_parent_dir(cfg.trace_dump);
  std::ofstream out(cfg.trace_dump, std::ios::binary);
  if (!out) throw IoError("cannot open " + cfg.trace_dump + " for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failure on " + cfg.trace_dump);
}

}  // namespace

std::string output_dir() {
  const char* dir = std::getenv("ADAOPT_OUT_DIR");
  return (dir && *dir) ? dir : ".";
}

RunResult run(const RunConfig& cfg) {
  CoreResult core = run_core(cfg);
  const std::string path =
      cfg.out.empty() ? join_out(auto_csv_name(cfg)) : cfg.out;
  write_run_csv(path, core);
  core.result.csv_path = path;
  return core.result;
}

CompareResult compare(const std::vector<RunConfig>& cfgs,
                      const std::string& out_path) {
  if (cfgs.size() < 2)
    throw ConfigError("compare: needs at least 2 configs, got " +
                      std::to_string(cfgs.size()));
  std::vector<CoreResult> cores;
  cores.reserve(cfgs.size());
  for (const RunConfig& cfg : cfgs) cores.push_back(run_core(cfg));
  for (std::size_t i = 1; i < cores.size(); ++i) {
    if (cores[i].scenario_name != cores[0].scenario_name)
      throw ConfigError("compare: config " + std::to_string(i) +
                        " runs scenario '" + cores[i].scenario_name +
                        "' but config 0 runs '" + cores[0].scenario_name +
                        "'");
    if (cfgs[i].T != cfgs[0].T)
      throw ConfigError("compare: config " + std::to_string(i) +
                        " has T=" + std::to_string(cfgs[i].T) +
                        " but config 0 has T=" + std::to_string(cfgs[0].T));
    if (cores[i].record_every != cores[0].record_every)
      throw ConfigError("compare: config " + std::to_string(i) +
                        " records every " +
                        std::to_string(cores[i].record_every) +
                        " steps but config 0 every " +
                        std::to_string(cores[0].record_every));
  }

  const std::string path =
      !out_path.empty()
          ? out_path
          : join_out("compare_" +
                     std::string(scenario_kind_name(cfgs[0].scenario)) + "_T" +
                     std::to_string(cfgs[0].T) + ".csv");
  const bool erm = cores[0].erm;
  const std::size_t nrows = cores[0].rows.size();

  CsvFile csv(path);
  std::string header = erm ? "step" : "t";
  for (std::size_t gi = 0; gi < cores.size(); ++gi) {
    const std::string tag = ".g" + std::to_string(gi);
    if (erm) {
      header += ",train_loss" + tag;
    } else {
      for (std::size_t i = 0; i < cores[gi].rows.front().x.size(); ++i)
        header += ",x_" + std::to_string(i) + tag;
      header += ",loss" + tag + ",cum_regret" + tag + ",avg_regret" + tag;
    }
  }
  csv.line(header);
  for (std::size_t r = 0; r < nrows; ++r) {
    std::string line = std::to_string(cores[0].rows[r].t);
    for (const CoreResult& core : cores) {
      const RecordedRow& row = core.rows[r];
      if (erm) {
        line += "," + fmt17(row.loss);
      } else {
        for (double xi : row.x) line += "," + fmt17(xi);
        line += "," + fmt17(row.loss) + "," + fmt17(row.cum_regret) + "," +
                fmt17(row.avg_regret);
      }
    }
    csv.line(line);
  }
  csv.close();

  CompareResult out;
  out.csv_path = path;
  for (CoreResult& core : cores) {
    core.result.csv_path = path;
    out.results.push_back(std::move(core.result));
  }
  return out;
}

CheckedBound check_bound_file(const std::string& trace_json_path) {
  std::ifstream in(trace_json_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + trace_json_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError("trace dump " + trace_json_path + ": " + e.what());
  }
  try {
    const std::string method = j.at("method").get<std::string>();
    const json& js = j.at("schedule");
    optim::Schedule s;
    s.alpha = js.at("alpha").get<double>();
    s.beta1 = js.at("beta1").get<double>();
    s.beta2 = js.at("beta2").get<double>();
    s.lambda = js.at("lambda").get<double>();
    s.epsilon = js.at("epsilon").get<double>();
    s.debias = js.at("debias").get<bool>();
    const auto am = optim::alpha_mode_from_name(
        js.at("alpha_mode").get<std::string>());
    const auto b1m = optim::beta1_mode_from_name(
        js.at("beta1_mode").get<std::string>());
    const auto b2m = optim::beta2_mode_from_name(
        js.at("beta2_mode").get<std::string>());
    if (!am || !b1m || !b2m)
      throw FormatError("trace dump " + trace_json_path +
                        ": unknown schedule mode name");
    s.alpha_mode = *am;
    s.beta1_mode = *b1m;
    s.beta2_mode = *b2m;
    const double d_inf = j.at("d_inf").get<double>();
    const double g_inf = j.at("g_inf").get<double>();
    const double regret = j.at("regret").get<double>();
    const auto grads = j.at("grads").get<std::vector<RealVec>>();
    const auto moments = j.at("moment_trace").get<std::vector<RealVec>>();
    if (moments.empty())
      throw FormatError("trace dump " + trace_json_path +
                        ": empty moment_trace");

    CheckedBound out;
    out.method = method;
    out.empirical_regret = regret;
    if (method == "amsgrad") {
      out.report = analysis::amsgrad_bound(d_inf, g_inf, s, grads,
                                           moments.back(), moments);
    } else if (method == "adam" || method == "rmsprop" ||
               method == "adamnc") {
      out.report = analysis::adamnc_bound(d_inf, g_inf, s, grads, moments);
    } else {
      throw ConfigError("check-bound: no bound evaluator for optimizer '" +
                        method + "'");
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError("trace dump " + trace_json_path + ": " + e.what());
  }
}

bool VerifyReport::all_passed() const {
  for (const PropertyResult& p : properties)
    if (!p.passed) return false;
  return true;
}

}  // namespace adaopt::runner
