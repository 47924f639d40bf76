#include <cstdint>
#include <fstream>
#include <string>

#include "adaopt/errors.hpp"
#include "adaopt/runner.hpp"

namespace adaopt::runner {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + value +
                      "' is not a real number");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + value +
                      "' is not an integer");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-')
      throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + value +
                      "' is not a nonnegative integer");
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  const std::int64_t v = parse_int(key, value);
  if (v < 1)
    throw ConfigError("config key '" + key + "': must be >= 1, got " + value);
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': '" + value +
                    "' is not a boolean (true/false)");
}

}  // namespace

std::string_view scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kThm1: return "thm1";
    case ScenarioKind::kThm2: return "thm2";
    case ScenarioKind::kThm3: return "thm3";
    case ScenarioKind::kThm6: return "thm6";
    case ScenarioKind::kSynthOnline: return "synth_online";
    case ScenarioKind::kSynthStochastic: return "synth_stochastic";
    case ScenarioKind::kErmSynthetic: return "erm_synthetic";
    case ScenarioKind::kErmMnist: return "erm_mnist";
  }
  throw ParamError("scenario_kind_name: unknown kind");
}

std::optional<ScenarioKind> scenario_kind_from_name(std::string_view name) {
  if (name == "thm1") return ScenarioKind::kThm1;
  if (name == "thm2") return ScenarioKind::kThm2;
  if (name == "thm3") return ScenarioKind::kThm3;
  if (name == "thm6") return ScenarioKind::kThm6;
  if (name == "synth_online") return ScenarioKind::kSynthOnline;
  if (name == "synth_stochastic") return ScenarioKind::kSynthStochastic;
  if (name == "erm_synthetic") return ScenarioKind::kErmSynthetic;
  if (name == "erm_mnist") return ScenarioKind::kErmMnist;
  return std::nullopt;
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "scenario") {
    const auto kind = scenario_kind_from_name(value);
    if (!kind)
      throw ConfigError("config key 'scenario': unknown scenario '" + value +
                        "'");
    cfg.scenario = *kind;
  } else if (key == "c") {
    cfg.c = parse_real(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_real(key, value);
  } else if (key == "eps") {
    cfg.eps = parse_real(key, value);
  } else if (key == "erm_n") {
    cfg.erm_n = parse_size(key, value);
  } else if (key == "erm_p") {
    cfg.erm_p = parse_size(key, value);
  } else if (key == "erm_k") {
    cfg.erm_k = parse_size(key, value);
  } else if (key == "erm_margin") {
    cfg.erm_margin = parse_real(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_size(key, value);
  } else if (key == "mnist_images") {
    cfg.mnist_images = value;
  } else if (key == "mnist_labels") {
    cfg.mnist_labels = value;
  } else if (key == "optimizer") {
    const auto m = optim::method_from_name(value);
    if (!m)
      throw ConfigError("config key 'optimizer': unknown optimizer '" + value +
                        "'");
    cfg.method = *m;
  } else if (key == "alpha") {
    cfg.schedule.alpha = parse_real(key, value);
  } else if (key == "alpha_mode") {
    const auto m = optim::alpha_mode_from_name(value);
    if (!m) throw ConfigError("config key 'alpha_mode': unknown mode '" +
                              value + "'");
    cfg.schedule.alpha_mode = *m;
  } else if (key == "beta1") {
    cfg.schedule.beta1 = parse_real(key, value);
  } else if (key == "beta1_mode") {
    const auto m = optim::beta1_mode_from_name(value);
    if (!m) throw ConfigError("config key 'beta1_mode': unknown mode '" +
                              value + "'");
    cfg.schedule.beta1_mode = *m;
  } else if (key == "lambda") {
    cfg.schedule.lambda = parse_real(key, value);
  } else if (key == "beta2") {
    cfg.schedule.beta2 = parse_real(key, value);
  } else if (key == "beta2_mode") {
    const auto m = optim::beta2_mode_from_name(value);
    if (!m) throw ConfigError("config key 'beta2_mode': unknown mode '" +
                              value + "'");
    cfg.schedule.beta2_mode = *m;
  } else if (key == "epsilon") {
    cfg.schedule.epsilon = parse_real(key, value);
  } else if (key == "debias") {
    cfg.schedule.debias = parse_bool(key, value);
  } else if (key == "T") {
    cfg.T = parse_int(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "x0") {
    cfg.x0 = parse_real(key, value);
  } else if (key == "unprojected") {
    cfg.unprojected = parse_bool(key, value);
  } else if (key == "record_every") {
    cfg.record_every = parse_int(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "trace_dump") {
    cfg.trace_dump = value;
  } else if (key == "label") {
    cfg.label = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config file " + path + " line " +
                        std::to_string(lineno) + ": expected key=value");
    apply_override(cfg, trim(stripped.substr(0, eq)),
                   trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace adaopt::runner
