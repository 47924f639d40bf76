#include "adaopt/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "adaopt/errors.hpp"

namespace adaopt::scenarios {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

optim::Schedule counterexample_schedule(double beta2, double eps) {
  optim::Schedule s;
  s.alpha = 0.5;  // any alpha < sqrt(1 - beta2) works; beta2 <= 0.2 here
  s.alpha_mode = optim::AlphaMode::kInvSqrtT;
  s.beta1 = 0.0;
  s.beta2 = beta2;
  s.epsilon = eps;
  return s;
}

OnlineScenario make_periodic(std::string name, RealVec cycle, double g_inf,
                             std::optional<optim::Schedule> recommended) {
  if (cycle.empty()) throw ParamError(name + ": empty slope cycle");
  numcore::require_finite(cycle, (name + ": slopes").c_str());
  return OnlineScenario{std::move(name), BoxSet::symmetric(1, 1.0),
                        std::move(cycle), g_inf, -1.0, std::move(recommended)};
}

StochasticScenario make_stochastic(
    std::string name, std::vector<std::pair<double, double>> dist,
    std::uint64_t seed, std::optional<optim::Schedule> recommended) {
  if (dist.empty()) throw ParamError(name + ": empty slope distribution");
  double total = 0.0;
  double expected = 0.0;
  double g_inf = 0.0;
  for (const auto& [slope, prob] : dist) {
    if (!std::isfinite(slope))
      throw NumericError(name + ": non-finite slope");
    if (!std::isfinite(prob) || prob < 0.0 || prob > 1.0)
      throw ParamError(name + ": probability outside [0,1]");
    total += prob;
    expected += slope * prob;
    g_inf = std::max(g_inf, std::abs(slope));
  }
  if (std::abs(total - 1.0) > 1e-15)
    throw ParamError(name + ": probabilities sum to " + fmt_real(total));
  return StochasticScenario{std::move(name),     BoxSet::symmetric(1, 1.0),
                            std::move(dist),     seed,
                            expected,            g_inf,
                            -1.0,                std::move(recommended)};
}

}  // namespace

double OnlineScenario::slope(std::int64_t t) const {
  if (t < 1)
    throw ParamError(name + ": slope index t must be >= 1, got " +
                     std::to_string(t));
  return cycle[static_cast<std::size_t>((t - 1) %
                                        static_cast<std::int64_t>(period()))];
}

SlopeSampler::SlopeSampler(const StochasticScenario& sc) : rng_(sc.seed) {
  double cum = 0.0;
  cumulative_.reserve(sc.slope_distribution.size());
  for (const auto& [slope, prob] : sc.slope_distribution) {
    cum += prob;
    cumulative_.emplace_back(slope, cum);
  }
}

double SlopeSampler::next() {
  const double u = rng_.next_u01();
  for (const auto& [slope, cum] : cumulative_)
    if (u < cum) return slope;
  return cumulative_.back().first;  // unreachable for u < 1 and exact sum 1
}

OnlineScenario thm1_sequence(double C) {
  if (!std::isfinite(C) || C <= 2.0)
    throw ParamError("thm1_sequence: C must be > 2, got " + fmt_real(C));
  const double beta2 = 1.0 / (1.0 + C * C);
  return make_periodic("thm1(C=" + fmt_real(C) + ")", {C, -1.0, -1.0}, C,
                       counterexample_schedule(beta2, 0.0));
}

ConditionCheck check_thm2_conditions(double beta1, double beta2,
                                     std::int64_t C) {
  if (!std::isfinite(beta1) || beta1 < 0.0 || beta1 >= 1.0)
    throw ParamError("check_thm2_conditions: beta1 must lie in [0,1)");
  if (!std::isfinite(beta2) || beta2 < 0.0 || beta2 >= 1.0)
    throw ParamError("check_thm2_conditions: beta2 must lie in [0,1)");
  if (beta2 > 0.0 && beta1 >= std::sqrt(beta2))
    throw ParamError("check_thm2_conditions: requires beta1 < sqrt(beta2)");
  if (beta2 == 0.0 && beta1 > 0.0)
    throw ParamError("check_thm2_conditions: requires beta1 < sqrt(beta2)");
  if (C < 2 || C % 2 != 0)
    throw ParamError("check_thm2_conditions: C must be even and >= 2, got " +
                     std::to_string(C));

  const double Cd = static_cast<double>(C);
  const double b1_pow_cm1 = std::pow(beta1, Cd - 1.0);
  const double slack1 = (1.0 - b1_pow_cm1) - (1.0 - beta1) * b1_pow_cm1 * Cd;
  const double slack2 = 1.0 - std::pow(beta2, (Cd - 2.0) / 2.0) * Cd * Cd;

  // gamma terms as their beta1 -> 0 limits when beta1 == 0.
  const double gamma = optim::gamma_ratio(beta1, beta2);
  const double geom =
      gamma == 0.0
          ? 0.0
          : gamma * (1.0 - std::pow(gamma, Cd - 1.0)) / (1.0 - gamma);
  const double tail =
      beta1 == 0.0 ? (C == 2 ? 1.0 : 0.0)
                   : std::pow(beta1, Cd / 2.0 - 1.0) / (1.0 - beta1);
  const double lhs3 =
      3.0 * (1.0 - beta1) / (2.0 * std::sqrt(1.0 - beta2)) * (1.0 + geom) +
      tail;
  const double slack3 = Cd / 3.0 - lhs3;

  const bool ok = slack1 >= 0.0 && slack2 >= 0.0 && slack3 > 0.0;
  return ConditionCheck{ok, slack1, slack2, slack3};
}

PeriodSearch thm2_sequence(double beta1, double beta2, std::int64_t c_max) {
  if (c_max < 2)
    throw ParamError("thm2_sequence: c_max must be >= 2, got " +
                     std::to_string(c_max));
  ConditionCheck last{};
  std::int64_t last_c = 0;
  for (std::int64_t C = 2; C <= c_max; C += 2) {
    last = check_thm2_conditions(beta1, beta2, C);
    last_c = C;
    if (last.ok) {
      RealVec cycle(static_cast<std::size_t>(C), -1.0);
      cycle[0] = static_cast<double>(C);
      auto scenario = make_periodic(
          "thm2(beta1=" + fmt_real(beta1) + ",beta2=" + fmt_real(beta2) +
              ",C=" + std::to_string(C) + ")",
          std::move(cycle), static_cast<double>(C), std::nullopt);
      return PeriodSearch{C, std::move(scenario)};
    }
  }
  throw SearchExhausted(
      "thm2_sequence: no even C <= " + std::to_string(c_max) +
      " satisfies the conditions for beta1=" + fmt_real(beta1) +
      ", beta2=" + fmt_real(beta2) + "; slacks at C=" + std::to_string(last_c) +
      ": " + fmt_real(last.slack1) + ", " + fmt_real(last.slack2) + ", " +
      fmt_real(last.slack3));
}

StochasticScenario thm3_stochastic(double C, double delta,
                                   std::uint64_t seed) {
  if (!std::isfinite(C) || C < 1.0)
    throw ParamError("thm3_stochastic: C must be >= 1, got " + fmt_real(C));
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0)
    throw ParamError("thm3_stochastic: delta must lie in (0,1), got " +
                     fmt_real(delta));
  const double p = (1.0 + delta) / (C + 1.0);
  if (p > 1.0)
    throw ParamError("thm3_stochastic: p = " + fmt_real(p) + " exceeds 1");
  return make_stochastic(
      "thm3(C=" + fmt_real(C) + ",delta=" + fmt_real(delta) + ")",
      {{C, p}, {-1.0, 1.0 - p}}, seed, std::nullopt);
}

OnlineScenario thm6_epsilon(double C, double eps) {
  if (!std::isfinite(C) || C < 2.0)
    throw ParamError("thm6_epsilon: C must be >= 2, got " + fmt_real(C));
  if (!std::isfinite(eps) || eps <= 0.0)
    throw ParamError("thm6_epsilon: eps must be > 0, got " + fmt_real(eps));
  const double root = std::sqrt(eps);
  const double beta2 = 2.0 / ((1.0 + C * C) * C * C);
  return make_periodic(
      "thm6(C=" + fmt_real(C) + ",eps=" + fmt_real(eps) + ")",
      {C * root, -root, -root}, C * root,
      counterexample_schedule(beta2, eps));
}

OnlineScenario synth_online() {
  RealVec cycle(101, -10.0);
  cycle[0] = 1010.0;
  optim::Schedule s;
  s.alpha = 1.0;
  s.alpha_mode = optim::AlphaMode::kInvSqrtT;
  s.beta1 = 0.9;
  s.beta2 = 0.99;
  return make_periodic("synth_online", std::move(cycle), 1010.0, s);
}

StochasticScenario synth_stochastic(std::uint64_t seed) {
  optim::Schedule s;
  s.alpha = 1.0;
  s.alpha_mode = optim::AlphaMode::kInvSqrtT;
  s.beta1 = 0.9;
  s.beta2 = 0.99;
  return make_stochastic("synth_stochastic",
                         {{1010.0, 0.01}, {-10.0, 0.99}}, seed, s);
}

}  // namespace adaopt::scenarios
