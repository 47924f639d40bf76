#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "adaopt/analysis.hpp"
#include "adaopt/errors.hpp"
#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/rng.hpp"
#include "adaopt/runner.hpp"
#include "adaopt/scenarios.hpp"

// Property batteries behind `verify <suite>`. Each battery draws its own
// deterministic stream, so a failure reproduces from the reported case index
// alone. Batteries state positive properties; error paths live in the unit
// tests.

namespace adaopt::runner {

namespace {

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PropertyResult passed(std::string name, std::string detail) {
  return {std::move(name), true, std::move(detail)};
}

PropertyResult failed(std::string name, std::string detail) {
  return {std::move(name), false, std::move(detail)};
}

// Random bounded-slope streams for methods whose step-size denominator must
// never shrink relative to alpha_t. Slope magnitudes stay in [0.01, 5]: the
// monotonicity argument needs a per-step mass increment that dwarfs rounding,
// and a magnitude floor keeps that margin away from the last few ulps.
PropertyResult gamma_psd_battery(const char* name, optim::Method method,
                                 std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (int run = 0; run < 50; ++run) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(3));
    const numcore::BoxSet box = numcore::BoxSet::symmetric(d, 1.0);
    const optim::FeasibleSet feasible = optim::FeasibleSet::boxed(box);
    optim::Schedule s;
    s.alpha = 0.1 + 1.9 * rng.next_u01();
    s.alpha_mode = optim::AlphaMode::kInvSqrtT;
    s.beta1 = 0.9;
    s.beta2 = 0.999;
    s.epsilon = 0.0;
    RealVec x(d);
    for (double& xi : x) xi = -1.0 + 2.0 * rng.next_u01();
    optim::OptimizerState state = optim::make_state(method, d);
    optim::GammaMonitor monitor(s);
    RealVec g(d);
    for (std::int64_t t = 1; t <= 400; ++t) {
      for (double& gi : g) {
        const double sign = rng.next_u01() < 0.5 ? -1.0 : 1.0;
        gi = sign * (0.01 + 4.99 * rng.next_u01());
      }
      optim::StepResult res =
          optim::step(method, std::move(state), x, g, s, feasible);
      state = std::move(res.state);
      x = std::move(res.x);
      monitor.observe(optim::denominator_sq(method, state, s));
    }
    if (monitor.violation_count() != 0) {
      const optim::GammaViolation& v = monitor.first_violations().front();
      return failed(name, "run " + std::to_string(run) + ": " +
                              std::to_string(monitor.violation_count()) +
                              " rate decreases, first at t=" +
                              std::to_string(v.t) + " coord " +
                              std::to_string(v.coord));
    }
  }
  return passed(name, "50 random runs of 400 steps: step-size rate never "
                      "decreased");
}

// Adam on the period-3 counterexample: a decreasing rate is the expected
// outcome, so violations mean PASS here.
PropertyResult adam_thm1_indefinite() {
  const char* name = "adam_thm1_gamma_indefinite";
  const scenarios::OnlineScenario sc = scenarios::thm1_sequence(4.0);
  const optim::Schedule s = *sc.recommended;
  const optim::FeasibleSet feasible = optim::FeasibleSet::boxed(sc.box);
  optim::OptimizerState state = optim::make_state(optim::Method::kAdam, 1);
  optim::GammaMonitor monitor(s);
  RealVec x{1.0};
  RealVec g(1);
  for (std::int64_t t = 1; t <= 1000; ++t) {
    g[0] = sc.slope(t);
    optim::StepResult res =
        optim::step(optim::Method::kAdam, std::move(state), x, g, s, feasible);
    state = std::move(res.state);
    x = std::move(res.x);
    monitor.observe(optim::denominator_sq(optim::Method::kAdam, state, s));
  }
  if (monitor.violation_count() < 1)
    return failed(name,
                  "expected the period-3 stream to shrink Adam's rate at "
                  "least once in 1000 steps; it never did");
  return passed(name, std::to_string(monitor.violation_count()) +
                          " rate decreases in 1000 steps, first at t=" +
                          std::to_string(monitor.first_violations()[0].t) +
                          " (expected: this stream defeats Adam)");
}

// Random runs whose measured regret must stay below the evaluated guarantee.
// Parameter ranges keep every hypothesis flag satisfiable: beta2 is drawn
// above beta1^2 so beta1/sqrt(beta2) < 1, epsilon stays 0, alpha follows
// alpha/sqrt(t), and beta1_t decays as beta1*lambda^(t-1).
PropertyResult bound_dominance_battery(const char* name, optim::Method method,
                                       std::uint64_t seed) {
  SplitMix64 rng(seed);
  double worst_ratio = 0.0;
  for (int cs = 0; cs < 100; ++cs) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(4));
    const std::int64_t T = 10 + static_cast<std::int64_t>(rng.next_below(991));
    optim::Schedule s;
    s.alpha = 0.5 + 1.5 * rng.next_u01();
    s.alpha_mode = optim::AlphaMode::kInvSqrtT;
    s.beta1 = 0.9 * rng.next_u01();
    s.beta1_mode = optim::Beta1Mode::kExpDecay;
    s.lambda = 0.1 + 0.8 * rng.next_u01();
    const double b1sq = s.beta1 * s.beta1;
    s.beta2 = b1sq + (0.999 - b1sq) * (0.1 + 0.9 * rng.next_u01());
    s.beta2_mode = method == optim::Method::kAdamNc
                       ? optim::Beta2Mode::kOneMinusInvT
                       : optim::Beta2Mode::kConstant;
    s.epsilon = 0.0;
    const numcore::BoxSet box = numcore::BoxSet::symmetric(d, 1.0);
    const optim::FeasibleSet feasible = optim::FeasibleSet::boxed(box);
    analysis::RegretLedger ledger(box);
    RealVec x(d);
    for (double& xi : x) xi = -1.0 + 2.0 * rng.next_u01();
    optim::OptimizerState state = optim::make_state(method, d);
    std::vector<RealVec> grads;
    std::vector<RealVec> moments;
    grads.reserve(static_cast<std::size_t>(T));
    moments.reserve(static_cast<std::size_t>(T));
    RealVec g(d);
    for (std::int64_t t = 1; t <= T; ++t) {
      for (double& gi : g) gi = -1.0 + 2.0 * rng.next_u01();
      ledger.record(g, x);
      optim::StepResult res =
          optim::step(method, std::move(state), x, g, s, feasible);
      state = std::move(res.state);
      x = std::move(res.x);
      grads.push_back(g);
      moments.push_back(method == optim::Method::kAmsgrad ? state.vhat
                                                          : state.v);
    }
    const analysis::BoundReport report =
        method == optim::Method::kAmsgrad
            ? analysis::amsgrad_bound(box.diameter_inf(), 1.0, s, grads,
                                      moments.back(), moments)
            : analysis::adamnc_bound(box.diameter_inf(), 1.0, s, grads,
                                     moments);
    if (!report.all_satisfied()) {
      std::string bad;
      for (const analysis::HypothesisFlag& f : report.flags)
        if (!f.satisfied) bad += (bad.empty() ? "" : ", ") + f.name;
      return failed(name, "case " + std::to_string(cs) +
                              ": hypothesis failed (" + bad + ") " +
                              report.note);
    }
    const double regret = ledger.regret();
    if (!(regret <= report.bound_value))
      return failed(name, "case " + std::to_string(cs) + ": regret " +
                              num_str(regret) + " exceeds bound " +
                              num_str(report.bound_value));
    if (regret > 0.0)
      worst_ratio = std::max(worst_ratio, regret / report.bound_value);
  }
  char ratio[32];
  std::snprintf(ratio, sizeof(ratio), "%.3f", worst_ratio);
  return passed(name, std::string("100 random cases: regret <= bound, worst "
                                  "regret/bound ratio ") +
                          ratio);
}

PropertyResult auer_battery() {
  const char* name = "auer_sum_bound";
  SplitMix64 rng(0xA0E5ull);
  for (int cs = 0; cs < 10000; ++cs) {
    const std::size_t len = 1 + static_cast<std::size_t>(rng.next_below(1000));
    RealVec y(len);
    for (double& yi : y)
      yi = rng.next_u01() < 0.2 ? 0.0 : 5.0 * rng.next_u01();
    const analysis::AuerCheck chk = analysis::auer_check(y);
    if (!chk.ok)
      return failed(name, "case " + std::to_string(cs) + ": lhs " +
                              num_str(chk.lhs) + " exceeds rhs " +
                              num_str(chk.rhs));
  }
  return passed(name, "10000 random nonnegative sequences (length <= 1000, "
                      "sparse zeros): sum y_i/sqrt(prefix) <= 2 sqrt(sum y)");
}

PropertyResult projection_nonexpansive_battery() {
  const char* name = "projection_nonexpansive";
  SplitMix64 rng(0x9803ull);
  for (int cs = 0; cs < 10000; ++cs) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(5));
    RealVec lo(d), hi(d), w(d), z1(d), z2(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = -1.0 - 3.0 * rng.next_u01();
      hi[i] = lo[i] + 0.1 + 3.0 * rng.next_u01();
      w[i] = 0.01 + 5.0 * rng.next_u01();
      z1[i] = -4.0 + 8.0 * rng.next_u01();
      z2[i] = -4.0 + 8.0 * rng.next_u01();
    }
    const numcore::BoxSet box(lo, hi);
    const numcore::DiagWeights weights = numcore::make_weights(w);
    const RealVec p1 = numcore::project_weighted(box, weights, z1);
    const RealVec p2 = numcore::project_weighted(box, weights, z2);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      lhs += w[i] * (p1[i] - p2[i]) * (p1[i] - p2[i]);
      rhs += w[i] * (z1[i] - z2[i]) * (z1[i] - z2[i]);
    }
    if (lhs > rhs + 1e-12)
      return failed(name, "case " + std::to_string(cs) +
                              ": projected distance " + num_str(lhs) +
                              " exceeds original " + num_str(rhs));
  }
  return passed(name, "10000 random boxes/weights/point pairs: projection "
                      "never increased the weighted distance");
}

PropertyResult projection_idempotent_battery() {
  const char* name = "projection_idempotent";
  SplitMix64 rng(0x1DE3ull);
  for (int cs = 0; cs < 10000; ++cs) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(5));
    RealVec lo(d), hi(d), w(d), z(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = -1.0 - 3.0 * rng.next_u01();
      hi[i] = lo[i] + 0.1 + 3.0 * rng.next_u01();
      w[i] = 0.01 + 5.0 * rng.next_u01();
      z[i] = -4.0 + 8.0 * rng.next_u01();
    }
    const numcore::BoxSet box(lo, hi);
    const numcore::DiagWeights weights = numcore::make_weights(w);
    const RealVec p = numcore::project_weighted(box, weights, z);
    const RealVec q = numcore::project_weighted(box, weights, p);
    if (q != p)
      return failed(name,
                    "case " + std::to_string(cs) + ": projecting a projected "
                    "point moved it");
  }
  return passed(name, "10000 random instances: projecting twice equals "
                      "projecting once, bitwise");
}

// Clamped 1-D drift: when every nonpositive increment precedes every positive
// one, the clamped endpoint cannot fall below min(hi, y_1 + sum of
// increments). This is the mechanism that pins the counterexample iterate to
// the box ceiling each period.
PropertyResult drift_battery() {
  const char* name = "drift_lemma_clamped";
  SplitMix64 rng(0xD81Full);
  for (int cs = 0; cs < 10000; ++cs) {
    const double a = -2.0 + 4.0 * rng.next_u01();
    const double b = a + 0.1 + 2.0 * rng.next_u01();
    const std::int64_t T = 1 + static_cast<std::int64_t>(rng.next_below(50));
    const std::int64_t k_neg =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(T + 1)));
    double y = a + (b - a) * rng.next_u01();
    const double y1 = y;
    double drift = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
      const double delta = t < k_neg ? -2.0 * rng.next_u01()
                                     : 1e-9 + 2.0 * rng.next_u01();
      drift += delta;
      y = std::min(b, std::max(a, y + delta));
    }
    const double floor = std::min(b, y1 + drift);
    if (y < floor - 1e-12)
      return failed(name, "case " + std::to_string(cs) + ": endpoint " +
                              num_str(y) + " fell below " + num_str(floor));
  }
  return passed(name, "10000 random sign-split increment sequences: clamped "
                      "endpoint >= min(hi, start + total drift)");
}

PropertyResult thm2_crossover() {
  const char* name = "thm2_condition_crossover";
  const scenarios::ConditionCheck c18 =
      scenarios::check_thm2_conditions(0.0, 0.5, 18);
  const scenarios::ConditionCheck c20 =
      scenarios::check_thm2_conditions(0.0, 0.5, 20);
  if (c18.ok)
    return failed(name, "C=18 reported feasible; slack2 should be negative");
  if (std::fabs(c18.slack2 - (-0.265625)) > 1e-12)
    return failed(name, "C=18 slack2 " + num_str(c18.slack2) +
                            " != -0.265625");
  if (!c20.ok)
    return failed(name, "C=20 reported infeasible; slacks " +
                            num_str(c20.slack1) + ", " + num_str(c20.slack2) +
                            ", " + num_str(c20.slack3));
  if (std::fabs(c20.slack1 - 1.0) > 1e-12 ||
      std::fabs(c20.slack2 - 0.21875) > 1e-12 ||
      std::fabs(c20.slack3 - 4.545346323107024) > 1e-12)
    return failed(name, "C=20 slacks " + num_str(c20.slack1) + ", " +
                            num_str(c20.slack2) + ", " + num_str(c20.slack3) +
                            " drifted from 1, 0.21875, 4.545346323107024");
  return passed(name, "beta1=0, beta2=0.5: C=18 infeasible (slack2 "
                      "-0.265625), C=20 feasible, slacks match");
}

PropertyResult thm2_search_small() {
  const char* name = "thm2_search_beta2_half";
  const scenarios::PeriodSearch found = scenarios::thm2_sequence(0.0, 0.5);
  if (found.C != 20)
    return failed(name, "expected C=20, got " + std::to_string(found.C));
  const scenarios::OnlineScenario& sc = found.scenario;
  if (sc.period() != 20 || sc.slope(1) != 20.0 || sc.slope(2) != -1.0 ||
      sc.slope(20) != -1.0 || sc.slope(21) != 20.0)
    return failed(name, "period-20 slope pattern is wrong");
  return passed(name, "smallest feasible even period at beta1=0, beta2=0.5 "
                      "is 20, slopes (20, -1 x19)");
}

PropertyResult thm2_search_large() {
  const char* name = "thm2_search_adam_defaults";
  const scenarios::PeriodSearch found =
      scenarios::thm2_sequence(0.9, 0.999);
  if (found.C != 42622)
    return failed(name, "expected C=42622, got " + std::to_string(found.C));
  if (found.scenario.period() != 42622)
    return failed(name, "scenario period mismatches the found C");
  return passed(name, "smallest feasible even period at beta1=0.9, "
                      "beta2=0.999 is 42622");
}

PropertyResult thm3_expectation() {
  const char* name = "thm3_expected_slope";
  const scenarios::StochasticScenario frozen =
      scenarios::thm3_stochastic(9.0, 0.1, 7);
  const double p = (1.0 + 0.1) / (9.0 + 1.0);
  if (frozen.slope_distribution.size() != 2 ||
      frozen.slope_distribution[0] != std::pair<double, double>{9.0, p} ||
      frozen.slope_distribution[1] != std::pair<double, double>{-1.0, 1.0 - p})
    return failed(name, "C=9, delta=0.1 distribution is not "
                        "{(9, 0.11), (-1, 0.89)}");
  if (std::fabs(frozen.expected_slope - 0.1) > 1e-12)
    return failed(name, "C=9, delta=0.1 expected slope " +
                            num_str(frozen.expected_slope) + " != 0.1");
  SplitMix64 rng(0x7133ull);
  for (int cs = 0; cs < 30; ++cs) {
    const double C = 1.0 + static_cast<double>(rng.next_below(20));
    const double delta = 0.05 + 0.9 * rng.next_u01();
    const scenarios::StochasticScenario sc =
        scenarios::thm3_stochastic(C, delta, 1);
    if (std::fabs(sc.expected_slope - delta) > 1e-12)
      return failed(name, "case " + std::to_string(cs) + " (C=" + num_str(C) +
                              ", delta=" + num_str(delta) +
                              "): expected slope " +
                              num_str(sc.expected_slope));
  }
  return passed(name, "expected slope equals delta to 1e-12 on the frozen "
                      "and 30 random (C, delta) pairs");
}

PropertyResult thm1_parameters() {
  const char* name = "thm1_parameters";
  SplitMix64 rng(0x7117ull);
  for (int cs = 0; cs < 30; ++cs) {
    const double C = 2.01 + 97.0 * rng.next_u01();
    const scenarios::OnlineScenario sc = scenarios::thm1_sequence(C);
    const optim::Schedule& s = *sc.recommended;
    const double period_drift = sc.cycle[0] + sc.cycle[1] + sc.cycle[2];
    if (sc.cycle.size() != 3 || sc.cycle[0] != C || sc.cycle[1] != -1.0 ||
        sc.cycle[2] != -1.0 || sc.g_inf != C)
      return failed(name, "case " + std::to_string(cs) + " (C=" + num_str(C) +
                              "): slope cycle is not (C, -1, -1)");
    if (s.beta1 != 0.0 || s.beta2 != 1.0 / (1.0 + C * C) || s.alpha != 0.5 ||
        s.alpha_mode != optim::AlphaMode::kInvSqrtT || s.epsilon != 0.0)
      return failed(name, "case " + std::to_string(cs) + " (C=" + num_str(C) +
                              "): recommended schedule drifted");
    if (!(period_drift > 0.0))
      return failed(name, "case " + std::to_string(cs) + " (C=" + num_str(C) +
                              "): per-period slope sum " +
                              num_str(period_drift) + " not positive");
  }
  return passed(name, "30 random C > 2: slopes (C, -1, -1), beta2 = "
                      "1/(1+C^2), positive per-period drift");
}

PropertyResult thm6_parameters() {
  const char* name = "thm6_parameters";
  const scenarios::OnlineScenario unit = scenarios::thm6_epsilon(4.0, 1.0);
  const scenarios::OnlineScenario quarter = scenarios::thm6_epsilon(4.0, 0.25);
  const double beta2 = 2.0 / ((1.0 + 16.0) * 16.0);
  if (unit.cycle != RealVec{4.0, -1.0, -1.0} ||
      unit.recommended->beta2 != beta2 || unit.recommended->epsilon != 1.0)
    return failed(name, "eps=1: expected slopes (4, -1, -1), beta2 = 2/272, "
                        "epsilon 1");
  if (quarter.cycle != RealVec{2.0, -0.5, -0.5} ||
      quarter.recommended->beta2 != beta2 ||
      quarter.recommended->epsilon != 0.25)
    return failed(name, "eps=0.25: expected slopes (2, -0.5, -0.5), same "
                        "beta2, epsilon 0.25");
  return passed(name, "slopes scale by sqrt(eps), beta2 = 2/((1+C^2)C^2) "
                      "independent of eps, scenario carries eps");
}

}  // namespace

VerifyReport verify_gamma() {
  VerifyReport report;
  report.suite = "gamma";
  report.properties.push_back(
      gamma_psd_battery("sgd_gamma_psd", optim::Method::kSgd, 0x5D01ull));
  report.properties.push_back(gamma_psd_battery(
      "adagrad_gamma_psd", optim::Method::kAdagrad, 0xADA6ull));
  report.properties.push_back(gamma_psd_battery(
      "amsgrad_gamma_psd", optim::Method::kAmsgrad, 0xA356ull));
  report.properties.push_back(adam_thm1_indefinite());
  return report;
}

VerifyReport verify_bounds() {
  VerifyReport report;
  report.suite = "bounds";
  report.properties.push_back(bound_dominance_battery(
      "amsgrad_bound_dominates", optim::Method::kAmsgrad, 0xB0B1ull));
  report.properties.push_back(bound_dominance_battery(
      "adamnc_bound_dominates", optim::Method::kAdamNc, 0xB0B2ull));
  return report;
}

VerifyReport verify_lemmas() {
  VerifyReport report;
  report.suite = "lemmas";
  report.properties.push_back(auer_battery());
  report.properties.push_back(projection_nonexpansive_battery());
  report.properties.push_back(projection_idempotent_battery());
  report.properties.push_back(drift_battery());
  return report;
}

VerifyReport verify_conditions() {
  VerifyReport report;
  report.suite = "conditions";
  report.properties.push_back(thm2_crossover());
  report.properties.push_back(thm2_search_small());
  report.properties.push_back(thm2_search_large());
  report.properties.push_back(thm3_expectation());
  report.properties.push_back(thm1_parameters());
  report.properties.push_back(thm6_parameters());
  return report;
}

VerifyReport verify_suite(std::string_view name) {
  if (name == "gamma") return verify_gamma();
  if (name == "bounds") return verify_bounds();
  if (name == "lemmas") return verify_lemmas();
  if (name == "conditions") return verify_conditions();
  if (name == "all") {
    VerifyReport all;
    all.suite = "all";
    for (VerifyReport part : {verify_gamma(), verify_bounds(), verify_lemmas(),
                              verify_conditions()})
      for (PropertyResult& p : part.properties)
        all.properties.push_back(std::move(p));
    return all;
  }
  throw ConfigError("verify: unknown suite '" + std::string(name) +
                    "' (expected gamma, bounds, lemmas, conditions, or all)");
}

}  // namespace adaopt::runner
