#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/rng.hpp"

namespace adaopt::scenarios {

using numcore::BoxSet;
using numcore::RealVec;

// One-dimensional linear losses f_t(x) = c_t * x over a box, with the slope
// sequence periodic in t. Immutable descriptor; safe to share across runs.
struct OnlineScenario {
  std::string name;
  BoxSet box;
  RealVec cycle;           // slopes for one period; slope(t) = cycle[(t-1) % period]
  double g_inf;            // declared bound on |c_t|
  double comparator_hint;  // argmin of the per-period sum over the box
  std::optional<optim::Schedule> recommended;

  std::size_t period() const { return cycle.size(); }
  double slope(std::int64_t t) const;
};

// Same loss family with the slope drawn i.i.d. per round from a finite
// distribution. The descriptor is immutable; sampling state lives in
// SlopeSampler instances owned by each run.
struct StochasticScenario {
  std::string name;
  BoxSet box;
  // (slope, probability) pairs in draw order; probabilities sum to 1.
  std::vector<std::pair<double, double>> slope_distribution;
  std::uint64_t seed;
  double expected_slope;  // sum of slope * probability, as computed
  double g_inf;
  double comparator_hint;
  std::optional<optim::Schedule> recommended;
};

// Draws the slope stream for a stochastic scenario: u = next_u01(), then the
// first entry whose cumulative probability exceeds u. One uniform per draw.
class SlopeSampler {
 public:
  explicit SlopeSampler(const StochasticScenario& sc);
  double next();

 private:
  std::vector<std::pair<double, double>> cumulative_;  // (slope, cum prob)
  SplitMix64 rng_;
};

// Period-3 slopes (C, -1, -1) on [-1,1]. The recommended schedule (beta1 = 0,
// beta2 = 1/(1+C^2), alpha_t = alpha/sqrt(t) with alpha < sqrt(1-beta2))
// makes Adam's iterates return to +1 every period while x = -1 is optimal.
// ParamError unless C > 2.
OnlineScenario thm1_sequence(double C);

struct ConditionCheck {
  bool ok;
  // rhs - lhs of each inequality; nonnegative (strictly positive for the
  // third) iff the inequality holds.
  double slack1;
  double slack2;
  double slack3;
};

// The three inequalities a period-C construction needs:
//   (i)   (1-b1) * b1^(C-1) * C      <= 1 - b1^(C-1)
//   (ii)  b2^((C-2)/2) * C^2         <= 1
//   (iii) 3(1-b1)/(2 sqrt(1-b2)) * (1 + gamma*(1-gamma^(C-1))/(1-gamma))
//           + b1^(C/2-1)/(1-b1)      <  C/3,     gamma = b1/sqrt(b2)
// The gamma terms use the exact finite geometric sum and are taken as their
// beta1 -> 0 limits when beta1 == 0. ParamError unless beta1, beta2 lie in
// [0,1) with beta1 < sqrt(beta2) when beta2 > 0, and C is even and >= 2.
ConditionCheck check_thm2_conditions(double beta1, double beta2,
                                     std::int64_t C);

struct PeriodSearch {
  std::int64_t C;
  OnlineScenario scenario;
};

// Smallest even C passing check_thm2_conditions, with the period-C scenario
// of slopes (C, -1, ..., -1) on [-1,1]. SearchExhausted when no C <= c_max
// qualifies (the slacks at c_max go in the message).
PeriodSearch thm2_sequence(double beta1, double beta2,
                           std::int64_t c_max = 1'000'000);

// Slope C with probability p = (1+delta)/(C+1), slope -1 otherwise, on
// [-1,1]. The expected slope is delta, so the expected loss delta*x is
// minimized at -1, yet the rare large slope drags Adam upward. ParamError
// unless C >= 1, delta in (0,1), and p <= 1.
StochasticScenario thm3_stochastic(double C, double delta, std::uint64_t seed);

// The thm1 construction rescaled for the epsilon-modified update: slopes
// (C*sqrt(eps), -sqrt(eps), -sqrt(eps)) with beta2 = 2/((1+C^2)*C^2) and the
// given eps inside the denominator root. ParamError unless C >= 2, eps > 0.
OnlineScenario thm6_epsilon(double C, double eps);

// Synthetic experiment pair: online slope 1010 when t mod 101 = 1, else -10;
// stochastic slope 1010 with probability 0.01, else -10 (expected slope 0.2).
// Both on [-1,1] with optimum -1.
OnlineScenario synth_online();
StochasticScenario synth_stochastic(std::uint64_t seed);

}  // namespace adaopt::scenarios
