#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "adaopt/errors.hpp"
#include "adaopt/scenarios.hpp"

using adaopt::ParamError;
using adaopt::SearchExhausted;
namespace optim = adaopt::optim;
namespace scenarios = adaopt::scenarios;
using scenarios::OnlineScenario;
using scenarios::StochasticScenario;

TEST_CASE("period-3 scenario pins slopes, schedule, and optimum") {
  const OnlineScenario sc = scenarios::thm1_sequence(4.0);
  REQUIRE(sc.period() == 3);
  CHECK(sc.cycle == adaopt::numcore::RealVec{4.0, -1.0, -1.0});
  CHECK(sc.g_inf == 4.0);
  CHECK(sc.comparator_hint == -1.0);
  CHECK(sc.box.dim() == 1);
  CHECK(sc.box.diameter_inf() == 2.0);

  REQUIRE(sc.recommended.has_value());
  const optim::Schedule& s = *sc.recommended;
  CHECK(s.beta1 == 0.0);
  CHECK(s.beta2 == 1.0 / 17.0);
  CHECK(s.alpha == 0.5);
  CHECK(s.alpha_mode == optim::AlphaMode::kInvSqrtT);
  CHECK(s.epsilon == 0.0);

  // Per-period drift: C - 2 > 0 pushes the comparator-facing sum upward.
  CHECK(sc.slope(1) + sc.slope(2) + sc.slope(3) == 2.0);

  CHECK_THROWS_AS(scenarios::thm1_sequence(2.0), ParamError);
  CHECK_THROWS_AS(scenarios::thm1_sequence(-4.0), ParamError);
}

TEST_CASE("slope is exactly periodic far into the sequence") {
  const OnlineScenario sc = scenarios::thm1_sequence(4.0);
  for (std::int64_t t : {1, 2, 3, 100, 9999, 1'000'000}) {
    CHECK(sc.slope(t) == sc.slope(t + 3));
    CHECK(sc.slope(t) == sc.slope(t + 3 * 12345));
  }
  CHECK(sc.slope(1) == 4.0);
  CHECK(sc.slope(2) == -1.0);
  CHECK(sc.slope(3) == -1.0);
  CHECK(sc.slope(4) == 4.0);
  CHECK_THROWS_AS(sc.slope(0), ParamError);
}

TEST_CASE("condition slacks cross between C=18 and C=20") {
  const scenarios::ConditionCheck c18 =
      scenarios::check_thm2_conditions(0.0, 0.5, 18);
  CHECK_FALSE(c18.ok);
  CHECK(c18.slack2 == doctest::Approx(-0.265625).epsilon(1e-12));

  const scenarios::ConditionCheck c20 =
      scenarios::check_thm2_conditions(0.0, 0.5, 20);
  CHECK(c20.ok);
  CHECK(c20.slack1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c20.slack2 == doctest::Approx(0.21875).epsilon(1e-12));
  CHECK(c20.slack3 == doctest::Approx(4.545346323107024).epsilon(1e-12));

  CHECK_THROWS_AS(scenarios::check_thm2_conditions(0.9, 0.5, 20), ParamError);
  CHECK_THROWS_AS(scenarios::check_thm2_conditions(0.0, 0.5, 19), ParamError);
  CHECK_THROWS_AS(scenarios::check_thm2_conditions(-0.1, 0.5, 20), ParamError);
}

TEST_CASE("period search finds the frozen C for both regimes") {
  const scenarios::PeriodSearch small = scenarios::thm2_sequence(0.0, 0.5);
  CHECK(small.C == 20);
  REQUIRE(small.scenario.period() == 20);
  CHECK(small.scenario.slope(1) == 20.0);
  CHECK(small.scenario.slope(2) == -1.0);
  CHECK(small.scenario.slope(20) == -1.0);
  CHECK(small.scenario.slope(21) == 20.0);
  CHECK(small.scenario.g_inf == 20.0);

  const scenarios::PeriodSearch large = scenarios::thm2_sequence(0.9, 0.999);
  CHECK(large.C == 42622);

  try {
    scenarios::thm2_sequence(0.9, 0.999, 10);
    FAIL("expected SearchExhausted");
  } catch (const SearchExhausted& e) {
    // The message carries the slacks at the cap so callers can see how far
    // off the largest candidate was.
    CHECK(std::string(e.what()).find("slack") != std::string::npos);
  }
}

TEST_CASE("stochastic construction pins the distribution and expectation") {
  const StochasticScenario sc = scenarios::thm3_stochastic(9.0, 0.1, 7);
  REQUIRE(sc.slope_distribution.size() == 2);
  CHECK(sc.slope_distribution[0].first == 9.0);
  CHECK(sc.slope_distribution[0].second ==
        doctest::Approx(0.11).epsilon(1e-15));
  CHECK(sc.slope_distribution[1].first == -1.0);
  CHECK(sc.expected_slope == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sc.comparator_hint == -1.0);
  CHECK(sc.g_inf == 9.0);

  double total = 0.0;
  for (const auto& [slope, prob] : sc.slope_distribution) total += prob;
  CHECK(std::fabs(total - 1.0) <= 1e-15);

  CHECK_THROWS_AS(scenarios::thm3_stochastic(0.5, 0.1, 7), ParamError);
  CHECK_THROWS_AS(scenarios::thm3_stochastic(9.0, 0.0, 7), ParamError);
  CHECK_THROWS_AS(scenarios::thm3_stochastic(9.0, 1.0, 7), ParamError);
  // C >= 1 and delta < 1 force p = (1+delta)/(C+1) < 1, so the accepted
  // domain never produces an invalid probability.
  CHECK_NOTHROW(scenarios::thm3_stochastic(1.0, 0.999, 7));
}

TEST_CASE("slope sampler is deterministic per seed and matches probabilities") {
  const StochasticScenario sc = scenarios::thm3_stochastic(9.0, 0.1, 123);
  scenarios::SlopeSampler a(sc);
  scenarios::SlopeSampler b(sc);
  bool diverged = false;
  const StochasticScenario other = scenarios::thm3_stochastic(9.0, 0.1, 124);
  scenarios::SlopeSampler c(other);
  for (int i = 0; i < 1000; ++i) {
    const double va = a.next();
    CHECK(va == b.next());
    if (va != c.next()) diverged = true;
  }
  CHECK(diverged);

  // Frequency of the rare slope over 1e6 draws stays within five standard
  // deviations of p.
  const double p = sc.slope_distribution[0].second;
  scenarios::SlopeSampler s(sc);
  std::int64_t hits = 0;
  const std::int64_t n = 1'000'000;
  for (std::int64_t i = 0; i < n; ++i)
    if (s.next() == 9.0) ++hits;
  const double freq = static_cast<double>(hits) / static_cast<double>(n);
  CHECK(std::fabs(freq - p) <= 5.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("epsilon-rescaled scenario matches both pinned instances") {
  const OnlineScenario a = scenarios::thm6_epsilon(4.0, 1.0);
  CHECK(a.cycle == adaopt::numcore::RealVec{4.0, -1.0, -1.0});
  REQUIRE(a.recommended.has_value());
  CHECK(a.recommended->beta2 == 2.0 / ((1.0 + 16.0) * 16.0));
  CHECK(a.recommended->epsilon == 1.0);

  const OnlineScenario b = scenarios::thm6_epsilon(4.0, 0.25);
  CHECK(b.cycle == adaopt::numcore::RealVec{2.0, -0.5, -0.5});
  CHECK(b.recommended->beta2 == a.recommended->beta2);  // eps-independent
  CHECK(b.recommended->epsilon == 0.25);

  CHECK_THROWS_AS(scenarios::thm6_epsilon(1.5, 1.0), ParamError);
  CHECK_THROWS_AS(scenarios::thm6_epsilon(4.0, 0.0), ParamError);
}

TEST_CASE("synthetic online scenario fires the large slope every 101 rounds") {
  const OnlineScenario sc = scenarios::synth_online();
  REQUIRE(sc.period() == 101);
  CHECK(sc.slope(1) == 1010.0);
  CHECK(sc.slope(2) == -10.0);
  CHECK(sc.slope(101) == -10.0);
  CHECK(sc.slope(102) == 1010.0);
  CHECK(sc.slope(203) == 1010.0);
  CHECK(sc.g_inf == 1010.0);
  CHECK(sc.comparator_hint == -1.0);
  // Period sum 1010 - 100*10 = 10 > 0, so -1 is optimal over full periods.
  double sum = 0.0;
  for (std::int64_t t = 1; t <= 101; ++t) sum += sc.slope(t);
  CHECK(sum == 10.0);
}

TEST_CASE("synthetic stochastic scenario has expected slope 0.2") {
  const StochasticScenario sc = scenarios::synth_stochastic(9);
  REQUIRE(sc.slope_distribution.size() == 2);
  CHECK(sc.slope_distribution[0] == std::pair<double, double>{1010.0, 0.01});
  CHECK(sc.slope_distribution[1].first == -10.0);
  CHECK(sc.expected_slope == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(sc.seed == 9);
}
