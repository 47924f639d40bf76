#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/scenarios.hpp"

namespace adaopt::analysis {

using numcore::BoxSet;
using numcore::RealVec;

// Exact regret accounting for linear losses f_t(x) = <c_t, x> on a box. The
// best fixed comparator has the closed form x*[i] = lo[i] when the summed
// slope is positive, hi[i] otherwise (ties take lo), so the ledger only
// needs the loss total and the per-coordinate slope sums.
class RegretLedger {
 public:
  explicit RegretLedger(BoxSet box);

  // f_t(x) = <slope, x> for the round just played.
  void record(const RealVec& slope, const RealVec& x);

  std::int64_t rounds() const { return rounds_; }
  double cumulative_loss() const { return cum_loss_; }
  const RealVec& slope_sums() const { return cum_slope_; }
  RealVec comparator() const;
  double comparator_loss() const;
  double regret() const;      // cumulative_loss - comparator_loss
  double avg_regret() const;  // regret / rounds; ParamError before round 1

 private:
  BoxSet box_;
  RealVec cum_slope_;
  double cum_loss_ = 0.0;
  std::int64_t rounds_ = 0;
};

struct RegretSummary {
  double regret;
  double avg_regret;
};

// Regret of an iterate trace against a periodic scenario's own slopes.
// x_trace[k] is the point played at round k+1.
RegretSummary regret(const scenarios::OnlineScenario& sc,
                     const std::vector<RealVec>& x_trace);

struct HypothesisFlag {
  std::string name;
  bool satisfied;
  double slack;  // margin by which the hypothesis holds; negative when not
};

// Evaluation of a theoretical regret bound on one run's data. bound_value is
// finite only when every hypothesis flag is satisfied. terms itemizes the
// summands and auxiliary quantities by name; inputs_digest records the
// scalars and reductions the evaluation consumed.
struct BoundReport {
  double bound_value;
  std::vector<HypothesisFlag> flags;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::pair<std::string, double>> inputs_digest;
  std::string note;  // free-form, e.g. a condition violation site

  bool all_satisfied() const;
};

// Three-term guarantee for a max-stabilized run:
//   D^2 sqrt(T)/(a(1-b1)) * sum_i sqrt(vhat_T[i])
//   + D^2/(1-b1)^2 * sum_t sum_i b1_t sqrt(vhat_t[i])/a_t
//   + a sqrt(1+ln T)/((1-b1)^2 (1-gamma) sqrt(1-b2)) * sum_i ||g_{1:T,i}||_2
// Hypotheses (each a flag): a_t = a/sqrt(t); b1_t <= b1 for all t; gamma =
// b1/sqrt(b2) < 1; epsilon = 0; debias off. When the beta1 schedule is
// exp_decay(lambda), the middle term is replaced by its closed-form upper
// bound b1 D^2 G/((1-b1)^2 (1-lambda)^2) and the trace value stays in terms.
// A G*sqrt(T)-shaped refinement (every data reduction replaced by its G
// worst case) is reported too; bound_value is the smaller of the two.
// grads[k] and vhat_trace[k] belong to step k+1; vhat_T must equal the last
// trace row.
BoundReport amsgrad_bound(double D_inf, double G_inf,
                          const optim::Schedule& s,
                          const std::vector<RealVec>& grads,
                          const RealVec& vhat_T,
                          const std::vector<RealVec>& vhat_trace);

// Guarantee for the time-varying-beta2 run:
//   D^2/(2a(1-b1)) * sum_i sqrt(T) sqrt(v_T[i])
//   + D^2/(1-b1)^2 * sum_t sum_i b1_t sqrt(v_t[i])/a_t
//   + 2 zeta/(1-b1)^3 * sum_i ||g_{1:T,i}||_2
// zeta is measured on the trace as max over (t,i) of
// a_t sqrt(sum_{j<=t} g_{j,i}^2)/sqrt(v_t[i]) (terms with zero prefix mass
// skipped); the flag fails when no finite value exists. The second condition,
// sqrt(v_t[i])/a_t nondecreasing in t, is checked with 1e-12 relative slack;
// a violation puts the first site in note and forces bound = +inf.
BoundReport adamnc_bound(double D_inf, double G_inf, const optim::Schedule& s,
                         const std::vector<RealVec>& grads,
                         const std::vector<RealVec>& v_trace);

struct AuerCheck {
  double lhs;
  double rhs;
  bool ok;
};

// lhs = sum_i y_i/sqrt(y_1+...+y_i) (terms with zero prefix sum count as 0),
// rhs = 2 sqrt(sum y_i), ok = lhs <= rhs + 1e-12. DomainError on negative y.
AuerCheck auer_check(const RealVec& y);

}  // namespace adaopt::analysis
