#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "adaopt/numcore.hpp"

namespace adaopt::optim {

using numcore::BoxSet;
using numcore::RealVec;

// The six concrete instances of the generic adaptive loop. RMSprop is Adam
// with beta1 forced to 0; AdamNc is Adam with a time-varying beta2 schedule
// and no running max.
enum class Method { kSgd, kAdagrad, kRmsprop, kAdam, kAmsgrad, kAdamNc };

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

enum class AlphaMode { kConstant, kInvSqrtT };
enum class Beta1Mode { kConstant, kExpDecay, kHarmonic };
enum class Beta2Mode { kConstant, kOneMinusInvT };

// Config/trace-file spellings: "constant", "inv_sqrt_t", "exp_decay",
// "harmonic", "one_minus_inv_t".
std::string_view alpha_mode_name(AlphaMode m);
std::optional<AlphaMode> alpha_mode_from_name(std::string_view name);
std::string_view beta1_mode_name(Beta1Mode m);
std::optional<Beta1Mode> beta1_mode_from_name(std::string_view name);
std::string_view beta2_mode_name(Beta2Mode m);
std::optional<Beta2Mode> beta2_mode_from_name(std::string_view name);

// Hyperparameters plus their time schedules.
//   alpha_t:  alpha (constant) or alpha/sqrt(t) (inv_sqrt_t)
//   beta1_t:  beta1 | beta1*lambda^(t-1) (exp_decay) | beta1/t (harmonic)
//   beta2_t:  beta2 | 1 - 1/t (one_minus_inv_t)
// epsilon, when positive, is added inside the square root of the step
// denominator. debias divides m_t by (1 - prod_{j<=t} beta1_j) and the
// denominator moment by (1 - prod_{j<=t} beta2_j) before the step; it is off
// by default because the counterexample dynamics assume the raw moments.
struct Schedule {
  double alpha = 0.1;
  AlphaMode alpha_mode = AlphaMode::kInvSqrtT;
  double beta1 = 0.9;
  Beta1Mode beta1_mode = Beta1Mode::kConstant;
  double lambda = 0.5;  // used by exp_decay only
  double beta2 = 0.999;
  Beta2Mode beta2_mode = Beta2Mode::kConstant;
  double epsilon = 0.0;
  bool debias = false;
};

// ParamError unless alpha > 0, 0 <= beta1 < 1, 0 <= beta2 < 1, epsilon >= 0,
// and lambda in (0,1) when beta1_mode is exp_decay.
void validate(const Schedule& s);

struct ScheduleAt {
  double alpha_t;
  double beta1_t;
  double beta2_t;
};

// Effective hyperparameters at step t >= 1.
ScheduleAt schedule_at(const Schedule& s, std::int64_t t);

// gamma = beta1/sqrt(beta2), the decay ratio the convergence conditions
// compare against 1. Taken as its beta1 -> 0 limit (zero) when beta1 == 0;
// ParamError when beta1 > 0 with beta2 == 0.
double gamma_ratio(double beta1, double beta2);

// Per-run mutable state. t counts completed steps; moments start at zero.
// v holds the second moment for every method that has one (for Adagrad it is
// the running mean g_sum_sq/t); vhat is the running max (AMSGrad only);
// beta*_prod accumulate prod_{j<=t} beta_j for the debias divisors.
struct OptimizerState {
  std::int64_t t = 0;
  RealVec m;
  RealVec v;
  RealVec vhat;
  RealVec g_sum_sq;
  double beta1_prod = 1.0;
  double beta2_prod = 1.0;
};

OptimizerState make_state(Method method, std::size_t dim);

// A box or all of R^d. Projection onto R^d is the identity, which is how the
// unconstrained ERM runs reuse the same step path.
class FeasibleSet {
 public:
  static FeasibleSet boxed(BoxSet box);
  static FeasibleSet unbounded(std::size_t dim);

  bool is_unbounded() const { return !box_.has_value(); }
  std::size_t dim() const { return dim_; }
  const BoxSet* box() const { return box_ ? &*box_ : nullptr; }

 private:
  FeasibleSet(std::optional<BoxSet> box, std::size_t dim)
      : box_(std::move(box)), dim_(dim) {}
  std::optional<BoxSet> box_;
  std::size_t dim_;
};

struct StepResult {
  OptimizerState state;
  RealVec x;
};

// One round of the generic adaptive loop: updates the moments for `method`
// from gradient g, reads the schedule at t = state.t + 1, forms
// x_hat = x - alpha_t * m_t / sqrt(denominator), and projects. The weighted
// projection onto a box is coordinate-wise clamping (see project_weighted),
// which the step applies directly. Pass state with std::move in loops; the
// vectors are recycled without reallocation.
//
// Method-specific denominators (all with + epsilon inside the sqrt):
//   SGD      identity (no scaling), m = g
//   Adagrad  v = (sum of g^2)/t, m = g
//   Adam     v = beta2*v + (1-beta2)*g^2      (RMSprop: same, beta1 = 0)
//   AMSGrad  vhat = max(vhat, v)
//   AdamNc   v = beta2_t*v + (1-beta2_t)*g^2
//
// Errors: NumericError on non-finite g or x; DimensionError on size mismatch;
// ParamError when x lies outside the box or when a beta2 schedule other than
// constant is used with a method that fixes beta2 (only AdamNc varies it).
StepResult step(Method method, OptimizerState state, const RealVec& x,
                const RealVec& g, const Schedule& s, const FeasibleSet& feasible);

// Named entry points for the three algorithm families; all share step().
inline StepResult adaptive_step(Method kind, OptimizerState state,
                                const RealVec& x, const RealVec& g,
                                const Schedule& s,
                                const FeasibleSet& feasible) {
  return step(kind, std::move(state), x, g, s, feasible);
}
inline StepResult amsgrad_step(OptimizerState state, const RealVec& x,
                               const RealVec& g, const Schedule& s,
                               const FeasibleSet& feasible) {
  return step(Method::kAmsgrad, std::move(state), x, g, s, feasible);
}
inline StepResult adamnc_step(OptimizerState state, const RealVec& x,
                              const RealVec& g, const Schedule& s,
                              const FeasibleSet& feasible) {
  return step(Method::kAdamNc, std::move(state), x, g, s, feasible);
}

// The squared denominator the step at state.t actually used (epsilon and
// debias included): ones for SGD, v for Adagrad/Adam/RMSprop/AdamNc, vhat for
// AMSGrad. Defined for state.t >= 1.
RealVec denominator_sq(Method method, const OptimizerState& state,
                       const Schedule& s);

// Inverse-learning-rate increments: out[k][i] =
//   sqrt(v_trace[k+1][i])/alpha_{k+2} - sqrt(v_trace[k][i])/alpha_{k+1},
// where v_trace[k] is the squared denominator used at step k+1. The result
// has length v_trace.size() - 1; entry k belongs to step k+2.
std::vector<RealVec> gamma_trace(const Schedule& s,
                                 const std::vector<RealVec>& v_trace);

struct GammaViolation {
  std::int64_t t;     // step index of the later term, >= 2
  std::size_t coord;
};

// All strictly negative gamma entries, by exact comparison against zero.
std::vector<GammaViolation> psd_violations(const std::vector<RealVec>& gammas);

// Streaming equivalent of gamma_trace + psd_violations for long runs: feed
// the squared denominator of each step in order; violations are counted with
// the same exact comparisons without storing the trace.
class GammaMonitor {
 public:
  explicit GammaMonitor(const Schedule& s) : schedule_(s) {}

  void observe(const RealVec& denom_sq);
  std::int64_t steps_seen() const { return t_; }
  std::int64_t violation_count() const { return violation_count_; }
  // At most the first 32 sites, for reporting.
  const std::vector<GammaViolation>& first_violations() const {
    return first_violations_;
  }

 private:
  Schedule schedule_;
  std::int64_t t_ = 0;
  RealVec prev_inv_rate_;
  std::int64_t violation_count_ = 0;
  std::vector<GammaViolation> first_violations_;
};

}  // namespace adaopt::optim
