#include "adaopt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "adaopt/errors.hpp"

namespace adaopt::optim {

namespace {

constexpr std::size_t kMaxReportedViolations = 32;

double alpha_at(const Schedule& s, std::int64_t t) {
  return s.alpha_mode == AlphaMode::kConstant
             ? s.alpha
             : s.alpha / std::sqrt(static_cast<double>(t));
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kSgd: return "sgd";
    case Method::kAdagrad: return "adagrad";
    case Method::kRmsprop: return "rmsprop";
    case Method::kAdam: return "adam";
    case Method::kAmsgrad: return "amsgrad";
    case Method::kAdamNc: return "adamnc";
  }
  throw ParamError("method_name: unknown method");
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "sgd") return Method::kSgd;
  if (name == "adagrad") return Method::kAdagrad;
  if (name == "rmsprop") return Method::kRmsprop;
  if (name == "adam") return Method::kAdam;
  if (name == "amsgrad") return Method::kAmsgrad;
  if (name == "adamnc") return Method::kAdamNc;
  return std::nullopt;
}

std::string_view alpha_mode_name(AlphaMode m) {
  return m == AlphaMode::kConstant ? "constant" : "inv_sqrt_t";
}

std::optional<AlphaMode> alpha_mode_from_name(std::string_view name) {
  if (name == "constant") return AlphaMode::kConstant;
  if (name == "inv_sqrt_t") return AlphaMode::kInvSqrtT;
  return std::nullopt;
}

std::string_view beta1_mode_name(Beta1Mode m) {
  switch (m) {
    case Beta1Mode::kConstant: return "constant";
    case Beta1Mode::kExpDecay: return "exp_decay";
    case Beta1Mode::kHarmonic: return "harmonic";
  }
  throw ParamError("beta1_mode_name: unknown mode");
}

std::optional<Beta1Mode> beta1_mode_from_name(std::string_view name) {
  if (name == "constant") return Beta1Mode::kConstant;
  if (name == "exp_decay") return Beta1Mode::kExpDecay;
  if (name == "harmonic") return Beta1Mode::kHarmonic;
  return std::nullopt;
}

std::string_view beta2_mode_name(Beta2Mode m) {
  return m == Beta2Mode::kConstant ? "constant" : "one_minus_inv_t";
}

std::optional<Beta2Mode> beta2_mode_from_name(std::string_view name) {
  if (name == "constant") return Beta2Mode::kConstant;
  if (name == "one_minus_inv_t") return Beta2Mode::kOneMinusInvT;
  return std::nullopt;
}

void validate(const Schedule& s) {
  if (!std::isfinite(s.alpha) || s.alpha <= 0.0)
    throw ParamError("schedule: alpha must be finite and > 0, got " +
                     std::to_string(s.alpha));
  if (!std::isfinite(s.beta1) || s.beta1 < 0.0 || s.beta1 >= 1.0)
    throw ParamError("schedule: beta1 must lie in [0,1), got " +
                     std::to_string(s.beta1));
  if (!std::isfinite(s.beta2) || s.beta2 < 0.0 || s.beta2 >= 1.0)
    throw ParamError("schedule: beta2 must lie in [0,1), got " +
                     std::to_string(s.beta2));
  if (!std::isfinite(s.epsilon) || s.epsilon < 0.0)
    throw ParamError("schedule: epsilon must be finite and >= 0, got " +
                     std::to_string(s.epsilon));
  if (s.beta1_mode == Beta1Mode::kExpDecay &&
      (!std::isfinite(s.lambda) || s.lambda <= 0.0 || s.lambda >= 1.0))
    throw ParamError("schedule: exp_decay needs lambda in (0,1), got " +
                     std::to_string(s.lambda));
}

ScheduleAt schedule_at(const Schedule& s, std::int64_t t) {
  if (t < 1)
    throw ParamError("schedule_at: t must be >= 1, got " + std::to_string(t));
  ScheduleAt at{};
  at.alpha_t = alpha_at(s, t);
  switch (s.beta1_mode) {
    case Beta1Mode::kConstant:
      at.beta1_t = s.beta1;
      break;
    case Beta1Mode::kExpDecay:
      at.beta1_t = s.beta1 * std::pow(s.lambda, static_cast<double>(t - 1));
      break;
    case Beta1Mode::kHarmonic:
      at.beta1_t = s.beta1 / static_cast<double>(t);
      break;
  }
  at.beta2_t = s.beta2_mode == Beta2Mode::kConstant
                   ? s.beta2
                   : 1.0 - 1.0 / static_cast<double>(t);
  return at;
}

double gamma_ratio(double beta1, double beta2) {
  if (beta1 < 0.0 || beta2 < 0.0)
    throw ParamError("gamma_ratio: betas must be nonnegative");
  if (beta1 == 0.0) return 0.0;
  if (beta2 == 0.0)
    throw ParamError("gamma_ratio: beta2 == 0 with beta1 > 0 has no ratio");
  return beta1 / std::sqrt(beta2);
}

OptimizerState make_state(Method method, std::size_t dim) {
  if (dim == 0) throw ParamError("make_state: dim must be >= 1");
  OptimizerState st;
  st.m.assign(dim, 0.0);
  st.v.assign(dim, 0.0);
  if (method == Method::kAmsgrad) st.vhat.assign(dim, 0.0);
  if (method == Method::kAdagrad) st.g_sum_sq.assign(dim, 0.0);
  return st;
}

FeasibleSet FeasibleSet::boxed(BoxSet box) {
  std::size_t d = box.dim();
  return FeasibleSet(std::move(box), d);
}

FeasibleSet FeasibleSet::unbounded(std::size_t dim) {
  if (dim == 0) throw ParamError("FeasibleSet: dim must be >= 1");
  return FeasibleSet(std::nullopt, dim);
}

StepResult step(Method method, OptimizerState state, const RealVec& x,
                const RealVec& g, const Schedule& s,
                const FeasibleSet& feasible) {
  const std::size_t d = x.size();
  numcore::require_same_size(x, g, "step: x vs g");
  numcore::require_finite(x, "step: x");
  numcore::require_finite(g, "step: g");
  if (state.m.size() != d)
    throw DimensionError("step: state built for dim " +
                         std::to_string(state.m.size()) + ", x has dim " +
                         std::to_string(d));
  if (feasible.dim() != d)
    throw DimensionError("step: feasible set has dim " +
                         std::to_string(feasible.dim()) + ", x has dim " +
                         std::to_string(d));
  const BoxSet* box = feasible.box();
  if (box && !box->contains(x))
    throw ParamError("step: x lies outside the feasible set");
  if (s.beta2_mode != Beta2Mode::kConstant && method != Method::kAdamNc)
    throw ParamError(std::string("step: method ") +
                     std::string(method_name(method)) +
                     " fixes beta2; a beta2 schedule requires adamnc");

  const std::int64_t t = state.t + 1;
  const ScheduleAt at = schedule_at(s, t);

  bool scaled = true;  // whether the step divides by a second-moment root
  switch (method) {
    case Method::kSgd:
      state.m.assign(g.begin(), g.end());
      scaled = false;
      break;
    case Method::kAdagrad:
      state.m.assign(g.begin(), g.end());
      for (std::size_t i = 0; i < d; ++i) {
        state.g_sum_sq[i] += g[i] * g[i];
        state.v[i] = state.g_sum_sq[i] / static_cast<double>(t);
      }
      break;
    case Method::kRmsprop:
    case Method::kAdam:
    case Method::kAmsgrad:
    case Method::kAdamNc: {
      const double b1 = method == Method::kRmsprop ? 0.0 : at.beta1_t;
      const double b2 =
          method == Method::kAdamNc ? at.beta2_t : s.beta2;
      for (std::size_t i = 0; i < d; ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g[i] * g[i];
      }
      if (method == Method::kAmsgrad)
        for (std::size_t i = 0; i < d; ++i)
          state.vhat[i] = std::max(state.vhat[i], state.v[i]);
      state.beta1_prod *= b1;
      state.beta2_prod *= b2;
      break;
    }
  }
  state.t = t;

  // beta < 1 keeps both divisors positive for t >= 1.
  const bool debias = s.debias && scaled && method != Method::kAdagrad;
  const double m_div = debias ? 1.0 - state.beta1_prod : 1.0;
  const double v_div = debias ? 1.0 - state.beta2_prod : 1.0;
  const RealVec& vv = method == Method::kAmsgrad ? state.vhat : state.v;

  RealVec xnew(d);
  for (std::size_t i = 0; i < d; ++i) {
    double delta;
    if (!scaled) {
      delta = at.alpha_t * state.m[i];
    } else {
      const double den = std::sqrt(vv[i] / v_div + s.epsilon);
      delta = numcore::safe_div(at.alpha_t * (state.m[i] / m_div), den);
    }
    const double xh = x[i] - delta;
    xnew[i] = box ? box->clamp1(xh, i) : xh;
  }
  numcore::require_finite(xnew, "step: updated x");
  return StepResult{std::move(state), std::move(xnew)};
}

RealVec denominator_sq(Method method, const OptimizerState& state,
                       const Schedule& s) {
  if (state.t < 1)
    throw ParamError("denominator_sq: state has no completed step");
  const std::size_t d = state.m.size();
  RealVec out(d);
  switch (method) {
    case Method::kSgd:
      out.assign(d, 1.0);
      return out;
    case Method::kAdagrad:
      for (std::size_t i = 0; i < d; ++i) out[i] = state.v[i] + s.epsilon;
      return out;
    case Method::kRmsprop:
    case Method::kAdam:
    case Method::kAdamNc:
    case Method::kAmsgrad: {
      const RealVec& vv =
          method == Method::kAmsgrad ? state.vhat : state.v;
      const double v_div = s.debias ? 1.0 - state.beta2_prod : 1.0;
      for (std::size_t i = 0; i < d; ++i)
        out[i] = vv[i] / v_div + s.epsilon;
      return out;
    }
  }
  throw ParamError("denominator_sq: unknown method");
}

std::vector<RealVec> gamma_trace(const Schedule& s,
                                 const std::vector<RealVec>& v_trace) {
  std::vector<RealVec> out;
  if (v_trace.size() < 2) return out;
  const std::size_t d = v_trace.front().size();
  out.reserve(v_trace.size() - 1);
  for (std::size_t k = 0; k + 1 < v_trace.size(); ++k) {
    const RealVec& prev = v_trace[k];
    const RealVec& next = v_trace[k + 1];
    if (prev.size() != d || next.size() != d)
      throw DimensionError("gamma_trace: ragged v_trace at row " +
                           std::to_string(k));
    const double a_prev = alpha_at(s, static_cast<std::int64_t>(k) + 1);
    const double a_next = alpha_at(s, static_cast<std::int64_t>(k) + 2);
    RealVec row(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (prev[i] < 0.0 || next[i] < 0.0)
        throw DomainError("gamma_trace: negative squared denominator at row " +
                          std::to_string(k));
      row[i] = std::sqrt(next[i]) / a_next - std::sqrt(prev[i]) / a_prev;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<GammaViolation> psd_violations(
    const std::vector<RealVec>& gammas) {
  std::vector<GammaViolation> out;
  for (std::size_t k = 0; k < gammas.size(); ++k)
    for (std::size_t i = 0; i < gammas[k].size(); ++i)
      if (gammas[k][i] < 0.0)
        out.push_back({static_cast<std::int64_t>(k) + 2, i});
  return out;
}

void GammaMonitor::observe(const RealVec& denom_sq) {
  ++t_;
  const double a_t = alpha_at(schedule_, t_);
  if (t_ == 1) {
    prev_inv_rate_.resize(denom_sq.size());
  } else if (denom_sq.size() != prev_inv_rate_.size()) {
    throw DimensionError("GammaMonitor: denominator dim changed at step " +
                         std::to_string(t_));
  }
  for (std::size_t i = 0; i < denom_sq.size(); ++i) {
    if (denom_sq[i] < 0.0)
      throw DomainError("GammaMonitor: negative squared denominator at step " +
                        std::to_string(t_));
    const double cur = std::sqrt(denom_sq[i]) / a_t;
    if (t_ >= 2 && cur < prev_inv_rate_[i]) {
      ++violation_count_;
      if (first_violations_.size() < kMaxReportedViolations)
        first_violations_.push_back({t_, i});
    }
    prev_inv_rate_[i] = cur;
  }
}

}  // namespace adaopt::optim
