#include "adaopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adaopt/errors.hpp"

namespace adaopt::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCond2RelSlack = 1e-12;

double checked_sqrt(double v, const char* what, std::size_t t,
                    std::size_t i) {
  if (v < 0.0)
    throw DomainError(std::string(what) + ": negative entry at step " +
                      std::to_string(t + 1) + ", coord " + std::to_string(i));
  return std::sqrt(v);
}

// Column l2 norms of a step-major gradient history.
RealVec coordinate_norms(const std::vector<RealVec>& grads, std::size_t d) {
  RealVec sums(d, 0.0);
  for (const auto& row : grads)
    for (std::size_t i = 0; i < d; ++i) sums[i] += row[i] * row[i];
  for (double& s : sums) s = std::sqrt(s);
  return sums;
}

std::size_t checked_dims(const std::vector<RealVec>& grads,
                         const std::vector<RealVec>& v_rows,
                         const char* where) {
  if (grads.empty())
    throw ParamError(std::string(where) + ": empty gradient history");
  if (grads.size() != v_rows.size())
    throw DimensionError(std::string(where) + ": " +
                         std::to_string(grads.size()) + " gradient rows vs " +
                         std::to_string(v_rows.size()) + " moment rows");
  const std::size_t d = grads.front().size();
  if (d == 0) throw DimensionError(std::string(where) + ": zero-dim rows");
  for (std::size_t k = 0; k < grads.size(); ++k)
    if (grads[k].size() != d || v_rows[k].size() != d)
      throw DimensionError(std::string(where) + ": ragged row at step " +
                           std::to_string(k + 1));
  return d;
}

void check_bound_params(double D_inf, double G_inf, const char* where) {
  if (!std::isfinite(D_inf) || D_inf <= 0.0)
    throw ParamError(std::string(where) + ": D_inf must be finite and > 0");
  if (!std::isfinite(G_inf) || G_inf < 0.0)
    throw ParamError(std::string(where) + ": G_inf must be finite and >= 0");
}

// Flags shared by both bounds: the schedules the statements assume and the
// algorithm details (no epsilon, raw moments) the proofs rely on.
void push_common_flags(BoundReport& r, const optim::Schedule& s,
                       std::int64_t T) {
  r.flags.push_back({"alpha_mode=inv_sqrt_t",
                     s.alpha_mode == optim::AlphaMode::kInvSqrtT,
                     s.alpha_mode == optim::AlphaMode::kInvSqrtT ? 0.0 : -1.0});
  double min_slack = kInf;
  for (std::int64_t t = 1; t <= T; ++t)
    min_slack =
        std::min(min_slack, s.beta1 - optim::schedule_at(s, t).beta1_t);
  r.flags.push_back({"beta1t<=beta1", min_slack >= 0.0, min_slack});
  r.flags.push_back(
      {"epsilon=0", s.epsilon == 0.0, s.epsilon == 0.0 ? 0.0 : -s.epsilon});
  r.flags.push_back({"debias=off", !s.debias, s.debias ? -1.0 : 0.0});
}

}  // namespace

RegretLedger::RegretLedger(BoxSet box)
    : box_(std::move(box)), cum_slope_(box_.dim(), 0.0) {}

void RegretLedger::record(const RealVec& slope, const RealVec& x) {
  numcore::require_same_size(slope, x, "RegretLedger::record");
  if (slope.size() != box_.dim())
    throw DimensionError("RegretLedger::record: slope dim " +
                         std::to_string(slope.size()) + " vs box dim " +
                         std::to_string(box_.dim()));
  numcore::require_finite(slope, "RegretLedger::record: slope");
  numcore::require_finite(x, "RegretLedger::record: x");
  cum_loss_ += numcore::dot(slope, x);
  for (std::size_t i = 0; i < slope.size(); ++i) cum_slope_[i] += slope[i];
  ++rounds_;
}

RealVec RegretLedger::comparator() const {
  RealVec out(box_.dim());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = cum_slope_[i] >= 0.0 ? box_.lo()[i] : box_.hi()[i];
  return out;
}

double RegretLedger::comparator_loss() const {
  return numcore::dot(cum_slope_, comparator());
}

double RegretLedger::regret() const {
  return cum_loss_ - comparator_loss();
}

double RegretLedger::avg_regret() const {
  if (rounds_ < 1)
    throw ParamError("RegretLedger::avg_regret: no rounds recorded");
  return regret() / static_cast<double>(rounds_);
}

RegretSummary regret(const scenarios::OnlineScenario& sc,
                     const std::vector<RealVec>& x_trace) {
  if (x_trace.empty()) throw ParamError("regret: empty iterate trace");
  RegretLedger ledger(sc.box);
  RealVec slope(1);
  for (std::size_t k = 0; k < x_trace.size(); ++k) {
    slope[0] = sc.slope(static_cast<std::int64_t>(k) + 1);
    ledger.record(slope, x_trace[k]);
  }
  return RegretSummary{ledger.regret(), ledger.avg_regret()};
}

bool BoundReport::all_satisfied() const {
  for (const auto& f : flags)
    if (!f.satisfied) return false;
  return true;
}

BoundReport amsgrad_bound(double D_inf, double G_inf,
                          const optim::Schedule& s,
                          const std::vector<RealVec>& grads,
                          const RealVec& vhat_T,
                          const std::vector<RealVec>& vhat_trace) {
  check_bound_params(D_inf, G_inf, "amsgrad_bound");
  optim::validate(s);
  const std::size_t d = checked_dims(grads, vhat_trace, "amsgrad_bound");
  if (vhat_T != vhat_trace.back())
    throw ParamError("amsgrad_bound: vhat_T disagrees with the last row of "
                     "vhat_trace");
  const std::int64_t T = static_cast<std::int64_t>(grads.size());
  const double Td = static_cast<double>(T);

  BoundReport r;
  push_common_flags(r, s, T);
  const double gamma = s.beta1 == 0.0
                           ? 0.0
                           : (s.beta2 == 0.0
                                  ? kInf
                                  : s.beta1 / std::sqrt(s.beta2));
  r.flags.push_back({"gamma<1", gamma < 1.0, 1.0 - gamma});

  const double one_minus_b1 = 1.0 - s.beta1;
  double sum_vhat_root_T = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    sum_vhat_root_T += checked_sqrt(vhat_T[i], "amsgrad_bound: vhat_T",
                                    grads.size() - 1, i);
  const double term1 =
      D_inf * D_inf * std::sqrt(Td) / (s.alpha * one_minus_b1) *
      sum_vhat_root_T;

  double term2_trace = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const auto at = optim::schedule_at(s, t);
    double row = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      row += checked_sqrt(vhat_trace[static_cast<std::size_t>(t - 1)][i],
                          "amsgrad_bound: vhat_trace",
                          static_cast<std::size_t>(t - 1), i);
    term2_trace +=
        at.beta1_t * row / at.alpha_t;
  }
  term2_trace *= D_inf * D_inf / (one_minus_b1 * one_minus_b1);

  const bool exp_decay_mode = s.beta1_mode == optim::Beta1Mode::kExpDecay;
  const double term2_closed =
      exp_decay_mode
          ? s.beta1 * D_inf * D_inf * G_inf /
                (one_minus_b1 * one_minus_b1 * (1.0 - s.lambda) *
                 (1.0 - s.lambda))
          : 0.0;
  const double term2_used = exp_decay_mode ? term2_closed : term2_trace;

  const RealVec gnorms = coordinate_norms(grads, d);
  double sum_gnorm = 0.0;
  for (double g : gnorms) sum_gnorm += g;
  const double term3 =
      gamma < 1.0
          ? s.alpha * std::sqrt(1.0 + std::log(Td)) /
                (one_minus_b1 * one_minus_b1 * (1.0 - gamma) *
                 std::sqrt(1.0 - s.beta2)) *
                sum_gnorm
          : kInf;

  const double display = term1 + term2_used + term3;

  // Worst-case form of the same display: every data reduction replaced by
  // its G_inf bound, so the value scales as G_inf * sqrt(T).
  double sched_sum = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const auto at = optim::schedule_at(s, t);
    sched_sum += at.beta1_t / at.alpha_t;
  }
  const double dd = static_cast<double>(d);
  const double ref_term2 =
      exp_decay_mode ? term2_closed
                     : D_inf * D_inf / (one_minus_b1 * one_minus_b1) *
                           sched_sum * dd * G_inf;
  const double refinement =
      D_inf * D_inf * std::sqrt(Td) * dd * G_inf / (s.alpha * one_minus_b1) +
      ref_term2 +
      (gamma < 1.0
           ? s.alpha * std::sqrt(1.0 + std::log(Td)) /
                 (one_minus_b1 * one_minus_b1 * (1.0 - gamma) *
                  std::sqrt(1.0 - s.beta2)) *
                 dd * G_inf * std::sqrt(Td)
           : kInf);

  r.terms = {{"term1", term1},
             {"term2_trace", term2_trace},
             {"term2_used", term2_used},
             {"term3", term3},
             {"display", display},
             {"refinement_g_sqrt_t", refinement}};
  if (exp_decay_mode) r.terms.insert(r.terms.begin() + 2,
                                     {"term2_exp_decay_closed_form", term2_closed});

  r.inputs_digest = {{"D_inf", D_inf},   {"G_inf", G_inf},
                     {"alpha", s.alpha}, {"beta1", s.beta1},
                     {"beta2", s.beta2}, {"lambda", s.lambda},
                     {"gamma", gamma},   {"T", Td},
                     {"dim", dd}};
  for (std::size_t i = 0; i < d; ++i)
    r.inputs_digest.emplace_back("vhat_T[" + std::to_string(i) + "]",
                                 vhat_T[i]);
  for (std::size_t i = 0; i < d; ++i)
    r.inputs_digest.emplace_back("gnorm[" + std::to_string(i) + "]",
                                 gnorms[i]);

  r.bound_value = r.all_satisfied() ? std::min(display, refinement) : kInf;
  return r;
}

BoundReport adamnc_bound(double D_inf, double G_inf, const optim::Schedule& s,
                         const std::vector<RealVec>& grads,
                         const std::vector<RealVec>& v_trace) {
  check_bound_params(D_inf, G_inf, "adamnc_bound");
  optim::validate(s);
  const std::size_t d = checked_dims(grads, v_trace, "adamnc_bound");
  const std::int64_t T = static_cast<std::int64_t>(grads.size());
  const double Td = static_cast<double>(T);

  BoundReport r;
  push_common_flags(r, s, T);

  // Condition (1): minimal zeta with a_t sqrt(sum_{j<=t} g^2) <= zeta sqrt(v_t)
  // per coordinate; terms with zero prefix mass are skipped.
  double zeta = 0.0;
  bool zeta_finite = true;
  RealVec prefix_sq(d, 0.0);
  for (std::int64_t t = 1; t <= T && zeta_finite; ++t) {
    const auto at = optim::schedule_at(s, t);
    const RealVec& g = grads[static_cast<std::size_t>(t - 1)];
    const RealVec& v = v_trace[static_cast<std::size_t>(t - 1)];
    for (std::size_t i = 0; i < d; ++i) {
      prefix_sq[i] += g[i] * g[i];
      if (prefix_sq[i] <= 0.0) continue;
      const double root_v =
          checked_sqrt(v[i], "adamnc_bound: v_trace",
                       static_cast<std::size_t>(t - 1), i);
      if (root_v <= 0.0) {
        zeta_finite = false;
        r.note = "condition (1) has no finite zeta at t=" + std::to_string(t) +
                 ", coord " + std::to_string(i);
        break;
      }
      zeta = std::max(zeta, at.alpha_t * std::sqrt(prefix_sq[i]) / root_v);
    }
  }
  r.flags.push_back({"zeta_finite", zeta_finite, zeta_finite ? 0.0 : -1.0});

  // Condition (2): sqrt(v_t[i])/a_t nondecreasing, with relative slack for
  // the floating-point wobble of mathematically tied ratios.
  double min_rel_margin = kInf;
  bool cond2_ok = true;
  for (std::int64_t t = 2; t <= T; ++t) {
    const double a_prev = optim::schedule_at(s, t - 1).alpha_t;
    const double a_cur = optim::schedule_at(s, t).alpha_t;
    const RealVec& v_prev = v_trace[static_cast<std::size_t>(t - 2)];
    const RealVec& v_cur = v_trace[static_cast<std::size_t>(t - 1)];
    for (std::size_t i = 0; i < d; ++i) {
      const double prev = std::sqrt(std::max(0.0, v_prev[i])) / a_prev;
      const double cur = std::sqrt(std::max(0.0, v_cur[i])) / a_cur;
      if (prev > 0.0)
        min_rel_margin = std::min(min_rel_margin, (cur - prev) / prev);
      if (cur < prev * (1.0 - kCond2RelSlack)) {
        cond2_ok = false;
        if (r.note.empty())
          r.note = "condition (2) violated at t=" + std::to_string(t) +
                   ", coord " + std::to_string(i);
      }
    }
  }
  if (min_rel_margin == kInf) min_rel_margin = 0.0;
  r.flags.push_back({"v_rate_nondecreasing", cond2_ok, min_rel_margin});

  const double one_minus_b1 = 1.0 - s.beta1;
  double sum_v_root_T = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    sum_v_root_T += std::sqrt(std::max(0.0, v_trace.back()[i]));
  const double term1 = D_inf * D_inf / (2.0 * s.alpha * one_minus_b1) *
                       std::sqrt(Td) * sum_v_root_T;

  double term2 = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const auto at = optim::schedule_at(s, t);
    double row = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      row += std::sqrt(
          std::max(0.0, v_trace[static_cast<std::size_t>(t - 1)][i]));
    term2 += at.beta1_t * row / at.alpha_t;
  }
  term2 *= D_inf * D_inf / (one_minus_b1 * one_minus_b1);

  const RealVec gnorms = coordinate_norms(grads, d);
  double sum_gnorm = 0.0;
  for (double g : gnorms) sum_gnorm += g;
  const double term3 =
      2.0 * zeta / (one_minus_b1 * one_minus_b1 * one_minus_b1) * sum_gnorm;

  r.terms = {{"term1", term1},
             {"term2", term2},
             {"term3", term3},
             {"zeta", zeta}};
  r.inputs_digest = {{"D_inf", D_inf},   {"G_inf", G_inf},
                     {"alpha", s.alpha}, {"beta1", s.beta1},
                     {"beta2", s.beta2}, {"T", Td},
                     {"dim", static_cast<double>(d)}, {"zeta", zeta}};
  for (std::size_t i = 0; i < d; ++i)
    r.inputs_digest.emplace_back("v_T[" + std::to_string(i) + "]",
                                 v_trace.back()[i]);
  for (std::size_t i = 0; i < d; ++i)
    r.inputs_digest.emplace_back("gnorm[" + std::to_string(i) + "]",
                                 gnorms[i]);

  if (r.all_satisfied()) {
    r.bound_value = term1 + term2 + term3;
    if (s.beta2_mode == optim::Beta2Mode::kOneMinusInvT &&
        s.alpha_mode == optim::AlphaMode::kInvSqrtT && r.note.empty())
      r.note = "prefix-average specialization: beta2_t = 1-1/t, alpha_t = "
               "alpha/sqrt(t); bound follows the general display";
  } else {
    r.bound_value = kInf;
  }
  return r;
}

AuerCheck auer_check(const RealVec& y) {
  double prefix = 0.0;
  double lhs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0))
      throw DomainError("auer_check: y[" + std::to_string(i) +
                        "] is negative or NaN");
    prefix += y[i];
    if (prefix > 0.0) lhs += y[i] / std::sqrt(prefix);
  }
  const double rhs = 2.0 * std::sqrt(prefix);
  return AuerCheck{lhs, rhs, lhs <= rhs + 1e-12};
}

}  // namespace adaopt::analysis
