#include "adaopt/erm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "adaopt/errors.hpp"

namespace adaopt::erm {

Dataset make_dataset(std::size_t n, std::size_t p, std::size_t k,
                     RealVec features, std::vector<std::int32_t> labels) {
  if (n == 0 || p == 0 || k == 0)
    throw ParamError("make_dataset: n, p, k must all be positive");
  if (features.size() != n * p)
    throw DimensionError("make_dataset: feature buffer has " +
                         std::to_string(features.size()) + " entries, need " +
                         std::to_string(n * p));
  if (labels.size() != n)
    throw DimensionError("make_dataset: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(n) + " examples");
  numcore::require_finite(features, "make_dataset: features");
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw ParamError("make_dataset: label " + std::to_string(labels[i]) +
                       " at row " + std::to_string(i) + " outside [0," +
                       std::to_string(k) + ")");
  return Dataset{n, p, k, std::move(features), std::move(labels)};
}

MinibatchSampler::MinibatchSampler(std::uint64_t seed, std::size_t batch_size)
    : batch_size_(batch_size), rng_(seed) {
  if (batch_size == 0)
    throw ParamError("MinibatchSampler: batch_size must be >= 1");
}

void MinibatchSampler::sample(std::size_t n, std::vector<std::size_t>& out) {
  if (n == 0) throw ParamError("MinibatchSampler: empty dataset");
  out.resize(batch_size_);
  for (std::size_t b = 0; b < batch_size_; ++b)
    out[b] = static_cast<std::size_t>(rng_.next_below(n));
}

SoftmaxParams SoftmaxParams::zeros(std::size_t p, std::size_t k) {
  if (p == 0 || k == 0)
    throw ParamError("SoftmaxParams: p and k must be positive");
  SoftmaxParams out;
  out.p = p;
  out.k = k;
  out.theta.assign(k * (p + 1), 0.0);
  return out;
}

namespace {

void check_params_shape(const SoftmaxParams& params, const Dataset& data,
                        const char* where) {
  if (params.p != data.p || params.k != data.k)
    throw DimensionError(std::string(where) + ": params are " +
                         std::to_string(params.k) + "x" +
                         std::to_string(params.p) + ", dataset needs " +
                         std::to_string(data.k) + "x" +
                         std::to_string(data.p));
  if (params.theta.size() != params.dim())
    throw DimensionError(std::string(where) + ": theta has " +
                         std::to_string(params.theta.size()) +
                         " entries, expected " + std::to_string(params.dim()));
}

// Per-example logits, stable log-sum-exp, and the softmax probabilities
// written into probs. Returns the example's cross-entropy.
double example_loss_probs(const SoftmaxParams& params, const Dataset& data,
                          std::size_t row, RealVec& logits, RealVec& probs) {
  const double* x = data.row(row);
  const std::size_t p = params.p;
  const std::size_t k = params.k;
  for (std::size_t c = 0; c < k; ++c) {
    double z = params.theta[k * p + c];
    const double* w = params.theta.data() + c * p;
    for (std::size_t j = 0; j < p; ++j) z += w[j] * x[j];
    logits[c] = z;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += std::exp(logits[c] - zmax);
  const double lse = zmax + std::log(sum);
  for (std::size_t c = 0; c < k; ++c)
    probs[c] = std::exp(logits[c] - lse);
  return lse - logits[static_cast<std::size_t>(data.labels[row])];
}

}  // namespace

LossGrad softmax_loss_grad(const SoftmaxParams& params, const Dataset& data,
                           const std::vector<std::size_t>& rows) {
  check_params_shape(params, data, "softmax_loss_grad");
  if (rows.empty()) throw ParamError("softmax_loss_grad: empty batch");
  const std::size_t p = params.p;
  const std::size_t k = params.k;
  RealVec logits(k), probs(k);
  LossGrad out{0.0, RealVec(params.dim(), 0.0)};
  for (std::size_t row : rows) {
    if (row >= data.n)
      throw DimensionError("softmax_loss_grad: row " + std::to_string(row) +
                           " outside dataset of size " +
                           std::to_string(data.n));
    out.loss += example_loss_probs(params, data, row, logits, probs);
    const double* x = data.row(row);
    const auto y = static_cast<std::size_t>(data.labels[row]);
    for (std::size_t c = 0; c < k; ++c) {
      const double r = probs[c] - (c == y ? 1.0 : 0.0);
      double* gw = out.grad.data() + c * p;
      for (std::size_t j = 0; j < p; ++j) gw[j] += r * x[j];
      out.grad[k * p + c] += r;
    }
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  out.loss *= scale;
  for (double& g : out.grad) g *= scale;
  return out;
}

double softmax_loss(const SoftmaxParams& params, const Dataset& data) {
  check_params_shape(params, data, "softmax_loss");
  RealVec logits(params.k), probs(params.k);
  double loss = 0.0;
  for (std::size_t i = 0; i < data.n; ++i)
    loss += example_loss_probs(params, data, i, logits, probs);
  return loss / static_cast<double>(data.n);
}

Dataset make_synthetic(std::size_t n, std::size_t p, std::size_t k,
                       double margin, std::uint64_t seed) {
  if (k == 0 || p == 0)
    throw ParamError("make_synthetic: p and k must be positive");
  if (n < k)
    throw ParamError("make_synthetic: n = " + std::to_string(n) +
                     " smaller than k = " + std::to_string(k));
  if (!std::isfinite(margin) || margin <= 0.0)
    throw ParamError("make_synthetic: margin must be finite and > 0");
  SplitMix64 rng(seed);
  RealVec features(n * p, 0.0);
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % k;
    labels[i] = static_cast<std::int32_t>(c);
    double* x = features.data() + i * p;
    x[0] = static_cast<double>(c) * margin;
    if (i >= k)  // the first point of each class sits exactly at the mean
      for (std::size_t j = 0; j < p; ++j) x[j] += rng.next_normal();
  }
  return make_dataset(n, p, k, std::move(features), std::move(labels));
}

TrainResult train(const Dataset& data, MinibatchSampler& sampler,
                  optim::Method method, const optim::Schedule& s,
                  const optim::FeasibleSet& feasible, std::int64_t steps,
                  std::int64_t eval_every, optim::GammaMonitor* monitor) {
  if (steps < 1)
    throw ParamError("train: steps must be >= 1, got " +
                     std::to_string(steps));
  if (eval_every < 1)
    throw ParamError("train: eval_every must be >= 1, got " +
                     std::to_string(eval_every));
  optim::validate(s);
  SoftmaxParams params = SoftmaxParams::zeros(data.p, data.k);
  if (feasible.dim() != params.dim())
    throw DimensionError("train: feasible set dim " +
                         std::to_string(feasible.dim()) +
                         " vs parameter dim " + std::to_string(params.dim()));

  TrainResult out;
  out.trace.push_back({0, softmax_loss(params, data)});
  optim::OptimizerState state = optim::make_state(method, params.dim());
  std::vector<std::size_t> batch;
  for (std::int64_t t = 1; t <= steps; ++t) {
    sampler.sample(data.n, batch);
    LossGrad lg = softmax_loss_grad(params, data, batch);
    optim::StepResult res =
        optim::step(method, std::move(state), params.theta, lg.grad, s,
                    feasible);
    state = std::move(res.state);
    params.theta = std::move(res.x);
    if (monitor) monitor->observe(optim::denominator_sq(method, state, s));
    if (t % eval_every == 0 || t == steps)
      out.trace.push_back({t, softmax_loss(params, data)});
  }
  out.final_theta = std::move(params.theta);
  return out;
}

}  // namespace adaopt::erm
