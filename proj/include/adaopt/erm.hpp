#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/rng.hpp"

namespace adaopt::erm {

using numcore::RealVec;

// Row-major dense classification dataset: n examples of p features with
// labels in [0, k). Immutable after construction; shareable across runs.
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k = 0;
  RealVec features;                 // n * p, row-major
  std::vector<std::int32_t> labels;  // n entries in [0, k)

  const double* row(std::size_t i) const { return features.data() + i * p; }
};

// Validates shapes, label range, and finiteness.
Dataset make_dataset(std::size_t n, std::size_t p, std::size_t k,
                     RealVec features, std::vector<std::int32_t> labels);

// Uniform with-replacement minibatch index stream, deterministic per seed.
class MinibatchSampler {
 public:
  explicit MinibatchSampler(std::uint64_t seed, std::size_t batch_size = 128);

  std::size_t batch_size() const { return batch_size_; }
  // Fills out with batch_size independent uniform draws from [0, n).
  void sample(std::size_t n, std::vector<std::size_t>& out);

 private:
  std::size_t batch_size_;
  SplitMix64 rng_;
};

// Multiclass logistic regression parameters: k x p weights then k biases,
// flattened to one vector of dimension k*(p+1) so the optimizers see a
// single coordinate space.
struct SoftmaxParams {
  std::size_t p = 0;
  std::size_t k = 0;
  RealVec theta;  // [w_0 | w_1 | ... | w_{k-1} | b], each w_c of length p

  static SoftmaxParams zeros(std::size_t p, std::size_t k);
  std::size_t dim() const { return k * (p + 1); }
  double weight(std::size_t c, std::size_t j) const {
    return theta[c * p + j];
  }
  double bias(std::size_t c) const { return theta[k * p + c]; }
};

struct LossGrad {
  double loss;
  RealVec grad;
};

// Mean cross-entropy and its gradient over the given rows, with
// max-subtracted log-sum-exp. Gradient layout matches SoftmaxParams::theta.
LossGrad softmax_loss_grad(const SoftmaxParams& params, const Dataset& data,
                           const std::vector<std::size_t>& rows);

// Mean cross-entropy over the whole dataset (no gradient).
double softmax_loss(const SoftmaxParams& params, const Dataset& data);

// Big-endian IDX ingestion: images magic 0x00000803 (count, rows, cols, then
// raw bytes scaled by 1/255), labels magic 0x00000801 (count, then bytes).
// Gzipped streams are decompressed transparently. FormatError with the byte
// offset on bad magic, truncation, or count mismatch.
Dataset load_idx(const std::vector<std::uint8_t>& images_bytes,
                 const std::vector<std::uint8_t>& labels_bytes);
Dataset load_idx_files(const std::string& images_path,
                       const std::string& labels_path);

// Gunzip when the stream carries the gzip header, else pass through.
std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes);

// k unit-variance Gaussian blobs in R^p with class means margin apart along
// coordinate 0 (mean of class c is c*margin*e_0), labels assigned round
// robin, and the first point of each class placed exactly at its mean.
// ParamError unless n >= k >= 1, p >= 1, margin > 0.
Dataset make_synthetic(std::size_t n, std::size_t p, std::size_t k,
                       double margin, std::uint64_t seed);

struct TracePoint {
  std::int64_t step;  // 0 is the pre-training evaluation
  double loss;        // full-dataset mean cross-entropy
};

struct TrainResult {
  std::vector<TracePoint> trace;
  RealVec final_theta;
};

// Minibatch training from zero parameters: T optimizer steps, full-data loss
// recorded at step 0, every eval_every steps, and at step T. The feasible
// set must match the parameter dimension (use unbounded for the default
// unconstrained ERM). A monitor, when given, observes every step's squared
// denominator.
TrainResult train(const Dataset& data, MinibatchSampler& sampler,
                  optim::Method method, const optim::Schedule& s,
                  const optim::FeasibleSet& feasible, std::int64_t steps,
                  std::int64_t eval_every,
                  optim::GammaMonitor* monitor = nullptr);

}  // namespace adaopt::erm
