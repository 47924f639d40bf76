#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "adaopt/erm.hpp"
#include "adaopt/errors.hpp"
#include "adaopt/numcore.hpp"
#include "adaopt/optim.hpp"
#include "adaopt/rng.hpp"

using adaopt::FormatError;
using adaopt::ParamError;
using adaopt::SplitMix64;
namespace erm = adaopt::erm;
namespace optim = adaopt::optim;
using adaopt::numcore::RealVec;

namespace {

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> idx_images(std::uint32_t n, std::uint32_t rows,
                                     std::uint32_t cols,
                                     const std::vector<std::uint8_t>& pixels) {
  std::vector<std::uint8_t> out;
  push_be32(out, 0x803);
  push_be32(out, n);
  push_be32(out, rows);
  push_be32(out, cols);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t n,
                                     const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  push_be32(out, 0x801);
  push_be32(out, n);
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> gzip_bytes(const std::vector<std::uint8_t>& raw) {
  z_stream zs{};
  // windowBits 15+16 selects the gzip wrapper.
  REQUIRE(deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8,
                       Z_DEFAULT_STRATEGY) == Z_OK);
  std::vector<std::uint8_t> out(deflateBound(&zs, raw.size()));
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
  out.resize(out.size() - zs.avail_out);
  deflateEnd(&zs);
  return out;
}

}  // namespace

TEST_CASE("zero parameters price every class equally") {
  const erm::Dataset data = erm::make_synthetic(20, 3, 10, 5.0, 1);
  const erm::SoftmaxParams params = erm::SoftmaxParams::zeros(3, 10);
  CHECK(params.dim() == 40);
  CHECK(erm::softmax_loss(params, data) ==
        doctest::Approx(2.302585092994046).epsilon(1e-14));
}

TEST_CASE("two-class gradient at zero splits half a unit per coordinate") {
  // One example, p = 1, x = (1), label 0. Probabilities are (1/2, 1/2), so
  // d/dW = (p_c - 1{c=y}) x and d/db = p_c - 1{c=y}:
  // theta layout [W(0,0), W(1,0), b(0), b(1)] = (-0.5, +0.5, -0.5, +0.5).
  const erm::Dataset data = erm::make_dataset(1, 1, 2, {1.0}, {0});
  const erm::SoftmaxParams params = erm::SoftmaxParams::zeros(1, 2);
  const erm::LossGrad lg = erm::softmax_loss_grad(params, data, {0});
  CHECK(lg.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  REQUIRE(lg.grad.size() == 4);
  CHECK(lg.grad[0] == -0.5);
  CHECK(lg.grad[1] == 0.5);
  CHECK(lg.grad[2] == -0.5);
  CHECK(lg.grad[3] == 0.5);
}

TEST_CASE("analytic gradient matches central differences") {
  SplitMix64 rng(606);
  for (int cs = 0; cs < 20; ++cs) {
    const std::size_t p = 1 + static_cast<std::size_t>(rng.next_below(4));
    const std::size_t k = 2 + static_cast<std::size_t>(rng.next_below(3));
    const std::size_t n = k + static_cast<std::size_t>(rng.next_below(10));
    const erm::Dataset data =
        erm::make_synthetic(n, p, k, 2.0, rng.next_u64());

    erm::SoftmaxParams params = erm::SoftmaxParams::zeros(p, k);
    for (double& th : params.theta) th = -0.5 + rng.next_u01();

    std::vector<std::size_t> rows(1 + rng.next_below(n));
    for (std::size_t& r : rows) r = rng.next_below(n);

    const erm::LossGrad lg = erm::softmax_loss_grad(params, data, rows);
    const double h = 1e-5;
    for (std::size_t j = 0; j < params.dim(); ++j) {
      erm::SoftmaxParams hi = params, lo = params;
      hi.theta[j] += h;
      lo.theta[j] -= h;
      const double fd = (erm::softmax_loss_grad(hi, data, rows).loss -
                         erm::softmax_loss_grad(lo, data, rows).loss) /
                        (2.0 * h);
      const double scale = std::max({1.0, std::fabs(fd), std::fabs(lg.grad[j])});
      REQUIRE(std::fabs(lg.grad[j] - fd) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("loss is convex along random parameter chords") {
  SplitMix64 rng(607);
  const erm::Dataset data = erm::make_synthetic(30, 2, 3, 2.0, 42);
  for (int cs = 0; cs < 10; ++cs) {
    erm::SoftmaxParams a = erm::SoftmaxParams::zeros(2, 3);
    erm::SoftmaxParams b = a;
    for (double& th : a.theta) th = -1.0 + 2.0 * rng.next_u01();
    for (double& th : b.theta) th = -1.0 + 2.0 * rng.next_u01();
    const double fa = erm::softmax_loss(a, data);
    const double fb = erm::softmax_loss(b, data);
    for (int j = 0; j <= 10; ++j) {
      const double lam = j / 10.0;
      erm::SoftmaxParams mid = a;
      for (std::size_t i = 0; i < mid.theta.size(); ++i)
        mid.theta[i] = (1.0 - lam) * a.theta[i] + lam * b.theta[i];
      REQUIRE(erm::softmax_loss(mid, data) <=
              (1.0 - lam) * fa + lam * fb + 1e-9);
    }
  }
}

TEST_CASE("idx ingestion scales bytes and validates the headers") {
  std::vector<std::uint8_t> pixels(2 * 28 * 28, 0);
  pixels[0] = 255;
  pixels[1] = 51;
  const std::vector<std::uint8_t> images = idx_images(2, 28, 28, pixels);
  const std::vector<std::uint8_t> labels = idx_labels(2, {3, 7});

  const erm::Dataset data = erm::load_idx(images, labels);
  CHECK(data.n == 2);
  CHECK(data.p == 784);
  CHECK(data.k == 8);  // max label + 1
  CHECK(data.features[0] == 1.0);  // byte 255 maps to exactly 1.0
  CHECK(data.features[1] == doctest::Approx(51.0 / 255.0).epsilon(1e-15));
  CHECK(data.features[2] == 0.0);
  CHECK(data.labels == std::vector<std::int32_t>{3, 7});

  // Wrong magic.
  std::vector<std::uint8_t> bad_magic = images;
  bad_magic[3] = 0x02;
  CHECK_THROWS_AS(erm::load_idx(bad_magic, labels), FormatError);

  // Truncated pixel payload: the message names the offending byte offset.
  std::vector<std::uint8_t> truncated = images;
  truncated.resize(truncated.size() - 5);
  try {
    erm::load_idx(truncated, labels);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }

  // Image/label count mismatch.
  const std::vector<std::uint8_t> labels3 = idx_labels(3, {3, 7, 1});
  CHECK_THROWS_AS(erm::load_idx(images, labels3), FormatError);

  // Gzip round trip: the file loader decompresses transparently.
  const std::string img_gz = "/tmp/adaopt_test_images.idx.gz";
  const std::string lab_gz = "/tmp/adaopt_test_labels.idx.gz";
  {
    const std::vector<std::uint8_t> zi = gzip_bytes(images);
    const std::vector<std::uint8_t> zl = gzip_bytes(labels);
    std::ofstream fi(img_gz, std::ios::binary);
    fi.write(reinterpret_cast<const char*>(zi.data()),
             static_cast<std::streamsize>(zi.size()));
    std::ofstream fl(lab_gz, std::ios::binary);
    fl.write(reinterpret_cast<const char*>(zl.data()),
             static_cast<std::streamsize>(zl.size()));
  }
  const erm::Dataset unzipped = erm::load_idx_files(img_gz, lab_gz);
  CHECK(unzipped.features == data.features);
  CHECK(unzipped.labels == data.labels);

  CHECK(erm::maybe_gunzip(gzip_bytes(pixels)) == pixels);
  CHECK(erm::maybe_gunzip(pixels) == pixels);
}

TEST_CASE("synthetic blobs pin the first point of each class at its mean") {
  const erm::Dataset tiny = erm::make_synthetic(2, 3, 2, 10.0, 5);
  CHECK(tiny.labels == std::vector<std::int32_t>{0, 1});
  CHECK(tiny.features == RealVec{0.0, 0.0, 0.0, 10.0, 0.0, 0.0});

  // Same seed reproduces the dataset bit for bit.
  const erm::Dataset a = erm::make_synthetic(50, 4, 3, 2.0, 77);
  const erm::Dataset b = erm::make_synthetic(50, 4, 3, 2.0, 77);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  // Margin 10 blobs are almost surely separable by the midpoint rule on
  // coordinate 0.
  const erm::Dataset wide = erm::make_synthetic(1000, 3, 2, 10.0, 6);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < wide.n; ++i) {
    const int predicted = wide.row(i)[0] > 5.0 ? 1 : 0;
    if (predicted == wide.labels[i]) ++correct;
  }
  CHECK(correct >= 990);

  CHECK_THROWS_AS(erm::make_synthetic(1, 3, 2, 10.0, 5), ParamError);
  CHECK_THROWS_AS(erm::make_synthetic(10, 0, 2, 10.0, 5), ParamError);
  CHECK_THROWS_AS(erm::make_synthetic(10, 3, 2, 0.0, 5), ParamError);
}

TEST_CASE("sampler draws are deterministic and in range") {
  erm::MinibatchSampler a(9, 16);
  erm::MinibatchSampler b(9, 16);
  std::vector<std::size_t> ia, ib;
  for (int rep = 0; rep < 10; ++rep) {
    a.sample(37, ia);
    b.sample(37, ib);
    REQUIRE(ia.size() == 16);
    REQUIRE(ia == ib);
    for (std::size_t v : ia) REQUIRE(v < 37);
  }
}

TEST_CASE("training drives the separable loss down and reproduces per seed") {
  const erm::Dataset data = erm::make_synthetic(256, 3, 2, 10.0, 11);
  optim::Schedule s;
  s.alpha = 0.01;
  s.alpha_mode = optim::AlphaMode::kConstant;
  s.beta1 = 0.9;
  s.beta2 = 0.999;
  s.epsilon = 1e-8;
  const optim::FeasibleSet feasible = optim::FeasibleSet::unbounded(2 * 4);

  erm::MinibatchSampler sampler(21, 128);
  const erm::TrainResult run = erm::train(data, sampler, optim::Method::kAmsgrad,
                                          s, feasible, 2000, 100);
  REQUIRE(!run.trace.empty());
  CHECK(run.trace.front().step == 0);
  CHECK(run.trace.front().loss ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(run.trace.back().step == 2000);
  CHECK(run.trace.back().loss < 0.1);
  CHECK(run.final_theta.size() == 8);
  // eval cadence: 0, 100, ..., 2000.
  CHECK(run.trace.size() == 21);

  erm::MinibatchSampler sampler2(21, 128);
  const erm::TrainResult rerun = erm::train(
      data, sampler2, optim::Method::kAmsgrad, s, feasible, 2000, 100);
  REQUIRE(rerun.trace.size() == run.trace.size());
  for (std::size_t i = 0; i < run.trace.size(); ++i)
    REQUIRE(rerun.trace[i].loss == run.trace[i].loss);
  CHECK(rerun.final_theta == run.final_theta);
}
