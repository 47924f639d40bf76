#include "adaopt/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaopt::numcore {

void require_finite(const RealVec& v, const char* where) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericError(std::string(where) + ": non-finite entry at index " +
                         std::to_string(i));
    }
  }
}

void require_finite(double x, const char* where) {
  if (!std::isfinite(x)) {
    throw NumericError(std::string(where) + ": non-finite value");
  }
}

void require_same_size(const RealVec& a, const RealVec& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

RealVec ew_square(const RealVec& a) {
  require_finite(a, "ew_square");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * a[i];
  require_finite(out, "ew_square result");
  return out;
}

RealVec ew_sqrt(const RealVec& a) {
  require_finite(a, "ew_sqrt");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0.0) {
      throw DomainError("ew_sqrt: negative entry at index " + std::to_string(i));
    }
    out[i] = std::sqrt(a[i]);
  }
  return out;
}

RealVec ew_max(const RealVec& a, const RealVec& b) {
  require_same_size(a, b, "ew_max");
  require_finite(a, "ew_max");
  require_finite(b, "ew_max");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

RealVec ew_add(const RealVec& a, const RealVec& b) {
  require_same_size(a, b, "ew_add");
  require_finite(a, "ew_add");
  require_finite(b, "ew_add");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  require_finite(out, "ew_add result");
  return out;
}

RealVec ew_add(const RealVec& a, double c) {
  require_finite(a, "ew_add");
  require_finite(c, "ew_add scalar");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c;
  require_finite(out, "ew_add result");
  return out;
}

RealVec ew_scale(double c, const RealVec& a) {
  require_finite(a, "ew_scale");
  require_finite(c, "ew_scale factor");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  require_finite(out, "ew_scale result");
  return out;
}

double safe_div(double num, double den) {
  if (den < 0.0) throw DomainError("safe_div: negative denominator");
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw DomainError("safe_div: nonzero numerator over zero denominator");
  }
  return num / den;
}

RealVec safe_div(const RealVec& num, const RealVec& den) {
  require_same_size(num, den, "safe_div");
  require_finite(num, "safe_div");
  require_finite(den, "safe_div");
  RealVec out(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) out[i] = safe_div(num[i], den[i]);
  require_finite(out, "safe_div result");
  return out;
}

double dot(const RealVec& a, const RealVec& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double linf_norm(const RealVec& a) {
  double s = 0.0;
  for (double x : a) s = std::max(s, std::fabs(x));
  return s;
}

BoxSet::BoxSet(RealVec lo, RealVec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_size(lo_, hi_, "BoxSet");
  require_finite(lo_, "BoxSet lo");
  require_finite(hi_, "BoxSet hi");
  if (lo_.empty()) throw ParamError("BoxSet: dimension must be >= 1");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (lo_[i] > hi_[i]) {
      throw ParamError("BoxSet: lo > hi at index " + std::to_string(i));
    }
  }
}

BoxSet BoxSet::symmetric(std::size_t dim, double radius) {
  if (radius < 0.0) throw ParamError("BoxSet::symmetric: negative radius");
  return BoxSet(RealVec(dim, -radius), RealVec(dim, radius));
}

bool BoxSet::contains(const RealVec& x) const {
  require_same_size(x, lo_, "BoxSet::contains");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
  }
  return true;
}

RealVec BoxSet::clamp(const RealVec& x) const {
  require_same_size(x, lo_, "BoxSet::clamp");
  require_finite(x, "BoxSet::clamp");
  RealVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::min(std::max(x[i], lo_[i]), hi_[i]);
  }
  return out;
}

double BoxSet::clamp1(double x, std::size_t i) const {
  return std::min(std::max(x, lo_[i]), hi_[i]);
}

double BoxSet::diameter_inf() const {
  double d = 0.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) d = std::max(d, hi_[i] - lo_[i]);
  return d;
}

DiagWeights make_weights(RealVec w) {
  require_finite(w, "make_weights");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) {
      throw ParamError("make_weights: negative weight at index " +
                       std::to_string(i));
    }
  }
  return DiagWeights{std::move(w)};
}

RealVec project_weighted(const BoxSet& box, const DiagWeights& weights,
                         const RealVec& y) {
  require_same_size(weights.w, y, "project_weighted");
  require_same_size(y, box.lo(), "project_weighted");
  // Coordinate-wise clamp minimizes each separable term; zero-weight
  // coordinates are clamped too (see header).
  return box.clamp(y);
}

}  // namespace adaopt::numcore
