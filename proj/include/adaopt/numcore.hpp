#pragma once

#include <cstddef>
#include <vector>

#include "adaopt/errors.hpp"

namespace adaopt::numcore {

// Dense vector of finite reals. Finiteness is an invariant of every public
// operation in this module: NaN or infinity on either side of a call is a
// NumericError, never a silent value.
using RealVec = std::vector<double>;

// Throws NumericError naming `where` if any entry is NaN or infinite.
void require_finite(const RealVec& v, const char* where);
void require_finite(double x, const char* where);

// Throws DimensionError naming `where` if lengths differ.
void require_same_size(const RealVec& a, const RealVec& b, const char* where);

RealVec ew_square(const RealVec& a);
RealVec ew_sqrt(const RealVec& a);  // DomainError on a negative entry
RealVec ew_max(const RealVec& a, const RealVec& b);
RealVec ew_add(const RealVec& a, const RealVec& b);
RealVec ew_add(const RealVec& a, double c);
RealVec ew_scale(double c, const RealVec& a);

// num[i]/den[i] with the convention 0/0 = 0. A zero denominator means "no
// gradient has ever touched this coordinate", which forces a zero numerator
// in every optimizer here; a nonzero numerator over a zero denominator
// therefore signals a corrupted state and throws DomainError. den[i] < 0 is
// a DomainError as well.
double safe_div(double num, double den);
RealVec safe_div(const RealVec& num, const RealVec& den);

double dot(const RealVec& a, const RealVec& b);
double linf_norm(const RealVec& a);

// Axis-aligned box { x : lo <= x <= hi }, the feasible set of every scenario.
// lo/hi must be finite with lo[i] <= hi[i], so the L-inf diameter is finite.
class BoxSet {
 public:
  BoxSet(RealVec lo, RealVec hi);
  static BoxSet symmetric(std::size_t dim, double radius);  // [-r, r]^dim

  std::size_t dim() const { return lo_.size(); }
  const RealVec& lo() const { return lo_; }
  const RealVec& hi() const { return hi_; }

  bool contains(const RealVec& x) const;
  RealVec clamp(const RealVec& x) const;
  double clamp1(double x, std::size_t i) const;  // one coordinate
  double diameter_inf() const;

 private:
  RealVec lo_;
  RealVec hi_;
};

// Nonnegative diagonal of a positive-semidefinite weight matrix.
struct DiagWeights {
  RealVec w;
};

// Validates nonnegativity and finiteness.
DiagWeights make_weights(RealVec w);

// argmin over x in box of sum_i w[i]*(x[i]-y[i])^2. For an axis-aligned box
// the minimizer is coordinate-wise clamping, independent of the (positive)
// weights. A zero-weight coordinate makes the objective flat there; it is
// clamped anyway so the result is always feasible and deterministic.
RealVec project_weighted(const BoxSet& box, const DiagWeights& weights,
                         const RealVec& y);

}  // namespace adaopt::numcore
