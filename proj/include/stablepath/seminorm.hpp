#pragma once

// Semi-norms on path vectors. A path vector of dimension m+h+1 lists one
// trajectory window oldest-first: m past values, the present value, then h
// future values. The semi-norm reads only the observed block (the first m+1
// entries) as an l^p norm, so it vanishes exactly on the pure-future
// subspace. That kernel is what makes prediction non-trivial: directions in
// it are invisible at observation time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace stablepath {

class SemiNorm {
 public:
  SemiNorm(int m, int h, double p = 2.0) : m_(m), h_(h), p_(p) {
    if (m < 0) throw InvalidParameter("seminorm m must be >= 0");
    if (h < 1) throw InvalidParameter("seminorm h must be >= 1");
    if (!(p >= 1.0))
      throw InvalidParameter("seminorm p must be >= 1 (or infinity)");
  }

  int m() const { return m_; }
  int h() const { return h_; }
  double p() const { return p_; }
  bool is_sup() const { return std::isinf(p_); }
  int dimension() const { return m_ + h_ + 1; }

  double operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
      throw DimensionMismatch("path vector has length " +
                              std::to_string(x.size()) + ", expected " +
                              std::to_string(dimension()));
    const int n = m_ + 1;
    if (is_sup()) {
      double mx = 0.0;
      for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(x[i]));
      return mx;
    }
    if (p_ == 2.0) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += x[i] * x[i];
      return std::sqrt(s);
    }
    if (p_ == 1.0) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::abs(x[i]);
      return s;
    }
    // generic p: scale out the largest entry to dodge overflow
    double mx = 0.0;
    for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(x[i]));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(std::abs(x[i]) / mx, p_);
    return mx * std::pow(s, 1.0 / p_);
  }

 private:
  int m_, h_;
  double p_;
};

inline double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Radial projection onto the unit cylinder {s : sn(s) = 1}.
inline std::vector<double> project_to_cylinder(const SemiNorm& sn,
                                               std::span<const double> x) {
  double r = sn(x);
  if (r == 0.0)
    throw KernelVector("cannot normalize: observed part of the vector is zero");
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v /= r;
  return out;
}

}  // namespace stablepath
