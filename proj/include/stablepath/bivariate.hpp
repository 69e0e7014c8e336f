#pragma once

// Two-component model mixing an anticipative first series with a causal
// second one, both driven by the same planar noise. Extremes of the pair
// live on a four-dimensional cylinder: (X1_t, X2_t, X1_{t+1}, X2_{t+1})
// scaled by the observed magnitude. The future pair is read off through
// (x, y) = (s3, s4 - rho2*s2): next value of the anticipative component and
// the fresh innovation of the causal one.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "seminorm.hpp"
#include "spectral.hpp"
#include "stable.hpp"

namespace stablepath {

struct Arc {
  double center = 0.0;
  double half_width = 0.0;
};

struct Rect {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct PlanarSet {
  std::vector<Rect> rects;
};

struct Region {
  Arc v;
  PlanarSet P;
};

class BivarModel {
 public:
  BivarModel(double alpha, double rho1, double rho2,
             DiscreteSpectralMeasure gamma2)
      : alpha_(alpha), rho1_(rho1), rho2_(rho2), gamma2_(std::move(gamma2)) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
      throw InvalidParameter("alpha must lie in (0,2)");
    if (!(std::abs(rho1) > 0.0) || !(std::abs(rho1) < 1.0))
      throw InvalidParameter("rho1 must satisfy 0 < |rho1| < 1");
    if (!(std::abs(rho2) > 0.0) || !(std::abs(rho2) < 1.0))
      throw InvalidParameter("rho2 must satisfy 0 < |rho2| < 1");
    if (gamma2_.dimension() != 2)
      throw InvalidParameter("noise measure must live on the planar sphere");
    if (gamma2_.support() != SupportKind::EuclideanSphere)
      throw InvalidParameter("noise measure must live on the euclidean sphere");
    if (std::abs(gamma2_.alpha() - alpha) > 1e-12)
      throw InvalidParameter("noise measure index must match the model alpha");
    if (!gamma2_.symmetric())
      throw InvalidParameter("noise measure must be symmetric");
    s1a_ = 0.0;
    s2a_ = 0.0;
    for (const auto& a : gamma2_.atoms()) {
      s1a_ += a.weight * std::pow(std::abs(a.point[0]), alpha_);
      s2a_ += a.weight * std::pow(std::abs(a.point[1]), alpha_);
    }
  }

  double alpha() const { return alpha_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  const DiscreteSpectralMeasure& gamma2() const { return gamma2_; }

  // scale parameters of the two marginal noise projections, to the alpha
  double sigma1_alpha() const { return s1a_; }
  double sigma2_alpha() const { return s2a_; }

 private:
  double alpha_;
  double rho1_;
  double rho2_;
  DiscreteSpectralMeasure gamma2_;
  double s1a_ = 0.0;
  double s2a_ = 0.0;
};

struct Gamma4Measure {
  std::vector<Atom> delta;    // accumulated-series poles on the axes
  std::vector<Atom> gamma41;  // a present noise jump hits both components
  std::vector<Atom> gamma42;  // an already-integrated jump keeps growing
  DiscreteSpectralMeasure combined;
};

// Spectral measure of (X1_t, X2_t, X1_{t+1}, X2_{t+1}) on the cylinder
// normalized by the observed pair (first two coordinates, euclidean).
inline Gamma4Measure gamma4_cylinder(const BivarModel& model) {
  const double alpha = model.alpha();
  const double rho1 = model.rho1();
  const double rho2 = model.rho2();
  const double r1 = std::pow(std::abs(rho1), alpha);
  const double r2 = std::pow(std::abs(rho2), alpha);

  for (const auto& a : model.gamma2().atoms())
    if (std::abs(a.point[0]) <= 1e-12)
      throw NotRepresentable(
          "noise charges the second axis: the anticipative component cannot "
          "see those jumps from the observed pair");

  std::vector<Atom> delta;
  for (double sign : {1.0, -1.0}) {
    Atom a1;
    a1.point = {sign, 0.0, sign / rho1, 0.0};
    a1.weight = 0.5 * model.sigma1_alpha() * std::pow(std::abs(rho1), 2.0 * alpha) /
                (1.0 - r1);
    a1.theta = sign > 0 ? 1 : -1;
    a1.j = 1;
    a1.k = 0;
    delta.push_back(std::move(a1));
    Atom a2;
    a2.point = {0.0, sign, 0.0, sign * rho2};
    a2.weight = 0.5 * model.sigma2_alpha() * r2 / (1.0 - r2);
    a2.theta = sign > 0 ? 1 : -1;
    a2.j = 2;
    a2.k = 0;
    delta.push_back(std::move(a2));
  }

  std::vector<Atom> g41, g42;
  for (const auto& src : model.gamma2().atoms()) {
    const double s1 = src.point[0], s2 = src.point[1];
    Atom a;
    a.point = {s1, s2, 0.0, rho2 * s2};
    a.weight = src.weight;
    a.theta = src.theta;
    a.j = src.j;
    a.k = src.k;
    g41.push_back(std::move(a));

    const double sg = rho1 * s1 > 0.0 ? 1.0 : -1.0;
    Atom b;
    b.point = {sg, 0.0, sg / rho1, sg * s2 / (rho1 * s1)};
    b.weight = src.weight * std::pow(std::abs(rho1 * s1), alpha);
    b.theta = sg > 0 ? 1 : -1;
    b.j = src.j;
    b.k = src.k;
    g42.push_back(std::move(b));
  }

  std::vector<Atom> all;
  all.reserve(delta.size() + g41.size() + g42.size());
  all.insert(all.end(), delta.begin(), delta.end());
  all.insert(all.end(), g41.begin(), g41.end());
  all.insert(all.end(), g42.begin(), g42.end());

  DiscreteSpectralMeasure combined(4, SupportKind::Cylinder, SemiNorm(1, 2, 2.0),
                                   alpha, std::move(all));
  return Gamma4Measure{std::move(delta), std::move(g41), std::move(g42),
                       std::move(combined)};
}

namespace detail {

inline bool arc_contains(double angle, const Arc& arc) {
  double d = std::remainder(angle - arc.center, 2.0 * kPi);
  return std::abs(d) <= arc.half_width + 1e-12;
}

inline bool planar_contains(double x, double y, const PlanarSet& set) {
  for (const auto& r : set.rects)
    if (x >= r.x_lo && x <= r.x_hi && y >= r.y_lo && y <= r.y_hi) return true;
  return false;
}

}  // namespace detail

// Conditional probability that, given an extreme observed pair pointing into
// v0, the next-step pair (X1_{t+1}/|X|, (X2_{t+1}-rho2*X2_t)/|X|) falls into
// region.P while the observed direction falls into region.v.
inline double bivar_tail(const BivarModel& model, const Arc& v0,
                         const Region& region) {
  if (!(v0.half_width >= 0.0) || !(region.v.half_width >= 0.0))
    throw InvalidParameter("arc half-widths must be nonnegative");

  int poles = 0;
  for (double p : {0.0, 0.5 * kPi, kPi, -0.5 * kPi})
    if (detail::arc_contains(p, v0)) ++poles;
  if (poles >= 2)
    throw UnsupportedConditioning(
        "conditioning arc touches several accumulation directions at once; "
        "narrow it to a single regime");

  auto g4 = gamma4_cylinder(model);
  const double rho2 = model.rho2();

  double num = 0.0, den = 0.0;
  for (const auto& a : g4.combined.atoms()) {
    const double ang = std::atan2(a.point[1], a.point[0]);
    if (!detail::arc_contains(ang, v0)) continue;
    den += a.weight;
    const double x = a.point[2];
    const double y = a.point[3] - rho2 * a.point[1];
    if (detail::arc_contains(ang, region.v) &&
        detail::planar_contains(x, y, region.P))
      num += a.weight;
  }
  if (!(den > 0.0))
    throw ZeroConditioningMass(
        "conditioning arc carries no spectral mass");
  return num / den;
}

}  // namespace stablepath
