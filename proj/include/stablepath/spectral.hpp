#pragma once

// Discrete spectral measures of aggregated moving averages, supported either
// on the unit euclidean sphere of path space or on the unit cylinder of a
// semi-norm that only sees the observed block. Atoms carry labels (j, k)
// tying them back to the component and noise offset that produced them;
// j = 0 is reserved for the present-noise spike at +-e_0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "seminorm.hpp"

namespace stablepath {

enum class SupportKind { EuclideanSphere, Cylinder };

struct Atom {
  std::vector<double> point;
  double weight = 0.0;
  int theta = 1;
  int j = 0;
  long long k = 0;
};

class DiscreteSpectralMeasure {
 public:
  DiscreteSpectralMeasure(int dimension, SupportKind support,
                          std::optional<SemiNorm> sn, double alpha,
                          std::vector<Atom> atoms,
                          std::optional<std::vector<double>> shift = {})
      : dim_(dimension),
        support_(support),
        sn_(std::move(sn)),
        alpha_(alpha),
        shift_(std::move(shift)) {
    if (dim_ < 1) throw InvalidParameter("measure dimension must be positive");
    if (!(alpha_ > 0.0) || !(alpha_ < 2.0))
      throw InvalidParameter("alpha must lie in (0,2)");
    if (support_ == SupportKind::Cylinder) {
      if (!sn_.has_value())
        throw InvalidParameter("cylinder support needs its defining semi-norm");
      if (sn_->dimension() != dim_)
        throw DimensionMismatch("semi-norm dimension does not match the measure");
    }
    if (shift_ && static_cast<int>(shift_->size()) != dim_)
      throw DimensionMismatch("shift vector dimension does not match the measure");
    for (auto& a : atoms) {
      if (static_cast<int>(a.point.size()) != dim_)
        throw DimensionMismatch("atom dimension does not match the measure");
      if (!(a.weight > 0.0))
        throw InvalidParameter("atom weights must be strictly positive");
      double unit = support_ == SupportKind::Cylinder ? (*sn_)(a.point)
                                                      : euclidean_norm(a.point);
      if (std::abs(unit - 1.0) > 1e-9)
        throw InvalidParameter("atom does not lie on the unit support surface");
      merge_or_insert(std::move(a));
    }
    total_ = 0.0;
    for (const auto& a : atoms_) total_ += a.weight;
  }

  int dimension() const { return dim_; }
  SupportKind support() const { return support_; }
  const std::optional<SemiNorm>& seminorm() const { return sn_; }
  double alpha() const { return alpha_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<std::vector<double>>& shift() const { return shift_; }
  double total_mass() const { return total_; }

  bool symmetric() const {
    for (const auto& a : atoms_) {
      bool matched = false;
      for (const auto& b : atoms_) {
        if (sup_dist(a.point, b.point, true) <= 1e-12) {
          matched = std::abs(a.weight - b.weight) <=
                    1e-9 * std::max(a.weight, b.weight);
          break;
        }
      }
      if (!matched) return false;
    }
    return true;
  }

 private:
  static double sup_dist(const std::vector<double>& a, const std::vector<double>& b,
                         bool negate_b = false) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      d = std::max(d, std::abs(a[i] - (negate_b ? -b[i] : b[i])));
    return d;
  }

  void merge_or_insert(Atom&& a) {
    for (auto& kept : atoms_) {
      if (sup_dist(kept.point, a.point) <= 1e-12) {
        kept.weight += a.weight;  // first label and first point win
        return;
      }
    }
    atoms_.push_back(std::move(a));
  }

  int dim_;
  SupportKind support_;
  std::optional<SemiNorm> sn_;
  double alpha_;
  std::vector<Atom> atoms_;
  std::optional<std::vector<double>> shift_;
  double total_ = 0.0;
};

// Spectral measure of (X_{t-m},...,X_{t+h}) on the euclidean unit sphere.
// One atom family per component and noise offset k; the per-window tolerance
// is split so the total dropped mass stays below trunc.tol.
inline DiscreteSpectralMeasure euclidean_spectral_measure(
    const Aggregate& agg, int m, int h, const TruncationPolicy& trunc = {}) {
  if (m < 0 || h < 1)
    throw InvalidParameter("spectral measure needs m >= 0 and h >= 1");
  const int n = m + h + 1;
  const double alpha = agg.alpha();
  const std::size_t J = agg.components().size();
  bool skewed = false;
  for (const auto& c : agg.components()) skewed = skewed || c.beta != 0.0;

  std::vector<Atom> atoms;
  for (std::size_t jc = 0; jc < J; ++jc) {
    const auto& comp = agg.components()[jc];
    const double pia = std::pow(comp.pi, alpha);
    const double wtol = trunc.tol / (static_cast<double>(J) * n * pia);
    TruncationWindow win = comp.seq.truncation_window(alpha, wtol, trunc.max_terms);
    for (long long k = win.lo - m; k <= win.hi + h; ++k) {
      std::vector<double> v(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = comp.seq.coeff(k + m - i);
      double ne = euclidean_norm(v);
      if (ne == 0.0) continue;
      double mass = pia * std::pow(ne, alpha);
      for (int theta : {1, -1}) {
        double wgt = 0.5 * (1.0 + theta * comp.beta) * mass;
        if (wgt == 0.0) continue;
        Atom a;
        a.point.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          a.point[static_cast<std::size_t>(i)] = theta * v[static_cast<std::size_t>(i)] / ne;
        a.weight = wgt;
        bool spike = true;
        for (int i = 1; i < n && spike; ++i)
          spike = std::abs(a.point[static_cast<std::size_t>(i)]) <= 1e-12;
        if (spike) {
          // present-noise direction: shared label independent of the component
          a.j = 0;
          a.k = -m;
          a.theta = a.point[0] > 0.0 ? 1 : -1;
        } else {
          a.j = static_cast<int>(jc) + 1;
          a.k = k;
          a.theta = theta;
        }
        atoms.push_back(std::move(a));
      }
    }
  }

  std::optional<std::vector<double>> shift;
  if (alpha == 1.0 && skewed) {
    // location correction from the scale-dependent re-centering of strictly
    // 1-stable sums; summed over a wider window because the log factor decays
    // more slowly than the mass itself
    std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
    for (std::size_t jc = 0; jc < J; ++jc) {
      const auto& comp = agg.components()[jc];
      if (comp.beta == 0.0) continue;
      const double wtol =
          1e-3 * trunc.tol / (static_cast<double>(J) * n * comp.pi);
      TruncationWindow win = comp.seq.truncation_window(alpha, wtol, trunc.max_terms);
      for (long long k = win.lo - m; k <= win.hi + h; ++k) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          v[static_cast<std::size_t>(i)] = comp.seq.coeff(k + m - i);
        double ne = euclidean_norm(v);
        if (ne == 0.0) continue;
        double lg = std::log(comp.pi * ne);
        for (int i = 0; i < n; ++i)
          mu[static_cast<std::size_t>(i)] -=
              (2.0 / kPi) * comp.pi * comp.beta * v[static_cast<std::size_t>(i)] * lg;
      }
    }
    shift = std::move(mu);
  }

  return DiscreteSpectralMeasure(n, SupportKind::EuclideanSphere, std::nullopt,
                                 alpha, std::move(atoms), std::move(shift));
}

// Re-supports a sphere measure on the unit cylinder {sn = 1}: points are
// scaled onto the cylinder and weights pick up the factor sn(s)^alpha. Mass
// in the semi-norm kernel cannot be moved there.
inline DiscreteSpectralMeasure to_cylinder(const DiscreteSpectralMeasure& mes,
                                           const SemiNorm& sn) {
  if (mes.support() != SupportKind::EuclideanSphere)
    throw InvalidParameter("cylinder projection starts from a sphere measure");
  if (sn.dimension() != mes.dimension())
    throw DimensionMismatch("semi-norm dimension does not match the measure");
  std::vector<Atom> atoms;
  atoms.reserve(mes.atoms().size());
  for (const auto& a : mes.atoms()) {
    double r = sn(a.point);
    if (r <= 1e-12)
      throw NotRepresentable(
          "spectral mass lies in the semi-norm kernel: the direction is "
          "invisible from the observed block");
    Atom b = a;
    for (auto& x : b.point) x /= r;
    b.weight = a.weight * std::pow(r, mes.alpha());
    atoms.push_back(std::move(b));
  }
  std::optional<std::vector<double>> shift = mes.shift();
  if (shift && mes.alpha() == 1.0) {
    for (const auto& a : mes.atoms()) {
      double lg = std::log(sn(a.point));
      for (std::size_t i = 0; i < shift->size(); ++i)
        (*shift)[i] -= (2.0 / kPi) * a.weight * a.point[i] * lg;
    }
  }
  return DiscreteSpectralMeasure(mes.dimension(), SupportKind::Cylinder, sn,
                                 mes.alpha(), std::move(atoms), std::move(shift));
}

inline DiscreteSpectralMeasure to_euclidean_sphere(const DiscreteSpectralMeasure& mes) {
  if (mes.support() != SupportKind::Cylinder)
    throw InvalidParameter("sphere projection starts from a cylinder measure");
  std::vector<Atom> atoms;
  atoms.reserve(mes.atoms().size());
  for (const auto& a : mes.atoms()) {
    double r = euclidean_norm(a.point);
    Atom b = a;
    for (auto& x : b.point) x /= r;
    b.weight = a.weight * std::pow(r, mes.alpha());
    atoms.push_back(std::move(b));
  }
  std::optional<std::vector<double>> shift = mes.shift();
  if (shift && mes.alpha() == 1.0) {
    for (const auto& a : mes.atoms()) {
      double lg = std::log(euclidean_norm(a.point));
      for (std::size_t i = 0; i < shift->size(); ++i)
        (*shift)[i] -= (2.0 / kPi) * a.weight * a.point[i] * lg;
    }
  }
  return DiscreteSpectralMeasure(mes.dimension(), SupportKind::EuclideanSphere,
                                 std::nullopt, mes.alpha(), std::move(atoms),
                                 std::move(shift));
}

struct M0Result {
  bool finite = true;
  long long value = 0;
  bool operator==(const M0Result&) const = default;
};

// Longest run of zero coefficients sitting directly above a nonzero one.
// Unbounded runs (any sequence whose forward support ends) mean no finite
// observation window can identify the active noise index.
inline M0Result compute_m0(const CoefficientSequence& seq,
                           long long search_bound = 1000000) {
  switch (seq.kind()) {
    case SeqKind::Ar1:
    case SeqKind::Ar2:
    case SeqKind::FracInt:
    case SeqKind::Strophoid:
      // gap-free supports: every coefficient from the first onward is nonzero
      return {true, 0};
    case SeqKind::Explicit:
      return {false, 0};
    case SeqKind::Arma: {
      const auto& p = seq.arma_polys();
      if (detail::effective_degree(p.psi) == 0) return {false, 0};
      TruncationWindow w = seq.truncation_window(1.0, 1e-30);
      const long long lo = w.lo;
      const long long hi = std::min(w.hi, lo + search_bound);
      const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
      std::vector<double> vals(count);
      for (std::size_t i = 0; i < count; ++i)
        vals[i] = std::abs(seq.coeff(lo + static_cast<long long>(i)));
      long long reach = 2;
      for (const auto* poly : {&p.psi, &p.phi, &p.theta, &p.eta})
        reach = std::max<long long>(
            reach, static_cast<long long>(detail::effective_degree(*poly)) + 2);
      long long best = 0;
      long long prev = std::numeric_limits<long long>::min();
      for (std::size_t i = 0; i < count; ++i) {
        double local = 0.0;
        for (long long t = -reach; t <= reach; ++t) {
          long long idx = static_cast<long long>(i) + t;
          if (idx >= 0 && idx < static_cast<long long>(count))
            local = std::max(local, vals[static_cast<std::size_t>(idx)]);
        }
        if (vals[i] > 0.0 && vals[i] > 1e-12 * local) {
          long long k = lo + static_cast<long long>(i);
          if (prev != std::numeric_limits<long long>::min())
            best = std::max(best, k - prev - 1);
          prev = k;
        }
      }
      return {true, best};
    }
  }
  return {true, 0};
}

struct Representability {
  bool yes = false;
  std::string reason;
};

inline Representability is_past_representable(const Aggregate& agg, int m, int h) {
  if (m < 0 || h < 1)
    throw InvalidParameter("representability check needs m >= 0 and h >= 1");
  for (std::size_t jc = 0; jc < agg.components().size(); ++jc) {
    M0Result m0 = compute_m0(agg.components()[jc].seq);
    if (!m0.finite)
      return {false,
              "component " + std::to_string(jc + 1) +
                  " keeps arbitrarily long interior zero runs, so no finite "
                  "observed window pins down the active noise index"};
    if (static_cast<long long>(m) < m0.value)
      return {false, "component " + std::to_string(jc + 1) + " needs m >= " +
                         std::to_string(m0.value) + " observed past values, got m = " +
                         std::to_string(m)};
  }
  return {true, ""};
}

}  // namespace stablepath
