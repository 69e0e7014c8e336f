#pragma once

// Two-sided moving-average kernels and their aggregates. A coefficient
// sequence (d_k) drives X_t = sum_k d_k eps_{t+k}, so positive k load
// future noise and give the series its anticipative character. An
// Aggregate sums J independent such series, scaled by pi_j, sharing one
// stability index alpha.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "stable.hpp"

namespace stablepath {

struct TruncationWindow {
  long long lo = 0;
  long long hi = 0;
  double discarded = 0.0;
};

// tol bounds the discarded alpha-mass sum |d_k|^alpha outside the window;
// max_terms caps the window length regardless of the achieved tolerance.
struct TruncationPolicy {
  double tol = 1e-10;
  std::optional<long long> max_terms{};
};

enum class SeqKind { Ar1, Ar2, FracInt, Arma, Strophoid, Explicit };

struct ArmaPolys {
  std::vector<double> psi, phi, theta, eta;
};

namespace detail {

// windows longer than this are clamped even if the tolerance is not met;
// slowly decaying kinds should be driven with an explicit max_terms
inline constexpr long long kWindowCap = 4'000'000;

inline double ipow_signed(double b, long long k) {
  double mag = std::pow(std::abs(b), static_cast<double>(k));
  return (b < 0.0 && (k & 1LL)) ? -mag : mag;
}

inline std::size_t effective_degree(const std::vector<double>& poly) {
  std::size_t deg = poly.size() - 1;
  while (deg > 0 && std::abs(poly[deg]) < 1e-300) --deg;
  return deg;
}

// Durand-Kerner iteration; adequate for the low-degree filters used here.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& poly) {
  std::size_t deg = effective_degree(poly);
  if (deg == 0) return {};
  std::vector<std::complex<double>> c(deg);
  for (std::size_t i = 0; i < deg; ++i) c[i] = poly[i] / poly[deg];
  std::vector<std::complex<double>> z(deg);
  std::complex<double> w(0.4, 0.9), p(1.0, 0.0);
  for (std::size_t i = 0; i < deg; ++i) {
    p *= w;
    z[i] = p;
  }
  for (int iter = 0; iter < 500; ++iter) {
    double move = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      std::complex<double> val(1.0, 0.0);
      for (std::size_t d = deg; d-- > 0;) val = val * z[i] + c[d];
      std::complex<double> den(1.0, 0.0);
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) den *= z[i] - z[j];
      if (std::abs(den) < 1e-300) continue;
      std::complex<double> delta = val / den;
      z[i] -= delta;
      move = std::max(move, std::abs(delta));
    }
    if (move < 1e-13) break;
  }
  return z;
}

inline bool share_root(const std::vector<std::complex<double>>& a,
                       const std::vector<std::complex<double>>& b) {
  for (const auto& ra : a)
    for (const auto& rb : b)
      if (std::abs(ra - rb) <= 1e-8 * (1.0 + std::abs(ra))) return true;
  return false;
}

// real roots of y^3 + P y^2 + Q y + R, sorted ascending, near-duplicates merged
inline std::vector<double> real_cubic_roots(double P, double Q, double R) {
  const double p = Q - P * P / 3.0;
  const double q = 2.0 * P * P * P / 27.0 - P * Q / 3.0 + R;
  const double shift = -P / 3.0;
  std::vector<double> roots;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    double mp = std::sqrt(-p / 3.0);
    double arg = std::clamp(3.0 * q / (2.0 * p * mp), -1.0, 1.0);
    double phi = std::acos(arg);
    for (int i = 0; i < 3; ++i)
      roots.push_back(2.0 * mp * std::cos((phi - 2.0 * kPi * i) / 3.0) + shift);
  } else {
    double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
  }
  for (double& y : roots) {
    for (int it = 0; it < 3; ++it) {
      double f = ((y + P) * y + Q) * y + R;
      double fp = (3.0 * y + 2.0 * P) * y + Q;
      if (std::abs(fp) < 1e-12 * (1.0 + std::abs(y) * std::abs(y))) break;
      y -= f / fp;
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double y : roots) {
    if (out.empty() || std::abs(y - out.back()) > 1e-7 * std::max(1.0, std::abs(y)))
      out.push_back(y);
  }
  return out;
}

// power series of 1/poly (constant term 1), truncated once negligible
inline std::vector<double> inverse_series(const std::vector<double>& poly) {
  std::size_t deg = effective_degree(poly);
  std::vector<double> a{1.0};
  if (deg == 0) return a;
  double peak = 1.0;
  const std::size_t guard = 2 * deg + 8;
  for (std::size_t i = 1; i < 200000; ++i) {
    double acc = 0.0;
    for (std::size_t l = 1; l <= std::min(deg, i); ++l) acc -= poly[l] * a[i - l];
    a.push_back(acc);
    peak = std::max(peak, std::abs(acc));
    if (i >= guard) {
      bool settled = true;
      for (std::size_t t = 0; t <= guard && settled; ++t)
        settled = std::abs(a[a.size() - 1 - t]) <= 1e-32 * peak;
      if (settled) break;
    }
  }
  return a;
}

inline std::vector<double> convolve(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace detail

class CoefficientSequence {
 public:
  static CoefficientSequence ar1(double rho) {
    if (!(std::abs(rho) > 0.0) || !(std::abs(rho) < 1.0))
      throw InvalidParameter("ar1 expects 0 < |rho| < 1");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Ar1;
    d->rho = rho;
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence ar2(double l1, double l2) {
    for (double l : {l1, l2})
      if (!(std::abs(l) > 0.0) || !(std::abs(l) < 1.0))
        throw InvalidParameter("ar2 roots must have modulus in (0,1)");
    if (std::abs(l1 + l2) < 1e-15 * (std::abs(l1) + std::abs(l2)))
      throw InvalidParameter("ar2 roots must not cancel (l1 + l2 = 0)");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Ar2;
    d->l1 = l1;
    d->l2 = l2;
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence ar2(std::complex<double> l1, std::complex<double> l2) {
    if (l1.imag() == 0.0 && l2.imag() == 0.0) return ar2(l1.real(), l2.real());
    double scale = std::abs(l1) + std::abs(l2);
    if (std::abs(l1 - std::conj(l2)) > 1e-12 * scale)
      throw InvalidParameter("complex ar2 roots must form a conjugate pair");
    double r = std::abs(l1);
    if (!(r > 0.0) || !(r < 1.0))
      throw InvalidParameter("ar2 roots must have modulus in (0,1)");
    if (std::abs(l1.real()) < 1e-15 * scale)
      throw InvalidParameter("ar2 roots must not cancel (l1 + l2 = 0)");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Ar2;
    d->ar2_complex = true;
    d->r = r;
    d->phi = std::abs(std::arg(l1));
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence frac_int(double dpar) {
    if (!(dpar < 1.0))
      throw InvalidParameter("fractional order d must be below 1");
    if (dpar <= 0.0 && dpar == std::floor(dpar))
      throw InvalidParameter("fractional order d must not be a non-positive integer");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::FracInt;
    d->d = dpar;
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence arma(std::vector<double> psi, std::vector<double> phi,
                                  std::vector<double> theta, std::vector<double> eta) {
    for (const auto* poly : {&psi, &phi, &theta, &eta}) {
      if (poly->empty() || std::abs((*poly)[0] - 1.0) > 1e-12)
        throw InvalidParameter("filter polynomials must have constant term 1");
    }
    auto rpsi = detail::poly_roots(psi);
    auto rphi = detail::poly_roots(phi);
    auto rtheta = detail::poly_roots(theta);
    auto reta = detail::poly_roots(eta);
    for (const auto* roots : {&rpsi, &rphi, &rtheta, &reta})
      for (const auto& r : *roots)
        if (!(std::abs(r) > 1.0))
          throw InvalidParameter("filter polynomial root inside or on the unit circle");
    if (detail::share_root(rpsi, rtheta))
      throw InvalidParameter("forward filter polynomials share a root");
    if (detail::share_root(rphi, reta))
      throw InvalidParameter("backward filter polynomials share a root");

    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Arma;
    d->polys = ArmaPolys{psi, phi, theta, eta};
    auto fwd = detail::convolve(theta, detail::inverse_series(psi));
    auto bwd = detail::convolve(eta, detail::inverse_series(phi));
    // d_k = sum_j fwd[k+j] * bwd[j]
    d->dk_kmin = -static_cast<long long>(bwd.size()) + 1;
    d->dk.assign(fwd.size() + bwd.size() - 1, 0.0);
    for (std::size_t i = 0; i < fwd.size(); ++i)
      for (std::size_t j = 0; j < bwd.size(); ++j)
        d->dk[i + (bwd.size() - 1 - j)] += fwd[i] * bwd[j];
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence strophoid(double a, double b, std::uint64_t seed) {
    if (!(a > 0.0) || !(b > 0.0))
      throw InvalidParameter("strophoid parameters a, b must be positive");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Strophoid;
    d->a = a;
    d->b = b;
    d->seed = seed;
    return CoefficientSequence(std::move(d));
  }

  static CoefficientSequence explicit_seq(std::map<long long, double> coeffs) {
    if (coeffs.empty())
      throw InvalidParameter("explicit sequence needs at least one coefficient");
    for (const auto& [k, v] : coeffs)
      if (v == 0.0)
        throw InvalidParameter("explicit sequence must not store zero coefficients");
    auto d = std::make_shared<Data>();
    d->kind = SeqKind::Explicit;
    d->table = std::move(coeffs);
    return CoefficientSequence(std::move(d));
  }

  SeqKind kind() const { return data_->kind; }

  const ArmaPolys& arma_polys() const {
    if (data_->kind != SeqKind::Arma)
      throw InvalidParameter("filter polynomials are only defined for ARMA sequences");
    return data_->polys;
  }

  double coeff(long long k) const {
    const Data& d = *data_;
    switch (d.kind) {
      case SeqKind::Ar1:
        if (k < 0) return 0.0;
        return detail::ipow_signed(d.rho, k);
      case SeqKind::Ar2: {
        if (k < 0) return 0.0;
        if (d.ar2_complex) {
          double s = std::sin(d.phi);
          return std::pow(d.r, static_cast<double>(k)) *
                 std::sin(static_cast<double>(k + 1) * d.phi) / s;
        }
        double diff = d.l1 - d.l2;
        if (std::abs(diff) <= 1e-9 * (std::abs(d.l1) + std::abs(d.l2))) {
          double lam = 0.5 * (d.l1 + d.l2);
          return static_cast<double>(k + 1) * detail::ipow_signed(lam, k);
        }
        return (detail::ipow_signed(d.l1, k + 1) - detail::ipow_signed(d.l2, k + 1)) /
               diff;
      }
      case SeqKind::FracInt: {
        if (k < 0) return 0.0;
        if (k == 0) return 1.0;
        double kk = static_cast<double>(k);
        double mag = std::exp(std::lgamma(kk + d.d) - std::lgamma(d.d) -
                              std::lgamma(kk + 1.0));
        long long negs =
            d.d < 0.0 ? std::min<long long>(k, static_cast<long long>(std::ceil(-d.d)))
                      : 0;
        return (negs & 1LL) ? -mag : mag;
      }
      case SeqKind::Arma: {
        long long idx = k - d.dk_kmin;
        if (idx < 0 || idx >= static_cast<long long>(d.dk.size())) return 0.0;
        return d.dk[static_cast<std::size_t>(idx)];
      }
      case SeqKind::Strophoid: {
        double x = static_cast<double>(k);
        auto roots = detail::real_cubic_roots(-d.a * (d.b + 3.0),
                                              x * x + d.a * d.a * (2.0 * d.b + 3.0),
                                              -d.a * d.a * d.a * (d.b + 1.0));
        if (roots.size() == 1) return roots[0];
        std::uint64_t state = detail::mix_seed(d.seed, static_cast<std::uint64_t>(k));
        return roots[detail::splitmix64(state) % roots.size()];
      }
      case SeqKind::Explicit: {
        auto it = d.table.find(k);
        return it == d.table.end() ? 0.0 : it->second;
      }
    }
    return 0.0;
  }

  bool alpha_summable(double alpha) const {
    switch (data_->kind) {
      case SeqKind::FracInt:
        return alpha * (1.0 - data_->d) > 1.0;
      case SeqKind::Strophoid:
        return 2.0 * alpha > 1.0;
      default:
        return true;
    }
  }

  TruncationWindow truncation_window(double alpha, double tol,
                                     std::optional<long long> max_terms = {}) const {
    if (!(alpha > 0.0) || !(alpha < 2.0))
      throw InvalidParameter("alpha must lie in (0,2)");
    if (!(tol > 0.0)) throw InvalidParameter("truncation tolerance must be positive");
    if (max_terms && *max_terms < 1)
      throw InvalidParameter("max_terms must be at least 1");
    if (!alpha_summable(alpha))
      throw InvalidParameter("coefficient tail is not alpha-summable, no window "
                             "reaches the tolerance");
    const Data& d = *data_;
    TruncationWindow w;
    switch (d.kind) {
      case SeqKind::Ar1: {
        const double q = std::pow(std::abs(d.rho), alpha);
        auto tail = [&](long long from) {
          return std::pow(q, static_cast<double>(from)) / (1.0 - q);
        };
        long long hi = std::max<long long>(
            0, static_cast<long long>(std::log(tol * (1.0 - q)) / std::log(q)) - 1);
        while (tail(hi + 1) > tol) ++hi;
        while (hi > 0 && tail(hi) <= tol) --hi;
        if (max_terms && hi + 1 > *max_terms) hi = *max_terms - 1;
        w.lo = 0;
        w.hi = hi;
        w.discarded = tail(hi + 1);
        return w;
      }
      case SeqKind::Ar2: {
        const double lam = d.ar2_complex ? d.r : std::max(std::abs(d.l1), std::abs(d.l2));
        const double r = std::pow(lam, alpha);
        auto bound = [&](long long from) {
          double re = r * std::exp(alpha / static_cast<double>(from + 1));
          if (re >= 1.0) return std::numeric_limits<double>::infinity();
          double env = std::pow(static_cast<double>(from + 1), alpha) *
                       std::pow(lam, alpha * static_cast<double>(from));
          return env / (1.0 - re);
        };
        long long hi = 0;
        while (bound(hi + 1) > tol && hi < detail::kWindowCap) ++hi;
        if (max_terms && hi + 1 > *max_terms) hi = *max_terms - 1;
        w.lo = 0;
        w.hi = hi;
        w.discarded = bound(hi + 1);
        return w;
      }
      case SeqKind::FracInt: {
        const double g = alpha * (1.0 - d.d);
        auto bound = [&](long long from) {
          double kk = static_cast<double>(from);
          double t = std::exp(alpha * (std::lgamma(kk + d.d) - std::lgamma(d.d) -
                                       std::lgamma(kk + 1.0)));
          return t * (1.0 + kk / (g - 1.0));
        };
        long long hi = 1;
        while (hi < (1LL << 40) && bound(hi + 1) > tol) hi *= 2;
        long long lo_s = hi / 2, hi_s = hi;
        while (lo_s + 1 < hi_s) {
          long long mid = lo_s + (hi_s - lo_s) / 2;
          (bound(mid + 1) > tol ? lo_s : hi_s) = mid;
        }
        hi = bound(lo_s + 1) <= tol ? lo_s : hi_s;
        hi = std::min(hi, detail::kWindowCap);
        if (max_terms && hi + 1 > *max_terms) hi = *max_terms - 1;
        w.lo = 0;
        w.hi = hi;
        w.discarded = bound(hi + 1);
        return w;
      }
      case SeqKind::Strophoid: {
        const double c = d.a * d.a * d.a * (d.b + 1.0);
        const double ca = std::pow(c, alpha);
        auto side = [&](long long from) {
          double kk = static_cast<double>(from);
          return 2.0 * ca *
                 (std::pow(kk, -2.0 * alpha) +
                  std::pow(kk, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0));
        };
        long long K = 1;
        while (K < (1LL << 40) && side(K + 1) > tol / 2.0) K *= 2;
        long long lo_s = K / 2, hi_s = K;
        while (lo_s + 1 < hi_s) {
          long long mid = lo_s + (hi_s - lo_s) / 2;
          (side(mid + 1) > tol / 2.0 ? lo_s : hi_s) = mid;
        }
        K = side(lo_s + 1) <= tol / 2.0 ? lo_s : hi_s;
        K = std::min(K, detail::kWindowCap / 2);
        if (max_terms) K = std::min(K, (*max_terms - 1) / 2);
        w.lo = -K;
        w.hi = K;
        w.discarded = 2.0 * side(K + 1);
        return w;
      }
      case SeqKind::Arma: {
        const auto& dk = d.dk;
        std::vector<double> t(dk.size());
        for (std::size_t i = 0; i < dk.size(); ++i)
          t[i] = std::pow(std::abs(dk[i]), alpha);
        std::size_t L = 0, R = t.size() - 1;
        double dropped = 0.0;
        while (L < R) {
          bool left = t[L] <= t[R];
          double step = left ? t[L] : t[R];
          if (dropped + step > tol) break;
          dropped += step;
          left ? ++L : --R;
        }
        if (max_terms) {
          while (R - L + 1 > static_cast<std::size_t>(*max_terms) && L < R) {
            bool left = t[L] <= t[R];
            dropped += left ? t[L] : t[R];
            left ? ++L : --R;
          }
        }
        w.lo = d.dk_kmin + static_cast<long long>(L);
        w.hi = d.dk_kmin + static_cast<long long>(R);
        w.discarded = dropped;
        return w;
      }
      case SeqKind::Explicit: {
        long long lo = d.table.begin()->first;
        long long hi = d.table.rbegin()->first;
        double dropped = 0.0;
        if (max_terms) {
          auto weight = [&](long long k) {
            return std::pow(std::abs(d.table.at(k)), alpha);
          };
          auto keys = std::vector<long long>();
          for (const auto& [k, v] : d.table) keys.push_back(k);
          std::size_t L = 0, R = keys.size() - 1;
          while (hi - lo + 1 > *max_terms && L < R) {
            bool left = weight(keys[L]) <= weight(keys[R]);
            dropped += left ? weight(keys[L]) : weight(keys[R]);
            left ? ++L : --R;
            lo = keys[L];
            hi = keys[R];
          }
        }
        w.lo = lo;
        w.hi = hi;
        w.discarded = dropped;
        return w;
      }
    }
    return w;
  }

 private:
  struct Data {
    SeqKind kind = SeqKind::Ar1;
    double rho = 0.0;
    double l1 = 0.0, l2 = 0.0;
    bool ar2_complex = false;
    double r = 0.0, phi = 0.0;
    double d = 0.0;
    ArmaPolys polys;
    std::vector<double> dk;
    long long dk_kmin = 0;
    double a = 0.0, b = 0.0;
    std::uint64_t seed = 0;
    std::map<long long, double> table;
  };

  explicit CoefficientSequence(std::shared_ptr<const Data> data)
      : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

struct Component {
  double pi;
  CoefficientSequence seq;
  double beta;
};

class Aggregate {
 public:
  Aggregate(double alpha, std::vector<Component> components)
      : alpha_(alpha), components_(std::move(components)) {
    if (!(alpha_ > 0.0) || !(alpha_ < 2.0))
      throw InvalidParameter("alpha must lie in (0,2)");
    if (components_.empty())
      throw InvalidParameter("aggregate needs at least one component");
    for (const auto& c : components_) {
      if (!(c.pi > 0.0))
        throw InvalidParameter("component weight pi must be positive");
      if (!(c.beta >= -1.0 && c.beta <= 1.0))
        throw InvalidParameter("component skewness beta must lie in [-1,1]");
      if (!c.seq.alpha_summable(alpha_))
        throw InvalidParameter(
            "component coefficients are not alpha-summable at this alpha");
    }
  }

  double alpha() const { return alpha_; }
  const std::vector<Component>& components() const { return components_; }

 private:
  double alpha_;
  std::vector<Component> components_;
};

struct PathKernel {
  int j = 0;
  long long k = 0;
  std::vector<double> vector;
};

// window of coefficients seen by the path (X_{t-m},...,X_{t+h}) when the
// noise at offset k spikes; stored oldest-first
inline PathKernel path_kernel(const Aggregate& agg, int j, long long k, int m, int h) {
  if (m < 0 || h < 1) throw InvalidParameter("path kernel needs m >= 0, h >= 1");
  if (j < 1 || j > static_cast<int>(agg.components().size()))
    throw InvalidParameter("component index out of range");
  const auto& seq = agg.components()[static_cast<std::size_t>(j - 1)].seq;
  PathKernel out;
  out.j = j;
  out.k = k;
  out.vector.resize(static_cast<std::size_t>(m + h + 1));
  for (int i = 0; i <= m + h; ++i)
    out.vector[static_cast<std::size_t>(i)] = seq.coeff(k + m - i);
  return out;
}

struct SimulateOptions {
  bool keep_windows = false;
  bool keep_noise = false;
};

struct SimulationResult {
  std::vector<double> x;
  std::vector<TruncationWindow> windows;
  std::vector<std::vector<double>> noise;
};

// Truncated moving-average simulation. Each component draws its own unit-scale
// noise stream (stream index = component position) so runs are reproducible
// per seed and stable under appending components.
inline SimulationResult simulate(const Aggregate& agg, std::size_t length,
                                 const TruncationPolicy& pol, std::uint64_t seed,
                                 SimulateOptions opts = {}) {
  if (length == 0) throw InvalidParameter("simulation length must be positive");
  SimulationResult res;
  res.x.assign(length, 0.0);
  for (std::size_t jc = 0; jc < agg.components().size(); ++jc) {
    const auto& comp = agg.components()[jc];
    TruncationWindow win = comp.seq.truncation_window(agg.alpha(), pol.tol, pol.max_terms);
    const std::size_t width = static_cast<std::size_t>(win.hi - win.lo);
    std::vector<double> d(width + 1);
    for (long long k = win.lo; k <= win.hi; ++k)
      d[static_cast<std::size_t>(k - win.lo)] = comp.seq.coeff(k);

    StableSampler sampler(StableParams(agg.alpha(), comp.beta, 1.0, 0.0), seed, jc);
    std::vector<double> eps(length + width);
    for (auto& e : eps) e = sampler();

    for (std::size_t t = 0; t < length; ++t) {
      const double* ep = eps.data() + t;
      double s = 0.0;
      for (std::size_t i = 0; i <= width; ++i) s += d[i] * ep[i];
      res.x[t] += comp.pi * s;
    }
    if (opts.keep_windows) res.windows.push_back(win);
    if (opts.keep_noise) res.noise.push_back(std::move(eps));
  }
  return res;
}

}  // namespace stablepath
