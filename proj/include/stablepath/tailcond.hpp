#pragma once

// Conditional distribution of the coming path given that an extreme pattern
// was just observed. In the heavy-tailed limit a single noise spike dominates
// the window, so conditioning reduces to mass ratios between spectral atoms
// whose observed parts reproduce the seen pattern.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "seminorm.hpp"
#include "spectral.hpp"

namespace stablepath {

template <class PredA, class PredB>
double conditional_ratio(const DiscreteSpectralMeasure& mes, PredA&& a, PredB&& b) {
  double num = 0.0, den = 0.0;
  for (const auto& atom : mes.atoms()) {
    if (b(atom)) {
      den += atom.weight;
      if (a(atom)) num += atom.weight;
    }
  }
  if (!(den > 0.0))
    throw ZeroConditioningMass("conditioning event carries no spectral mass");
  return num / den;
}

struct MatchClass {
  std::vector<std::size_t> atom_indices;
};

namespace detail {

// Truncating a kernel whose window directions converge (all roads lead to the
// dominant root) leaves finite clusters of atoms that only differ below any
// meaningful resolution. Two scales keep those clusters from masquerading as
// genuinely distinct patterns or futures: observed blocks closer than
// kObservedResolution belong to one pattern class, full cylinder points closer
// than kOutcomeResolution describe one future. Truncation clusters sit well
// below both scales; honestly distinct structures sit well above.
inline constexpr double kObservedResolution = 1e-6;
inline constexpr double kOutcomeResolution = 1e-4;

// single-link clustering over the given indices; cluster order follows the
// first-seen member, members stay sorted
template <class Dist>
std::vector<std::vector<std::size_t>> single_link(
    const std::vector<std::size_t>& idx, Dist&& dist, double eps) {
  std::vector<std::vector<std::size_t>> clusters;
  for (auto i : idx) {
    std::vector<std::size_t> hit;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (auto m : clusters[c]) {
        if (dist(i, m) <= eps) {
          hit.push_back(c);
          break;
        }
      }
    }
    if (hit.empty()) {
      clusters.push_back({i});
      continue;
    }
    clusters[hit.front()].push_back(i);
    for (std::size_t t = hit.size(); t-- > 1;) {
      auto& dst = clusters[hit.front()];
      auto& src = clusters[hit[t]];
      dst.insert(dst.end(), src.begin(), src.end());
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(hit[t]));
    }
    std::sort(clusters[hit.front()].begin(), clusters[hit.front()].end());
  }
  return clusters;
}

}  // namespace detail

// Groups the cylinder atoms whose observed block reproduces obs (after scale
// normalization) into classes of identical observed shape. Distinct classes
// mean the data cannot tell the corresponding futures apart at this
// tolerance; callers get all of them, never a silently chosen winner.
inline std::vector<MatchClass> match_pattern(std::span<const double> obs,
                                             const DiscreteSpectralMeasure& cyl,
                                             const SemiNorm& sn, double tol) {
  if (cyl.support() != SupportKind::Cylinder)
    throw InvalidParameter("pattern matching needs a cylinder measure");
  if (sn.dimension() != cyl.dimension())
    throw DimensionMismatch("semi-norm dimension does not match the measure");
  if (static_cast<int>(obs.size()) != sn.m() + 1)
    throw DimensionMismatch("observed block has length " +
                            std::to_string(obs.size()) + ", expected " +
                            std::to_string(sn.m() + 1));
  if (!(tol > 0.0)) throw InvalidParameter("match tolerance must be positive");

  std::vector<double> padded(obs.begin(), obs.end());
  padded.resize(static_cast<std::size_t>(sn.dimension()), 0.0);
  const double r = sn(padded);
  if (r == 0.0)
    throw KernelVector("observed block is zero, the pattern has no scale");
  std::vector<double> nobs(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) nobs[i] = obs[i] / r;

  auto block_dist = [&](const std::vector<double>& pa, const std::vector<double>& pb) {
    double d = 0.0;
    for (std::size_t i = 0; i < nobs.size(); ++i)
      d = std::max(d, std::abs(pa[i] - pb[i]));
    return d;
  };
  auto obs_dist = [&](const std::vector<double>& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < nobs.size(); ++i)
      d = std::max(d, std::abs(p[i] - nobs[i]));
    return d;
  };

  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < cyl.atoms().size(); ++i)
    if (obs_dist(cyl.atoms()[i].point) <= tol) matched.push_back(i);
  if (matched.empty())
    throw NoMatch("no spectral atom matches the observed pattern within tolerance");

  auto obs_pair_dist = [&](std::size_t a, std::size_t b) {
    return block_dist(cyl.atoms()[a].point, cyl.atoms()[b].point);
  };
  auto grouped =
      detail::single_link(matched, obs_pair_dist, detail::kObservedResolution);
  std::vector<MatchClass> classes;
  classes.reserve(grouped.size());
  for (auto& g : grouped) classes.push_back(MatchClass{std::move(g)});
  return classes;
}

struct PatternEntry {
  Atom atom;
  double probability = 0.0;
};

struct PatternDistribution {
  std::vector<PatternEntry> entries;
  std::string conditioning;
};

namespace detail {

inline std::string describe_class(std::span<const double> block, std::size_t count,
                                  double mass) {
  std::ostringstream os;
  os << "observed block shaped like (";
  for (std::size_t i = 0; i < block.size(); ++i)
    os << (i ? ", " : "") << block[i];
  os << "), carried by " << count << " spectral atom"
     << (count == 1 ? "" : "s") << " of conditional mass " << mass;
  return os.str();
}

}  // namespace detail

// Distribution of the dominant-spike identity (and with it the whole coming
// window) given the observed block, one distribution per indistinguishable
// observed shape.
inline std::vector<PatternDistribution> predict(const Aggregate& agg,
                                                const SemiNorm& sn,
                                                std::span<const double> obs,
                                                double tol = 1e-6,
                                                const TruncationPolicy& trunc = {}) {
  Representability rep = is_past_representable(agg, sn.m(), sn.h());
  if (!rep.yes) throw NotRepresentable(rep.reason);
  auto cyl = to_cylinder(euclidean_spectral_measure(agg, sn.m(), sn.h(), trunc), sn);
  auto classes = match_pattern(obs, cyl, sn, tol);

  auto full_dist = [&](std::size_t a, std::size_t b) {
    const auto& pa = cyl.atoms()[a].point;
    const auto& pb = cyl.atoms()[b].point;
    double d = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i)
      d = std::max(d, std::abs(pa[i] - pb[i]));
    return d;
  };

  std::vector<PatternDistribution> out;
  out.reserve(classes.size());
  for (const auto& cls : classes) {
    double total = 0.0;
    for (auto i : cls.atom_indices) total += cyl.atoms()[i].weight;
    auto outcomes = detail::single_link(cls.atom_indices, full_dist,
                                        detail::kOutcomeResolution);
    PatternDistribution dist;
    dist.entries.reserve(outcomes.size());
    for (const auto& oc : outcomes) {
      double wsum = 0.0;
      std::size_t rep = oc.front();
      for (auto i : oc) {
        wsum += cyl.atoms()[i].weight;
        if (cyl.atoms()[i].weight > cyl.atoms()[rep].weight) rep = i;
      }
      PatternEntry e{cyl.atoms()[rep], wsum / total};
      e.atom.weight = wsum;
      dist.entries.push_back(std::move(e));
    }
    const auto& rep_point = cyl.atoms()[cls.atom_indices.front()].point;
    dist.conditioning = detail::describe_class(
        std::span<const double>(rep_point.data(), obs.size()),
        cls.atom_indices.size(), total);
    out.push_back(std::move(dist));
  }
  return out;
}

struct CaseIndex {
  int theta0 = 1;
  int j0 = 1;
  long long k0 = 0;
};

// Closed-form prediction for mixtures of one-sided geometric kernels with
// pairwise distinct rates. The observed pattern is the one produced by
// component j0's spike at offset k0, flipped by theta0.
inline PatternDistribution aggar1_closed_form(const std::vector<double>& rhos,
                                              const std::vector<double>& pis,
                                              const std::vector<double>& betas,
                                              double alpha, int m, int h,
                                              CaseIndex idx) {
  const std::size_t J = rhos.size();
  if (J == 0 || pis.size() != J || betas.size() != J)
    throw InvalidParameter("parameter lists must share one nonzero length");
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw InvalidParameter("alpha must lie in (0,2)");
  if (m < 0 || h < 1) throw InvalidParameter("closed form needs m >= 0, h >= 1");
  for (std::size_t j = 0; j < J; ++j) {
    if (!(rhos[j] > 0.0) || !(rhos[j] < 1.0))
      throw InvalidParameter("closed form needs rates strictly inside (0,1)");
    if (!(pis[j] > 0.0)) throw InvalidParameter("weights pi must be positive");
    if (!(betas[j] >= -1.0 && betas[j] <= 1.0))
      throw InvalidParameter("skewness beta must lie in [-1,1]");
    for (std::size_t l = j + 1; l < J; ++l)
      if (std::abs(rhos[j] - rhos[l]) < 1e-12)
        throw InvalidParameter("closed form needs pairwise distinct rates");
  }
  if (idx.theta0 != 1 && idx.theta0 != -1)
    throw InvalidParameter("theta0 must be +1 or -1");
  if (idx.j0 < 1 || idx.j0 > static_cast<int>(J))
    throw InvalidParameter("component index out of range");
  if (idx.k0 < -static_cast<long long>(m) || idx.k0 > static_cast<long long>(h))
    throw InvalidParameter("case index k0 must lie in [-m, h]");

  const int n = m + h + 1;
  auto branch_atom = [&](int j1, long long k, double weight) {
    const double rho = rhos[static_cast<std::size_t>(j1 - 1)];
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      long long e = k + m - i;
      if (e >= 0) v[static_cast<std::size_t>(i)] = std::pow(rho, static_cast<double>(e));
    }
    double s = 0.0;
    for (int i = 0; i <= m; ++i)
      s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    s = std::sqrt(s);
    Atom a;
    a.point.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      a.point[static_cast<std::size_t>(i)] = idx.theta0 * v[static_cast<std::size_t>(i)] / s;
    a.weight = weight;
    a.theta = idx.theta0;
    a.j = j1;
    a.k = k;
    return a;
  };
  auto spike_atom = [&](double weight) {
    Atom a;
    a.point.assign(static_cast<std::size_t>(n), 0.0);
    a.point[0] = idx.theta0;
    a.weight = weight;
    a.theta = idx.theta0;
    a.j = 0;
    a.k = -m;
    return a;
  };

  PatternDistribution dist;
  if (m >= 1 && idx.k0 <= -1) {
    // the collapse is visible inside the observed block: future is pinned
    const double pa = std::pow(pis[static_cast<std::size_t>(idx.j0 - 1)], alpha);
    const double w0 =
        0.5 * (1.0 + idx.theta0 * betas[static_cast<std::size_t>(idx.j0 - 1)]);
    Atom a = idx.k0 == -m ? spike_atom(pa * w0)
                          : branch_atom(idx.j0, idx.k0, pa * w0);
    dist.entries.push_back(PatternEntry{std::move(a), 1.0});
    dist.conditioning =
        "collapsed pattern, peak already " + std::to_string(-idx.k0) +
        " steps in the past";
  } else if (m >= 1) {
    // growing branch of one identified component: geometric peak-time law
    const double pa = std::pow(pis[static_cast<std::size_t>(idx.j0 - 1)], alpha);
    const double w0 =
        0.5 * (1.0 + idx.theta0 * betas[static_cast<std::size_t>(idx.j0 - 1)]);
    const double q = std::pow(rhos[static_cast<std::size_t>(idx.j0 - 1)], alpha);
    for (long long k = 0; k <= h; ++k) {
      double p = k < h ? std::pow(q, static_cast<double>(k)) * (1.0 - q)
                       : std::pow(q, static_cast<double>(h));
      double w = k < h ? pa * w0 * std::pow(q, static_cast<double>(k))
                       : pa * w0 * std::pow(q, static_cast<double>(h)) / (1.0 - q);
      dist.entries.push_back(PatternEntry{branch_atom(idx.j0, k, w), p});
    }
    dist.conditioning = "growing branch of component " + std::to_string(idx.j0);
  } else {
    // memoryless observation: all components and peak times compete
    std::vector<double> pa(J), w0(J), q(J);
    double sum_w = 0.0, sum_p = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      pa[j] = std::pow(pis[j], alpha);
      w0[j] = 0.5 * (1.0 + idx.theta0 * betas[j]);
      q[j] = std::pow(rhos[j], alpha);
      sum_w += pa[j] * w0[j];
      sum_p += pa[j] * w0[j] / (1.0 - q[j]);
    }
    if (!(sum_p > 0.0))
      throw ZeroConditioningMass("observed sign carries no spectral mass");
    if (sum_w > 0.0)
      dist.entries.push_back(PatternEntry{spike_atom(sum_w), sum_w / sum_p});
    for (long long k = 1; k <= h; ++k) {
      for (std::size_t j = 0; j < J; ++j) {
        double w = k < h
                       ? pa[j] * w0[j] * std::pow(q[j], static_cast<double>(k))
                       : pa[j] * w0[j] * std::pow(q[j], static_cast<double>(h)) /
                             (1.0 - q[j]);
        if (w > 0.0)
          dist.entries.push_back(PatternEntry{
              branch_atom(static_cast<int>(j + 1), k, w), w / sum_p});
      }
    }
    dist.conditioning = "single observed value, sign " +
                        std::string(idx.theta0 > 0 ? "+" : "-");
  }
  return dist;
}

}  // namespace stablepath
