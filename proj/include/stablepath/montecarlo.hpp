#pragma once

// Monte Carlo counterparts of the spectral predictions: simulate a long path,
// look at the windows whose semi-norm exceeds a high quantile, and estimate
// conditional pattern probabilities or the tail-scaling plateau from them.
// Estimates condition on raw exceedance times; the size bias across the
// ladder of growing windows is exactly what the spectral masses describe.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "seminorm.hpp"
#include "spectral.hpp"
#include "stable.hpp"

namespace stablepath {

struct TailExperiment {
  const Aggregate* model = nullptr;
  SemiNorm sn{0, 1};
  std::function<bool(std::span<const double>)> A;
  std::function<bool(std::span<const double>)> B;
  double quantile = 0.999;
  long long N = 0;
  std::optional<double> absolute_x{};
};

struct ConditionalEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long long n_exceedances = 0;
};

struct ScalingPoint {
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

namespace detail {

// run declustering: one index per threshold-exceeding run (its maximum),
// runs closer than min_sep to the last kept peak are dropped
inline std::vector<long long> decluster(const std::vector<double>& norms,
                                        double thr, long long min_sep) {
  std::vector<long long> kept;
  long long t = 0;
  const long long n = static_cast<long long>(norms.size());
  while (t < n) {
    if (norms[static_cast<std::size_t>(t)] > thr) {
      long long best = t;
      while (t + 1 < n && norms[static_cast<std::size_t>(t + 1)] > thr) {
        ++t;
        if (norms[static_cast<std::size_t>(t)] >
            norms[static_cast<std::size_t>(best)])
          best = t;
      }
      if (kept.empty() || best - kept.back() >= min_sep) kept.push_back(best);
    }
    ++t;
  }
  return kept;
}

struct BlockSums {
  std::vector<double> num;
  std::vector<double> den;
};

// seeded block bootstrap of a ratio statistic: 50 blocks, 200 resamples
inline double bootstrap_ratio_error(const BlockSums& blocks, double scale,
                                    std::uint64_t seed, std::uint64_t stream) {
  const std::size_t nb = blocks.num.size();
  if (nb < 2) return 0.0;
  Rng rng(seed, stream);
  std::vector<double> est;
  est.reserve(200);
  for (int r = 0; r < 200; ++r) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t pick = static_cast<std::size_t>(rng.next_u64() % nb);
      num += blocks.num[pick];
      den += blocks.den[pick];
    }
    if (den > 0.0) est.push_back(scale * num / den);
  }
  if (est.size() < 2) return 0.0;
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= static_cast<double>(est.size());
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  return std::sqrt(var / static_cast<double>(est.size() - 1));
}

inline BlockSums block_sums(const std::vector<double>& num,
                            const std::vector<double>& den, std::size_t nblocks) {
  BlockSums out;
  const std::size_t n = num.size();
  nblocks = std::min(nblocks, std::max<std::size_t>(n, 1));
  out.num.assign(nblocks, 0.0);
  out.den.assign(nblocks, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = i * nblocks / n;
    out.num[b] += num[i];
    out.den[b] += den[i];
  }
  return out;
}

inline double sup_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace detail

// half the sup-distance from the selected atoms to the nearest other atom:
// the largest radius at which tubes around the selection stay unambiguous
inline double tube_radius_bound(const DiscreteSpectralMeasure& mes,
                                const std::vector<std::size_t>& indices) {
  if (indices.empty())
    throw InvalidParameter("tube needs at least one atom");
  std::vector<bool> selected(mes.atoms().size(), false);
  for (auto i : indices) {
    if (i >= mes.atoms().size())
      throw InvalidParameter("tube atom index out of range");
    selected[i] = true;
  }
  double closest = std::numeric_limits<double>::infinity();
  for (auto i : indices)
    for (std::size_t j = 0; j < mes.atoms().size(); ++j) {
      if (selected[j]) continue;
      closest = std::min(closest, detail::sup_dist(mes.atoms()[i].point,
                                                   mes.atoms()[j].point));
    }
  return 0.5 * closest;
}

// membership test for the union of sup-norm balls around the selected atoms,
// evaluated on scale-normalized windows
inline std::function<bool(std::span<const double>)> tube_predicate(
    const DiscreteSpectralMeasure& mes, const std::vector<std::size_t>& indices,
    double radius = 0.05) {
  if (!(radius > 0.0)) throw InvalidParameter("tube radius must be positive");
  double bound = tube_radius_bound(mes, indices);
  if (radius > bound)
    throw InvalidParameter(
        "tube radius exceeds half the separation to the nearest other atom");
  std::vector<std::vector<double>> centers;
  centers.reserve(indices.size());
  for (auto i : indices) centers.push_back(mes.atoms()[i].point);
  return [centers = std::move(centers), radius](std::span<const double> w) {
    for (const auto& c : centers)
      if (detail::sup_dist(c, w) <= radius) return true;
    return false;
  };
}

// true when the window sits outside every atom tube of the given radius
inline std::function<bool(std::span<const double>)> tube_complement(
    const DiscreteSpectralMeasure& mes, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("tube radius must be positive");
  std::vector<std::vector<double>> centers;
  centers.reserve(mes.atoms().size());
  for (const auto& a : mes.atoms()) centers.push_back(a.point);
  return [centers = std::move(centers), radius](std::span<const double> w) {
    for (const auto& c : centers)
      if (detail::sup_dist(c, w) <= radius) return false;
    return true;
  };
}

inline ConditionalEstimate empirical_conditional(const TailExperiment& exp,
                                                 std::uint64_t seed) {
  if (exp.model == nullptr)
    throw InvalidParameter("experiment needs a model");
  if (!exp.A || !exp.B)
    throw InvalidParameter("experiment needs both event predicates");
  if (exp.N < 10000)
    throw InvalidParameter("sample length must be at least 10000");
  if (!exp.absolute_x.has_value() &&
      (!(exp.quantile > 0.9) || !(exp.quantile < 1.0)))
    throw InvalidParameter("threshold quantile must lie in (0.9, 1)");

  const int n = exp.sn.dimension();
  auto path = simulate(*exp.model, exp.N, TruncationPolicy{}, seed).x;
  const std::size_t W = path.size() - static_cast<std::size_t>(n) + 1;
  std::vector<double> norms(W);
  for (std::size_t i = 0; i < W; ++i)
    norms[i] = exp.sn(std::span<const double>(path.data() + i,
                                              static_cast<std::size_t>(n)));

  // second threshold at half the exceedance probability: the ratio computed
  // there isolates the finite-level convergence error, which folds into the
  // reported standard error below
  double thr, thr_deep;
  if (exp.absolute_x.has_value()) {
    thr = *exp.absolute_x;
    thr_deep = thr * std::pow(2.0, 1.0 / exp.model->alpha());
  } else {
    std::vector<double> sorted(norms);
    std::size_t idx = std::min(
        W - 1, static_cast<std::size_t>(exp.quantile * static_cast<double>(W)));
    std::size_t idx_deep = std::min(W - 1, W - (W - idx) / 2);
    std::nth_element(sorted.begin(),
                     sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                     sorted.end());
    thr = sorted[idx];
    std::nth_element(sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                     sorted.begin() + static_cast<std::ptrdiff_t>(idx_deep),
                     sorted.end());
    thr_deep = sorted[idx_deep];
  }

  std::vector<double> inB, inAB;
  std::vector<double> window(static_cast<std::size_t>(n));
  double cB = 0.0, cAB = 0.0, cB_deep = 0.0, cAB_deep = 0.0;
  for (std::size_t i = 0; i < W; ++i) {
    if (!(norms[i] > thr)) continue;
    for (int c = 0; c < n; ++c)
      window[static_cast<std::size_t>(c)] =
          path[i + static_cast<std::size_t>(c)] / norms[i];
    bool b = exp.B(window);
    bool ab = b && exp.A(window);
    inB.push_back(b ? 1.0 : 0.0);
    inAB.push_back(ab ? 1.0 : 0.0);
    cB += b;
    cAB += ab;
    if (norms[i] > thr_deep) {
      cB_deep += b;
      cAB_deep += ab;
    }
  }

  ConditionalEstimate res;
  res.n_exceedances = static_cast<long long>(inB.size());
  if (res.n_exceedances < 200)
    throw TooFewExceedances(
        "fewer than 200 exceedances above the threshold; lower the quantile "
        "or enlarge the sample");
  if (!(cB > 0.0))
    throw ZeroConditioningMass("no exceedance satisfies the conditioning event");
  res.estimate = cAB / cB;

  // the sampling error from the block bootstrap, plus the convergence error
  // inferred from the shift between the two threshold levels: leakage around
  // the limit directions scales like thr^-alpha, so the shift is half the
  // remaining bias and vanishes as the threshold deepens
  double boot = detail::bootstrap_ratio_error(detail::block_sums(inAB, inB, 50),
                                              1.0, seed, 1);
  double drift = 0.0;
  if (cB_deep > 0.0) drift = 2.0 * (res.estimate - cAB_deep / cB_deep);
  res.std_error = std::sqrt(boot * boot + drift * drift);
  return res;
}

// tail plateau x^alpha * P(|X| > x) of a scalar stable law at empirical
// quantile thresholds
inline std::vector<ScalingPoint> empirical_scaling(
    const StableParams& params, const std::vector<double>& quantiles,
    long long N, std::uint64_t seed) {
  if (quantiles.empty()) throw InvalidParameter("need at least one quantile");
  for (double q : quantiles)
    if (!(q > 0.9) || !(q < 1.0))
      throw InvalidParameter("threshold quantile must lie in (0.9, 1)");
  if (N < 10000)
    throw InvalidParameter("sample length must be at least 10000");

  auto xs = sample_stable(params, N, seed, 0);
  std::vector<double> mags(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) mags[i] = std::abs(xs[i]);

  std::vector<ScalingPoint> out;
  out.reserve(quantiles.size());
  const std::size_t W = mags.size();
  for (std::size_t qi = 0; qi < quantiles.size(); ++qi) {
    std::vector<double> sorted(mags);
    std::size_t idx = std::min(
        W - 1,
        static_cast<std::size_t>(quantiles[qi] * static_cast<double>(W)));
    std::nth_element(sorted.begin(),
                     sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                     sorted.end());
    double thr = sorted[idx];
    const double scale = std::pow(thr, params.alpha);

    std::vector<double> hit(W), one(W, 1.0);
    double count = 0.0;
    for (std::size_t i = 0; i < W; ++i) {
      hit[i] = mags[i] > thr ? 1.0 : 0.0;
      count += hit[i];
    }
    ScalingPoint pt;
    pt.x = thr;
    pt.estimate = scale * count / static_cast<double>(W);
    pt.std_error = detail::bootstrap_ratio_error(
        detail::block_sums(hit, one, 50), scale, seed, 1000 + qi);
    out.push_back(pt);
  }
  return out;
}

// path version: plateau of x^alpha * P(sn-norm > x, window pattern in pred)
inline std::vector<ScalingPoint> empirical_scaling_at_quantiles(
    const Aggregate& agg, const SemiNorm& sn,
    const std::function<bool(std::span<const double>)>& pred,
    const std::vector<double>& quantiles, long long N, std::uint64_t seed) {
  if (!pred) throw InvalidParameter("need a pattern predicate");
  if (quantiles.empty()) throw InvalidParameter("need at least one quantile");
  for (double q : quantiles)
    if (!(q > 0.9) || !(q < 1.0))
      throw InvalidParameter("threshold quantile must lie in (0.9, 1)");
  if (N < 10000)
    throw InvalidParameter("sample length must be at least 10000");

  const int n = sn.dimension();
  auto path = simulate(agg, N, TruncationPolicy{}, seed).x;
  const std::size_t W = path.size() - static_cast<std::size_t>(n) + 1;
  std::vector<double> norms(W);
  for (std::size_t i = 0; i < W; ++i)
    norms[i] = sn(std::span<const double>(path.data() + i,
                                          static_cast<std::size_t>(n)));

  std::vector<ScalingPoint> out;
  out.reserve(quantiles.size());
  std::vector<double> window(static_cast<std::size_t>(n));
  for (std::size_t qi = 0; qi < quantiles.size(); ++qi) {
    std::vector<double> sorted(norms);
    std::size_t idx = std::min(
        W - 1,
        static_cast<std::size_t>(quantiles[qi] * static_cast<double>(W)));
    std::nth_element(sorted.begin(),
                     sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                     sorted.end());
    double thr = sorted[idx];
    const double scale = std::pow(thr, agg.alpha());

    std::vector<double> hit(W, 0.0), one(W, 1.0);
    double count = 0.0;
    for (std::size_t i = 0; i < W; ++i) {
      if (!(norms[i] > thr)) continue;
      for (int c = 0; c < n; ++c)
        window[static_cast<std::size_t>(c)] =
            path[i + static_cast<std::size_t>(c)] / norms[i];
      if (pred(window)) {
        hit[i] = 1.0;
        count += 1.0;
      }
    }
    ScalingPoint pt;
    pt.x = thr;
    pt.estimate = scale * count / static_cast<double>(W);
    pt.std_error = detail::bootstrap_ratio_error(
        detail::block_sums(hit, one, 50), scale, seed, 2000 + qi);
    out.push_back(pt);
  }
  return out;
}

}  // namespace stablepath
