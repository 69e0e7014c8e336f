#include <catch2/catch_amalgamated.hpp>

#include "stablepath/spectral.hpp"
#include "stablepath/model.hpp"
#include "stablepath/seminorm.hpp"
#include "stablepath/stable.hpp"
#include "stablepath/errors.hpp"
#include "stablepath/rng.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using namespace stablepath;

namespace {

const Atom* find_atom(const DiscreteSpectralMeasure& mu,
                      const std::vector<double>& point, double tol = 1e-9) {
  for (const auto& a : mu.atoms()) {
    double d = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i)
      d = std::max(d, std::abs(a.point[i] - point[i]));
    if (d < tol) return &a;
  }
  return nullptr;
}

// minus log characteristic function of a discrete spectral pair, computed
// directly from the defining integral (independent of library internals)
std::complex<double> exponent_of(const DiscreteSpectralMeasure& mu,
                                 const std::vector<double>& u) {
  double alpha = mu.alpha();
  std::complex<double> acc(0.0, 0.0);
  for (const auto& a : mu.atoms()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * a.point[i];
    if (dot == 0.0) continue;
    double mag = std::pow(std::abs(dot), alpha);
    double w = (alpha == 1.0) ? -(2.0 / kPi) * std::log(std::abs(dot))
                              : std::tan(kPi * alpha / 2.0);
    double sgn = dot > 0.0 ? 1.0 : -1.0;
    acc += a.weight * mag * std::complex<double>(1.0, -sgn * w);
  }
  if (mu.shift()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * (*mu.shift())[i];
    acc -= std::complex<double>(0.0, dot);
  }
  return acc;
}

Aggregate one_ar1(double alpha, double rho, double beta, double pi = 1.0) {
  return Aggregate(alpha, {Component{pi, CoefficientSequence::ar1(rho), beta}});
}

}  // namespace

TEST_CASE("measure construction validates support, weights and dedup") {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{{1.0, 0.0}, 0.5, 1, 0, 0});
  atoms.push_back(Atom{{-1.0, 0.0}, 0.5, -1, 0, 0});
  DiscreteSpectralMeasure mu(2, SupportKind::EuclideanSphere, std::nullopt, 1.5,
                             atoms);
  CHECK(mu.total_mass() == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(mu.symmetric());

  std::vector<Atom> off{Atom{{0.5, 0.0}, 1.0, 1, 0, 0}};
  CHECK_THROWS_AS(DiscreteSpectralMeasure(2, SupportKind::EuclideanSphere,
                                          std::nullopt, 1.5, off),
                  InvalidParameter);
  std::vector<Atom> badw{Atom{{1.0, 0.0}, 0.0, 1, 0, 0}};
  CHECK_THROWS_AS(DiscreteSpectralMeasure(2, SupportKind::EuclideanSphere,
                                          std::nullopt, 1.5, badw),
                  InvalidParameter);

  // points within 1e-12 merge and add their weights
  std::vector<Atom> close;
  close.push_back(Atom{{1.0, 0.0}, 0.25, 1, 1, 0});
  close.push_back(Atom{{1.0, 1e-13}, 0.75, 1, 1, 1});
  DiscreteSpectralMeasure merged(2, SupportKind::EuclideanSphere, std::nullopt,
                                 1.5, close);
  REQUIRE(merged.atoms().size() == 1);
  CHECK(merged.atoms()[0].weight == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(merged.atoms()[0].k == 0);  // first label wins
  CHECK_FALSE(merged.symmetric());

  std::vector<Atom> apart;
  apart.push_back(Atom{{1.0, 0.0}, 0.25, 1, 1, 0});
  double nn = std::sqrt(1.0 + 1e-12);
  apart.push_back(Atom{{1.0 / nn, 1e-6 / nn}, 0.75, 1, 1, 1});
  DiscreteSpectralMeasure two(2, SupportKind::EuclideanSphere, std::nullopt, 1.5,
                              apart);
  CHECK(two.atoms().size() == 2);
}

TEST_CASE("sphere measure of a single symmetric autoregression") {
  auto agg = one_ar1(1.5, 0.5, 0.0);
  auto mu = euclidean_spectral_measure(agg, 0, 1, TruncationPolicy{1e-12, {}});
  CHECK(mu.dimension() == 2);
  CHECK(mu.symmetric());
  CHECK_FALSE(mu.shift().has_value());
  REQUIRE(mu.atoms().size() == 4);

  const double q = std::pow(2.0, -1.5);
  const double fam = 0.5 * std::pow(1.25, 0.75) / (1.0 - q);
  auto* spike = find_atom(mu, {1.0, 0.0});
  REQUIRE(spike != nullptr);
  CHECK(spike->weight == Catch::Approx(0.5).epsilon(1e-10));
  CHECK(spike->j == 0);
  CHECK(spike->theta == 1);
  auto* nspike = find_atom(mu, {-1.0, 0.0});
  REQUIRE(nspike != nullptr);
  CHECK(nspike->theta == -1);

  double c = std::sqrt(1.25);
  auto* grow = find_atom(mu, {0.5 / c, 1.0 / c});
  REQUIRE(grow != nullptr);
  CHECK(grow->weight == Catch::Approx(fam).epsilon(1e-10));
  CHECK(grow->j == 1);
  CHECK(grow->k == 1);
  auto* ngrow = find_atom(mu, {-0.5 / c, -1.0 / c});
  REQUIRE(ngrow != nullptr);
  CHECK(ngrow->weight == Catch::Approx(fam).epsilon(1e-10));

  double total = 1.0 + std::pow(1.25, 0.75) / (1.0 - q);
  CHECK(mu.total_mass() == Catch::Approx(total).epsilon(1e-10));
}

TEST_CASE("total sphere mass equals the direct window sum") {
  Aggregate agg(1.2, {Component{1.0, CoefficientSequence::ar1(0.5), 0.3},
                      Component{0.5, CoefficientSequence::ar1(-0.6), -0.8}});
  int m = 1, h = 2;
  auto mu = euclidean_spectral_measure(agg, m, h, TruncationPolicy{1e-12, {}});

  double expect = 0.0;
  for (int j = 1; j <= 2; ++j) {
    double pi_a = std::pow(agg.components()[j - 1].pi, 1.2);
    for (long long k = -m; k <= 400; ++k) {
      auto w = path_kernel(agg, j, k, m, h);
      double n2 = 0.0;
      for (double v : w.vector) n2 += v * v;
      expect += pi_a * std::pow(n2, 1.2 / 2.0);
    }
  }
  CHECK(mu.total_mass() == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("alternating-sign families split their mass across both poles") {
  const double alpha = 1.3, rho = -0.6, beta = 0.5;
  auto agg = one_ar1(alpha, rho, beta);
  auto mu = euclidean_spectral_measure(agg, 0, 1, TruncationPolicy{1e-13, {}});
  REQUIRE(mu.atoms().size() == 4);

  const double r = std::pow(0.6, alpha);
  const double norm_a = std::pow(1.36, alpha / 2.0);
  const double wp = (1.0 + beta) / 2.0, wm = (1.0 - beta) / 2.0;
  double c = std::sqrt(1.36);
  // +u collects the theta=+1 mass of odd lags and the theta=-1 mass of even lags
  auto* up = find_atom(mu, {-0.6 / c, 1.0 / c});
  REQUIRE(up != nullptr);
  CHECK(up->weight ==
        Catch::Approx(norm_a * (wp + wm * r) / (1.0 - r * r)).epsilon(1e-10));
  auto* un = find_atom(mu, {0.6 / c, -1.0 / c});
  REQUIRE(un != nullptr);
  CHECK(un->weight ==
        Catch::Approx(norm_a * (wm + wp * r) / (1.0 - r * r)).epsilon(1e-10));

  auto* spike = find_atom(mu, {1.0, 0.0});
  REQUIRE(spike != nullptr);
  CHECK(spike->weight == Catch::Approx(wp).epsilon(1e-10));
}

TEST_CASE("unit-index shift vector accumulates the coefficient logs") {
  const double rho = 0.5, beta = 0.7, pi = 2.0;
  auto agg = one_ar1(1.0, rho, beta, pi);
  auto mu = euclidean_spectral_measure(agg, 0, 1, TruncationPolicy{1e-13, {}});
  REQUIRE(mu.shift().has_value());
  std::vector<double> expect(2, 0.0);
  for (long long k = 0; k <= 150; ++k) {
    std::vector<double> w{std::pow(rho, k),
                          k >= 1 ? std::pow(rho, k - 1) : 0.0};
    double ne = std::sqrt(w[0] * w[0] + w[1] * w[1]);
    double lg = std::log(pi * ne);
    for (int i = 0; i < 2; ++i)
      expect[i] -= (2.0 / kPi) * pi * beta * w[i] * lg;
  }
  CHECK((*mu.shift())[0] == Catch::Approx(expect[0]).margin(1e-10));
  CHECK((*mu.shift())[1] == Catch::Approx(expect[1]).margin(1e-10));

  // no shift for symmetric components, even at unit index
  auto sym = one_ar1(1.0, 0.5, 0.0);
  auto mu2 = euclidean_spectral_measure(sym, 0, 1, TruncationPolicy{});
  CHECK_FALSE(mu2.shift().has_value());
}

TEST_CASE("cylinder transform rescales atoms by their seminorm") {
  double ne = std::sqrt(125.0);
  std::vector<Atom> atoms{Atom{{3.0 / ne, 4.0 / ne, 10.0 / ne}, 1.0, 1, 1, 0}};
  for (double alpha : {0.8, 1.5}) {
    DiscreteSpectralMeasure sphere(3, SupportKind::EuclideanSphere, std::nullopt,
                                   alpha, atoms);
    SemiNorm sn(1, 1, 2.0);
    auto cyl = to_cylinder(sphere, sn);
    REQUIRE(cyl.atoms().size() == 1);
    const auto& a = cyl.atoms()[0];
    CHECK(a.point[0] == Catch::Approx(0.6).epsilon(1e-12));
    CHECK(a.point[1] == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(a.point[2] == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(a.weight == Catch::Approx(std::pow(5.0 / ne, alpha)).epsilon(1e-12));
    CHECK(cyl.support() == SupportKind::Cylinder);
  }
}

TEST_CASE("pure-future atoms block the cylinder transform") {
  std::vector<Atom> atoms{Atom{{0.0, 0.0, 1.0}, 1.0, 1, 1, 0}};
  DiscreteSpectralMeasure sphere(3, SupportKind::EuclideanSphere, std::nullopt,
                                 1.5, atoms);
  CHECK_THROWS_AS(to_cylinder(sphere, SemiNorm(1, 1, 2.0)), NotRepresentable);

  // same failure reached from a model whose forward support ends
  Aggregate ex(1.5,
               {Component{1.0, CoefficientSequence::explicit_seq({{0, 1.0}}), 0.0}});
  auto mu = euclidean_spectral_measure(ex, 0, 1, TruncationPolicy{});
  CHECK_THROWS_AS(to_cylinder(mu, SemiNorm(0, 1, 2.0)), NotRepresentable);
}

TEST_CASE("cylinder mass equals the seminorm-weighted sphere mass") {
  Aggregate agg(0.8, {Component{1.0, CoefficientSequence::ar1(0.7), 0.2},
                      Component{1.3, CoefficientSequence::ar1(0.4), -0.5}});
  SemiNorm sn(1, 2, 2.0);
  auto sphere = euclidean_spectral_measure(agg, 1, 2, TruncationPolicy{});
  auto cyl = to_cylinder(sphere, sn);
  double expect = 0.0;
  for (const auto& a : sphere.atoms())
    expect += a.weight * std::pow(sn(a.point), 0.8);
  CHECK(cyl.total_mass() == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("round trip through the cylinder recovers the sphere measure") {
  Aggregate agg(1.0, {Component{1.0, CoefficientSequence::ar1(0.5), 0.6},
                      Component{0.7, CoefficientSequence::ar1(0.3), -1.0}});
  SemiNorm sn(1, 1, 2.0);
  auto sphere = euclidean_spectral_measure(agg, 1, 1, TruncationPolicy{});
  auto cyl = to_cylinder(sphere, sn);
  auto back = to_euclidean_sphere(cyl);

  REQUIRE(back.atoms().size() == sphere.atoms().size());
  for (const auto& a : sphere.atoms()) {
    auto* b = find_atom(back, a.point, 1e-12);
    REQUIRE(b != nullptr);
    CHECK(b->weight == Catch::Approx(a.weight).epsilon(1e-12));
  }
  REQUIRE(sphere.shift().has_value());
  REQUIRE(back.shift().has_value());
  for (int i = 0; i < sphere.dimension(); ++i)
    CHECK((*back.shift())[i] == Catch::Approx((*sphere.shift())[i]).margin(1e-12));
}

TEST_CASE("sphere and cylinder exponents define the same law") {
  struct Case {
    Aggregate agg;
    int m, h;
    double p;
  };
  std::vector<Case> cases;
  cases.push_back({one_ar1(1.5, 0.5, 0.0), 1, 2, 2.0});
  cases.push_back({one_ar1(0.8, 0.7, 0.5), 0, 1, 1.0});
  cases.push_back({one_ar1(1.0, 0.5, 1.0), 1, 1,
                   std::numeric_limits<double>::infinity()});
  cases.push_back({Aggregate(1.0, {Component{1.0, CoefficientSequence::ar1(0.5), 0.3},
                                   Component{0.5, CoefficientSequence::ar1(-0.6), -0.7}}),
                   2, 2, 2.0});
  cases.push_back(
      {Aggregate(1.5, {Component{1.0,
                                 CoefficientSequence::arma({1.0, -0.5}, {1.0, -0.3},
                                                           {1.0}, {1.0}),
                                 0.4}}),
       1, 1, 2.0});

  Rng rng(99);
  for (auto& cse : cases) {
    SemiNorm sn(cse.m, cse.h, cse.p);
    auto sphere =
        euclidean_spectral_measure(cse.agg, cse.m, cse.h, TruncationPolicy{1e-13, {}});
    auto cyl = to_cylinder(sphere, sn);
    int n = sn.dimension();
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> u(n);
      for (int i = 0; i < n; ++i) u[i] = 4.0 * rng.uniform() - 2.0;
      auto es = exponent_of(sphere, u);
      auto ec = exponent_of(cyl, u);
      double scale = std::abs(es) + std::abs(ec) + 1.0;
      CHECK(std::abs(es - ec) < 1e-10 * scale);
    }
  }
}

TEST_CASE("gap diagnostics for the analytic kinds") {
  CHECK(compute_m0(CoefficientSequence::ar1(0.5)) == M0Result{true, 0});
  CHECK(compute_m0(CoefficientSequence::ar1(-0.9)) == M0Result{true, 0});
  CHECK(compute_m0(CoefficientSequence::ar2(0.5, 0.7)) == M0Result{true, 0});
  CHECK(compute_m0(CoefficientSequence::frac_int(0.2)) == M0Result{true, 0});
  CHECK(compute_m0(CoefficientSequence::strophoid(100.0, 5.0, 3)) ==
        M0Result{true, 0});

  auto causal = CoefficientSequence::arma({1.0}, {1.0, -0.5}, {1.0}, {1.0});
  CHECK_FALSE(compute_m0(causal).finite);

  auto anti = CoefficientSequence::arma({1.0, -0.5}, {1.0, -0.3}, {1.0}, {1.0});
  auto r = compute_m0(anti);
  CHECK(r.finite);
  CHECK(r.value == 0);
}

TEST_CASE("finite forward support always defeats the gap criterion") {
  // every m admits a window of zeros sitting above the top nonzero entry
  CHECK_FALSE(compute_m0(CoefficientSequence::explicit_seq({{0, 1.0}, {-2, 1.0}}))
                  .finite);
  CHECK_FALSE(compute_m0(CoefficientSequence::explicit_seq({{0, 1.0}, {-1, 0.5}}))
                  .finite);
  CHECK_FALSE(compute_m0(CoefficientSequence::explicit_seq({{2, 1.0}, {0, 1.0}}))
                  .finite);
}

TEST_CASE("representability of mixtures") {
  Aggregate good(1.5, {Component{1.0, CoefficientSequence::ar1(0.5), 0.0},
                       Component{2.0, CoefficientSequence::ar1(0.9), 0.5}});
  for (int m : {0, 1, 3})
    CHECK(is_past_representable(good, m, 1).yes);

  Aggregate bad(1.5, {Component{1.0, CoefficientSequence::ar1(0.5), 0.0},
                      Component{1.0,
                                CoefficientSequence::arma({1.0}, {1.0, -0.5},
                                                          {1.0}, {1.0}),
                                0.0}});
  auto verdict = is_past_representable(bad, 5, 1);
  CHECK_FALSE(verdict.yes);
  CHECK_FALSE(verdict.reason.empty());

  Aggregate expl(1.5, {Component{1.0,
                                 CoefficientSequence::explicit_seq({{0, 1.0},
                                                                    {-2, 1.0}}),
                                 0.0}});
  CHECK_FALSE(is_past_representable(expl, 4, 1).yes);

  // skewed unit-index mixtures of geometric kinds stay representable
  Aggregate skew1(1.0, {Component{1.0, CoefficientSequence::ar1(0.5), 0.7}});
  CHECK(is_past_representable(skew1, 0, 1).yes);

  CHECK_THROWS_AS(is_past_representable(good, -1, 1), InvalidParameter);
  CHECK_THROWS_AS(is_past_representable(good, 0, 0), InvalidParameter);
}

TEST_CASE("random moving-average models agree on all three diagnostics") {
  Rng rng(515);
  auto draw_poly = [&](int deg) {
    std::vector<std::complex<double>> roots;
    while (static_cast<int>(roots.size()) < deg) {
      double r = 1.2 + 1.5 * rng.uniform();
      if ((deg - static_cast<int>(roots.size())) >= 2 && rng.uniform() < 0.35) {
        double ang = (0.1 + 0.8 * rng.uniform()) * kPi;
        roots.emplace_back(r * std::cos(ang), r * std::sin(ang));
        roots.push_back(std::conj(roots.back()));
      } else {
        roots.emplace_back(rng.uniform() < 0.5 ? r : -r, 0.0);
      }
    }
    std::vector<std::complex<double>> c{1.0};
    for (auto rt : roots) {
      c.push_back(0.0);
      for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= c[i - 1] / rt;
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
  };

  int checked = 0;
  while (checked < 100) {
    int p = static_cast<int>(rng.next_u64() % 3);       // deg(psi) in {0,1,2}
    int q = static_cast<int>(rng.next_u64() % 3);
    int rdeg = static_cast<int>(rng.next_u64() % 2);
    int sdeg = static_cast<int>(rng.next_u64() % 2);
    CoefficientSequence seq = [&]() {
      try {
        return CoefficientSequence::arma(draw_poly(p), draw_poly(q),
                                         draw_poly(rdeg), draw_poly(sdeg));
      } catch (const InvalidParameter&) {
        return CoefficientSequence::arma({1.0, -0.4}, {1.0}, {1.0}, {1.0});
      }
    }();
    bool anticipative = seq.arma_polys().psi.size() >= 2;
    auto m0 = compute_m0(seq);
    CHECK(m0.finite == anticipative);

    Aggregate agg(1.5, {Component{1.0, seq, 0.0}});
    bool somewhere = false;
    for (int m = 0; m <= (m0.finite ? static_cast<int>(m0.value) : 3) && !somewhere;
         ++m)
      somewhere = is_past_representable(agg, m, 1).yes;
    CHECK(somewhere == anticipative);
    if (m0.finite) {
      CHECK(is_past_representable(agg, static_cast<int>(m0.value), 1).yes);
      if (m0.value >= 1)
        CHECK_FALSE(
            is_past_representable(agg, static_cast<int>(m0.value) - 1, 1).yes);
    }
    ++checked;
  }
}

TEST_CASE("representability is monotone in the observation depth") {
  std::vector<Aggregate> models;
  models.push_back(one_ar1(1.5, 0.5, 0.0));
  models.push_back(Aggregate(
      1.0, {Component{1.0,
                      CoefficientSequence::arma({1.0, -0.6, 0.08}, {1.0, -0.2},
                                                {1.0}, {1.0}),
                      0.5}}));
  for (const auto& agg : models) {
    bool seen = false;
    for (int m = 0; m <= 4; ++m) {
      bool ok = is_past_representable(agg, m, 1).yes;
      if (seen) CHECK(ok);
      seen = seen || ok;
    }
  }
}

TEST_CASE("measure truncation respects the tolerance and the term cap") {
  auto agg = one_ar1(1.5, 0.5, 0.0);
  auto tight = euclidean_spectral_measure(agg, 0, 1, TruncationPolicy{1e-12, {}});
  auto loose = euclidean_spectral_measure(agg, 0, 1, TruncationPolicy{1e-4, {}});
  double full = 1.0 + std::pow(1.25, 0.75) / (1.0 - std::pow(2.0, -1.5));
  CHECK(std::abs(tight.total_mass() - full) < 1e-10);
  CHECK(std::abs(loose.total_mass() - full) < 1e-3);
  CHECK(loose.total_mass() <= full + 1e-12);

  Aggregate frac(1.5, {Component{1.0, CoefficientSequence::frac_int(0.2), 0.0}});
  auto capped =
      euclidean_spectral_measure(frac, 1, 1, TruncationPolicy{1e-10, 300});
  CHECK(capped.atoms().size() <= 2 * 302);
  CHECK(capped.total_mass() > 0.0);
}
