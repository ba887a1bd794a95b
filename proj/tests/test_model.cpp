#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "unemp/errors.hpp"
#include "unemp/model.hpp"

using namespace unemp;

namespace {

ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> inflow(0.0, 2e5);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  std::uniform_real_distribution<double> match(0.0, 1e-4);
  ModelParams p;
  p.Lambda = inflow(rng);
  p.omega = inflow(rng);
  p.kappa = match(rng);
  p.alpha1 = rate(rng);
  p.alpha2 = rate(rng);
  p.gamma = rate(rng);
  p.delta = rate(rng);
  p.rho = rate(rng);
  return p;
}

// Independent equilibrium oracle: solve the stationarity conditions as a
// 2x2 linear system by elimination.
LaborState equilibrium_oracle(const ModelParams& p, double v) {
  Eigen::Matrix2d m;
  m << -(p.kappa * v + p.alpha1), p.gamma,
      p.kappa * v + p.rho, -(p.alpha2 + p.gamma + p.delta);
  const Eigen::Vector2d rhs(-p.Lambda, -p.omega);
  const Eigen::Vector2d sol = m.fullPivLu().solve(rhs);
  return {sol[0], sol[1]};
}

}  // namespace

TEST_CASE("rhs_new_model at the origin keeps only the constant inflows") {
  const auto p = portugal_2004_2016();
  const auto d = rhs_new_model(p, {0.0, 0.0}, 0.0);
  CHECK(d.U == doctest::Approx(90000.0));
  CHECK(d.E == doctest::Approx(90000.0));
}

TEST_CASE("rhs_new_model vanishes at the closed-form equilibrium") {
  const auto p = portugal_2004_2016();
  const double v = 14780.0;
  const auto eq = equilibrium(p, v);
  const auto d = rhs_new_model(p, eq, v);
  const double scale = p.Lambda + p.omega;
  CHECK(std::abs(d.U) <= 1e-6 * scale);
  CHECK(std::abs(d.E) <= 1e-6 * scale);
}

TEST_CASE("rhs_new_model matches term-by-term hand expansion") {
  const auto p = portugal_2004_2016();
  const LaborState s{464450.0, 6450694.0};
  const double v = 4848.0;
  const auto d = rhs_new_model(p, s, v);
  const double du =
      90000.0 - 0.000009 * 464450.0 * 4848.0 - 0.04 * 464450.0 +
      0.001 * 6450694.0;
  const double de = 90000.0 + 0.000009 * 464450.0 * 4848.0 -
                    0.05 * 6450694.0 - 0.001 * 6450694.0 -
                    0.05 * 6450694.0 + 0.7161 * 464450.0;
  CHECK(d.U == doctest::Approx(du).epsilon(1e-12));
  CHECK(d.E == doctest::Approx(de).epsilon(1e-12));
}

TEST_CASE("rhs_new_model rejects non-finite input") {
  const auto p = portugal_2004_2016();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rhs_new_model(p, {nan, 0.0}, 0.0), InvalidInput);
  CHECK_THROWS_AS(rhs_new_model(p, {0.0, 0.0}, nan), InvalidInput);
  ModelParams bad = p;
  bad.kappa = -1.0;
  CHECK_THROWS_AS(rhs_new_model(bad, {0.0, 0.0}, 0.0), InvalidInput);
}

TEST_CASE("rhs_controlled with zero controls equals rhs_new_model") {
  const auto p = portugal_2004_2016();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pop(0.0, 1e7);
  std::uniform_real_distribution<double> vac(0.0, 1e5);
  for (int i = 0; i < 100; ++i) {
    const LaborState s{pop(rng), pop(rng)};
    const double v = vac(rng);
    const auto a = rhs_new_model(p, s, v);
    const auto b = rhs_controlled(p, s, v, 0.0, 0.0);
    CHECK(a.U == b.U);  // identical expression, 0 ulp
    CHECK(a.E == b.E);
  }
}

TEST_CASE("rhs_controlled: u1 enters additively") {
  const auto p = portugal_2004_2016();
  const auto d = rhs_controlled(p, {0.0, 0.0}, 123.0, 40000.0, 0.0);
  CHECK(d.U == doctest::Approx(50000.0));
  CHECK(d.E == doctest::Approx(130000.0));
}

TEST_CASE("rhs_controlled: u2 doubles the matching term") {
  const auto p = portugal_2004_2016();
  const LaborState s{1e5, 1e6};
  const double v = 1e4;
  const auto base = rhs_controlled(p, s, v, 0.0, 0.0);
  const auto boosted = rhs_controlled(p, s, v, 0.0, 1.0);
  const double match = p.kappa * 1e5 * 1e4;
  CHECK(base.U - boosted.U == doctest::Approx(match).epsilon(1e-12));
  CHECK(boosted.E - base.E == doctest::Approx(match).epsilon(1e-12));
}

TEST_CASE("rhs_baseline at the origin keeps only Lambda") {
  const auto p = munoli_gani_2016();
  const auto d = rhs_baseline(p, {0.0, 0.0, 0.0});
  CHECK(d.U == doctest::Approx(5000.0));
  CHECK(d.E == doctest::Approx(0.0));
  CHECK(d.V == doctest::Approx(0.0));
}

TEST_CASE("rhs_baseline matches hand expansion") {
  const auto p = munoli_gani_2016();
  const auto d = rhs_baseline(p, {10000.0, 1000.0, 100.0});
  const double du = 5000.0 - 0.000009 * 10000.0 * 100.0 - 0.04 * 10000.0 +
                    0.001 * 1000.0;
  CHECK(du == doctest::Approx(4592.0).epsilon(1e-12));
  CHECK(d.U == doctest::Approx(du).epsilon(1e-12));
  CHECK(d.E == doctest::Approx(0.000009 * 10000.0 * 100.0 - 0.05 * 1000.0 -
                               0.001 * 1000.0)
                   .epsilon(1e-12));
  CHECK(d.V == doctest::Approx(0.05 * 1000.0 + 0.001 * 1000.0 -
                               0.05 * 100.0 + 0.007 * 10000.0)
                   .epsilon(1e-12));
}

TEST_CASE("vacancy function at t=0 sums the cosine amplitudes") {
  const auto f = vacancy_fit_2004_2016();
  CHECK(f(0.0) == doctest::Approx(11854.2).epsilon(1e-9));
}

TEST_CASE("vacancy function with zero amplitudes is constant") {
  const auto f = VacancyFunction::constant(321.5);
  for (double t : {-10.0, 0.0, 1.0, 75.0, 1e4}) {
    CHECK(f(t) == 321.5);
  }
}

TEST_CASE("vacancy function agrees with a per-term oracle at t=75") {
  const auto f = vacancy_fit_2004_2016();
  const double t = 75.0;
  const double x = 0.04009 * t;
  double expected = 1.478e4;
  expected += -1262.0 * std::cos(x);
  expected += -2006.0 * std::sin(x);
  expected += 328.2 * std::cos(2.0 * x);
  expected += -4700.0 * std::sin(2.0 * x);
  expected += -1992.0 * std::cos(3.0 * x);
  expected += 2.399 * std::sin(3.0 * x);
  CHECK(f(t) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("feasible_region_bound flags the Portuguese parameters") {
  const auto region = feasible_region_bound(portugal_2004_2016());
  CHECK(region.alpha_m == doctest::Approx(-0.6761).epsilon(1e-12));
  CHECK_FALSE(region.informative);
  CHECK_FALSE(region.degenerate);
}

TEST_CASE("feasible_region_bound with rho=0 gives the Theorem bound") {
  auto p = portugal_2004_2016();
  p.rho = 0.0;
  const auto region = feasible_region_bound(p);
  CHECK(region.alpha_m == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(region.informative);
  REQUIRE(region.bound.has_value());
  CHECK(*region.bound == doctest::Approx(4.5e6).epsilon(1e-12));
}

TEST_CASE("feasible_region_bound degenerates when alpha1 == rho") {
  auto p = portugal_2004_2016();
  p.rho = p.alpha1;
  const auto region = feasible_region_bound(p);
  CHECK(region.alpha_m == 0.0);
  CHECK(region.degenerate);
  CHECK_FALSE(region.bound.has_value());
}

TEST_CASE("equilibrium matches the linear-system oracle") {
  const auto p = portugal_2004_2016();
  for (double v : {0.0, 4848.0, 9625.0, 14780.0}) {
    const auto closed = equilibrium(p, v);
    const auto oracle = equilibrium_oracle(p, v);
    CHECK(closed.U == doctest::Approx(oracle.U).epsilon(1e-9));
    CHECK(closed.E == doctest::Approx(oracle.E).epsilon(1e-9));
  }
  const auto eq = equilibrium(p, 14780.0);
  CHECK(eq.U == doctest::Approx(5.52e5).epsilon(0.01));
  CHECK(eq.E == doctest::Approx(5.53e6).epsilon(0.01));
}

TEST_CASE("equilibrium decouples when gamma = rho = 0") {
  auto p = portugal_2004_2016();
  p.gamma = 0.0;
  p.rho = 0.0;
  const double v = 10000.0;
  const auto eq = equilibrium(p, v);
  CHECK(eq.U ==
        doctest::Approx(p.Lambda / (p.kappa * v + p.alpha1)).epsilon(1e-14));
}

TEST_CASE("equilibrium throws on a vanishing denominator") {
  ModelParams p;
  p.alpha1 = 0.5;
  p.rho = 0.5;
  p.gamma = 1.0;
  CHECK_THROWS_AS(equilibrium(p, 0.0), SingularEquilibrium);
}

TEST_CASE("characteristic coefficients reproduce the published affine form") {
  const auto p = portugal_2004_2016();
  const auto [a1_0, a2_0] = characteristic_coefficients(p, 0.0);
  const auto [a1_1, a2_1] = characteristic_coefficients(p, 1.0);
  CHECK(a2_0 == doctest::Approx(0.0033239).epsilon(1e-9));
  CHECK(a2_1 - a2_0 == doctest::Approx(0.00000090).epsilon(1e-9));
  CHECK(a1_0 == doctest::Approx(0.141).epsilon(1e-12));
  CHECK(a1_1 - a1_0 == doctest::Approx(0.000009).epsilon(1e-12));
}

TEST_CASE("characteristic coefficients: zero parameters, explicit value") {
  CHECK(characteristic_coefficients(ModelParams{}, 12345.0) ==
        std::pair{0.0, 0.0});
  const auto [a1c, a2c] =
      characteristic_coefficients(portugal_2004_2016(), 10000.0);
  CHECK(a1c == doctest::Approx(0.231).epsilon(1e-12));
  CHECK(a2c == doctest::Approx(0.0123239).epsilon(1e-12));
}

TEST_CASE("stability_analysis: Portuguese parameters are stable for v >= 0") {
  const auto p = portugal_2004_2016();
  for (double v : {0.0, 100.0, 4848.0, 14780.0, 1e5}) {
    const auto rep = stability_analysis(p, v);
    CHECK(rep.is_stable);
    CHECK(rep.eigenvalues[0].real() < 0.0);
    CHECK(rep.eigenvalues[1].real() < 0.0);
  }
}

TEST_CASE("stability_analysis detects the unstable saddle case") {
  ModelParams p;
  p.gamma = 1.0;
  p.rho = 1.0;
  const auto rep = stability_analysis(p, 0.0);
  CHECK(rep.a2_coeff == doctest::Approx(-1.0));
  CHECK_FALSE(rep.is_stable);
  // Variational matrix [[0,1],[1,-1]] has one positive root (lambda^2 +
  // lambda - 1 = 0).
  const double pos = (-1.0 + std::sqrt(5.0)) / 2.0;
  const double maxre =
      std::max(rep.eigenvalues[0].real(), rep.eigenvalues[1].real());
  CHECK(maxre == doctest::Approx(pos).epsilon(1e-12));
}

TEST_CASE("property: equilibrium residual over random parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> vac(0.0, 1e5);
  int tested = 0;
  while (tested < 1000) {
    const auto p = random_params(rng);
    const double v = vac(rng);
    const double ad = p.alpha2 + p.delta;
    const double denom =
        (p.alpha1 - p.rho) * p.gamma + ad * p.kappa * v + p.alpha1 * ad;
    if (std::abs(denom) <= 1e-10) continue;
    const auto eq = equilibrium(p, v);
    const auto d = rhs_new_model(p, eq, v);
    const double norm = std::hypot(d.U, d.E);
    CHECK(norm <= 1e-8 * (p.Lambda + p.omega));
    ++tested;
  }
}

TEST_CASE("property: Routh-Hurwitz verdict matches eigenvalue signs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> vac(0.0, 1e5);
  for (int i = 0; i < 2000; ++i) {
    const auto p = random_params(rng);
    const double v = vac(rng);
    const auto rep = stability_analysis(p, v);
    if (std::abs(rep.eigenvalues[0].real()) <= 1e-12 ||
        std::abs(rep.eigenvalues[1].real()) <= 1e-12) {
      continue;  // borderline
    }
    const bool eig_stable = rep.eigenvalues[0].real() < 0.0 &&
                            rep.eigenvalues[1].real() < 0.0;
    CHECK(rep.is_stable == eig_stable);
  }
}

TEST_CASE("property: dissipation inequality when alpha_m > 0") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pop(0.0, 1e7);
  std::uniform_real_distribution<double> vac(0.0, 1e5);
  int tested = 0;
  while (tested < 500) {
    auto p = random_params(rng);
    if (p.rho >= p.alpha1) p.rho = 0.5 * p.alpha1;
    const auto region = feasible_region_bound(p);
    if (region.degenerate || !region.informative) continue;
    const LaborState s{pop(rng), pop(rng)};
    const auto d = rhs_new_model(p, s, vac(rng));
    const double lhs = d.U + d.E;
    const double rhs_bound =
        p.Lambda + p.omega - region.alpha_m * (s.U + s.E);
    CHECK(lhs <= rhs_bound + 1e-6 * (std::abs(lhs) + std::abs(rhs_bound)));
    ++tested;
  }
}

TEST_CASE("property: mass-balance identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pop(0.0, 1e7);
  std::uniform_real_distribution<double> vac(0.0, 1e5);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_params(rng);
    const LaborState s{pop(rng), pop(rng)};
    const auto d = rhs_new_model(p, s, vac(rng));
    const double expected = p.Lambda + p.omega - p.alpha1 * s.U +
                            p.rho * s.U - p.alpha2 * s.E - p.delta * s.E;
    CHECK(d.U + d.E ==
          doctest::Approx(expected).epsilon(1e-9).scale(p.Lambda + p.omega +
                                                        s.U + s.E));
  }
}
