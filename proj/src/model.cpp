#include "unemp/model.hpp"

#include <cmath>

#include "unemp/errors.hpp"

namespace unemp {

namespace {

bool finite(double x) { return std::isfinite(x); }

void require_finite(double x, const char* name) {
  if (!finite(x)) {
    throw InvalidInput(std::string("non-finite value for ") + name);
  }
}

}  // namespace

void ModelParams::validate() const {
  require_finite(Lambda, "Lambda");
  require_finite(kappa, "kappa");
  require_finite(alpha1, "alpha1");
  require_finite(alpha2, "alpha2");
  require_finite(gamma, "gamma");
  require_finite(omega, "omega");
  require_finite(delta, "delta");
  require_finite(rho, "rho");
  if (Lambda < 0 || omega < 0 || kappa < 0 || alpha1 < 0 || alpha2 < 0 ||
      gamma < 0 || delta < 0 || rho < 0) {
    throw InvalidInput("model parameters must be non-negative");
  }
}

void BaselineParams::validate() const {
  require_finite(Lambda, "Lambda");
  require_finite(kappa, "kappa");
  require_finite(alpha1, "alpha1");
  require_finite(alpha2, "alpha2");
  require_finite(gamma, "gamma");
  require_finite(phi, "phi");
  require_finite(delta, "delta");
  if (Lambda < 0 || kappa < 0 || alpha1 < 0 || alpha2 < 0 || gamma < 0 ||
      phi < 0 || delta < 0) {
    throw InvalidInput("baseline parameters must be non-negative");
  }
}

double VacancyFunction::operator()(double t) const {
  if (!finite(t)) throw InvalidInput("vacancy function: non-finite time");
  const double x = w * t;
  return a0 + a1 * std::cos(x) + b1 * std::sin(x) + a2 * std::cos(2 * x) +
         b2 * std::sin(2 * x) + a3 * std::cos(3 * x) + b3 * std::sin(3 * x);
}

LaborState rhs_new_model(const ModelParams& p, const LaborState& s, double v) {
  return rhs_controlled(p, s, v, 0.0, 0.0);
}

LaborState rhs_controlled(const ModelParams& p, const LaborState& s, double v,
                          double u1, double u2) {
  p.validate();
  if (!finite(s.U) || !finite(s.E) || !finite(v) || !finite(u1) ||
      !finite(u2)) {
    throw InvalidInput("rhs: non-finite state, vacancy, or control");
  }
  const double match = p.kappa * s.U * v * (1.0 + u2);
  return {p.Lambda - match - p.alpha1 * s.U + p.gamma * s.E - u1,
          p.omega + match - p.alpha2 * s.E - p.gamma * s.E - p.delta * s.E +
              p.rho * s.U + u1};
}

BaselineState rhs_baseline(const BaselineParams& p, const BaselineState& s) {
  p.validate();
  if (!finite(s.U) || !finite(s.E) || !finite(s.V)) {
    throw InvalidInput("rhs_baseline: non-finite state");
  }
  const double match = p.kappa * s.U * s.V;
  return {p.Lambda - match - p.alpha1 * s.U + p.gamma * s.E,
          match - p.alpha2 * s.E - p.gamma * s.E,
          p.alpha2 * s.E + p.gamma * s.E - p.delta * s.V + p.phi * s.U};
}

FeasibleRegionBound feasible_region_bound(const ModelParams& p) {
  p.validate();
  FeasibleRegionBound out;
  out.alpha_m = std::min(p.alpha1 - p.rho, p.alpha2 + p.delta);
  if (out.alpha_m == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.bound = (p.Lambda + p.omega) / out.alpha_m;
  out.informative = out.alpha_m > 0.0;
  return out;
}

LaborState equilibrium(const ModelParams& p, double v) {
  p.validate();
  if (!finite(v)) throw InvalidInput("equilibrium: non-finite vacancy level");
  const double ad = p.alpha2 + p.delta;
  const double denom =
      (p.alpha1 - p.rho) * p.gamma + ad * p.kappa * v + p.alpha1 * ad;
  if (std::abs(denom) < 1e-15) {
    throw SingularEquilibrium("equilibrium denominator vanishes");
  }
  const double total_inflow = p.Lambda + p.omega;
  return {(p.Lambda * ad + total_inflow * p.gamma) / denom,
          (p.alpha1 * p.omega + p.Lambda * p.rho + p.kappa * total_inflow * v) /
              denom};
}

std::pair<double, double> characteristic_coefficients(const ModelParams& p,
                                                      double v) {
  p.validate();
  const double a1c = v * p.kappa + p.alpha1 + p.alpha2 + p.delta + p.gamma;
  const double a2c = v * p.alpha2 * p.kappa + v * p.delta * p.kappa +
                     p.alpha1 * p.alpha2 + p.alpha1 * p.delta +
                     p.alpha1 * p.gamma - p.gamma * p.rho;
  return {a1c, a2c};
}

StabilityReport stability_analysis(const ModelParams& p, double v) {
  StabilityReport rep;
  const auto [a1c, a2c] = characteristic_coefficients(p, v);
  rep.a1_coeff = a1c;
  rep.a2_coeff = a2c;

  // Variational matrix [[-kv-a1, g], [kv+rho, -a2-g-d]]: trace = -a1_coeff,
  // determinant = a2_coeff. Roots by the quadratic formula.
  const double tr = -a1c;
  const double disc = tr * tr - 4.0 * a2c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    rep.eigenvalues = {std::complex<double>((tr + sq) / 2.0, 0.0),
                       std::complex<double>((tr - sq) / 2.0, 0.0)};
  } else {
    const double sq = std::sqrt(-disc);
    rep.eigenvalues = {std::complex<double>(tr / 2.0, sq / 2.0),
                       std::complex<double>(tr / 2.0, -sq / 2.0)};
  }
  rep.is_stable = a1c > 0.0 && a2c > 0.0;
  return rep;
}

ModelParams portugal_2004_2016() {
  ModelParams p;
  p.Lambda = 90000.0;
  p.kappa = 0.000009;
  p.alpha1 = 0.04;
  p.alpha2 = 0.05;
  p.gamma = 0.001;
  p.omega = 90000.0;
  p.delta = 0.05;
  p.rho = 0.7161;
  return p;
}

BaselineParams munoli_gani_2016() {
  BaselineParams p;
  p.Lambda = 5000.0;
  p.kappa = 0.000009;
  p.alpha1 = 0.04;
  p.alpha2 = 0.05;
  p.gamma = 0.001;
  p.phi = 0.007;
  p.delta = 0.05;
  return p;
}

VacancyFunction vacancy_fit_2004_2016() {
  VacancyFunction f;
  f.a0 = 1.478e4;
  f.a1 = -1262.0;
  f.b1 = -2006.0;
  f.a2 = 328.2;
  f.b2 = -4700.0;
  f.a3 = -1992.0;
  f.b3 = 2.399;
  f.w = 0.04009;
  return f;
}

}  // namespace unemp
