#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>

namespace unemp {

// Parameters of the two-compartment unemployment model (monthly rates,
// inflows in persons/month).
struct ModelParams {
  double Lambda = 0.0;  // inflow of unemployed
  double kappa = 0.0;   // matching rate, 1/(vacancy month)
  double alpha1 = 0.0;  // unemployed exit rate (migration/death)
  double alpha2 = 0.0;  // employed exit rate (retirement/death)
  double gamma = 0.0;   // firing rate
  double omega = 0.0;   // inflow of employed
  double delta = 0.0;   // vacancy-funding attrition rate
  double rho = 0.0;     // wage-devaluation hiring rate

  void validate() const;  // throws InvalidInput
};

// Parameters of the Munoli-Gani three-compartment model.
struct BaselineParams {
  double Lambda = 0.0;
  double kappa = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double gamma = 0.0;
  double phi = 0.0;    // vacancy-creation rate
  double delta = 0.0;  // vacancy diminution rate

  void validate() const;
};

struct LaborState {
  double U = 0.0;
  double E = 0.0;
};

struct BaselineState {
  double U = 0.0;
  double E = 0.0;
  double V = 0.0;
};

// Third-degree Fourier series for the exogenous vacancy curve.
struct VacancyFunction {
  double a0 = 0.0;
  double a1 = 0.0, b1 = 0.0;
  double a2 = 0.0, b2 = 0.0;
  double a3 = 0.0, b3 = 0.0;
  double w = 1.0;  // angular frequency, 1/month

  double operator()(double t) const;

  static VacancyFunction constant(double v) {
    VacancyFunction f;
    f.a0 = v;
    return f;
  }
};

struct FeasibleRegionBound {
  double alpha_m = 0.0;
  bool informative = false;  // alpha_m > 0 and the bound is meaningful
  bool degenerate = false;   // alpha_m == 0: bound undefined
  std::optional<double> bound;  // (Lambda+omega)/alpha_m, absent when degenerate
};

struct StabilityReport {
  double a1_coeff = 0.0;
  double a2_coeff = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
  bool is_stable = false;
};

LaborState rhs_new_model(const ModelParams& p, const LaborState& s, double v);
LaborState rhs_controlled(const ModelParams& p, const LaborState& s, double v,
                          double u1, double u2);
BaselineState rhs_baseline(const BaselineParams& p, const BaselineState& s);

FeasibleRegionBound feasible_region_bound(const ModelParams& p);

// Closed-form equilibrium of the two-compartment model at a fixed vacancy
// level v. Throws SingularEquilibrium when the shared denominator vanishes.
LaborState equilibrium(const ModelParams& p, double v);

// Coefficients (a1, a2) of lambda^2 + a1 lambda + a2 = 0.
std::pair<double, double> characteristic_coefficients(const ModelParams& p,
                                                      double v);

StabilityReport stability_analysis(const ModelParams& p, double v);

// Built-in parameter presets.
ModelParams portugal_2004_2016();
BaselineParams munoli_gani_2016();
VacancyFunction vacancy_fit_2004_2016();

// January-2004 initial conditions. Two vacancy presets exist because the
// narrative quotes 4848 while the simulation code starts from 9625; see the
// reproduction notes in the README.
inline constexpr LaborState kInitialState{464450.0, 6450694.0};
inline constexpr double kVacancies2004Text = 4848.0;  // v0_text
inline constexpr double kVacancies2004Code = 9625.0;  // v0_code

}  // namespace unemp
