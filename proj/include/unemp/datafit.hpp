#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unemp/errors.hpp"
#include "unemp/model.hpp"

namespace unemp {

// Monthly observations: month index, unemployed count, unemployment rate
// (decimal fraction), vacancies.
struct MonthlySeries {
  std::vector<double> t;
  std::vector<double> U;
  std::vector<double> UR;
  std::vector<double> D;

  std::size_t size() const { return t.size(); }
};

// E_t = U_t (1 - UR_t) / UR_t. Throws DataError naming the row when UR is
// outside (0,1).
std::vector<double> derive_employed(const MonthlySeries& series);

// (x_t - x_{t-1}) / x_{t-1}; output length n-1.
std::vector<double> rate_of_change(std::span<const double> x);

struct CorrelationResult {
  double r = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;  // two-tailed
};

CorrelationResult pearson_correlation(std::span<const double> x,
                                      std::span<const double> y);

// Coefficient order used throughout: a0, a1, b1, a2, b2, a3, b3, w.
struct FitResult {
  VacancyFunction coefficients;
  double sse = 0.0;
  double r_square = 0.0;
  double adj_r_square = 0.0;
  double rmse = 0.0;
  std::array<std::array<double, 2>, 8> confidence_intervals{};  // 95% lo/hi
  bool degenerate = false;  // zero total variance: r_square undefined
  bool converged = false;
  int iterations = 0;
};

struct FitConvergenceError;

// Separable (variable-projection) nonlinear least squares for the 3rd-degree
// Fourier model: amplitudes by linear least squares, frequency by
// Levenberg-Marquardt on the projected residual.
FitResult fit_fourier3(std::span<const double> t, std::span<const double> v,
                       double w0);

// Thrown when the frequency search exhausts its iteration budget; carries the
// best iterate found.
struct FitConvergenceError : FitError {
  FitResult best;
  FitConvergenceError(const std::string& msg, FitResult b)
      : FitError(msg), best(std::move(b)) {}
};

// Plain-text report mirroring a curve-fitting tool's output block.
std::string format_fit_report(const FitResult& fit, std::size_t n);

// Deterministic synthetic stand-in for the unpublished 2004-2016 dataset.
MonthlySeries generate_synthetic_dataset(std::uint64_t seed,
                                         std::size_t n = 150);

// CSV schema: header `t,U,UR,D`; '#'-prefixed lines are comments.
MonthlySeries read_monthly_csv(const std::string& path);
void write_monthly_csv(const MonthlySeries& series, const std::string& path,
                       const std::string& metadata = {});

// Special functions, exposed for independent checking.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double x, double dof);
double student_t_quantile(double p, double dof);

}  // namespace unemp
