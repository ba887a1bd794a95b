#include "unemp/datafit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "unemp/errors.hpp"

namespace unemp {

namespace {

constexpr int kNumFourierParams = 8;  // a0, (a1,b1), (a2,b2), (a3,b3), w

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// 7-column design matrix of the Fourier3 model at frequency w.
Eigen::MatrixXd design_matrix(std::span<const double> t, double w) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd phi(n, 7);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = w * t[i];
    phi(i, 0) = 1.0;
    phi(i, 1) = std::cos(x);
    phi(i, 2) = std::sin(x);
    phi(i, 3) = std::cos(2 * x);
    phi(i, 4) = std::sin(2 * x);
    phi(i, 5) = std::cos(3 * x);
    phi(i, 6) = std::sin(3 * x);
  }
  return phi;
}

// d(design)/dw times the amplitude vector.
Eigen::VectorXd dmodel_dw(std::span<const double> t, double w,
                          const Eigen::VectorXd& c) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[i];
    const double x = w * ti;
    out[i] = ti * (-c[1] * std::sin(x) + c[2] * std::cos(x) -
                   2 * c[3] * std::sin(2 * x) + 2 * c[4] * std::cos(2 * x) -
                   3 * c[5] * std::sin(3 * x) + 3 * c[6] * std::cos(3 * x));
  }
  return out;
}

// Projected residual at frequency w: amplitudes solved by linear least
// squares. Throws FitError on rank deficiency.
struct Projection {
  Eigen::VectorXd c;         // 7 amplitudes
  Eigen::VectorXd residual;  // v - phi*c
  double sse;
};

Projection project(std::span<const double> t, std::span<const double> v,
                   double w) {
  const Eigen::MatrixXd phi = design_matrix(t, w);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
  qr.setThreshold(1e-10);
  if (qr.rank() < 7) {
    throw FitError("degenerate fit: rank-deficient design matrix (w too "
                   "close to 0?)");
  }
  Projection p;
  p.c = qr.solve(
      Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size())));
  p.residual = Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                 static_cast<long>(v.size())) -
               phi * p.c;
  p.sse = p.residual.squaredNorm();
  return p;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw InvalidInput("incomplete beta: a,b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double dof) {
  if (!(dof > 0)) throw InvalidInput("student_t_cdf: dof > 0");
  if (x == 0.0) return 0.5;
  const double ib =
      regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + x * x));
  return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw InvalidInput("student_t_quantile: p in (0,1)");
  }
  double lo = -1e3, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> derive_employed(const MonthlySeries& series) {
  std::vector<double> e;
  e.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ur = series.UR[i];
    if (!(ur > 0.0) || !(ur < 1.0)) {
      throw DataError("derive_employed: UR outside (0,1) at row " +
                      std::to_string(i + 1));
    }
    e.push_back(series.U[i] * (1.0 - ur) / ur);
  }
  return e;
}

std::vector<double> rate_of_change(std::span<const double> x) {
  if (x.size() < 2) throw DataError("rate_of_change: need at least 2 samples");
  std::vector<double> out;
  out.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] == 0.0) {
      throw DataError("rate_of_change: zero denominator at row " +
                      std::to_string(i));
    }
    out.push_back((x[i] - x[i - 1]) / x[i - 1]);
  }
  return out;
}

CorrelationResult pearson_correlation(std::span<const double> x,
                                      std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw InvalidInput("pearson: length mismatch");
  if (n < 3) throw InvalidInput("pearson: need at least 3 samples");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("pearson: undefined correlation (zero variance)");
  }

  CorrelationResult res;
  res.r = sxy / std::sqrt(sxx * syy);
  const double dof = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - res.r * res.r;
  if (denom <= 0.0) {
    res.t_stat = std::numeric_limits<double>::infinity() * (res.r > 0 ? 1 : -1);
    res.p_value = 0.0;
  } else {
    res.t_stat = res.r * std::sqrt(dof / denom);
    res.p_value =
        regularized_incomplete_beta(dof / 2.0, 0.5,
                                    dof / (dof + res.t_stat * res.t_stat));
  }
  return res;
}

FitResult fit_fourier3(std::span<const double> t, std::span<const double> v,
                       double w0) {
  const std::size_t n = t.size();
  if (n != v.size()) throw InvalidInput("fit_fourier3: length mismatch");
  if (n < 9) {
    throw InvalidInput("fit_fourier3: need more observations than parameters");
  }
  if (!(w0 > 0)) throw InvalidInput("fit_fourier3: w0 must be positive");

  constexpr int kMaxIter = 200;
  double w = w0;
  Projection best = project(t, v, w);
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;

  for (; iter < kMaxIter; ++iter) {
    // Kaufman variable-projection Jacobian of the residual w.r.t. w:
    // -P_perp (dPhi/dw) c.
    const Eigen::VectorXd dm = dmodel_dw(t, w, best.c);
    const Eigen::MatrixXd phi = design_matrix(t, w);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    const Eigen::VectorXd jac = -(dm - phi * qr.solve(dm));
    const double jtj = jac.squaredNorm();
    const double g = jac.dot(best.residual);

    if (std::abs(g) < 1e-12 * (1.0 + best.sse)) {
      converged = true;
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      const double step = -g / (jtj * (1.0 + lambda) + 1e-300);
      const double w_try = w + step;
      if (w_try <= 0.0 || !std::isfinite(w_try)) {
        lambda *= 10.0;
        continue;
      }
      Projection cand;
      try {
        cand = project(t, v, w_try);
      } catch (const FitError&) {
        lambda *= 10.0;
        continue;
      }
      if (cand.sse <= best.sse) {
        const bool tiny_step = std::abs(step) < 1e-14 * (1.0 + std::abs(w));
        w = w_try;
        best = std::move(cand);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (tiny_step) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || converged) {
      converged = converged || !accepted;  // step stalled: local minimum
      break;
    }
  }

  FitResult fit;
  fit.iterations = iter;
  fit.converged = converged;
  fit.coefficients =
      VacancyFunction{best.c[0], best.c[1], best.c[2], best.c[3],
                      best.c[4], best.c[5], best.c[6], w};
  fit.sse = best.sse;

  double mean_v = 0.0;
  for (double vi : v) mean_v += vi;
  mean_v /= static_cast<double>(n);
  double sst = 0.0;
  for (double vi : v) sst += (vi - mean_v) * (vi - mean_v);

  const double dof = static_cast<double>(n) - kNumFourierParams;
  fit.rmse = std::sqrt(fit.sse / dof);
  if (sst == 0.0) {
    fit.degenerate = true;
    fit.r_square = std::numeric_limits<double>::quiet_NaN();
    fit.adj_r_square = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit.r_square = 1.0 - fit.sse / sst;
    fit.adj_r_square =
        1.0 - (1.0 - fit.r_square) * (static_cast<double>(n) - 1.0) / dof;
  }

  // Linearized covariance s^2 (J^T J)^-1 over all 8 parameters.
  Eigen::MatrixXd jfull(static_cast<Eigen::Index>(n), kNumFourierParams);
  jfull.leftCols(7) = design_matrix(t, w);
  jfull.col(7) = dmodel_dw(t, w, best.c);
  const Eigen::MatrixXd jtj = jfull.transpose() * jfull;
  const Eigen::MatrixXd cov =
      (fit.sse / dof) *
      jtj.ldlt().solve(Eigen::MatrixXd::Identity(kNumFourierParams,
                                                 kNumFourierParams));
  const double tq = student_t_quantile(0.975, dof);
  const std::array<double, kNumFourierParams> theta = {
      best.c[0], best.c[1], best.c[2], best.c[3],
      best.c[4], best.c[5], best.c[6], w};
  for (int i = 0; i < kNumFourierParams; ++i) {
    const double half = tq * std::sqrt(std::max(cov(i, i), 0.0));
    fit.confidence_intervals[i] = {theta[i] - half, theta[i] + half};
  }

  if (!converged) {
    throw FitConvergenceError(
        "fit_fourier3: no convergence after 200 iterations; best w = " +
            std::to_string(w),
        fit);
  }
  return fit;
}

std::string format_fit_report(const FitResult& fit, std::size_t n) {
  std::ostringstream os;
  os.precision(6);
  const auto& c = fit.coefficients;
  const std::array<std::pair<const char*, double>, 8> rows = {
      std::pair{"a0", c.a0}, {"a1", c.a1}, {"b1", c.b1}, {"a2", c.a2},
      {"b2", c.b2},          {"a3", c.a3}, {"b3", c.b3}, {" w", c.w}};
  os << "General model Fourier3:\n"
     << "f(x) = a0 + a1*cos(x*w) + b1*sin(x*w) + a2*cos(2*x*w) + "
        "b2*sin(2*x*w)\n"
     << "       + a3*cos(3*x*w) + b3*sin(3*x*w)\n"
     << "Coefficients (with 95% confidence bounds):\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "  " << rows[i].first << " = " << rows[i].second << "  ("
       << fit.confidence_intervals[i][0] << ", "
       << fit.confidence_intervals[i][1] << ")\n";
  }
  os << "\nGoodness of fit:\n"
     << "  SSE: " << fit.sse << "\n";
  if (fit.degenerate) {
    os << "  R-square: undefined (zero total variance)\n"
       << "  Adjusted R-square: undefined\n";
  } else {
    os << "  R-square: " << fit.r_square << "\n"
       << "  Adjusted R-square: " << fit.adj_r_square << "\n";
  }
  os << "  RMSE: " << fit.rmse << "\n"
     << "  n = " << n << ", parameters = 8, dof = " << n - 8 << "\n";
  return os.str();
}

MonthlySeries generate_synthetic_dataset(std::uint64_t seed, std::size_t n) {
  if (n < 2) throw InvalidInput("generate_synthetic_dataset: n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const VacancyFunction fourier = vacancy_fit_2004_2016();

  MonthlySeries s;
  s.t.reserve(n);
  s.U.reserve(n);
  s.UR.reserve(n);
  s.D.reserve(n);

  double u = 464450.0;
  double drift = 0.0;
  double labor_force = 6.9e6;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    s.t.push_back(t);

    const double d = fourier(t) + 2000.0 * gauss(rng);
    s.D.push_back(std::max(d, 1.0));

    s.U.push_back(u);
    s.UR.push_back(u / labor_force);

    drift = 0.9 * drift + 3000.0 * gauss(rng);
    u = std::clamp(u + drift, 3.0e5, 7.0e5);
    labor_force = 7.0e6 + 0.95 * (labor_force - 7.0e6) + 5000.0 * gauss(rng);
  }
  return s;
}

MonthlySeries read_monthly_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open: " + path);
  MonthlySeries s;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != "t,U,UR,D") {
        throw DataError("bad CSV header at line " + std::to_string(lineno) +
                        ": expected 't,U,UR,D', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::array<double, 4> vals{};
    std::string cell;
    for (int col = 0; col < 4; ++col) {
      if (!std::getline(row, cell, ',')) {
        throw DataError("missing column " + std::to_string(col + 1) +
                        " at line " + std::to_string(lineno));
      }
      try {
        std::size_t pos = 0;
        vals[col] = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError("unparsable value '" + cell + "' at line " +
                        std::to_string(lineno) + ", column " +
                        std::to_string(col + 1));
      }
    }
    s.t.push_back(vals[0]);
    s.U.push_back(vals[1]);
    s.UR.push_back(vals[2]);
    s.D.push_back(vals[3]);
  }
  if (!header_seen) throw DataError("empty CSV: " + path);
  return s;
}

void write_monthly_csv(const MonthlySeries& series, const std::string& path,
                       const std::string& metadata) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.precision(std::numeric_limits<double>::max_digits10);
  if (!metadata.empty()) os << "# " << metadata << "\n";
  os << "t,U,UR,D\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << series.t[i] << "," << series.U[i] << "," << series.UR[i] << ","
       << series.D[i] << "\n";
  }
}

}  // namespace unemp
