// Command-line front end: simulation, fitting, analysis, optimal control,
// synthetic data, and real-vs-simulated comparison.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "unemp/datafit.hpp"
#include "unemp/errors.hpp"
#include "unemp/integrator.hpp"
#include "unemp/model.hpp"
#include "unemp/ocp.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConvergence = 4;

namespace fs = std::filesystem;
using nlohmann::json;

struct ParamOverrides {
  std::optional<double> lambda, kappa, alpha1, alpha2, gamma, omega, delta,
      rho, phi;

  void apply(unemp::ModelParams& p) const {
    if (lambda) p.Lambda = *lambda;
    if (kappa) p.kappa = *kappa;
    if (alpha1) p.alpha1 = *alpha1;
    if (alpha2) p.alpha2 = *alpha2;
    if (gamma) p.gamma = *gamma;
    if (omega) p.omega = *omega;
    if (delta) p.delta = *delta;
    if (rho) p.rho = *rho;
  }
  void apply(unemp::BaselineParams& p) const {
    if (lambda) p.Lambda = *lambda;
    if (kappa) p.kappa = *kappa;
    if (alpha1) p.alpha1 = *alpha1;
    if (alpha2) p.alpha2 = *alpha2;
    if (gamma) p.gamma = *gamma;
    if (delta) p.delta = *delta;
    if (phi) p.phi = *phi;
  }
};

void add_param_flags(CLI::App* cmd, ParamOverrides& ov) {
  cmd->add_option("--lambda", ov.lambda, "Inflow of unemployed, persons/month");
  cmd->add_option("--kappa", ov.kappa, "Matching rate");
  cmd->add_option("--alpha1", ov.alpha1, "Unemployed exit rate");
  cmd->add_option("--alpha2", ov.alpha2, "Employed exit rate");
  cmd->add_option("--gamma", ov.gamma, "Firing rate");
  cmd->add_option("--omega", ov.omega, "Inflow of employed, persons/month");
  cmd->add_option("--delta", ov.delta, "Vacancy-funding attrition rate");
  cmd->add_option("--rho", ov.rho, "Wage-devaluation hiring rate");
  cmd->add_option("--phi", ov.phi, "Vacancy-creation rate (baseline model)");
}

std::string default_out_dir() {
  if (const char* env = std::getenv("UNEMP_OUT_DIR")) return env;
  return ".";
}

std::string params_metadata(const unemp::ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << p.Lambda << " kappa=" << p.kappa << " alpha1=" << p.alpha1
     << " alpha2=" << p.alpha2 << " gamma=" << p.gamma << " omega=" << p.omega
     << " delta=" << p.delta << " rho=" << p.rho;
  return os.str();
}

// Vacancy source spec: "constant:<v>", "fourier" (built-in fit), or
// "fit:<csv>" (fit the D column of a data file).
unemp::VacancyFunction parse_vacancy(const std::string& spec) {
  if (spec == "fourier" || spec.empty()) {
    return unemp::vacancy_fit_2004_2016();
  }
  if (spec.rfind("constant:", 0) == 0) {
    return unemp::VacancyFunction::constant(std::stod(spec.substr(9)));
  }
  if (spec.rfind("fit:", 0) == 0) {
    const auto data = unemp::read_monthly_csv(spec.substr(4));
    return unemp::fit_fourier3(data.t, data.D, 0.0421690289072455)
        .coefficients;
  }
  throw unemp::InvalidInput("unknown vacancy source: " + spec);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw unemp::DataError("cannot write " + path.string());
  os << text;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string model = "new";
  ParamOverrides ov;
  double u0 = unemp::kInitialState.U;
  double e0 = unemp::kInitialState.E;
  double v0 = unemp::kVacancies2004Code;
  std::string vacancy = "fourier";
  double t_end = 150.0;
  int resample_n = 0;
  std::string resample_mode = "time";
  std::string out_dir;
  std::string data_file;
};

int run_simulate(const SimulateArgs& args) {
  unemp::IntegratorConfig cfg;
  cfg.t_end = args.t_end;

  unemp::Trajectory traj;
  std::vector<std::string> names;
  std::string meta;
  bool blew_up = false;
  std::string blow_up_msg;

  if (args.model == "munoli-gani") {
    auto p = unemp::munoli_gani_2016();
    args.ov.apply(p);
    p.validate();
    auto rhs = [&p](double, const Eigen::VectorXd& y) {
      const auto d = unemp::rhs_baseline(p, {y[0], y[1], y[2]});
      return Eigen::Vector3d{d.U, d.E, d.V};
    };
    Eigen::Vector3d y0{args.u0, args.e0, args.v0};
    try {
      traj = unemp::integrate(rhs, y0, cfg);
    } catch (unemp::IntegrationBlowUp& e) {
      traj = std::move(e.partial);
      blew_up = true;
      blow_up_msg = e.what();
    }
    names = {"U", "E", "V"};
    std::ostringstream os;
    os << "model=munoli-gani preset=munoli-gani-2016 version=" << kVersion
       << " rel_tol=" << cfg.rel_tol << " abs_tol=" << cfg.abs_tol;
    meta = os.str();
  } else if (args.model == "new") {
    auto p = unemp::portugal_2004_2016();
    args.ov.apply(p);
    p.validate();
    const auto vac = parse_vacancy(args.vacancy);
    auto rhs = [&p, &vac](double t, const Eigen::VectorXd& y) {
      const auto d = unemp::rhs_new_model(p, {y[0], y[1]}, vac(t));
      return Eigen::Vector2d{d.U, d.E};
    };
    Eigen::Vector2d y0{args.u0, args.e0};
    try {
      traj = unemp::integrate(rhs, y0, cfg);
    } catch (unemp::IntegrationBlowUp& e) {
      traj = std::move(e.partial);
      blew_up = true;
      blow_up_msg = e.what();
    }
    names = {"U", "E"};
    std::ostringstream os;
    os << "model=new preset=portugal-2004-2016 " << params_metadata(p)
       << " vacancy=" << args.vacancy << " version=" << kVersion
       << " rel_tol=" << cfg.rel_tol << " abs_tol=" << cfg.abs_tol;
    meta = os.str();
  } else {
    std::cerr << "unknown model preset: " << args.model << "\n";
    return kExitConfig;
  }

  if (args.resample_n > 0 && !blew_up) {
    const auto mode = args.resample_mode == "index"
                          ? unemp::ResampleMode::Index
                          : unemp::ResampleMode::Time;
    traj = unemp::resample(traj, static_cast<std::size_t>(args.resample_n),
                           mode);
  }

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "trajectory.csv";
  unemp::write_trajectory_csv(traj, csv.string(), names, meta);

  std::ostringstream plot;
  plot << "# gnuplot script\n"
       << "set datafile separator ','\n"
       << "set xlabel 't (months)'\n"
       << "plot";
  for (std::size_t i = 0; i < names.size(); ++i) {
    plot << (i ? ", \\\n    " : " ") << "'trajectory.csv' using 1:"
         << i + 2 << " with lines title '" << names[i] << "'";
  }
  if (!args.data_file.empty()) {
    plot << ", \\\n    '" << args.data_file
         << "' using 1:2 with points title 'U (data)'";
  }
  plot << "\npause -1\n";
  write_text(dir / "plot_trajectory.gp", plot.str());

  if (!traj.diagnostics.negative_samples.empty()) {
    std::cerr << "warning: " << traj.diagnostics.negative_samples.size()
              << " samples have negative components\n";
  }
  if (blew_up) {
    std::cerr << "error: " << blow_up_msg << " (partial CSV retained)\n";
    return kExitNumerical;
  }
  std::cout << "wrote " << csv.string() << "\n";
  return kExitOk;
}

// --- fit --------------------------------------------------------------------

int run_fit(const std::string& data_file, double w0,
            const std::string& out_dir) {
  const auto data = unemp::read_monthly_csv(data_file);
  const auto fit = unemp::fit_fourier3(data.t, data.D, w0);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text(dir / "fit_report.txt",
             unemp::format_fit_report(fit, data.size()));

  std::ostringstream csv;
  csv.precision(17);
  csv << "# fourier3 fit version=" << kVersion << " w0=" << w0 << "\n"
      << "name,value,ci_lo,ci_hi\n";
  const auto& c = fit.coefficients;
  const std::array<std::pair<const char*, double>, 8> rows = {
      std::pair{"a0", c.a0}, {"a1", c.a1}, {"b1", c.b1}, {"a2", c.a2},
      {"b2", c.b2},          {"a3", c.a3}, {"b3", c.b3}, {"w", c.w}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << rows[i].first << "," << rows[i].second << ","
        << fit.confidence_intervals[i][0] << ","
        << fit.confidence_intervals[i][1] << "\n";
  }
  csv << "sse," << fit.sse << ",,\n"
      << "r_square," << fit.r_square << ",,\n"
      << "adj_r_square," << fit.adj_r_square << ",,\n"
      << "rmse," << fit.rmse << ",,\n";
  write_text(dir / "fit_coefficients.csv", csv.str());

  std::cout << unemp::format_fit_report(fit, data.size());
  return kExitOk;
}

// --- analyze ----------------------------------------------------------------

int run_analyze(const ParamOverrides& ov, double v) {
  auto p = unemp::portugal_2004_2016();
  ov.apply(p);
  p.validate();

  std::cout.precision(10);
  const auto eq = unemp::equilibrium(p, v);
  std::cout << "Equilibrium at V=" << v << ": U*=" << eq.U << " E*=" << eq.E
            << "\n";

  const auto region = unemp::feasible_region_bound(p);
  std::cout << "alpha_m = " << region.alpha_m;
  if (region.degenerate) {
    std::cout << " (degenerate: bound undefined)\n";
  } else if (!region.informative) {
    std::cout << " (non-informative: bound " << *region.bound
              << " is negative)\n";
  } else {
    std::cout << ", attraction bound (Lambda+omega)/alpha_m = "
              << *region.bound << "\n";
  }

  const auto rep = unemp::stability_analysis(p, v);
  std::cout << "Characteristic coefficients: a1=" << rep.a1_coeff
            << " a2=" << rep.a2_coeff << "\n"
            << "Eigenvalues: " << rep.eigenvalues[0].real() << "+"
            << rep.eigenvalues[0].imag() << "i, "
            << rep.eigenvalues[1].real() << "+" << rep.eigenvalues[1].imag()
            << "i\n"
            << "Verdict: " << (rep.is_stable ? "stable" : "unstable") << "\n";
  return kExitOk;
}

// --- ocp --------------------------------------------------------------------

struct OcpArgs {
  std::string preset = "paper-text";
  int n = 150;
  double kkt_tol = 1e-4;
  bool acado_compat = false;
  bool freeze_controls = false;
  double weight_state = 20.0, weight_u1 = 1.0, weight_u2 = 40000.0;
  std::string out_dir;
};

int run_ocp(const OcpArgs& args) {
  unemp::OcpProblem prob;
  if (args.preset == "paper-text") {
    prob = unemp::paper_text_problem();
  } else if (args.preset == "appendix-acado") {
    prob = unemp::appendix_acado_problem();
  } else {
    std::cerr << "unknown preset: " << args.preset << "\n";
    return kExitConfig;
  }
  prob.grid_intervals = args.n;
  prob.weight_state = args.weight_state;
  prob.weight_u1 = args.weight_u1;
  prob.weight_u2 = args.weight_u2;

  unemp::SolverOptions opts;
  opts.kkt_tol = args.kkt_tol;
  if (args.acado_compat) {
    prob.clock_state = true;
    opts = unemp::acado_compat_options();
  }
  if (args.freeze_controls) {
    prob.u1_min = prob.u1_max = 0.0;
    prob.u2_min = prob.u2_max = 0.0;
  }

  const auto sol = unemp::solve(prob, opts);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  std::ostringstream meta;
  meta.precision(17);
  meta << "preset=" << args.preset << " n=" << args.n
       << " A=" << prob.weight_state << " B=" << prob.weight_u1
       << " C=" << prob.weight_u2 << " kkt_tol=" << opts.kkt_tol
       << " feas_tol=" << opts.feas_tol << " version=" << kVersion;

  {
    std::ostringstream os;
    os.precision(17);
    os << "# " << meta.str() << "\nt,U,E\n";
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      os << sol.times[k] << "," << sol.U[k] << "," << sol.E[k] << "\n";
    }
    write_text(dir / "states.csv", os.str());
  }
  {
    std::ostringstream os;
    os.precision(17);
    os << "# " << meta.str() << "\nt,u1,u2\n";
    for (std::size_t k = 0; k < sol.u1.size(); ++k) {
      os << sol.times[k] << "," << sol.u1[k] << "," << sol.u2[k] << "\n";
    }
    write_text(dir / "ctrl.csv", os.str());
  }
  {
    json diag;
    diag["preset"] = args.preset;
    diag["grid_intervals"] = args.n;
    diag["weights"] = {{"A", prob.weight_state},
                       {"B", prob.weight_u1},
                       {"C", prob.weight_u2}};
    diag["tolerances"] = {{"kkt_tol", opts.kkt_tol},
                          {"feas_tol", opts.feas_tol}};
    diag["objective"] = sol.objective;
    diag["max_defect"] = sol.max_defect;
    diag["max_path_violation"] = sol.max_path_violation;
    diag["max_terminal_violation"] = sol.max_terminal_violation;
    diag["kkt_residual"] = sol.kkt_residual;
    diag["converged"] = sol.converged;
    diag["outer_iterations"] = sol.outer_iterations;
    diag["inner_iterations"] = sol.inner_iterations;
    diag["message"] = sol.message;
    diag["iteration_log"] = sol.iteration_log;
    diag["version"] = kVersion;
    write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  }
  {
    // Six-panel layout: U, E, u1, u2, control cost, unemployment rate.
    std::ostringstream os;
    os << "# gnuplot script\n"
       << "set datafile separator ','\n"
       << "set multiplot layout 3,2\n"
       << "plot 'states.csv' using 1:2 with lines title 'Unemployment'\n"
       << "plot 'states.csv' using 1:3 with lines title 'Employment'\n"
       << "plot 'ctrl.csv' using 1:2 with steps title 'u1'\n"
       << "plot 'ctrl.csv' using 1:3 with steps title 'u2'\n"
       << "plot 'ctrl.csv' using 1:($2*" << prob.weight_u1 << "+$3*"
       << prob.weight_u2 << ") with steps title 'Control Cost'\n"
       << "plot 'states.csv' using 1:($2/($2+$3)) with lines title "
          "'unemployment rate'\n"
       << "unset multiplot\npause -1\n";
    write_text(dir / "plot_ocp.gp", os.str());
  }

  std::cout << "objective " << sol.objective << ", " << sol.message << "\n";
  return sol.converged ? kExitOk : kExitNoConvergence;
}

// --- synth ------------------------------------------------------------------

int run_synth(std::uint64_t seed, int n, const std::string& out_dir) {
  const auto series =
      unemp::generate_synthetic_dataset(seed, static_cast<std::size_t>(n));
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::ostringstream meta;
  meta << "synthetic dataset (the 2004-2016 source data is not "
          "redistributable) seed="
       << seed << " n=" << n << " version=" << kVersion;
  unemp::write_monthly_csv(series, (dir / "data.csv").string(), meta.str());
  std::cout << "wrote " << (dir / "data.csv").string() << "\n";
  return kExitOk;
}

// --- compare ----------------------------------------------------------------

int run_compare(const std::string& data_file, const std::string& out_dir) {
  const auto data = unemp::read_monthly_csv(data_file);
  const auto employed = unemp::derive_employed(data);

  auto p = unemp::portugal_2004_2016();
  const auto vac = unemp::vacancy_fit_2004_2016();
  auto rhs = [&p, &vac](double t, const Eigen::VectorXd& y) {
    const auto d = unemp::rhs_new_model(p, {y[0], y[1]}, vac(t));
    return Eigen::Vector2d{d.U, d.E};
  };
  unemp::IntegratorConfig cfg;
  cfg.t_end = static_cast<double>(data.size());
  Eigen::Vector2d y0{data.U.front(),
                     employed.front()};
  auto traj = unemp::integrate(rhs, y0, cfg);
  traj = unemp::resample(traj, data.size());

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::ostringstream os;
  os.precision(17);
  os << "# real vs simulated unemployment rate version=" << kVersion
     << "\nt,rate_real,rate_sim\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double real_rate = data.UR[i];
    const double sim_rate =
        traj.states[i][0] / (traj.states[i][0] + traj.states[i][1]);
    os << data.t[i] << "," << real_rate << "," << sim_rate << "\n";
  }
  write_text(dir / "rates.csv", os.str());
  write_text(dir / "plot_rates.gp",
             "# gnuplot script\nset datafile separator ','\n"
             "plot 'rates.csv' using 1:2 with lines dt 2 title 'real', \\\n"
             "    'rates.csv' using 1:3 with lines title 'simulated'\n"
             "pause -1\n");
  std::cout << "wrote " << (dir / "rates.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labor-market ODE models, vacancy fitting, and optimal "
               "unemployment policy"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Integrate a model preset");
  c_sim->add_option("--model", sim.model, "Preset: new | munoli-gani");
  add_param_flags(c_sim, sim.ov);
  c_sim->add_option("--u0", sim.u0, "Initial unemployed");
  c_sim->add_option("--e0", sim.e0, "Initial employed");
  c_sim->add_option("--v0", sim.v0, "Initial vacancies (baseline model)");
  c_sim->add_option("--vacancy", sim.vacancy,
                    "constant:<v> | fourier | fit:<csv>");
  c_sim->add_option("--t-end", sim.t_end, "Horizon, months");
  c_sim->add_option("--resample", sim.resample_n, "Resample to n points");
  c_sim->add_option("--resample-mode", sim.resample_mode, "time | index");
  c_sim->add_option("--out", sim.out_dir, "Output directory")
      ->default_val(default_out_dir());
  c_sim->add_option("--data", sim.data_file, "Observed data CSV for overlay");

  std::string fit_file, fit_out = default_out_dir();
  double fit_w0 = 0.0421690289072455;
  auto* c_fit = app.add_subcommand("fit", "Fourier3 fit of the D column");
  c_fit->add_option("data", fit_file, "Input CSV (t,U,UR,D)")->required();
  c_fit->add_option("--w0", fit_w0, "Initial frequency");
  c_fit->add_option("--out", fit_out, "Output directory");

  ParamOverrides an_ov;
  double an_v = unemp::kVacancies2004Text;
  auto* c_an = app.add_subcommand("analyze",
                                  "Equilibrium and stability report");
  add_param_flags(c_an, an_ov);
  c_an->add_option("--v", an_v, "Vacancy level for the analysis");

  OcpArgs ocp;
  auto* c_ocp = app.add_subcommand("ocp", "Solve the optimal-control problem");
  c_ocp->add_option("--preset", ocp.preset, "paper-text | appendix-acado");
  c_ocp->add_option("-n,--intervals", ocp.n, "Grid intervals");
  c_ocp->add_option("--kkt-tol", ocp.kkt_tol, "KKT tolerance");
  c_ocp->add_flag("--acado-compat", ocp.acado_compat,
                  "Clock-state formulation with KKT tolerance 1e-2");
  c_ocp->add_flag("--freeze-controls", ocp.freeze_controls,
                  "Collapse control bounds to zero");
  c_ocp->add_option("-A", ocp.weight_state, "State weight");
  c_ocp->add_option("-B", ocp.weight_u1, "u1 weight");
  c_ocp->add_option("-C", ocp.weight_u2, "u2 weight");
  c_ocp->add_option("--out", ocp.out_dir, "Output directory")
      ->default_val(default_out_dir());

  std::uint64_t synth_seed = 42;
  int synth_n = 150;
  std::string synth_out = default_out_dir();
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic dataset");
  c_synth->add_option("--seed", synth_seed, "RNG seed");
  c_synth->add_option("--n", synth_n, "Number of months");
  c_synth->add_option("--out", synth_out, "Output directory");

  std::string cmp_file, cmp_out = default_out_dir();
  auto* c_cmp = app.add_subcommand("compare",
                                   "Overlay real vs simulated rates");
  c_cmp->add_option("data", cmp_file, "Input CSV (t,U,UR,D)")->required();
  c_cmp->add_option("--out", cmp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_fit->parsed()) return run_fit(fit_file, fit_w0, fit_out);
    if (c_an->parsed()) return run_analyze(an_ov, an_v);
    if (c_ocp->parsed()) return run_ocp(ocp);
    if (c_synth->parsed()) return run_synth(synth_seed, synth_n, synth_out);
    if (c_cmp->parsed()) return run_compare(cmp_file, cmp_out);
  } catch (const unemp::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const unemp::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const unemp::FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const unemp::BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const unemp::StepLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
