#include "starpulse/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "starpulse/config.hpp"
#include "starpulse/errors.hpp"
#include "starpulse/evolution.hpp"
#include "starpulse/io.hpp"
#include "starpulse/lane_emden.hpp"
#include "starpulse/spectral.hpp"
#include "starpulse/validation.hpp"

namespace starpulse::cli {

namespace fs = std::filesystem;
using io::brief;
using io::json;

namespace {

struct Common {
  std::string config_path, cache_dir, gamma, out;
  double rho_c = 0.0;
  int basis = 0;
  bool no_cache = false;
  CLI::Option* rho_opt = nullptr;
  CLI::Option* basis_opt = nullptr;
};

Config resolve(const Common& c) {
  Config cfg;
  if (!c.config_path.empty()) cfg = load_config(c.config_path, cfg);
  if (!c.gamma.empty()) cfg.gamma = parse_gamma(c.gamma);
  if (c.rho_opt && c.rho_opt->count()) cfg.rho_c = c.rho_c;
  if (c.basis_opt && c.basis_opt->count()) cfg.basis_size = c.basis;
  if (!c.cache_dir.empty()) cfg.cache_dir = c.cache_dir;
  if (c.no_cache) cfg.use_cache = false;
  cfg.validate();
  return cfg;
}

GasParams params_of(const Config& cfg) { return GasParams::make(cfg.gamma, cfg.rho_c); }

io::ResultCache cache_of(const Config& cfg) {
  return io::ResultCache(cfg.cache_dir.empty() ? io::ResultCache::default_dir() : fs::path(cfg.cache_dir),
                         kCacheSchema);
}

int cmd_lane_emden(const Config& cfg, double tol, std::ostream& out) {
  const auto p = params_of(cfg);
  const auto le = solve_lane_emden(p, tol > 0 ? tol : cfg.ode_tol);
  out << "lane-emden gamma=" << brief(p.gamma) << " n=" << p.index() << " xi1=" << brief(le.xi1)
      << " mu1=" << brief(le.mu1) << " dtheta1=" << brief(le.dtheta1) << "\n";
  return kOk;
}

int cmd_equilibrium(const Config& cfg, int samples, const std::string& out_file, std::ostream& out) {
  const auto eq = make_equilibrium(params_of(cfg), cfg.ode_tol);
  out << "equilibrium gamma=" << brief(eq->params().gamma) << " rho_c=" << brief(eq->params().rho_c)
      << " R=" << brief(eq->R) << " M=" << brief(eq->M) << " xi_plus=" << brief(eq->xi_plus)
      << " kappa=" << brief(eq->kappa) << "\n";
  if (!out_file.empty()) {
    std::ostringstream s;
    s << "x,r,rho,P,m,L0,L1\n";
    for (int i = 0; i < samples; ++i) {
      const double x = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0;
      const auto pt = eq->at_x(x);
      s << io::exact(x) << ',' << io::exact(pt.r) << ',' << io::exact(pt.rho) << ',' << io::exact(pt.P) << ','
        << io::exact(pt.mass) << ',' << io::exact(pt.L0) << ',' << io::exact(pt.L1) << '\n';
    }
    io::write_atomic(out_file, s.str());
  }
  return kOk;
}

json produce_modes(const Config& cfg, int count, const std::string& method, int samples) {
  const auto p = params_of(cfg);
  const auto eq = make_equilibrium(p, cfg.ode_tol);
  const auto modes = solve_modes(*eq, count, cfg.mode_options());
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(samples, 0.0, 1.0);
  json table = io::modes_to_json(p, cfg.basis_size, modes, x);
  if (method != "galerkin") {
    ShootOptions so;
    so.rtol = cfg.match_tol;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double shot = refine_shoot(*eq, modes[i].lambda, so);
      table["modes"][i]["lambda_shoot"] = shot;
      table["modes"][i]["lambda_shoot_phys"] = shot * eq->kappa2;
    }
  }
  return table;
}

int cmd_modes(const Config& cfg, int count, const std::string& method, int samples, const std::string& out_dir,
              std::ostream& out, std::ostream& err) {
  const json key{{"kind", "modes"}, {"gamma", cfg.gamma},          {"rho_c", cfg.rho_c},
                 {"basis_size", cfg.basis_size}, {"count", count}, {"method", method},
                 {"samples", samples},          {"eig_tol", cfg.eig_tol}, {"ode_tol", cfg.ode_tol},
                 {"match_tol", cfg.match_tol}};
  json table;
  if (cfg.use_cache) {
    const auto cache = cache_of(cfg);
    const auto hit = cache.get_or_produce(key, [&] { return produce_modes(cfg, count, method, samples); });
    if (!hit.warning.empty()) err << "warning: " << hit.warning << "\n";
    err << "cache " << (hit.hit ? "hit " : "miss ") << cache.key(key) << "\n";
    table = hit.payload;
  } else {
    table = produce_modes(cfg, count, method, samples);
  }
  for (const auto& m : table.at("modes")) {
    const double lp = m.at("lambda_phys").get<double>();
    out << "mode n=" << m.at("n").get<int>() << " lambda=" << brief(m.at("lambda").get<double>())
        << " lambda_phys=" << brief(lp);
    if (lp > 0) out << " period=" << brief(2 * std::numbers::pi / std::sqrt(lp));
    if (m.contains("lambda_shoot")) out << " lambda_shoot=" << brief(m.at("lambda_shoot").get<double>());
    out << " sign_changes=" << m.at("sign_changes").get<int>() << "\n";
  }
  if (!out_dir.empty()) {
    const std::string stem = "modes_gamma" + brief(cfg.gamma);
    io::write_atomic(fs::path(out_dir) / (stem + ".csv"), io::modes_csv(table));
    io::write_atomic(fs::path(out_dir) / (stem + ".json"), table.dump(2) + "\n");
  }
  return kOk;
}

void summarize(const Trajectory& traj, std::ostream& out) {
  double sup = 0.0;
  for (const auto& d : traj.diagnostics) sup = std::max(sup, d.sup_y);
  const double e0 = traj.diagnostics.front().energy, e1 = traj.diagnostics.back().energy;
  out << " steps=" << traj.diagnostics.size() - 1 << " dt=" << brief(traj.dt) << " max|y|=" << brief(sup)
      << " energy_change=" << brief(e0 != 0.0 ? (e1 - e0) / e0 : 0.0) << "\n";
}

void write_trajectory(const Trajectory& traj, const Evolver& ev, const std::string& csv, const std::string& snaps) {
  if (!csv.empty()) io::write_atomic(csv, io::trajectory_csv(traj));
  if (!snaps.empty()) io::write_atomic(snaps, io::snapshots_to_json(traj, ev.nodes()).dump() + "\n");
}

int cmd_evolve(const Config& cfg, double eps, int mode, double periods, double dt_factor, double phase, int stride,
               const std::string& csv, const std::string& snaps, std::ostream& out) {
  auto eo = cfg.evolution_options();
  if (dt_factor > 0) eo.dt_factor = dt_factor;
  eo.snapshot_stride = stride;
  const Evolver ev(make_equilibrium(params_of(cfg), cfg.ode_tol), eo);
  const auto& m = ev.mode(mode);
  if (!(m.lambda_phys > 0)) throw InvalidParams("mode " + std::to_string(mode) + " is not oscillatory");
  const double T = (periods > 0 ? periods : cfg.periods) * 2 * std::numbers::pi / std::sqrt(m.lambda_phys);
  const auto traj = evolve_seed(ev, eps, phase, T, 0.0, mode);
  out << "evolve gamma=" << brief(cfg.gamma) << " eps=" << brief(eps) << " mode=" << mode << " T=" << brief(T);
  summarize(traj, out);
  write_trajectory(traj, ev, csv, snaps);
  return kOk;
}

int cmd_cauchy(const Config& cfg, const std::string& psi0, const std::string& psi1, double T, const std::string& csv,
               const std::string& snaps, std::ostream& out) {
  const Evolver ev(make_equilibrium(params_of(cfg), cfg.ode_tol), cfg.evolution_options());
  auto nodal = [&](const std::string& file) -> Eigen::VectorXd {
    if (file.empty()) return Eigen::VectorXd::Zero(ev.nodes().size());
    const auto [x, v] = io::read_samples(file);
    return ev.space().basis.value * ev.project(x, v);
  };
  const double horizon =
      T > 0 ? T : (cfg.T > 0 ? cfg.T : cfg.periods * 2 * std::numbers::pi / std::sqrt(std::abs(ev.mode(1).lambda_phys)));
  const auto traj = evolve_cauchy(ev, nodal(psi0), nodal(psi1), horizon);
  out << "cauchy gamma=" << brief(cfg.gamma) << " T=" << brief(horizon);
  summarize(traj, out);
  write_trajectory(traj, ev, csv, snaps);
  return kOk;
}

int cmd_verify(const Config& cfg, const std::string& which, const std::string& out_dir, std::ostream& out) {
  const auto vo = cfg.validation_options();
  std::vector<ExperimentReport> reports;
  const bool all = which == "all";
  if (all || which == "lambda-sign") {
    reports.push_back(lambda_sign_map({kAdmissibleGammas.begin(), kAdmissibleGammas.end()}, vo));
  }
  if (all || which == "eps") reports.push_back(epsilon_convergence(cfg.gamma, cfg.eps_list, cfg.eps_periods, vo));
  if (all || which == "vacuum") reports.push_back(vacuum_exponent(cfg.gamma, cfg.vacuum_eps, vo));
  if (all || which == "ritter") {
    if (cfg.gamma > 4.0 / 3.0 + 1e-9) {
      reports.push_back(ritter_eddington(cfg.gamma, cfg.ritter_rho, vo));
    } else {
      ExperimentReport r;
      r.name = "ritter";
      r.inconclusive = true;
      r.notes.push_back("the period-density law needs gamma > 4/3");
      reports.push_back(r);
    }
  }
  bool ok = true;
  const fs::path dir = out_dir.empty() ? fs::path(cfg.out_dir) : fs::path(out_dir);
  for (const auto& r : reports) {
    const auto paths = io::write_report(r, dir);
    ok = ok && r.passed();
    out << "verify " << r.name << ": " << (r.passed() ? "PASS" : (r.inconclusive ? "INCONCLUSIVE" : "FAIL")) << " ("
        << r.rows.size() << " rows) -> " << paths.front().string() << "\n";
  }
  return ok ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"starpulse: radial pulsations of polytropic gas spheres"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--config", c.config_path, "key=value configuration file");
  app.add_option("--cache", c.cache_dir, "cache directory (overrides STARPULSE_CACHE)");
  app.add_flag("--no-cache", c.no_cache, "bypass the result cache");
  app.add_option("--gamma", c.gamma, "adiabatic exponent: 2, 3/2, 4/3 or 5/4");
  c.rho_opt = app.add_option("--rho-c", c.rho_c, "central density");
  c.basis_opt = app.add_option("--basis", c.basis, "Galerkin basis size");

  auto* le = app.add_subcommand("lane-emden", "solve the Lane-Emden equation");
  double le_tol = 0.0;
  le->add_option("--tol", le_tol, "integration tolerance");

  auto* eqc = app.add_subcommand("equilibrium", "build the equilibrium and its coefficients");
  int eq_samples = 11;
  std::string eq_out;
  eqc->add_option("--nodes", eq_samples, "number of uniform samples in x")->check(CLI::PositiveNumber);
  eqc->add_option("--out", eq_out, "CSV file for the sampled profile");

  auto* mo = app.add_subcommand("modes", "radial eigenmodes");
  int count = 4, samples = 11;
  std::string method = "galerkin", modes_out;
  mo->add_option("--count", count, "number of modes")->check(CLI::PositiveNumber);
  mo->add_option("--method", method, "galerkin, shoot or both")->check(CLI::IsMember({"galerkin", "shoot", "both"}));
  mo->add_option("--samples", samples, "eigenfunction samples in the export")->check(CLI::Range(2, 100000));
  mo->add_option("--out", modes_out, "directory for the CSV and JSON tables");

  auto* ev = app.add_subcommand("evolve", "nonlinear evolution from a mode seed");
  double eps = 1e-3, periods = 0.0, dt_factor = 0.0, phase = 0.0;
  int mode = 1, stride = 0;
  std::string ev_csv, ev_snaps;
  ev->add_option("--eps", eps, "seed amplitude");
  ev->add_option("--mode", mode, "seed mode index")->check(CLI::PositiveNumber);
  ev->add_option("--periods", periods, "duration in periods of the seed mode");
  ev->add_option("--dt-factor", dt_factor, "time step as a fraction of the CFL bound");
  ev->add_option("--phase", phase, "initial phase");
  ev->add_option("--stride", stride, "snapshot stride (0: first and last only)");
  ev->add_option("--out", ev_csv, "trajectory CSV");
  ev->add_option("--snapshots", ev_snaps, "snapshot JSON");

  auto* ca = app.add_subcommand("cauchy", "nonlinear evolution from general data");
  std::string psi0, psi1, ca_csv, ca_snaps;
  double T = 0.0;
  ca->add_option("--psi0", psi0, "initial displacement samples (x value per line)")->required();
  ca->add_option("--psi1", psi1, "initial velocity samples (default zero)");
  ca->add_option("--T", T, "final time");
  ca->add_option("--out", ca_csv, "trajectory CSV");
  ca->add_option("--snapshots", ca_snaps, "snapshot JSON");

  auto* ve = app.add_subcommand("verify", "run validation experiments");
  std::string which = "all", verify_out;
  ve->add_option("experiment", which, "all, lambda-sign, eps, vacuum or ritter")
      ->check(CLI::IsMember({"all", "lambda-sign", "eps", "vacuum", "ritter"}));
  ve->add_option("--out", verify_out, "report directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const Config cfg = resolve(c);
    if (le->parsed()) return cmd_lane_emden(cfg, le_tol, out);
    if (eqc->parsed()) return cmd_equilibrium(cfg, eq_samples, eq_out, out);
    if (mo->parsed()) return cmd_modes(cfg, count, method, samples, modes_out, out, err);
    if (ev->parsed()) return cmd_evolve(cfg, eps, mode, periods, dt_factor, phase, stride, ev_csv, ev_snaps, out);
    if (ca->parsed()) return cmd_cauchy(cfg, psi0, psi1, T, ca_csv, ca_snaps, out);
    if (ve->parsed()) return cmd_verify(cfg, which, verify_out, out);
  } catch (const InvalidParams& e) {
    err << "error: InvalidParams: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: filesystem: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace starpulse::cli
