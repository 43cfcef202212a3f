#include "spincharge/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spincharge/config.hpp"
#include "spincharge/dynamics.hpp"
#include "spincharge/experiments.hpp"
#include "spincharge/output.hpp"
#include "spincharge/parallel.hpp"
#include "spincharge/soliton.hpp"
#include "spincharge/validation.hpp"
#include "spincharge/volterra.hpp"

namespace spincharge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 parse_vec(const std::string& s, const char* what) {
  std::stringstream ss(s);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PreconditionError(std::string("--") + what + ": cannot parse '" + s + "' as x,y,z");
    }
  }
  if (v.size() != 3) throw PreconditionError(std::string("--") + what + ": expected three comma-separated numbers");
  return Vec3(v[0], v[1], v[2]);
}

struct Flags {
  std::string config_path, out, omega, profile, init, fields;
  std::uint64_t seed = 0;
  int threads = 0, grid_n = 0;
  double k_max = 0, dt = 0, t_end = 0, delta = 0;
  bool seed_set = false, zero_fields = false, quick = false, strict = false;
};

RunConfig resolve(const Flags& f, const CLI::App& app) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  if (!f.out.empty()) c.out_dir = f.out;
  if (app.count("--seed")) c.seed = f.seed;
  if (f.threads > 0) c.threads = f.threads;
  if (!f.omega.empty()) c.omega = parse_vec(f.omega, "omega");
  if (!f.profile.empty()) {
    try {
      c.profile.kind = profile_kind_from_string(f.profile);
    } catch (const std::exception& e) {
      throw PreconditionError(std::string("--profile: ") + e.what());
    }
  }
  if (!f.init.empty()) c.init = f.init;
  if (f.grid_n > 0) c.grid.n = f.grid_n;
  if (f.k_max > 0) c.grid.k_max = f.k_max;
  if (f.dt > 0) c.integrator.dt = c.volterra.dt = f.dt;
  if (f.t_end > 0) c.integrator.t_end = c.volterra.t_end = f.t_end;
  if (f.delta > 0) c.delta = f.delta;
  if (!f.fields.empty()) c.volterra_fields = f.fields;
  if (f.zero_fields) c.volterra_fields.clear();
  c.perturbation.seed = c.seed;
  validate(c);
  return c;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%010.4f.fst", t);
  return buf;
}

int cmd_soliton(const RunConfig& c, Clock::time_point t0) {
  const ChargeProfile prof(c.profile);
  const Soliton sol(prof, c.omega);
  const ModeTable table = ModeTable::build(c.grid, prof);
  json rep;
  rep["omega"] = vec(c.omega);
  rep["I"] = prof.moment_of_inertia();
  rep["alpha_rho"] = prof.alpha_rho();
  rep["K"] = vec(K_vector(prof, c.omega));
  rep["H"] = soliton_energy(sol);
  if (prof.kind() == ProfileKind::neutral) {
    rep["M_omega_closed"] = vec(soliton_angular_momentum_closed(prof, c.omega));
    rep["M_omega_quadrature"] = vec(soliton_angular_momentum_quadrature(prof, c.omega));
  } else {
    rep["M_omega_closed"] = nullptr;
    rep["M_omega_quadrature"] = nullptr;
    rep["M_omega_note"] = "infinite angular momentum: charged profile";
  }
  rep["stationary_residual"] = stationary_residual(sol, c.grid);
  double vmax = 0.0;
  for (int s = 0; s < 5; ++s) {
    PerturbationSpec ps = c.perturbation;
    ps.seed = c.seed + s;
    ps.omega_fraction = 0.0;
    const FieldState p = make_perturbation(c.grid, ps, 1.0);
    const VariationalResidual v = variational_residual(sol, table, p.e_hat, p.b_hat);
    vmax = std::max({vmax, std::abs(v.first), std::abs(v.second)});
  }
  rep["variational_residual_max"] = vmax;
  fs::create_directories(c.out_dir);
  write_report((fs::path(c.out_dir) / "report.json").string(), rep, make_manifest(c, "soliton", seconds_since(t0)));
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& c, Clock::time_point t0) {
  const ChargeProfile prof(c.profile);
  Trajectory tr;
  const bool absolute = c.init == "soliton";
  if (absolute) {
    const ModeTable table = ModeTable::build(c.grid, prof);
    tr = evolve_absolute(prof, soliton_total_state(table, c.omega), c.integrator, c.omega);
  } else {
    const FieldState init = c.init == "zero" ? FieldState::zero(c.grid) : make_perturbation(c.grid, c.perturbation, c.delta);
    tr = evolve(prof, c.omega, init, c.integrator);
  }
  fs::create_directories(c.out_dir);
  const json manifest = make_manifest(c, "evolve", seconds_since(t0));
  {
    CsvWriter csv((fs::path(c.out_dir) / "trajectory.csv").string(),
                  {"t", "Omega_1", "Omega_2", "Omega_3", "H_total", "H_pert", "norm_e", "norm_b"}, manifest);
    for (const TrajectoryRow& r : tr.rows) {
      const Vec3 w = absolute ? Vec3(r.omega - c.omega) : r.omega;
      csv.row({r.t, w[0], w[1], w[2], r.H_total, r.H_pert, r.norm_e, r.norm_b});
    }
  }
  json snaps = json::array();
  for (const FieldState& s : tr.snapshots) {
    const std::string name = snapshot_name(s.time);
    write_fst((fs::path(c.out_dir) / name).string(), s, manifest);
    snaps.push_back(name);
  }
  json rep{{"init", c.init},
           {"absolute", absolute},
           {"steps", tr.steps},
           {"max_rel_energy_drift", tr.max_rel_energy_drift},
           {"max_constraint_defect", tr.max_constraint_defect},
           {"snapshots", snaps}};
  write_report((fs::path(c.out_dir) / "report.json").string(), rep, manifest);
  std::printf("evolve: %d steps, max relative energy drift %.3e\n", tr.steps, tr.max_rel_energy_drift);
  return 0;
}

int cmd_volterra(const RunConfig& c, Clock::time_point t0) {
  const ChargeProfile prof(c.profile);
  std::vector<VolterraRow> rows;
  if (c.volterra_fields.empty()) {
    rows = solve_volterra(prof, c.omega, c.volterra_omega0, nullptr, {}, c.volterra);
  } else {
    const FieldState init = read_fst(c.volterra_fields);
    if (!is_admissible(init, 1e-10))
      throw PreconditionError("volterra: snapshot fields are not admissible perturbations");
    rows = solve_volterra(prof, c.omega, init, {}, c.volterra);
  }
  fs::create_directories(c.out_dir);
  const json manifest = make_manifest(c, "volterra", seconds_since(t0));
  {
    CsvWriter csv((fs::path(c.out_dir) / "trajectory.csv").string(),
                  {"t", "Omega_1", "Omega_2", "Omega_3", "T21_norm", "T31_norm"}, manifest);
    for (const VolterraRow& r : rows) csv.row({r.t, r.omega[0], r.omega[1], r.omega[2], r.t21_norm, r.t31_norm});
  }
  json rep{{"fields", c.volterra_fields.empty() ? json("zero") : json(c.volterra_fields)},
           {"steps", rows.empty() ? 0 : rows.size() - 1},
           {"omega_final", rows.empty() ? json(nullptr) : vec(rows.back().omega)}};
  write_report((fs::path(c.out_dir) / "report.json").string(), rep, manifest);
  std::printf("volterra: %zu nodes\n", rows.size());
  return 0;
}

int cmd_stability(const RunConfig& c, Clock::time_point t0) {
  const ChargeProfile prof(c.profile);
  const StabilityReport rep = stability_scan(prof, c.omega, c.grid, c.perturbation, c.stability_deltas, c.integrator);
  fs::create_directories(c.out_dir);
  const json manifest = make_manifest(c, "stability", seconds_since(t0));
  json pts = json::array();
  {
    CsvWriter csv((fs::path(c.out_dir) / "scan.csv").string(),
                  {"delta", "sup_norm", "ratio", "max_energy_drift", "max_forcing_after_cutoff", "max_constraint_defect"},
                  manifest);
    for (const StabilityPoint& p : rep.points) {
      csv.row({p.delta, p.sup_norm, p.ratio, p.max_energy_drift, p.max_forcing_after_cutoff, p.max_constraint_defect});
      pts.push_back({{"delta", p.delta}, {"sup_norm", p.sup_norm}, {"ratio", p.ratio},
                     {"max_energy_drift", p.max_energy_drift}, {"max_forcing_after_cutoff", p.max_forcing_after_cutoff}});
    }
  }
  json out{{"R", rep.R}, {"T_bar", rep.T_bar}, {"ratio_spread", rep.ratio_spread}, {"points", pts},
           {"verdict", {{"ratio_spread_below_0.2", rep.ratio_spread < 0.2}}}};
  write_report((fs::path(c.out_dir) / "report.json").string(), out, manifest);
  std::printf("stability: ratio spread %.3e over %zu deltas\n", rep.ratio_spread, rep.points.size());
  return 0;
}

int cmd_instability(const RunConfig& c, Clock::time_point t0) {
  const ChargeProfile prof(c.profile);
  const double I = prof.moment_of_inertia();
  const double eps = c.epsilon > 0.0 ? c.epsilon : I * c.omega.squaredNorm() / 4.0;
  const InstabilityReport rep = instability_scan(prof, c.omega, eps, c.c_list);
  fs::create_directories(c.out_dir);
  const json manifest = make_manifest(c, "instability", seconds_since(t0));
  json pts = json::array();
  {
    CsvWriter csv((fs::path(c.out_dir) / "scan.csv").string(),
                  {"c", "norm_e", "norm_b", "norm", "m1_1", "m1_2", "m1_3", "m2_1", "m2_2", "m2_3", "m3_1", "m3_2",
                   "m3_3", "m3_closed", "delta_H", "delta_H_direct", "g_part"},
                  manifest);
    for (const InstabilityPoint& p : rep.points) {
      csv.row({p.c, p.norm_e, p.norm_b, p.norm, p.m1[0], p.m1[1], p.m1[2], p.m2[0], p.m2[1], p.m2[2], p.m3[0], p.m3[1],
               p.m3[2], p.m3_closed, p.delta_H, p.delta_H_direct, p.g_part});
      pts.push_back({{"c", p.c}, {"norm", p.norm}, {"delta_H", p.delta_H}});
    }
  }
  json out{{"epsilon", rep.epsilon},     {"I", rep.I},
           {"d", rep.d},                 {"m_tilde", rep.m_tilde},
           {"slope_norm_e", rep.slope_norm_e}, {"slope_m1", rep.slope_m1},
           {"slope_m2", rep.slope_m2},   {"m1_identically_zero", rep.m1_identically_zero},
           {"points", pts},              {"verdict", {{"criterion_met", rep.criterion_met}}}};
  write_report((fs::path(c.out_dir) / "report.json").string(), out, manifest);
  std::printf("instability: largest c = %g, norm %.4g, Delta H_M = %.6g (epsilon %.6g)\n", rep.points.back().c,
              rep.points.back().norm, rep.points.back().delta_H, eps);
  return 0;
}

int cmd_validate(const RunConfig& c, const Flags& f, Clock::time_point t0) {
  ValidationOptions opts;
  opts.quick = f.quick;
  opts.seed = c.seed;
  opts.on_result = [](const CriterionResult& r) {
    std::fputs(format_result(r).c_str(), stdout);
    std::fflush(stdout);
  };
  const auto results = run_validation(opts);
  json arr = json::array();
  bool all = true;
  for (const CriterionResult& r : results) {
    json checks = json::array();
    for (const SubCheck& s : r.checks)
      checks.push_back({{"name", s.name}, {"value", s.value}, {"relation", s.relation}, {"bound", s.bound},
                        {"bound2", s.bound2}, {"passed", s.passed}});
    arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"checks", checks}, {"notes", r.notes},
                   {"seconds", r.seconds}});
    all = all && r.passed();
  }
  fs::create_directories(c.out_dir);
  write_report((fs::path(c.out_dir) / "report.json").string(),
               json{{"quick", f.quick}, {"all_passed", all}, {"criteria", arr}},
               make_manifest(c, "validate", seconds_since(t0)));
  return (f.strict && !all) ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  const auto t0 = Clock::now();
  CLI::App app{"Spectral simulator for a rotating charge at rest in the Maxwell field", "spincharge"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_path, "JSON run configuration");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--omega", f.omega, "soliton angular velocity x,y,z");
  app.add_option("--profile", f.profile, "charged | neutral");
  app.add_option("--grid", f.grid_n, "nodes per axis")->check(CLI::PositiveNumber);
  app.add_option("--k-max", f.k_max, "k-grid half width")->check(CLI::PositiveNumber);
  app.add_option("--dt", f.dt, "time step")->check(CLI::PositiveNumber);
  app.add_option("--t-end", f.t_end, "final time")->check(CLI::PositiveNumber);

  app.add_subcommand("soliton", "closed-form soliton report");
  auto* evolve_cmd = app.add_subcommand("evolve", "full coupled dynamics");
  evolve_cmd->add_option("--init", f.init, "zero | perturbation | soliton");
  evolve_cmd->add_option("--delta", f.delta, "perturbation size |Omega| + |e| + |b|")->check(CLI::PositiveNumber);
  auto* volterra_cmd = app.add_subcommand("volterra", "reduced integro-differential equation for Omega");
  volterra_cmd->add_option("--fields", f.fields, ".fst snapshot with the initial perturbation");
  volterra_cmd->add_flag("--zero-fields", f.zero_fields, "e0 = b0 = 0");
  app.add_subcommand("stability", "compact-support stability scan (deltas from the config)");
  app.add_subcommand("instability", "bump-pair energy-increment scan");
  auto* validate_cmd = app.add_subcommand("validate", "cross-oracle acceptance suite");
  validate_cmd->add_flag("--quick", f.quick, "small grids (smoke test only)");
  validate_cmd->add_flag("--strict", f.strict, "exit 1 if any criterion fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig c = resolve(f, app);
    par::set_threads(c.threads);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "soliton") return cmd_soliton(c, t0);
    if (cmd == "evolve") return cmd_evolve(c, t0);
    if (cmd == "volterra") return cmd_volterra(c, t0);
    if (cmd == "stability") return cmd_stability(c, t0);
    if (cmd == "instability") return cmd_instability(c, t0);
    if (cmd == "validate") return cmd_validate(c, f, t0);
    return 2;
  } catch (const DriftAbort& e) {
    std::cerr << "drift abort: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace spincharge
