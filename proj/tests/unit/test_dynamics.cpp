#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spincharge/dynamics.hpp"
#include "spincharge/experiments.hpp"

using namespace spincharge;
using testutil::rel;

namespace {

const ChargeProfile& charged() {
  static const ChargeProfile p{};
  return p;
}

IntegratorSpec short_run(double t_end, double dt = 0.02) {
  IntegratorSpec s;
  s.dt = dt;
  s.t_end = t_end;
  return s;
}

}  // namespace

TEST_CASE("torque_rhs: equilibrium and the pure-Omega reduction") {
  const KGrid g(16, 6.0);
  const Vec3 w(0.1, 0.2, 1.0);
  FieldState s = FieldState::zero(g);
  CHECK(torque_rhs(charged(), w, s).norm() == 0.0);
  s.omega_pert = Vec3(0.3, -0.1, 0.05);
  const Vec3 expect = charged().alpha_rho() * w.cross(s.omega_pert);
  CHECK((torque_rhs(charged(), w, s) - expect).norm() < 1e-12 * expect.norm());
}

TEST_CASE("torque_rhs: k-space reductions against the x-space integrand") {
  const KGrid g(32, 8.0);
  PerturbationSpec ps;
  ps.seed = 21;
  FieldState s = make_perturbation(g, ps, 1e-2);
  const Vec3 w(0.0, 0.4, 0.9);
  const Vec3 k = torque_rhs(charged(), w, s);
  const Vec3 x = torque_xspace(charged(), w, s, 61);
  CHECK((k - x).norm() < 1e-10 * k.norm());
  // the integrator's variant takes K from the same grid; on 32^3 / 8 the box truncation of
  // the rho_tilde^2 sum dominates and shrinks quickly with k_max
  const Vec3 kg = torque_rhs_grid(charged(), ModeTable::build(g, charged()), w, s);
  CHECK((kg - x).norm() < 5e-2 * k.norm());
  const KGrid fine(48, 12.0);
  const FieldState sf = make_perturbation(fine, ps, 1e-2);
  const Vec3 kf = torque_rhs_grid(charged(), ModeTable::build(fine, charged()), w, sf);
  CHECK((kf - torque_xspace(charged(), w, sf, 61)).norm() < 1e-4 * kf.norm());
}

TEST_CASE("evolve: zero data stays exactly zero") {
  const Trajectory tr = evolve(charged(), Vec3(0, 0, 1), FieldState::zero(KGrid(8, 4.0)), short_run(0.5));
  CHECK(tr.rows.size() == 26);
  for (const TrajectoryRow& r : tr.rows) {
    CHECK(r.omega.norm() == 0.0);
    CHECK(r.H_pert == 0.0);
    CHECK(r.norm_e == 0.0);
    CHECK(r.norm_b == 0.0);
  }
}

TEST_CASE("evolve at the zero soliton conserves the perturbation energy") {
  const KGrid g(16, 5.0);
  PerturbationSpec ps;
  ps.seed = 4;
  const FieldState init = make_perturbation(g, ps, 0.05);
  IntegratorSpec spec = short_run(2.0);
  spec.corrector_sweeps = 4;
  const Trajectory tr = evolve(charged(), Vec3::Zero(), init, spec);
  const double H0 = tr.rows.front().H_pert;
  double worst = 0.0, ceiling = 0.0;
  for (const TrajectoryRow& r : tr.rows) {
    worst = std::max(worst, std::abs(r.H_pert - H0) / H0);
    ceiling = std::max(ceiling, 0.5 * charged().moment_of_inertia() * r.omega.squaredNorm() - H0);
  }
  CHECK(worst < 1e-8);
  CHECK(ceiling <= 1e-8 * H0);
  CHECK(tr.max_constraint_defect < 1e-10);
}

TEST_CASE("evolve: halving dt cuts the energy drift by at least 4") {
  const KGrid g(16, 5.0);
  PerturbationSpec ps;
  ps.seed = 12;
  const FieldState init = make_perturbation(g, ps, 0.05);
  const Vec3 w(0, 0, 1);
  const double d1 = evolve(charged(), w, init, short_run(2.0, 0.04)).max_rel_energy_drift;
  const double d2 = evolve(charged(), w, init, short_run(2.0, 0.02)).max_rel_energy_drift;
  CHECK(d1 / d2 >= 4.0);
}

TEST_CASE("evolve aborts on energy drift beyond 100x the tolerance") {
  const KGrid g(16, 5.0);
  PerturbationSpec ps;
  const FieldState init = make_perturbation(g, ps, 0.1);
  IntegratorSpec spec = short_run(1.0, 0.1);
  spec.energy_tol = 1e-18;
  CHECK_THROWS_AS(evolve(charged(), Vec3(0, 0, 1), init, spec), DriftAbort);
}

TEST_CASE("evolve_absolute: soliton fixed point and agreement with the perturbation form") {
  const KGrid g(16, 5.0);
  const ModeTable table = ModeTable::build(g, charged());
  const Vec3 w(0.0, 0.3, 1.0);
  const Trajectory fixed = evolve_absolute(charged(), soliton_total_state(table, w), short_run(1.0), w);
  for (const TrajectoryRow& r : fixed.rows) CHECK((r.omega - w).norm() < 1e-12);

  PerturbationSpec ps;
  ps.seed = 3;
  const FieldState pert = make_perturbation(g, ps, 1e-3);
  const Trajectory a = evolve_absolute(charged(), soliton_total_state(table, w, &pert), short_run(1.0), w);
  const Trajectory p = evolve(charged(), w, pert, short_run(1.0));
  REQUIRE(a.rows.size() == p.rows.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) worst = std::max(worst, (a.rows[i].omega - w - p.rows[i].omega).norm());
  CHECK(worst < 1e-8 * 1e-3);
  CHECK(absolute_defects(soliton_total_state(table, w, &pert), table).max() < 1e-12);

  FieldState broken = soliton_total_state(table, w);
  broken.e_hat[0] += CVec3(cplx(0, 1e-3), 0, 0);
  CHECK_THROWS_AS(evolve_absolute(charged(), broken, short_run(0.1), w), PreconditionError);
}

TEST_CASE("snapshots are taken at the requested times") {
  const KGrid g(8, 4.0);
  IntegratorSpec spec = short_run(0.2);
  spec.snapshot_times = {0.0, 0.1, 0.2};
  PerturbationSpec ps;
  const Trajectory tr = evolve(charged(), Vec3(0, 0, 1), make_perturbation(g, ps, 1e-2), spec);
  REQUIRE(tr.snapshots.size() == 3);
  CHECK(tr.snapshots[1].time == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(is_admissible(tr.snapshots[2], 1e-12));
}
