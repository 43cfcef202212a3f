#pragma once

#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/soliton.hpp"
#include "spincharge/spectral_field.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

// (1/I) [K x Omega + T2(e) - (omega + Omega) x S(b)] with T2 = -i sum rho_tilde (k x e_hat) dk^3 and
// S = sum rho_tilde b_hat dk^3; K in closed form.
Vec3 torque_rhs(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& state);
// Same torque with K, T2, S all taken from grid sums (what the integrator uses).
Vec3 torque_rhs_grid(const ChargeProfile& profile, const ModeTable& table, const Vec3& omega_base,
                     const FieldState& state);
// Oracle: synthesises e, b on a fine cube around the support and integrates
// (1/I)[K x Omega + int x ^ (e + ((omega + Omega) ^ x) ^ b) rho dx] by the trapezoid rule.
Vec3 torque_xspace(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& state,
                   int points_per_axis = 49);

struct IntegratorSpec {
  double dt = 0.01;
  double t_end = 20.0;
  int projection_every = 100;
  // Fixed-point sweeps of the midpoint corrector. One sweep gives a second-order
  // predictor-corrector; iterating to convergence makes the discrete energy exact.
  int corrector_sweeps = 1;
  double energy_tol = 1e-6;  // relative; the run aborts beyond 100x this
  int record_every = 1;
  std::vector<double> snapshot_times;
};

struct TrajectoryRow {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();  // Omega for perturbation runs, omega(t) for absolute runs
  double H_total = 0.0;
  double H_pert = 0.0;
  double norm_e = 0.0, norm_b = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<FieldState> snapshots;
  double max_rel_energy_drift = 0.0;
  double max_constraint_defect = 0.0;  // largest per-mode drift seen right before each projection
  int steps = 0;
};

// Perturbation (Omega, e, b) around the soliton with angular velocity omega_base.
Trajectory evolve(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& init,
                  const IntegratorSpec& spec);

// Absolute system; init.omega_pert carries the full angular velocity omega(0) and the fields are
// the total (E_hat, B_hat). Deviation columns are measured against the soliton of `omega_ref`.
Trajectory evolve_absolute(const ChargeProfile& profile, const FieldState& init, const IntegratorSpec& spec,
                           const Vec3& omega_ref);
Trajectory evolve_absolute(const ChargeProfile& profile, const FieldState& init, const IntegratorSpec& spec);

// Exact soliton (plus optional perturbation) as an absolute state on a grid.
FieldState soliton_total_state(const ModeTable& table, const Vec3& omega, const FieldState* perturbation = nullptr);

// Constraint defects of an absolute state: parity and phase as for perturbations, the Gauss
// law ik.E = rho_hat in place of transversality of E.
struct AbsoluteDefects {
  double parity = 0.0, phase = 0.0, gauss_e = 0.0, div_b = 0.0;
  double max() const;
};
AbsoluteDefects absolute_defects(const FieldState& state, const ModeTable& table);

}  // namespace spincharge
