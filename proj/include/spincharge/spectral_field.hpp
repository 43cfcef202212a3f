#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

// Perturbation fields (e_hat, b_hat) on a k-grid plus the angular-velocity perturbation.
struct FieldState {
  KGrid grid;
  std::vector<CVec3> e_hat, b_hat;
  Vec3 omega_pert = Vec3::Zero();
  double time = 0.0;

  static FieldState zero(const KGrid& grid);
};

using OmegaTrajectory = std::function<Vec3(double)>;

// Per-node orthogonal projection: transverse part, then k -> -k symmetrisation
// (e odd, b even), then e purely imaginary / b purely real.
FieldState project_constraints(const FieldState& state);

// Exact free Maxwell flow over dt: transverse components rotate, longitudinal ones are static.
FieldState propagate_free(const FieldState& state, double dt);

// Duhamel increment over [t0, t0 + dt] for the current j_hat = i rho_tilde (Omega x k),
// with Omega frozen at omega_traj(t0 + dt/2) and the kernel integrated exactly.
FieldState add_source_step(const FieldState& state, const ModeTable& table, const OmegaTrajectory& omega_traj,
                           double t0, double dt);

// Constraint defects relative to the largest field magnitude on the grid.
struct ConstraintDefects {
  double parity_e = 0, parity_b = 0;  // |f(k) -/+ f(-k)|
  double phase_e = 0, phase_b = 0;    // |Re e_hat|, |Im b_hat|
  double div_e = 0, div_b = 0;        // |k_hat . f|
  double max() const;
};
ConstraintDefects constraint_defects(const FieldState& state);
bool is_admissible(const FieldState& state, double tol = 1e-10);

double l2_norm(const KGrid& grid, const std::vector<CVec3>& f);
// (1/2) int (|e|^2 + |b|^2) dk
double field_energy(const FieldState& state);

// Tensor-product x-space sampling grid: origin + (i, j, l) * spacing.
struct XGridSpec {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<int, 3> count{1, 1, 1};

  std::size_t size() const { return static_cast<std::size_t>(count[0]) * count[1] * count[2]; }
  Vec3 point(std::size_t idx) const;
};

// The x-lattice dual to the k-grid; synthesis followed by analysis on it is the identity.
XGridSpec natural_x_grid(const KGrid& grid);

struct RealFields {
  XGridSpec spec;
  std::vector<Vec3> e, b;
  double imag_residue = 0.0;      // largest |Im| relative to the largest |Re|
  bool aliasing_warning = false;  // extent < pi / dk along some axis
};

// f(x) = (2 pi)^{-3/2} sum_k f_hat(k) e^{ik.x} dk^3, evaluated on an arbitrary tensor grid.
std::vector<CVec3> synthesize_field(const KGrid& grid, const std::vector<CVec3>& f_hat, const XGridSpec& spec);
// f_hat(k) = (2 pi)^{-3/2} sum_x f(x) e^{-ik.x} dx^3.
std::vector<CVec3> analyze_field(const XGridSpec& spec, const std::vector<CVec3>& f, const KGrid& grid);

RealFields synthesize_x(const FieldState& state, const XGridSpec& spec);
FieldState analyze_x(const RealFields& fields, const KGrid& grid);

struct Diagnostics {
  double H_pert = 0.0;      // I |Omega|^2 / 2 + (1/2) int (|e|^2 + |b|^2)
  double H_total = 0.0;     // energy of (omega + Omega, E_omega + e, B_omega + b) on the grid
  double norm_e = 0.0, norm_b = 0.0;
  Vec3 momentum = Vec3::Zero();  // int E x B dx of the total fields
  double momentum_imag = 0.0;
  std::optional<Vec3> angular_momentum;  // neutral profiles only; empty means undefined
  double weighted_e = 0.0, weighted_b = 0.0;  // int |x| |e|^2, int |x| |b|^2
};

Diagnostics diagnostics(const FieldState& state, const ChargeProfile& profile, const Vec3& omega_base,
                        bool with_moments = true);

}  // namespace spincharge
