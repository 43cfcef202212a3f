#pragma once

#include <functional>
#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/spectral_field.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

// kappa_c(tau) = (8 pi / 3) int r^4 rho_tilde^2 cos(r tau) dr,
// kappa_s(tau) = (8 pi / 3) int r^3 rho_tilde^2 sin(r tau) dr, tabulated at tau_n = n dt.
struct MemoryKernels {
  double dt = 0.0;
  std::vector<double> tau, kappa_cos, kappa_sin;

  // Cubic (Catmull-Rom) interpolation between nodes; the kernels are even/odd in tau.
  double cos_at(double t) const;
  double sin_at(double t) const;
};

MemoryKernels build_kernels(const ChargeProfile& profile, double dt, double t_end);

// Single-node radial quadrature of the two kernels.
double kappa_cos(const ChargeProfile& profile, double tau);
double kappa_sin(const ChargeProfile& profile, double tau);

// Grid tensors sum rho_tilde^2 (|k|^2 delta_ij - k_i k_j) f(|k| tau) dk^3 with f = cos, and
// f = sin(|k| tau)/|k| for the sine kernel; isotropy makes them kappa times the identity.
Mat3 kappa_cos_tensor_grid(const ModeTable& table, double tau);
Mat3 kappa_sin_tensor_grid(const ModeTable& table, double tau);

// Free-field forcings generated by initial data (e0, b0):
//   T21(t) = sum rho_tilde [-i cos(|k|t) (k x e0) - |k| sin(|k|t) b0],
//   W(t)   = sum rho_tilde [i (sin(|k|t)/|k|) (k x e0) - cos(|k|t) b0],   T31 = omega(t) x W(t).
// Built once from per-shell partial sums; each evaluation then costs one pass over the shells.
class Forcing {
 public:
  Forcing(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat);

  Vec3 T21(double t) const;
  Vec3 W(double t) const;
  Vec3 T31(double t, const Vec3& omega_t) const { return omega_t.cross(W(t)); }
  bool zero() const { return zero_; }

 private:
  std::vector<double> r_;
  std::vector<Vec3> ke_, rb_, keor_, b_;  // per shell: sum rho_t Re(-i k x e0), |k| rho_t b0, ...
  bool zero_ = true;
};

Vec3 forcing_T21(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat,
                 double t);
Vec3 forcing_T31(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat,
                 double t, const Vec3& omega_t);

// x-space forms: freely evolve (e0, b0) to t, synthesise on a cube around the support and integrate
// int (x ^ e) rho dx and omega x int x (x . b) rho dx.
Vec3 forcing_T21_xspace(const ChargeProfile& profile, const FieldState& init, double t, int points_per_axis = 49);
Vec3 forcing_T31_xspace(const ChargeProfile& profile, const FieldState& init, double t, const Vec3& omega_t,
                        int points_per_axis = 49);

struct VolterraSpec {
  double dt = 0.01;
  double t_end = 10.0;
  int max_iterations = 10;
  double iteration_tol = 1e-15;  // relative change of the endpoint
};

struct VolterraRow {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
  double t21_norm = 0.0, t31_norm = 0.0;
};

// I Omega' = K x Omega + T21 + omega(t) x W - int_0^t kappa_c(t-s) Omega(s) ds
//            + omega(t) x int_0^t kappa_s(t-s) Omega(s) ds,
// trapezoidal product integration with a fixed-point iteration for the implicit endpoint.
// An empty omega_traj means the constant omega_base.
std::vector<VolterraRow> solve_volterra(const ChargeProfile& profile, const Vec3& omega_base, const Vec3& omega0,
                                        const Forcing* forcing, const OmegaTrajectory& omega_traj,
                                        const VolterraSpec& spec);
std::vector<VolterraRow> solve_volterra(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& init,
                                        const OmegaTrajectory& omega_traj, const VolterraSpec& spec);

// Time after which free data supported in |x| <= R no longer reaches the charge support.
double huygens_cutoff(double R, const ChargeProfile& profile);

}  // namespace spincharge
