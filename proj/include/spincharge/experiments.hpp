#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/dynamics.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/spectral_field.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

// S(x) = s(x) / (s(x) + s(1 - x)), s(x) = exp(-1/x) for x > 0; C-infinity, 0 below 0, 1 above 1.
double smoothstep(double x);
double smoothstep_derivative(double x);

// Frame whose first axis is omega_hat (identity when omega = 0): columns are the rotated axes.
Mat3 frame_for(const Vec3& omega);

// Mirrored bump pair with plateau height d and centres +-a, a = c * (second frame axis).
struct BumpSpec {
  double d = 1.0;
  double c = 8.0;
  Mat3 frame = Mat3::Identity();
};

// alpha(r) = d on [0, 1], 0 on [2, inf), d S(2 - r) in between; f = alpha'.
double bump_alpha(const BumpSpec& spec, double r);
double bump_f(const BumpSpec& spec, double r);
// int_{R^3} f(|x|)^2 dx = 4 pi int_1^2 r^2 f^2 dr.
double bump_f_sq_integral(const BumpSpec& spec);

// e = curl (alpha(|x-a|) + alpha(|x+a|), 0, 0), b = curl (0, alpha(|x-a|) - alpha(|x+a|), 0) in the
// rotated frame, mapped back to lab coordinates.
std::pair<Vec3, Vec3> bump_fields(const BumpSpec& spec, const Vec3& x);
// The same pair multiplied by c^{-1/2}.
std::pair<Vec3, Vec3> scaled_bump_fields(const BumpSpec& spec, const Vec3& x);

// m3 of the unscaled pair: (2c/3) int f^2 dx along the first frame axis.
struct ClosedMoments {
  Vec3 rotated = Vec3::Zero();
  Vec3 lab = Vec3::Zero();
};
ClosedMoments moments_closed(const BumpSpec& spec);

// Moments and norms of a bump pair by spherical quadrature around each centre (the fields vanish
// elsewhere). All quantities are for the pair multiplied by `scale`.
struct BumpMeasurement {
  double norm_e = 0.0, norm_b = 0.0;
  Vec3 m1 = Vec3::Zero(), m2 = Vec3::Zero(), m3 = Vec3::Zero();
  double e_dot_E = 0.0, b_dot_B = 0.0;  // int e . E_omega, int b . B_omega
};
BumpMeasurement measure_bumps(const BumpSpec& spec, const ChargeProfile& profile, const Vec3& omega, double scale,
                              int radial_nodes = 96, int angular_nodes = 24);

// m3 by brute-force Cartesian quadrature over the two support cubes (oracle).
Vec3 m3_cartesian(const BumpSpec& spec, int points_per_axis = 81);

// d such that m~ = (2/3) int f^2 dx sits at the minimiser I omega_1 of g(m~) = m~^2/(2I) - omega_1 m~,
// i.e. strictly inside the root interval of g = -epsilon.
struct DChoice {
  double d = 0.0;
  double m_tilde = 0.0;
  double root_lo = 0.0, root_hi = 0.0;
  double g = 0.0;
};
DChoice choose_d(const ChargeProfile& profile, const Vec3& omega, double epsilon);

struct InstabilityPoint {
  double c = 0.0;
  double norm_e = 0.0, norm_b = 0.0, norm = 0.0;  // norm = |e| + |b|
  Vec3 m1 = Vec3::Zero(), m2 = Vec3::Zero(), m3 = Vec3::Zero();
  double m3_closed = 0.0;
  double delta_H = 0.0;         // assembled: m^2/(2I) - omega.m3 + (|e|^2 + |b|^2)/2
  double delta_H_direct = 0.0;  // before the variational equations are used
  double g_part = 0.0;          // m~^2/(2I) - omega_1 m~
};

struct InstabilityReport {
  Vec3 omega = Vec3::Zero();
  double epsilon = 0.0, I = 0.0, d = 0.0, m_tilde = 0.0;
  std::vector<InstabilityPoint> points;
  double slope_norm_e = 0.0, slope_m1 = 0.0, slope_m2 = 0.0;
  bool m1_identically_zero = false;
  bool criterion_met = false;  // at the largest c: norm < 0.05 and delta_H <= -epsilon/2
};

// Charged profiles are refused: the soliton angular momentum is infinite.
InstabilityReport instability_scan(const ChargeProfile& profile, const Vec3& omega, double epsilon,
                                   const std::vector<double>& c_list);

// Least-squares slope of log y against log x (non-positive y entries are skipped; NaN if < 2 remain).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Admissible perturbation supported in |x| <= R: curls of compact radial bumps placed in mirrored
// pairs (even potential for e, odd potential for b), plus an angular-velocity kick.
struct PerturbationSpec {
  double R = 3.0;
  double bump_radius = 1.5;
  int pairs = 2;
  double omega_fraction = 0.3;  // share of the L-norm carried by Omega_0
  bool fields = true;           // false: pure-Omega perturbation
  std::uint64_t seed = 1;
};

// (Omega_0, e_0, b_0) with |Omega_0| + |e_0| + |b_0| = delta.
FieldState make_perturbation(const KGrid& grid, const PerturbationSpec& spec, double delta);

struct StabilityPoint {
  double delta = 0.0;
  double sup_norm = 0.0;
  double ratio = 0.0;
  double max_energy_drift = 0.0;
  double max_forcing_after_cutoff = 0.0;  // relative to the forcing peak
  double max_constraint_defect = 0.0;
};

struct StabilityReport {
  Vec3 omega = Vec3::Zero();
  double R = 0.0, T_bar = 0.0;
  std::vector<StabilityPoint> points;
  double ratio_spread = 0.0;  // (max - min) / min over the delta sweep
};

StabilityReport stability_scan(const ChargeProfile& profile, const Vec3& omega, const KGrid& grid,
                               const PerturbationSpec& pspec, const std::vector<double>& delta_list,
                               const IntegratorSpec& ispec);

}  // namespace spincharge
