#pragma once

#include <utility>
#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/kgrid.hpp"
#include "spincharge/spectral_field.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

using CMat3 = Eigen::Matrix3cd;

// Soliton fields at a single mode, given the radial data at r = |k|.
struct SolitonMode {
  CVec3 E = CVec3::Zero();
  CVec3 B = CVec3::Zero();
};
SolitonMode soliton_mode(const Vec3& k, double r, double rho_hat, double rho_tilde, const Vec3& omega);

// Jacobians J(i, j) = d E_hat_i / d k_j and d B_hat_i / d k_j.
struct SolitonJacobian {
  CMat3 dE = CMat3::Zero();
  CMat3 dB = CMat3::Zero();
};
SolitonJacobian soliton_jacobian(const Vec3& k, double r, const RadialSample& s, const Vec3& omega);

// Stationary rotating soliton (omega, E_omega, B_omega).
class Soliton {
 public:
  Soliton(ChargeProfile profile, const Vec3& omega);

  const ChargeProfile& profile() const { return profile_; }
  const Vec3& omega() const { return omega_; }

  // (E_hat, B_hat) at k; zero at the origin.
  std::pair<CVec3, CVec3> eval_k(const Vec3& k) const;
  // B_hat = -k x (omega x grad rho_hat) / k^2, written out as a double cross product.
  CVec3 b_cross_form(const Vec3& k) const;
  // B_hat = rho_r' ((k.omega) k - k^2 omega) / |k|^3.
  CVec3 b_component_form(const Vec3& k) const;
  SolitonJacobian jacobian_k(const Vec3& k) const;

  // Real-space fields: E = x Q(r) / r^3, B = 2 g omega + (g'/r)(r^2 omega - x (x.omega)).
  Vec3 e_x(const Vec3& x) const;
  Vec3 b_x(const Vec3& x) const;

  // Closed-form fields sampled on every node of a grid.
  std::pair<std::vector<CVec3>, std::vector<CVec3>> on_grid(const ModeTable& table) const;

 private:
  ChargeProfile profile_;
  Vec3 omega_;
  double q_outer_, j_outer_;  // moments over the whole support
};

// Largest per-mode defect of Ampere, Faraday and both Gauss laws, plus the norm of the
// net torque (grid sum), for the soliton's own fields or for supplied ones.
double stationary_residual(const Soliton& sol, const KGrid& grid);
double stationary_residual(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                           const std::vector<CVec3>& b_hat);

// I |omega|^2 / 2 + (1/2) int (|E_hat|^2 + |B_hat|^2) dk, radial quadrature with exact angular average.
double soliton_energy(const Soliton& sol);
// Same energy as a grid sum (oracle).
double soliton_energy_grid(const Soliton& sol, const ModeTable& table);

// K = -int x (x.B_omega) rho dx = -(2/3) omega int rho_tilde^2 dk.
Vec3 K_vector(const ChargeProfile& profile, const Vec3& omega);
// The reduction -(2/3) omega int rho_tilde Laplacian(rho_hat) dk; 3/2 times K.
Vec3 K_vector_literal(const ChargeProfile& profile, const Vec3& omega);
// Direct spherical-product quadrature of -int x (x.B_omega(x)) rho(x) dx.
Vec3 K_vector_xspace(const ChargeProfile& profile, const Vec3& omega, int angular_nodes = 24);
// Grid analogue consistent with the discrete torque: -(2/3) omega sum rho_tilde^2 dk^3.
Vec3 K_vector_grid(const ModeTable& table, const Vec3& omega);

// Field part (2/3) omega int rho_tilde^2 dk of the soliton angular momentum.
Vec3 soliton_field_angular_momentum_closed(const ChargeProfile& profile, const Vec3& omega);
// M_omega = omega (I + (2/3) int rho_tilde^2 dk); neutral profiles only.
Vec3 soliton_angular_momentum_closed(const ChargeProfile& profile, const Vec3& omega);
// I omega + i int [(div B_hat) conj(E_hat) + B_hat div conj(E_hat)] dk by radial x angular
// quadrature of the full vector integrand; neutral profiles only.
Vec3 soliton_angular_momentum_quadrature(const ChargeProfile& profile, const Vec3& omega, int angular_nodes = 24);

// Total angular momentum of (omega_base + Omega, E_omega + e, B_omega + b); empty for charged profiles.
std::optional<Vec3> angular_momentum(const FieldState& state, const ChargeProfile& profile, const Vec3& omega_base);

// int_{|x| < radius} |x| |E_omega|^2 dx and the same for B_omega (1-D radial quadrature).
std::pair<double, double> soliton_weighted_norms(const Soliton& sol, double radius);

struct Moments {
  Vec3 m1 = Vec3::Zero();  // int x ^ (E_omega ^ b)
  Vec3 m2 = Vec3::Zero();  // int x ^ (e ^ B_omega)
  Vec3 m3 = Vec3::Zero();  // int x ^ (e ^ b)
  Vec3 total() const { return m1 + m2 + m3; }
};

// m1, m2 via k-space moment identities with the analytic soliton Jacobian; m3 on the
// natural x-lattice of the grid.
Moments moments_m(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                  const std::vector<CVec3>& b_hat);

struct VariationalResidual {
  double first = 0.0;   // int E_omega.e - omega.m2
  double second = 0.0;  // int B_omega.b - omega.m1
};

// Both stationary variational equations at the soliton; rejects inadmissible (e, b).
VariationalResidual variational_residual(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                                         const std::vector<CVec3>& b_hat, double admissibility_tol = 1e-9);

// m^2 / (2I) - omega.m3 + (1/2)(|e|^2 + |b|^2).
double energy_increment(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                        const std::vector<CVec3>& b_hat);

}  // namespace spincharge
