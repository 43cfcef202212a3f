#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spincharge/quadrature.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

enum class ProfileKind { charged, neutral };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& s);

struct ProfileSpec {
  ProfileKind kind = ProfileKind::charged;
  double support_radius = 1.0;
  int quadrature_points = 2048;
};

// rho_hat = rho_r(r), rho_tilde = rho_r'(r)/r, and rho_tilde'(r)/r, all even in r.
struct RadialSample {
  double rho_hat = 0.0;
  double rho_tilde = 0.0;
  double rho_tilde_dr_over_r = 0.0;
};

// Radial k-space table: composite Gauss-Legendre nodes on [0, k_cut] with the
// transform values at every node. Integrals over R^3 of radial functions are
// 4*pi * sum w r^2 f(r).
struct KTable {
  std::vector<double> r, w, rho_hat, rho_tilde, rho_tilde_dr_over_r;
};

// Radially symmetric smearing function rho(x) = rho_rad(|x|), supported in |x| <= R.
// Immutable after construction; copies share the lazily built k-table.
class ChargeProfile {
 public:
  explicit ChargeProfile(const ProfileSpec& spec = {});

  // Arbitrary radial shape (used for analytic test cases such as the uniform ball).
  static ChargeProfile from_radial(std::function<double(double)> rho_rad, double support_radius,
                                   int quadrature_points = 2048);

  // Same shape with the amplitude multiplied by `factor`.
  ChargeProfile scaled(double factor) const;

  ProfileKind kind() const;
  double amplitude() const;
  double support_radius() const;
  double neutralizer() const;
  int quadrature_points() const;
  ProfileSpec spec() const;

  double eval_rho(double s) const;
  double radial_fourier(double r) const;
  double rho_r_prime(double r) const;
  double rho_tilde(double r) const;
  RadialSample radial(double r) const;

  // (2/3) int x^2 rho dx by 1-D quadrature over the support.
  double moment_of_inertia() const;
  // The same quantity from k-space: I = -(2/3)(2 pi)^{3/2} Laplacian(rho_hat)(0) = -2 (2 pi)^{3/2} rho_tilde(0).
  double moment_of_inertia_kspace() const;
  double total_charge() const;

  // Radius beyond which |rho_hat| stays below 1e-14 * max |rho_hat|.
  double k_cutoff() const;
  const KTable& ktable() const;

  // int rho_tilde^2 dk over R^3.
  double rho_tilde_sq_integral() const;
  // int Laplacian_k(rho_hat) dk over R^3; zero for every admissible profile.
  double laplacian_integral() const;
  // int rho_tilde * Laplacian_k(rho_hat) dk = (3/2) int rho_tilde^2 dk.
  double rho_tilde_laplacian_integral() const;
  // Scalar alpha with K / I = alpha * omega.
  double alpha_rho() const;

  // x-space radial moments used by the real-space soliton fields:
  // int_0^r s^2 rho, int_0^r s^4 rho, int_r^R s rho.
  double enclosed_charge_moment(double r) const;
  double enclosed_fourth_moment(double r) const;
  double outer_first_moment(double r) const;

  // Radial x-space nodes (for oracle quadratures).
  const QuadRule& radial_rule() const;

 private:
  struct Impl;
  explicit ChargeProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Reference calibration constant of the default bump: 4 pi int_0^1 s^2 (1-s^2)^8 ds = 1 / A.
double default_bump_amplitude(double support_radius);

}  // namespace spincharge
