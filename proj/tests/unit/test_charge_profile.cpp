#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "spincharge/charge_profile.hpp"
#include "spincharge/soliton.hpp"

using namespace spincharge;
using testutil::rel;

namespace {

const ChargeProfile& charged() {
  static const ChargeProfile p{};
  return p;
}

const ChargeProfile& neutral() {
  static const ChargeProfile p{ProfileSpec{ProfileKind::neutral}};
  return p;
}

}  // namespace

TEST_CASE("eval_rho: support, origin value and calibration") {
  const ChargeProfile& p = charged();
  CHECK(p.eval_rho(2.0) == 0.0);
  CHECK(p.eval_rho(1.0) == 0.0);
  CHECK(p.eval_rho(0.0) == doctest::Approx(p.amplitude()).epsilon(1e-15));
  CHECK(rel(p.amplitude(), oracle::charged::amplitude) < 1e-13);
  CHECK(rel(p.total_charge(), 1.0) < 1e-13);
  CHECK_THROWS_AS(p.eval_rho(-0.1), DomainError);
  for (double s : {1.0 + 1e-12, 1.5, 3.0, 100.0}) CHECK(p.eval_rho(s) == 0.0);
}

TEST_CASE("neutral profile: zero charge, beta = 7, positive inertia") {
  const ChargeProfile& p = neutral();
  CHECK(p.kind() == ProfileKind::neutral);
  CHECK(std::abs(p.total_charge()) < 1e-14);
  CHECK(std::abs(p.radial_fourier(0.0)) < 1e-15);
  CHECK(rel(p.neutralizer(), oracle::neutral::beta) < 1e-13);
  CHECK(rel(p.amplitude(), oracle::neutral::amplitude) < 1e-13);
  CHECK(rel(p.moment_of_inertia(), oracle::neutral::I) < 1e-13);
  CHECK(p.moment_of_inertia() > 0.0);
}

TEST_CASE("radial_fourier against the independent radial oracle") {
  CHECK(rel(charged().radial_fourier(0.0), fourier_norm) < 1e-14);
  CHECK(rel(charged().radial_fourier(1.0), oracle::charged::rho_hat_1) < 1e-12);
  CHECK(rel(charged().radial_fourier(5.0), oracle::charged::rho_hat_5) < 1e-12);
  CHECK(rel(neutral().radial_fourier(1.0), oracle::neutral::rho_hat_1) < 1e-10);
  CHECK(rel(neutral().radial_fourier(5.0), oracle::neutral::rho_hat_5) < 1e-12);
  CHECK_THROWS_AS(charged().radial_fourier(-1.0), DomainError);
}

TEST_CASE("radial_fourier at |k| = 1 against a 3-D Cartesian transform") {
  // (2 pi)^{-3/2} int cos(x_1) rho(|x|) dx over the support cube
  const ChargeProfile& p = charged();
  const double v = fourier_norm * testutil::cube_trapezoid(1.0, 121, [&](const Vec3& x) {
    return std::cos(x[0]) * p.eval_rho(x.norm());
  });
  CHECK(rel(p.radial_fourier(1.0), v) < 1e-8);
}

TEST_CASE("rho_tilde: origin limit, finite differences and oracle values") {
  for (const ChargeProfile* p : {&charged(), &neutral()}) {
    // rho_r' is odd: rho_r'(r) = rho_tilde(0) r + c r^3 + ...; Richardson on h, 2h
    const double h = 1e-2;
    const double fd = (4.0 * p->rho_r_prime(h) / h - p->rho_r_prime(2 * h) / (2 * h)) / 3.0;
    CHECK(rel(p->rho_tilde(0.0), fd) < 1e-6);
    CHECK((p->rho_tilde(0.0) < 0) == (fd < 0));
    CHECK(rel(p->rho_tilde(1e-9), p->rho_tilde(0.0)) < 1e-12);
  }
  CHECK(rel(charged().rho_tilde(0.0), oracle::charged::rho_tilde_0) < 1e-12);
  CHECK(rel(charged().rho_tilde(1.0), oracle::charged::rho_tilde_1) < 1e-12);
  CHECK(rel(charged().rho_tilde(5.0), oracle::charged::rho_tilde_5) < 1e-11);
  CHECK(rel(neutral().rho_tilde(0.0), oracle::neutral::rho_tilde_0) < 1e-12);
  CHECK(rel(neutral().rho_tilde(1.0), oracle::neutral::rho_tilde_1) < 1e-12);
}

TEST_CASE("rho_tilde decays at the algebraic rate of the C7 bump") {
  // the (1 - s^2)^8 edge makes rho_hat ~ r^-10 and rho_tilde ~ r^-11: the r^11 envelope is
  // flat while the r^10 envelope falls like 1/r. Beyond r ~ 100 rho_tilde sits below the
  // roundoff of the transform sum, so the windows stop there.
  const ChargeProfile& p = charged();
  auto envelope = [&](double a, double b, int power) {
    double m = 0.0;
    for (double r = a; r < b; r += 0.01) m = std::max(m, std::pow(r, power) * std::abs(p.rho_tilde(r)));
    return m;
  };
  const double e11a = envelope(20, 40, 11), e11b = envelope(70, 100, 11);
  CHECK(e11b < 1.2 * e11a);
  CHECK(e11b > 0.8 * e11a);
  CHECK(envelope(70, 100, 10) < 0.35 * envelope(20, 40, 10));
}

TEST_CASE("moment of inertia") {
  const double R = 1.3;
  const ChargeProfile ball = ChargeProfile::from_radial([&](double) { return 3.0 / (4.0 * pi * R * R * R); }, R);
  CHECK(rel(ball.moment_of_inertia(), 0.4 * R * R) < 1e-13);
  CHECK(rel(charged().moment_of_inertia(), 2.0 / 21.0) < 1e-13);
  CHECK(rel(charged().moment_of_inertia_kspace(), charged().moment_of_inertia()) < 1e-12);
  CHECK(rel(neutral().moment_of_inertia_kspace(), neutral().moment_of_inertia()) < 1e-12);
  CHECK(rel(charged().scaled(2.0).moment_of_inertia(), 2.0 * charged().moment_of_inertia()) < 1e-14);
  CHECK_THROWS_AS(charged().scaled(-1.0), PreconditionError);
}

TEST_CASE("alpha_rho") {
  const Vec3 w(0.3, -0.4, 1.2);
  for (const ChargeProfile* p : {&charged(), &neutral()}) {
    const Vec3 ratio = K_vector(*p, w) / p->moment_of_inertia();
    CHECK((ratio - p->alpha_rho() * w).norm() < 1e-8 * w.norm() * std::abs(p->alpha_rho()));
    CHECK(rel(p->scaled(2.0).alpha_rho(), 2.0 * p->alpha_rho()) < 1e-12);
    ProfileSpec fine = p->spec();
    fine.quadrature_points *= 2;
    CHECK(rel(ChargeProfile(fine).alpha_rho(), p->alpha_rho()) < 1e-8);
    // the printed ratio of k-space integrals has a denominator that vanishes identically
    CHECK(std::abs(p->laplacian_integral()) < 1e-7 * std::abs(p->rho_tilde_laplacian_integral()));
    CHECK(rel(p->rho_tilde_laplacian_integral(), 1.5 * p->rho_tilde_sq_integral()) < 1e-8);
  }
  CHECK(rel(charged().alpha_rho(), oracle::charged::alpha) < 1e-10);
  CHECK(rel(neutral().alpha_rho(), oracle::neutral::alpha) < 1e-10);
  CHECK(rel(charged().rho_tilde_sq_integral(), oracle::charged::rho_tilde_sq_integral) < 1e-10);
  CHECK(rel(neutral().rho_tilde_sq_integral(), oracle::neutral::rho_tilde_sq_integral) < 1e-10);
}

TEST_CASE("Parseval: x-space int rho^2 equals k-space int rho_hat^2") {
  for (const ChargeProfile* p : {&charged(), &neutral()}) {
    const double x_side = testutil::cube_trapezoid(1.0, 101, [&](const Vec3& x) {
      const double v = p->eval_rho(x.norm());
      return v * v;
    });
    const KTable& t = p->ktable();
    double k_side = 0.0;
    for (std::size_t i = 0; i < t.r.size(); ++i) k_side += t.w[i] * t.r[i] * t.r[i] * t.rho_hat[i] * t.rho_hat[i];
    k_side *= 4.0 * pi;
    CHECK(rel(k_side, x_side) < 1e-8);
  }
}

TEST_CASE("radial integrals converge under refinement") {
  for (ProfileKind kind : {ProfileKind::charged, ProfileKind::neutral}) {
    const ChargeProfile a(ProfileSpec{kind, 1.0, 1024}), b(ProfileSpec{kind, 1.0, 2048});
    CHECK(rel(a.moment_of_inertia(), b.moment_of_inertia()) < 1e-8);
    CHECK(rel(a.rho_tilde_sq_integral(), b.rho_tilde_sq_integral()) < 1e-8);
    CHECK(rel(a.radial_fourier(3.0), b.radial_fourier(3.0)) < 1e-8);
  }
}

TEST_CASE("profile construction errors") {
  CHECK_THROWS_AS(ChargeProfile(ProfileSpec{ProfileKind::charged, 0.0, 2048}), PreconditionError);
  CHECK_THROWS_AS(ChargeProfile(ProfileSpec{ProfileKind::charged, 1.0, 2}), PreconditionError);
  CHECK_THROWS_AS(profile_kind_from_string("positronic"), PreconditionError);
  CHECK(profile_kind_from_string(to_string(ProfileKind::neutral)) == ProfileKind::neutral);
}
