#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "spincharge/experiments.hpp"
#include "spincharge/volterra.hpp"

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

VolterraSpec vspec(double t_end, double dt = 0.02) {
  VolterraSpec s;
  s.dt = dt;
  s.t_end = t_end;
  return s;
}

}  // namespace

TEST_CASE("memory kernels against the radial oracle") {
  CHECK(kappa_sin(charged(), 0.0) == 0.0);
  CHECK(rel(kappa_cos(charged(), 0.0), oracle::charged::kappa_cos_0) < 1e-12);
  CHECK(rel(kappa_cos(charged(), 1.0), oracle::charged::kappa_cos_1) < 1e-10);
  CHECK(rel(kappa_sin(charged(), 1.0), oracle::charged::kappa_sin_1) < 1e-10);
  CHECK(rel(kappa_cos(neutral(), 0.0), oracle::neutral::kappa_cos_0) < 1e-12);
  CHECK(rel(kappa_cos(neutral(), 1.0), oracle::neutral::kappa_cos_1) < 1e-10);
  CHECK(rel(kappa_sin(neutral(), 1.0), oracle::neutral::kappa_sin_1) < 1e-10);
  const double h = 1e-4;
  CHECK(rel(kappa_sin(charged(), h) / h, kappa_cos(charged(), 0.0)) < 1e-6);
}

TEST_CASE("build_kernels: tabulation, bounds and interpolation") {
  const MemoryKernels k = build_kernels(charged(), 0.05, 6.0);
  REQUIRE(k.tau.size() >= 121);  // a couple of extra nodes past t_end for the cubic stencil
  CHECK(k.tau[120] == doctest::Approx(6.0));
  CHECK(k.kappa_sin[0] == 0.0);
  const double c0 = k.kappa_cos[0];
  CHECK(c0 > 0.0);
  for (std::size_t i = 0; i < k.tau.size(); ++i) {
    CHECK(std::abs(k.kappa_cos[i]) <= c0);
    CHECK(std::abs(k.kappa_sin[i]) <= c0);
  }
  CHECK(rel(k.kappa_cos[20], kappa_cos(charged(), 1.0)) < 1e-13);
  // off-node values: cubic interpolation, at least second order at these step sizes
  auto err = [&](double dt) {
    const MemoryKernels f = build_kernels(charged(), dt, 3.0);
    return std::max(std::abs(f.cos_at(1.013) - kappa_cos(charged(), 1.013)),
                    std::abs(f.sin_at(2.471) - kappa_sin(charged(), 2.471)));
  };
  const double e2 = err(0.02), e1 = err(0.01);
  CHECK(e1 < 1e-4 * c0);
  CHECK(e2 / e1 > 3.0);
  CHECK(k.cos_at(-1.0) == doctest::Approx(k.cos_at(1.0)));
  CHECK(k.sin_at(-1.0) == doctest::Approx(-k.sin_at(1.0)));
}

TEST_CASE("grid tensors reduce to the radial kernels times the identity") {
  const ModeTable table = ModeTable::build(KGrid(48, 20.0), charged());
  const double c0 = kappa_cos(charged(), 0.0);
  const Mat3 Tc = kappa_cos_tensor_grid(table, 1.0), Ts = kappa_sin_tensor_grid(table, 1.0);
  CHECK((Tc - kappa_cos(charged(), 1.0) * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-5 * c0);
  CHECK((Ts - kappa_sin(charged(), 1.0) * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-5 * c0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(Tc(i, j)) < 1e-15 * c0);
}

TEST_CASE("forcings: zero data and dual representation") {
  const KGrid g(32, 8.0);
  const ModeTable table = ModeTable::build(g, charged());
  const FieldState zero = FieldState::zero(g);
  const Forcing fz(table, zero.e_hat, zero.b_hat);
  CHECK(fz.zero());
  for (double t : {0.0, 0.5, 3.0}) {
    CHECK(fz.T21(t).norm() == 0.0);
    CHECK(fz.T31(t, Vec3(0, 0, 1)).norm() == 0.0);
  }

  PerturbationSpec ps;
  ps.seed = 17;
  const FieldState init = make_perturbation(g, ps, 1e-2);
  const Forcing f(table, init.e_hat, init.b_hat);
  const Vec3 w(0.2, 0.0, 1.0);
  CHECK(f.T31(0.7, Vec3::Zero()).norm() == 0.0);
  const Vec3 a = f.T21(0.7), b = forcing_T21_xspace(charged(), init, 0.7);
  CHECK((a - b).norm() < 1e-5 * a.norm());
  const Vec3 c = f.T31(0.7, w), d = forcing_T31_xspace(charged(), init, 0.7, w);
  CHECK((c - d).norm() < 1e-5 * c.norm());
  CHECK((forcing_T21(table, init.e_hat, init.b_hat, 0.7) - a).norm() < 1e-15 * a.norm() + 1e-300);
}

TEST_CASE("Huygens cutoff") {
  CHECK(huygens_cutoff(2.0, charged()) == 3.0);
  // data supported in |x| <= 3 stops forcing after T = 4, well inside the image-free window
  const KGrid g(64, 16.0);
  const ModeTable table = ModeTable::build(g, charged());
  PerturbationSpec ps;
  ps.seed = 5;
  const FieldState init = make_perturbation(g, ps, 1e-2);
  const Forcing f(table, init.e_hat, init.b_hat);
  const double T = huygens_cutoff(ps.R, charged());
  double peak = 0.0, late = 0.0;
  for (double t = 0.0; t < T; t += 0.02) peak = std::max(peak, f.T21(t).norm());
  for (double t = T + 0.05; t < 8.0; t += 0.02) late = std::max(late, f.T21(t).norm());
  CHECK(f.T21(T / 2).norm() > 1e-3 * peak);
  CHECK(late < 1e-6 * peak);
}

TEST_CASE("solve_volterra: zero, linearity, superposition and dt refinement") {
  const Vec3 w(0, 0, 1);
  const auto zero = solve_volterra(charged(), w, Vec3::Zero(), nullptr, {}, vspec(2.0));
  for (const VolterraRow& r : zero) CHECK(r.omega.norm() == 0.0);

  const Vec3 o1(1e-3, 0.0, 0.0), o2(0.0, 2e-3, 5e-4);
  const auto a = solve_volterra(charged(), w, o1, nullptr, {}, vspec(4.0));
  const auto a2 = solve_volterra(charged(), w, 2.0 * o1, nullptr, {}, vspec(4.0));
  const auto b = solve_volterra(charged(), w, o2, nullptr, {}, vspec(4.0));
  const auto ab = solve_volterra(charged(), w, o1 + o2, nullptr, {}, vspec(4.0));
  double lin = 0.0, sup = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin = std::max(lin, (a2[i].omega - 2.0 * a[i].omega).norm());
    sup = std::max(sup, (ab[i].omega - a[i].omega - b[i].omega).norm());
    peak = std::max(peak, a[i].omega.norm());
  }
  CHECK(lin < 1e-12 * o1.norm());
  CHECK(sup < 1e-10 * (o1 + o2).norm());
  CHECK(peak < 10.0 * o1.norm());

  // second order: the dt -> dt/2 change is about 4x the dt/2 -> dt/4 change
  const auto c1 = solve_volterra(charged(), w, o1, nullptr, {}, vspec(2.0, 0.04));
  const auto c2 = solve_volterra(charged(), w, o1, nullptr, {}, vspec(2.0, 0.02));
  const auto c4 = solve_volterra(charged(), w, o1, nullptr, {}, vspec(2.0, 0.01));
  const double d12 = (c1.back().omega - c2.back().omega).norm();
  const double d24 = (c2.back().omega - c4.back().omega).norm();
  CHECK(d12 / d24 > 3.0);
  CHECK(d12 / d24 < 5.0);
}

TEST_CASE("solve_volterra with field data matches the FieldState overload") {
  const KGrid g(16, 5.0);
  const ModeTable table = ModeTable::build(g, charged());
  PerturbationSpec ps;
  const FieldState init = make_perturbation(g, ps, 1e-3);
  const Forcing f(table, init.e_hat, init.b_hat);
  const Vec3 w(0, 0, 1);
  const auto a = solve_volterra(charged(), w, init.omega_pert, &f, {}, vspec(1.0));
  const auto b = solve_volterra(charged(), w, init, {}, vspec(1.0));
  REQUIRE(a.size() == b.size());
  CHECK((a.back().omega - b.back().omega).norm() < 1e-15);
  CHECK(a.back().t21_norm > 0.0);
}
