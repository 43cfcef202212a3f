#include "spincharge/soliton.hpp"

#include <algorithm>
#include <cmath>

#include "spincharge/parallel.hpp"
#include "spincharge/quadrature.hpp"

namespace spincharge {

namespace {

const cplx I1(0.0, 1.0);

// Gauss-Legendre in cos(theta) times the trapezoid rule in phi.
struct SphereRule {
  std::vector<Vec3> dir;
  std::vector<double> w;  // sums to 4 pi
};

SphereRule sphere_rule(int n) {
  SphereRule s;
  const QuadRule u = gauss_legendre(n, -1.0, 1.0);
  const int m = 2 * n;
  for (std::size_t a = 0; a < u.size(); ++a) {
    const double st = std::sqrt(1.0 - u.x[a] * u.x[a]);
    for (int p = 0; p < m; ++p) {
      const double phi = 2.0 * pi * (p + 0.5) / m;
      s.dir.emplace_back(st * std::cos(phi), st * std::sin(phi), u.x[a]);
      s.w.push_back(u.w[a] * 2.0 * pi / m);
    }
  }
  return s;
}

void require_neutral(const ChargeProfile& profile, const char* what) {
  if (profile.kind() != ProfileKind::neutral)
    throw PreconditionError(std::string(what) +
                            ": the soliton of a charged profile has infinite angular momentum (weighted norms diverge)");
}

}  // namespace

SolitonMode soliton_mode(const Vec3& k, double r, double rho_hat, double rho_tilde, const Vec3& omega) {
  SolitonMode m;
  if (r == 0.0) return m;
  const double r2 = r * r;
  m.E = (-I1 * (rho_hat / r2)) * k.cast<cplx>();
  m.B = (rho_tilde * (k.dot(omega) / r2 * k - omega)).cast<cplx>();
  return m;
}

SolitonJacobian soliton_jacobian(const Vec3& k, double r, const RadialSample& s, const Vec3& omega) {
  SolitonJacobian J;
  if (r == 0.0) return J;
  const double r2 = r * r, r4 = r2 * r2;
  const double kw = k.dot(omega);
  const Mat3 kk = k * k.transpose();
  const Mat3 dE = Mat3::Identity() * (s.rho_hat / r2) + kk * (s.rho_tilde / r2 - 2.0 * s.rho_hat / r4);
  J.dE = -I1 * dE.cast<cplx>();
  const Vec3 v = kw / r2 * k - omega;
  const Mat3 dB = s.rho_tilde_dr_over_r * v * k.transpose() +
                  s.rho_tilde * (k * omega.transpose() / r2 + Mat3::Identity() * (kw / r2) - kk * (2.0 * kw / r4));
  J.dB = dB.cast<cplx>();
  return J;
}

Soliton::Soliton(ChargeProfile profile, const Vec3& omega)
    : profile_(std::move(profile)),
      omega_(omega),
      q_outer_(profile_.enclosed_charge_moment(profile_.support_radius())),
      j_outer_(profile_.enclosed_fourth_moment(profile_.support_radius())) {}

std::pair<CVec3, CVec3> Soliton::eval_k(const Vec3& k) const {
  const double r = k.norm();
  const RadialSample s = profile_.radial(r);
  const SolitonMode m = soliton_mode(k, r, s.rho_hat, s.rho_tilde, omega_);
  return {m.E, m.B};
}

CVec3 Soliton::b_cross_form(const Vec3& k) const {
  const double r = k.norm();
  if (r == 0.0) return CVec3::Zero();
  const Vec3 grad = profile_.rho_tilde(r) * k;
  return (-k.cross(omega_.cross(grad)) / (r * r)).cast<cplx>();
}

CVec3 Soliton::b_component_form(const Vec3& k) const {
  const double r = k.norm();
  if (r == 0.0) return CVec3::Zero();
  return (profile_.rho_r_prime(r) * (k.dot(omega_) * k - r * r * omega_) / (r * r * r)).cast<cplx>();
}

SolitonJacobian Soliton::jacobian_k(const Vec3& k) const {
  const double r = k.norm();
  return soliton_jacobian(k, r, profile_.radial(r), omega_);
}

Vec3 Soliton::e_x(const Vec3& x) const {
  const double r = x.norm();
  if (r == 0.0) return Vec3::Zero();
  const double q = r >= profile_.support_radius() ? q_outer_ : profile_.enclosed_charge_moment(r);
  return x * (q / (r * r * r));
}

Vec3 Soliton::b_x(const Vec3& x) const {
  const double r = x.norm();
  const bool outside = r >= profile_.support_radius();
  const double J = outside ? j_outer_ : profile_.enclosed_fourth_moment(r);
  const double g = (r > 0.0 ? J / (r * r * r) : 0.0) / 3.0 + (outside ? 0.0 : profile_.outer_first_moment(r) / 3.0);
  if (r == 0.0) return 2.0 * g * omega_;
  const double gp_over_r = -J / (r * r * r * r * r);
  return 2.0 * g * omega_ + gp_over_r * (r * r * omega_ - x * x.dot(omega_));
}

std::pair<std::vector<CVec3>, std::vector<CVec3>> Soliton::on_grid(const ModeTable& table) const {
  const KGrid& g = table.grid;
  std::vector<CVec3> E(g.size()), B(g.size());
  par::for_blocks(g.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const SolitonMode m = soliton_mode(g.k(idx), table.r[idx], table.rho_hat[idx], table.rho_tilde[idx], omega_);
      E[idx] = m.E;
      B[idx] = m.B;
    }
  });
  return {std::move(E), std::move(B)};
}

double stationary_residual(const Soliton& sol, const KGrid& grid) {
  const ModeTable table = ModeTable::build(grid, sol.profile());
  const auto [E, B] = sol.on_grid(table);
  return stationary_residual(sol, table, E, B);
}

double stationary_residual(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                           const std::vector<CVec3>& b_hat) {
  const KGrid& g = table.grid;
  const Vec3& w = sol.omega();
  using Acc = Eigen::Matrix<double, 7, 1>;  // max defect, T2 (3), S (3)
  struct Sum {
    Acc a = Acc::Zero();
    Sum operator+(const Sum& o) const {
      Sum s;
      s.a = a + o.a;
      s.a[0] = std::max(a[0], o.a[0]);
      return s;
    }
  };
  const Sum s = par::reduce(g.size(), Sum{}, [&](std::size_t begin, std::size_t end) {
    Sum acc;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const CVec3 kc = k.cast<cplx>();
      const CVec3& E = e_hat[idx];
      const CVec3& B = b_hat[idx];
      const double rt = table.rho_tilde[idx];
      const CVec3 j = (I1 * rt) * w.cross(k).cast<cplx>();
      const double defect = (I1 * ccross(kc, B) - j).norm() + (I1 * ccross(kc, E)).norm() +
                            std::abs(I1 * kc.dot(E) - table.rho_hat[idx]) + std::abs(kc.dot(B));
      acc.a[0] = std::max(acc.a[0], defect);
      const CVec3 t2 = (-I1 * rt) * ccross(kc, E);
      acc.a.segment<3>(1) += t2.real();
      acc.a.segment<3>(4) += rt * B.real();
    }
    return acc;
  });
  const double dv = g.cell_volume();
  const Vec3 T2 = s.a.segment<3>(1) * dv;
  const Vec3 S = s.a.segment<3>(4) * dv;
  const Vec3 torque = T2 - w.cross(S);
  return s.a[0] + torque.norm();
}

double soliton_energy(const Soliton& sol) {
  const KTable& t = sol.profile().ktable();
  const double w2 = sol.omega().squaredNorm();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i];
    acc += t.w[i] * (t.rho_hat[i] * t.rho_hat[i] + r * r * (2.0 / 3.0) * t.rho_tilde[i] * t.rho_tilde[i] * w2);
  }
  return 0.5 * sol.profile().moment_of_inertia() * w2 + 0.5 * 4.0 * pi * acc;
}

double soliton_energy_grid(const Soliton& sol, const ModeTable& table) {
  const KGrid& g = table.grid;
  const double s = par::reduce(g.size(), 0.0, [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const SolitonMode m =
          soliton_mode(g.k(idx), table.r[idx], table.rho_hat[idx], table.rho_tilde[idx], sol.omega());
      acc += m.E.squaredNorm() + m.B.squaredNorm();
    }
    return acc;
  });
  return 0.5 * sol.profile().moment_of_inertia() * sol.omega().squaredNorm() + 0.5 * s * g.cell_volume();
}

Vec3 K_vector(const ChargeProfile& profile, const Vec3& omega) {
  return -(2.0 / 3.0) * profile.rho_tilde_sq_integral() * omega;
}

Vec3 K_vector_literal(const ChargeProfile& profile, const Vec3& omega) {
  return -(2.0 / 3.0) * profile.rho_tilde_laplacian_integral() * omega;
}

Vec3 K_vector_xspace(const ChargeProfile& profile, const Vec3& omega, int angular_nodes) {
  const Soliton sol(profile, omega);
  const SphereRule sph = sphere_rule(angular_nodes);
  const QuadRule rr = gauss_legendre_panels(16, 16, 0.0, profile.support_radius());
  Vec3 K = Vec3::Zero();
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double s = rr.x[i];
    const double rho = profile.eval_rho(s);
    Vec3 shell = Vec3::Zero();
    for (std::size_t a = 0; a < sph.dir.size(); ++a) {
      const Vec3 x = s * sph.dir[a];
      shell += sph.w[a] * x * x.dot(sol.b_x(x));
    }
    K -= rr.w[i] * s * s * rho * shell;
  }
  return K;
}

Vec3 K_vector_grid(const ModeTable& table, const Vec3& omega) {
  const double s = par::reduce(table.grid.size(), 0.0, [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t idx = begin; idx < end; ++idx) acc += table.rho_tilde[idx] * table.rho_tilde[idx];
    return acc;
  });
  return -(2.0 / 3.0) * s * table.grid.cell_volume() * omega;
}

Vec3 soliton_field_angular_momentum_closed(const ChargeProfile& profile, const Vec3& omega) {
  return (2.0 / 3.0) * profile.rho_tilde_sq_integral() * omega;
}

Vec3 soliton_angular_momentum_closed(const ChargeProfile& profile, const Vec3& omega) {
  require_neutral(profile, "soliton_angular_momentum_closed");
  return profile.moment_of_inertia() * omega + soliton_field_angular_momentum_closed(profile, omega);
}

Vec3 soliton_angular_momentum_quadrature(const ChargeProfile& profile, const Vec3& omega, int angular_nodes) {
  require_neutral(profile, "soliton_angular_momentum_quadrature");
  const KTable& t = profile.ktable();
  const SphereRule sph = sphere_rule(angular_nodes);
  Vec3 L = Vec3::Zero();
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i];
    if (r == 0.0) continue;
    const double rh = t.rho_hat[i], rt = t.rho_tilde[i];
    Vec3 shell = Vec3::Zero();
    for (std::size_t a = 0; a < sph.dir.size(); ++a) {
      const Vec3 k = r * sph.dir[a];
      const SolitonMode m = soliton_mode(k, r, rh, rt, omega);
      const cplx divB = 2.0 * rt * k.dot(omega) / (r * r);
      const cplx divE = -I1 * (rh / (r * r) + rt);
      const CVec3 v = I1 * (m.E.conjugate() * divB - m.B.conjugate() * divE);
      shell += sph.w[a] * v.real();
    }
    L += t.w[i] * r * r * shell;
  }
  return profile.moment_of_inertia() * omega + L;
}

std::optional<Vec3> angular_momentum(const FieldState& state, const ChargeProfile& profile, const Vec3& omega_base) {
  if (profile.kind() != ProfileKind::neutral) return std::nullopt;
  const ModeTable table = ModeTable::build(state.grid, profile);
  const Soliton sol(profile, omega_base);
  const Moments m = moments_m(sol, table, state.e_hat, state.b_hat);
  return profile.moment_of_inertia() * (omega_base + state.omega_pert) +
         soliton_field_angular_momentum_closed(profile, omega_base) + m.total();
}

std::pair<double, double> soliton_weighted_norms(const Soliton& sol, double radius) {
  const ChargeProfile& p = sol.profile();
  const double R = p.support_radius();
  const double w2 = sol.omega().squaredNorm();
  auto integrand = [&](double r, double& fe, double& fb) {
    const double Q = p.enclosed_charge_moment(r);
    const double J = p.enclosed_fourth_moment(r);
    const double g = J / (3.0 * r * r * r) + p.outer_first_moment(r) / 3.0;
    const double gp = -J / (r * r * r * r);
    fe = Q * Q / r;  // r^3 |E|^2
    fb = r * r * r * w2 * (4.0 * g * g + (8.0 / 3.0) * g * gp * r + (2.0 / 3.0) * gp * gp * r * r);
  };
  double e = 0.0, b = 0.0;
  auto add = [&](const QuadRule& q) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      double fe, fb;
      integrand(q.x[i], fe, fb);
      e += q.w[i] * fe;
      b += q.w[i] * fb;
    }
  };
  add(gauss_legendre_panels(8, 16, 0.0, std::min(radius, R)));
  if (radius > R) {
    // outer region: geometric panels resolve the 1/r and 1/r^3 tails
    double a = R;
    while (a < radius) {
      const double bnd = std::min(radius, 2.0 * a);
      add(gauss_legendre(16, a, bnd));
      a = bnd;
    }
  }
  return {4.0 * pi * e, 4.0 * pi * b};
}

Moments moments_m(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                  const std::vector<CVec3>& b_hat) {
  const KGrid& g = table.grid;
  const Vec3& w = sol.omega();
  using Acc = Eigen::Matrix<double, 6, 1>;
  const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
    Acc acc = Acc::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const double r = table.r[idx];
      const RadialSample s{table.rho_hat[idx], table.rho_tilde[idx], table.rho_tilde_dr_over_r[idx]};
      const SolitonJacobian J = soliton_jacobian(k, r, s, w);
      const CVec3& e = e_hat[idx];
      const CVec3& b = b_hat[idx];
      // m1 = i sum [(b.grad) E_hat - b div E_hat],  m2 = -i sum [e div B_hat - (e.grad) B_hat]
      const CVec3 m1 = I1 * (J.dE * b - b * J.dE.trace());
      const CVec3 m2 = -I1 * (e * J.dB.trace() - J.dB * e);
      acc.head<3>() += m1.real();
      acc.tail<3>() += m2.real();
    }
    return acc;
  });
  Moments m;
  m.m1 = a.head<3>() * g.cell_volume();
  m.m2 = a.tail<3>() * g.cell_volume();

  bool b_zero = true, e_zero = true;
  for (std::size_t i = 0; i < g.size() && (b_zero || e_zero); ++i) {
    if (!b_hat[i].isZero(0.0)) b_zero = false;
    if (!e_hat[i].isZero(0.0)) e_zero = false;
  }
  if (!b_zero && !e_zero) {
    FieldState st = FieldState::zero(g);
    st.e_hat = e_hat;
    st.b_hat = b_hat;
    const XGridSpec spec = natural_x_grid(g);
    const RealFields x = synthesize_x(st, spec);
    const double dx3 = std::pow(spec.spacing, 3);
    const Vec3 m3 = par::reduce(x.e.size(), Vec3(Vec3::Zero()), [&](std::size_t begin, std::size_t end) {
      Vec3 acc = Vec3::Zero();
      for (std::size_t i = begin; i < end; ++i) acc += spec.point(i).cross(x.e[i].cross(x.b[i]));
      return acc;
    });
    m.m3 = m3 * dx3;
  }
  return m;
}

VariationalResidual variational_residual(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                                         const std::vector<CVec3>& b_hat, double admissibility_tol) {
  FieldState st = FieldState::zero(table.grid);
  st.e_hat = e_hat;
  st.b_hat = b_hat;
  const ConstraintDefects d = constraint_defects(st);
  if (d.max() > admissibility_tol)
    throw PreconditionError("variational_residual: perturbation is not odd/even and divergence-free (defect " +
                            std::to_string(d.max()) + ")");
  const KGrid& g = table.grid;
  const Vec3& w = sol.omega();
  using Acc = Eigen::Matrix<double, 2, 1>;
  const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
    Acc acc = Acc::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const SolitonMode m = soliton_mode(g.k(idx), table.r[idx], table.rho_hat[idx], table.rho_tilde[idx], w);
      acc[0] += m.E.dot(e_hat[idx]).real();
      acc[1] += m.B.dot(b_hat[idx]).real();
    }
    return acc;
  });
  const Moments mo = moments_m(sol, table, std::vector<CVec3>(g.size(), CVec3::Zero()), b_hat);
  const Moments me = moments_m(sol, table, e_hat, std::vector<CVec3>(g.size(), CVec3::Zero()));
  VariationalResidual r;
  r.first = a[0] * g.cell_volume() - w.dot(me.m2);
  r.second = a[1] * g.cell_volume() - w.dot(mo.m1);
  return r;
}

double energy_increment(const Soliton& sol, const ModeTable& table, const std::vector<CVec3>& e_hat,
                        const std::vector<CVec3>& b_hat) {
  const Moments m = moments_m(sol, table, e_hat, b_hat);
  const double I = sol.profile().moment_of_inertia();
  const double ne = l2_norm(table.grid, e_hat), nb = l2_norm(table.grid, b_hat);
  return m.total().squaredNorm() / (2.0 * I) - sol.omega().dot(m.m3) + 0.5 * (ne * ne + nb * nb);
}

}  // namespace spincharge
