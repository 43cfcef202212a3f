#include "spincharge/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spincharge/parallel.hpp"
#include "spincharge/soliton.hpp"

namespace spincharge {

namespace {

double catmull_rom(const std::vector<double>& v, double dt, double t, double parity) {
  const double sgn = t < 0.0 ? parity : 1.0;
  t = std::abs(t);
  const long n = static_cast<long>(v.size());
  auto at = [&](long i) {
    if (i < 0) return parity * v[static_cast<std::size_t>(-i)];
    return v[static_cast<std::size_t>(std::min(i, n - 1))];
  };
  const double x = t / dt;
  long i = static_cast<long>(std::floor(x));
  if (i >= n - 1) return sgn * v.back();
  const double u = x - i;
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return sgn * (p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0))));
}

RealFields cube_fields(const ChargeProfile& profile, const FieldState& state, int points_per_axis) {
  const double R = profile.support_radius();
  XGridSpec spec;
  spec.spacing = 2.0 * R / (points_per_axis - 1);
  spec.origin = Vec3::Constant(-R);
  spec.count = {points_per_axis, points_per_axis, points_per_axis};
  return synthesize_x(state, spec);
}

}  // namespace

double MemoryKernels::cos_at(double t) const { return catmull_rom(kappa_cos, dt, t, 1.0); }
double MemoryKernels::sin_at(double t) const { return catmull_rom(kappa_sin, dt, t, -1.0); }

double kappa_cos(const ChargeProfile& profile, double tau) {
  const KTable& t = profile.ktable();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i], rt = t.rho_tilde[i];
    acc += t.w[i] * r * r * r * r * rt * rt * std::cos(r * tau);
  }
  return 8.0 * pi / 3.0 * acc;
}

double kappa_sin(const ChargeProfile& profile, double tau) {
  const KTable& t = profile.ktable();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i], rt = t.rho_tilde[i];
    acc += t.w[i] * r * r * r * rt * rt * std::sin(r * tau);
  }
  return 8.0 * pi / 3.0 * acc;
}

MemoryKernels build_kernels(const ChargeProfile& profile, double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw PreconditionError("build_kernels: need dt > 0 and t_end >= 0");
  MemoryKernels k;
  k.dt = dt;
  const std::size_t n = static_cast<std::size_t>(std::lround(t_end / dt)) + 3;
  k.tau.resize(n);
  k.kappa_cos.resize(n);
  k.kappa_sin.resize(n);
  profile.ktable();
  par::for_blocks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      k.tau[i] = i * dt;
      k.kappa_cos[i] = kappa_cos(profile, k.tau[i]);
      k.kappa_sin[i] = kappa_sin(profile, k.tau[i]);
    }
  });
  return k;
}

namespace {
Mat3 kernel_tensor_grid(const ModeTable& table, double tau, bool sine) {
  const KGrid& g = table.grid;
  std::vector<double> shell_f(table.shells());
  for (std::size_t s = 0; s < table.shells(); ++s) {
    const double r = table.shell_r[s];
    shell_f[s] = sine ? std::sin(r * tau) / r : std::cos(r * tau);
  }
  using Acc = Eigen::Matrix<double, 9, 1>;
  const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
    Acc acc = Acc::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const double rt = table.rho_tilde[idx];
      const Mat3 m = (rt * rt * shell_f[table.shell[idx]]) * (k.squaredNorm() * Mat3::Identity() - k * k.transpose());
      acc += Eigen::Map<const Acc>(m.data());
    }
    return acc;
  });
  Mat3 m = Eigen::Map<const Mat3>(a.data());
  return m * g.cell_volume();
}
}  // namespace

Mat3 kappa_cos_tensor_grid(const ModeTable& table, double tau) { return kernel_tensor_grid(table, tau, false); }
Mat3 kappa_sin_tensor_grid(const ModeTable& table, double tau) { return kernel_tensor_grid(table, tau, true); }

Forcing::Forcing(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat) {
  const KGrid& g = table.grid;
  const std::size_t ns = table.shells();
  r_ = table.shell_r;
  ke_.assign(ns, Vec3::Zero());
  rb_.assign(ns, Vec3::Zero());
  b_.assign(ns, Vec3::Zero());
  keor_.assign(ns, Vec3::Zero());
  const double dv = g.cell_volume();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 k = g.k(idx);
    const double r = table.r[idx];
    const Vec3 kh = k / r;
    const double rt = table.rho_tilde[idx];
    const CVec3 kc = k.cast<cplx>();
    const Vec3 ke = (cplx(0.0, -1.0) * ccross(kc, e0_hat[idx])).real();
    const Vec3 b = b0_hat[idx].real();
    const Vec3 bL = kh * kh.dot(b);
    const std::uint32_t s = table.shell[idx];
    ke_[s] += rt * dv * ke;
    rb_[s] += rt * dv * r * (b - bL);
    b_[s] += rt * dv * (b - bL);
    keor_[s] += rt * dv * bL;  // static longitudinal part (zero for admissible data)
    if (!e0_hat[idx].isZero(0.0) || !b0_hat[idx].isZero(0.0)) zero_ = false;
  }
}

Vec3 Forcing::T21(double t) const {
  Vec3 acc = Vec3::Zero();
  if (zero_) return acc;
  for (std::size_t s = 0; s < r_.size(); ++s) acc += std::cos(r_[s] * t) * ke_[s] - std::sin(r_[s] * t) * rb_[s];
  return acc;
}

Vec3 Forcing::W(double t) const {
  Vec3 acc = Vec3::Zero();
  if (zero_) return acc;
  for (std::size_t s = 0; s < r_.size(); ++s)
    acc -= (std::sin(r_[s] * t) / r_[s]) * ke_[s] + std::cos(r_[s] * t) * b_[s] + keor_[s];
  return acc;
}

Vec3 forcing_T21(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat,
                 double t) {
  return Forcing(table, e0_hat, b0_hat).T21(t);
}

Vec3 forcing_T31(const ModeTable& table, const std::vector<CVec3>& e0_hat, const std::vector<CVec3>& b0_hat,
                 double t, const Vec3& omega_t) {
  return Forcing(table, e0_hat, b0_hat).T31(t, omega_t);
}

Vec3 forcing_T21_xspace(const ChargeProfile& profile, const FieldState& init, double t, int points_per_axis) {
  const FieldState st = propagate_free(init, t);
  const RealFields x = cube_fields(profile, st, points_per_axis);
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < x.e.size(); ++i) {
    const Vec3 p = x.spec.point(i);
    const double rho = profile.eval_rho(p.norm());
    if (rho != 0.0) acc += rho * p.cross(x.e[i]);
  }
  return acc * std::pow(x.spec.spacing, 3);
}

Vec3 forcing_T31_xspace(const ChargeProfile& profile, const FieldState& init, double t, const Vec3& omega_t,
                        int points_per_axis) {
  const FieldState st = propagate_free(init, t);
  const RealFields x = cube_fields(profile, st, points_per_axis);
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < x.b.size(); ++i) {
    const Vec3 p = x.spec.point(i);
    const double rho = profile.eval_rho(p.norm());
    if (rho != 0.0) acc += rho * p * p.dot(x.b[i]);
  }
  return omega_t.cross(acc * std::pow(x.spec.spacing, 3));
}

std::vector<VolterraRow> solve_volterra(const ChargeProfile& profile, const Vec3& omega_base, const Vec3& omega0,
                                        const Forcing* forcing, const OmegaTrajectory& omega_traj,
                                        const VolterraSpec& spec) {
  if (!(spec.dt > 0.0) || !(spec.t_end >= 0.0)) throw PreconditionError("solve_volterra: need dt > 0 and t_end >= 0");
  const double dt = spec.dt;
  const long N = std::lround(spec.t_end / dt);
  const MemoryKernels ker = build_kernels(profile, dt, spec.t_end);
  const double I = profile.moment_of_inertia();
  const Vec3 K = K_vector(profile, omega_base);
  auto omega_at = [&](double t) -> Vec3 { return omega_traj ? omega_traj(t) : omega_base; };

  std::vector<Vec3> Om(static_cast<std::size_t>(N) + 1, Vec3::Zero());
  std::vector<VolterraRow> rows;
  rows.reserve(static_cast<std::size_t>(N) + 1);
  Om[0] = omega0;

  struct Drive {
    Vec3 t21 = Vec3::Zero(), t31 = Vec3::Zero(), w = Vec3::Zero();
  };
  auto drive = [&](long n) {
    Drive d;
    const double t = n * dt;
    d.w = omega_at(t);
    if (forcing && !forcing->zero()) {
      d.t21 = forcing->T21(t);
      d.t31 = forcing->T31(t, d.w);
    }
    return d;
  };
  // history part of the convolutions at t_n, all nodes except the endpoint
  auto history = [&](long n, Vec3& cc, Vec3& cs) {
    cc.setZero();
    cs.setZero();
    if (n == 0) return;
    cc += 0.5 * ker.kappa_cos[static_cast<std::size_t>(n)] * Om[0];
    cs += 0.5 * ker.kappa_sin[static_cast<std::size_t>(n)] * Om[0];
    for (long j = 1; j < n; ++j) {
      cc += ker.kappa_cos[static_cast<std::size_t>(n - j)] * Om[static_cast<std::size_t>(j)];
      cs += ker.kappa_sin[static_cast<std::size_t>(n - j)] * Om[static_cast<std::size_t>(j)];
    }
    cc *= dt;
    cs *= dt;
  };
  auto rhs = [&](const Drive& d, const Vec3& om, const Vec3& cc_hist, const Vec3& cs_hist, long n) {
    // endpoint weights: kappa_s(0) = 0, kappa_c(0) enters with dt/2
    const Vec3 cc = n == 0 ? Vec3::Zero() : Vec3(cc_hist + 0.5 * dt * ker.kappa_cos[0] * om);
    return Vec3((K.cross(om) + d.t21 + d.t31 - cc + d.w.cross(cs_hist)) / I);
  };

  Drive d0 = drive(0);
  Vec3 cc, cs;
  history(0, cc, cs);
  Vec3 F = rhs(d0, Om[0], cc, cs, 0);
  rows.push_back({0.0, Om[0], d0.t21.norm(), d0.t31.norm()});
  for (long n = 0; n < N; ++n) {
    const Drive d1 = drive(n + 1);
    history(n + 1, cc, cs);
    Vec3 guess = Om[static_cast<std::size_t>(n)] + dt * F;
    Vec3 Fn1 = Vec3::Zero();
    bool converged = false;
    for (int it = 0; it < spec.max_iterations; ++it) {
      Fn1 = rhs(d1, guess, cc, cs, n + 1);
      const Vec3 next = Om[static_cast<std::size_t>(n)] + 0.5 * dt * (F + Fn1);
      const double change = (next - guess).norm();
      guess = next;
      if (change <= spec.iteration_tol * std::max(next.norm(), 1e-300) || change == 0.0) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "solve_volterra: endpoint iteration did not converge in " << spec.max_iterations
         << " iterations at t = " << (n + 1) * dt << "; reduce dt";
      throw PreconditionError(os.str());
    }
    Om[static_cast<std::size_t>(n) + 1] = guess;
    F = rhs(d1, guess, cc, cs, n + 1);
    rows.push_back({(n + 1) * dt, guess, d1.t21.norm(), d1.t31.norm()});
  }
  return rows;
}

std::vector<VolterraRow> solve_volterra(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& init,
                                        const OmegaTrajectory& omega_traj, const VolterraSpec& spec) {
  const ModeTable table = ModeTable::build(init.grid, profile);
  const Forcing f(table, init.e_hat, init.b_hat);
  return solve_volterra(profile, omega_base, init.omega_pert, &f, omega_traj, spec);
}

double huygens_cutoff(double R, const ChargeProfile& profile) {
  if (!(R > 0.0)) throw PreconditionError("huygens_cutoff: R must be positive");
  return R + profile.support_radius();
}

}  // namespace spincharge
