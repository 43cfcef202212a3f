#include "spincharge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "spincharge/parallel.hpp"
#include "spincharge/quadrature.hpp"
#include "spincharge/soliton.hpp"
#include "spincharge/volterra.hpp"

namespace spincharge {

namespace {

double sigma(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double sigma_prime(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

void require_valid(const BumpSpec& spec) {
  if (!(spec.d > 0.0) || !(spec.c > 0.0)) throw DomainError("BumpSpec: d and c must be positive");
}

// Sphere rule: Gauss-Legendre in cos(theta) times the trapezoid rule in phi; exact for
// polynomials of the direction cosines well beyond the degrees appearing here.
struct SphereRule {
  std::vector<Vec3> n;
  std::vector<double> w;
};

SphereRule sphere_rule(int nodes) {
  const QuadRule u = gauss_legendre(nodes, -1.0, 1.0);
  const int nphi = 2 * nodes;
  SphereRule s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double st = std::sqrt(std::max(0.0, 1.0 - u.x[i] * u.x[i]));
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / nphi;
      s.n.emplace_back(st * std::cos(phi), st * std::sin(phi), u.x[i]);
      s.w.push_back(u.w[i] * 2.0 * pi / nphi);
    }
  }
  return s;
}

// Fields of the pair in the rotated frame at rotated coordinates y.
std::pair<Vec3, Vec3> rotated_fields(const BumpSpec& spec, const Vec3& y) {
  const Vec3 a(0.0, spec.c, 0.0);
  const Vec3 ym = y - a, yp = y + a;
  const double rm = ym.norm(), rp = yp.norm();
  const double fm = rm > 0.0 ? bump_f(spec, rm) / rm : 0.0;
  const double fp = rp > 0.0 ? bump_f(spec, rp) / rp : 0.0;
  Vec3 e(0.0, fm * y[2] + fp * y[2], -fm * ym[1] - fp * yp[1]);
  Vec3 b(-fm * y[2] + fp * y[2], 0.0, fm * y[0] - fp * y[0]);
  return {e, b};
}

double radial_bump(double s, double radius, int power) {
  if (s >= radius) return 0.0;
  const double u = 1.0 - (s / radius) * (s / radius);
  return std::pow(u, power);
}

}  // namespace

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = sigma(x), b = sigma(1.0 - x);
  return a / (a + b);
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = sigma(x), b = sigma(1.0 - x);
  const double s = a + b;
  return (sigma_prime(x) * b + a * sigma_prime(1.0 - x)) / (s * s);
}

Mat3 frame_for(const Vec3& omega) {
  const double n = omega.norm();
  if (n == 0.0) return Mat3::Identity();
  // Rodrigues rotation taking e1 onto omega_hat. For omega_hat in the -e1 half-space, rotate
  // onto -omega_hat (well conditioned) and follow with a half-turn about an axis normal to it.
  const Vec3 u = omega / n;
  auto rodrigues = [](const Vec3& to) {
    const Vec3 v = Vec3::UnitX().cross(to);
    Mat3 vx;
    vx << 0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0;
    return Mat3(Mat3::Identity() + vx + vx * vx / (1.0 + to[0]));
  };
  if (u[0] >= 0.0) return rodrigues(u);
  Vec3 axis = u.cross(Vec3::UnitZ());
  if (axis.norm() < 0.5) axis = u.cross(Vec3::UnitY());
  axis.normalize();
  return (2.0 * axis * axis.transpose() - Mat3::Identity()) * rodrigues(-u);
}

double bump_alpha(const BumpSpec& spec, double r) {
  if (r < 0.0) throw DomainError("bump_alpha: r must be non-negative");
  if (r <= 1.0) return spec.d;
  if (r >= 2.0) return 0.0;
  return spec.d * smoothstep(2.0 - r);
}

double bump_f(const BumpSpec& spec, double r) {
  if (r < 0.0) throw DomainError("bump_f: r must be non-negative");
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -spec.d * smoothstep_derivative(2.0 - r);
}

double bump_f_sq_integral(const BumpSpec& spec) {
  const QuadRule q = gauss_legendre_panels(16, 16, 1.0, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double f = bump_f(spec, q.x[i]);
    acc += q.w[i] * q.x[i] * q.x[i] * f * f;
  }
  return 4.0 * pi * acc;
}

std::pair<Vec3, Vec3> bump_fields(const BumpSpec& spec, const Vec3& x) {
  require_valid(spec);
  const auto [e, b] = rotated_fields(spec, spec.frame.transpose() * x);
  return {spec.frame * e, spec.frame * b};
}

std::pair<Vec3, Vec3> scaled_bump_fields(const BumpSpec& spec, const Vec3& x) {
  const double s = 1.0 / std::sqrt(spec.c);
  const auto [e, b] = bump_fields(spec, x);
  return {s * e, s * b};
}

ClosedMoments moments_closed(const BumpSpec& spec) {
  require_valid(spec);
  if (spec.c <= 4.0) throw DomainError("moments_closed: c <= 4, the two bump supports overlap");
  ClosedMoments m;
  m.rotated = Vec3(2.0 * spec.c / 3.0 * bump_f_sq_integral(spec), 0.0, 0.0);
  m.lab = spec.frame * m.rotated;
  return m;
}

BumpMeasurement measure_bumps(const BumpSpec& spec, const ChargeProfile& profile, const Vec3& omega, double scale,
                              int radial_nodes, int angular_nodes) {
  require_valid(spec);
  if (spec.c <= 4.0) throw DomainError("measure_bumps: c <= 4, the two bump supports overlap");
  const Mat3& F = spec.frame;
  const Soliton sol(profile, F.transpose() * omega);
  const int panels = std::max(1, radial_nodes / 12);
  const QuadRule rad = gauss_legendre_panels(panels, 12, 1.0, 2.0);
  const SphereRule sph = sphere_rule(angular_nodes);

  struct Acc {
    double ee = 0, bb = 0, eE = 0, bB = 0;
    Vec3 m1 = Vec3::Zero(), m2 = Vec3::Zero(), m3 = Vec3::Zero();
    Acc operator+(const Acc& o) const {
      return {ee + o.ee, bb + o.bb, eE + o.eE, bB + o.bB, m1 + o.m1, m2 + o.m2, m3 + o.m3};
    }
  };
  const std::size_t per_centre = rad.size() * sph.n.size();
  const Acc acc = par::reduce(2 * per_centre, Acc{}, [&](std::size_t begin, std::size_t end) {
    Acc a;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double sign = idx < per_centre ? 1.0 : -1.0;
      const std::size_t local = idx % per_centre;
      const std::size_t i = local / sph.n.size(), j = local % sph.n.size();
      const double rho = rad.x[i];
      const Vec3 y = Vec3(0.0, sign * spec.c, 0.0) + rho * sph.n[j];
      const double w = rad.w[i] * rho * rho * sph.w[j];
      auto [e, b] = rotated_fields(spec, y);
      e *= scale;
      b *= scale;
      const Vec3 E = sol.e_x(y), B = sol.b_x(y);
      a.ee += w * e.squaredNorm();
      a.bb += w * b.squaredNorm();
      a.eE += w * e.dot(E);
      a.bB += w * b.dot(B);
      a.m1 += w * y.cross(E.cross(b));
      a.m2 += w * y.cross(e.cross(B));
      a.m3 += w * y.cross(e.cross(b));
    }
    return a;
  });
  BumpMeasurement m;
  m.norm_e = std::sqrt(acc.ee);
  m.norm_b = std::sqrt(acc.bb);
  m.e_dot_E = acc.eE;
  m.b_dot_B = acc.bB;
  m.m1 = F * acc.m1;
  m.m2 = F * acc.m2;
  m.m3 = F * acc.m3;
  return m;
}

Vec3 m3_cartesian(const BumpSpec& spec, int points_per_axis) {
  require_valid(spec);
  // The integrand is smooth and compactly supported inside each cube, so the plain
  // trapezoid rule converges faster than any power of the spacing.
  const int n = points_per_axis;
  const double h = 4.0 / (n - 1);
  const std::size_t per = static_cast<std::size_t>(n) * n * n;
  const Vec3 m = par::reduce(2 * per, Vec3(Vec3::Zero()), [&](std::size_t begin, std::size_t end) {
    Vec3 acc = Vec3::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double sign = idx < per ? 1.0 : -1.0;
      std::size_t l = idx % per;
      const int i = static_cast<int>(l / (n * n)), j = static_cast<int>((l / n) % n), q = static_cast<int>(l % n);
      const Vec3 y(-2.0 + i * h, sign * spec.c - 2.0 + j * h, -2.0 + q * h);
      const auto [e, b] = rotated_fields(spec, y);
      acc += y.cross(e.cross(b));
    }
    return acc;
  });
  return spec.frame * (m * h * h * h);
}

DChoice choose_d(const ChargeProfile& profile, const Vec3& omega, double epsilon) {
  const double I = profile.moment_of_inertia();
  const double w1 = omega.norm();
  if (w1 == 0.0) throw PreconditionError("choose_d: omega must be non-zero");
  const double gmin = I * w1 * w1 / 2.0;
  if (!(epsilon > 0.0) || epsilon > gmin * (1.0 + 1e-15))
    throw PreconditionError("choose_d: epsilon must lie in (0, I omega_1^2 / 2]; g = -epsilon has no root");
  DChoice out;
  const double disc = std::sqrt(std::max(0.0, I * I * w1 * w1 - 2.0 * I * epsilon));
  out.root_lo = I * w1 - disc;
  out.root_hi = I * w1 + disc;
  out.m_tilde = I * w1;
  BumpSpec unit;
  const double m_unit = 2.0 / 3.0 * bump_f_sq_integral(unit);  // m~ at d = 1; m~ scales as d^2
  out.d = std::sqrt(out.m_tilde / m_unit);
  unit.d = out.d;
  const double m = 2.0 / 3.0 * bump_f_sq_integral(unit);
  out.g = m * m / (2.0 * I) - w1 * m;
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

InstabilityReport instability_scan(const ChargeProfile& profile, const Vec3& omega, double epsilon,
                                   const std::vector<double>& c_list) {
  if (profile.kind() != ProfileKind::neutral)
    throw PreconditionError("instability_scan: charged profile, the soliton angular momentum is infinite");
  if (omega.norm() == 0.0) throw PreconditionError("instability_scan: omega must be non-zero");
  if (c_list.empty()) throw PreconditionError("instability_scan: empty c list");
  InstabilityReport rep;
  rep.omega = omega;
  rep.epsilon = epsilon;
  rep.I = profile.moment_of_inertia();
  const DChoice dc = choose_d(profile, omega, epsilon);
  rep.d = dc.d;
  rep.m_tilde = dc.m_tilde;
  const double w1 = omega.norm();

  std::vector<double> cs, ne, m1n, m2n;
  rep.m1_identically_zero = true;
  for (double c : c_list) {
    BumpSpec spec{dc.d, c, frame_for(omega)};
    const BumpMeasurement m = measure_bumps(spec, profile, omega, 1.0 / std::sqrt(c));
    InstabilityPoint p;
    p.c = c;
    p.norm_e = m.norm_e;
    p.norm_b = m.norm_b;
    p.norm = m.norm_e + m.norm_b;
    p.m1 = m.m1;
    p.m2 = m.m2;
    p.m3 = m.m3;
    p.m3_closed = moments_closed(spec).rotated[0] / c;
    const Vec3 mt = m.m1 + m.m2 + m.m3;
    const double quad = 0.5 * (m.norm_e * m.norm_e + m.norm_b * m.norm_b);
    p.delta_H = mt.squaredNorm() / (2.0 * rep.I) - omega.dot(m.m3) + quad;
    p.delta_H_direct = mt.squaredNorm() / (2.0 * rep.I) - omega.dot(mt) + m.e_dot_E + m.b_dot_B + quad;
    const double mtil = omega.dot(m.m3) / w1;
    p.g_part = mtil * mtil / (2.0 * rep.I) - w1 * mtil;
    if (m.m1.norm() > 1e-14 * m.m3.norm()) rep.m1_identically_zero = false;
    cs.push_back(c);
    ne.push_back(m.norm_e);
    m1n.push_back(m.m1.norm());
    m2n.push_back(m.m2.norm());
    rep.points.push_back(p);
  }
  rep.slope_norm_e = loglog_slope(cs, ne);
  rep.slope_m1 = loglog_slope(cs, m1n);
  rep.slope_m2 = loglog_slope(cs, m2n);
  const InstabilityPoint& last = rep.points.back();
  rep.criterion_met = last.norm < 0.05 && last.delta_H <= -epsilon / 2.0;
  return rep;
}

FieldState make_perturbation(const KGrid& grid, const PerturbationSpec& spec, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("make_perturbation: delta must be positive");
  if (!(spec.bump_radius > 0.0) || spec.bump_radius > spec.R)
    throw PreconditionError("make_perturbation: need 0 < bump_radius <= R");
  if (spec.omega_fraction < 0.0 || spec.omega_fraction > 1.0)
    throw PreconditionError("make_perturbation: omega_fraction must lie in [0, 1]");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto random_unit = [&] {
    Vec3 v;
    do v = Vec3(normal(rng), normal(rng), normal(rng));
    while (v.norm() < 1e-3);
    return Vec3(v.normalized());
  };

  FieldState st = FieldState::zero(grid);
  const bool fields = spec.fields && spec.pairs > 0 && spec.omega_fraction < 1.0;
  const double omega_share = fields ? spec.omega_fraction : 1.0;
  const Vec3 dir = random_unit();
  if (omega_share > 0.0) st.omega_pert = omega_share * delta * dir;
  if (!fields) return st;

  struct Pair {
    Vec3 y, a, c;
  };
  std::vector<Pair> pairs;
  const double reach = spec.R - spec.bump_radius;
  for (int p = 0; p < spec.pairs; ++p) {
    const double rr = reach * std::cbrt(uniform(rng));
    pairs.push_back({rr * random_unit(), Vec3(normal(rng), normal(rng), normal(rng)),
                     Vec3(normal(rng), normal(rng), normal(rng))});
  }

  // phi(s) = (1 - s^2/r_b^2)^12; its 3-D transform per shell by Gauss-Legendre quadrature.
  constexpr int power = 12;
  const QuadRule q = gauss_legendre_panels(8, 16, 0.0, spec.bump_radius);
  std::unordered_map<std::int64_t, double> phi_hat;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const std::int64_t key = grid.shell_key(idx);
    if (phi_hat.count(key)) continue;
    const double r = grid.k(idx).norm();
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double s = q.x[i];
      const double sinc = r * s < 1e-8 ? 1.0 : std::sin(r * s) / (r * s);
      acc += q.w[i] * s * s * radial_bump(s, spec.bump_radius, power) * sinc;
    }
    phi_hat[key] = fourier_norm * 4.0 * pi * acc;
  }

  // Even potential a (phi(x - y) + phi(x + y)) gives e_hat = 2 i phi_hat cos(k.y) k x a;
  // odd potential c (phi(x - y) - phi(x + y)) gives b_hat = 2 phi_hat sin(k.y) k x c.
  par::for_blocks(grid.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = grid.k(idx);
      const double ph = phi_hat.at(grid.shell_key(idx));
      Vec3 e = Vec3::Zero(), b = Vec3::Zero();
      for (const Pair& p : pairs) {
        const double ky = k.dot(p.y);
        e += 2.0 * ph * std::cos(ky) * k.cross(p.a);
        b += 2.0 * ph * std::sin(ky) * k.cross(p.c);
      }
      st.e_hat[idx] = cplx(0.0, 1.0) * e.cast<cplx>();
      st.b_hat[idx] = b.cast<cplx>();
    }
  });
  const double ne = l2_norm(grid, st.e_hat), nb = l2_norm(grid, st.b_hat);
  const double s = (1.0 - omega_share) * delta / (ne + nb);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    st.e_hat[idx] *= s;
    st.b_hat[idx] *= s;
  }
  return st;
}

StabilityReport stability_scan(const ChargeProfile& profile, const Vec3& omega, const KGrid& grid,
                               const PerturbationSpec& pspec, const std::vector<double>& delta_list,
                               const IntegratorSpec& ispec) {
  if (delta_list.empty()) throw PreconditionError("stability_scan: empty delta list");
  StabilityReport rep;
  rep.omega = omega;
  rep.R = pspec.R;
  rep.T_bar = huygens_cutoff(pspec.R, profile);
  const ModeTable table = ModeTable::build(grid, profile);
  // Grid sums see the x-lattice modulo its period: images of the data reach the charge
  // again at about period - T_bar, so the Huygens check stops before that.
  const double t_images = grid.period() - rep.T_bar;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (double delta : delta_list) {
    const FieldState init = make_perturbation(grid, pspec, delta);
    const Trajectory tr = evolve(profile, omega, init, ispec);
    StabilityPoint p;
    p.delta = delta;
    for (const TrajectoryRow& row : tr.rows)
      p.sup_norm = std::max(p.sup_norm, row.omega.norm() + row.norm_e + row.norm_b);
    p.ratio = p.sup_norm / delta;
    p.max_energy_drift = tr.max_rel_energy_drift;
    p.max_constraint_defect = tr.max_constraint_defect;

    const Forcing forcing(table, init.e_hat, init.b_hat);
    if (!forcing.zero()) {
      double peak = 0.0, late = 0.0;
      const int steps = static_cast<int>(std::llround(ispec.t_end / ispec.dt));
      for (int n = 0; n <= steps; ++n) {
        const double t = n * ispec.dt;
        const double f = forcing.T21(t).norm() + forcing.T31(t, omega).norm();
        peak = std::max(peak, f);
        if (t > rep.T_bar + ispec.dt && t < t_images) late = std::max(late, f);
      }
      p.max_forcing_after_cutoff = peak > 0.0 ? late / peak : 0.0;
    }
    rmin = std::min(rmin, p.ratio);
    rmax = std::max(rmax, p.ratio);
    rep.points.push_back(p);
  }
  rep.ratio_spread = (rmax - rmin) / rmin;
  return rep;
}

}  // namespace spincharge
