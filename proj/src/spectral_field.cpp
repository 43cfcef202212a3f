#include "spincharge/spectral_field.hpp"

#include <algorithm>
#include <cmath>

#include "spincharge/parallel.hpp"
#include "spincharge/soliton.hpp"

namespace spincharge {

namespace {

const cplx I1(0.0, 1.0);

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// W(p, j) = exp(sign * i * k_j * x_p) along one axis.
RowMat axis_matrix(const KGrid& g, double origin, double spacing, int count, double sign) {
  RowMat W(count, g.n);
  for (int p = 0; p < count; ++p) {
    const double x = origin + p * spacing;
    for (int j = 0; j < g.n; ++j) W(p, j) = std::polar(1.0, sign * g.coord(j) * x);
  }
  return W;
}

// out(p1, p2, p3) = sum W1(p1, i) W2(p2, j) W3(p3, l) in(i, j, l), all row-major.
std::vector<cplx> contract3(const std::vector<cplx>& in, int n1, int n2, int n3, const RowMat& W1,
                            const RowMat& W2, const RowMat& W3) {
  const int P2 = static_cast<int>(W2.rows()), P3 = static_cast<int>(W3.rows());
  Eigen::Map<const RowMat> A(in.data(), static_cast<Eigen::Index>(n1) * n2, n3);
  RowMat T1 = A * W3.transpose();  // (n1 n2) x P3
  RowMat T2(static_cast<Eigen::Index>(n1) * P2, P3);
  for (int i = 0; i < n1; ++i) T2.middleRows(static_cast<Eigen::Index>(i) * P2, P2) = W2 * T1.middleRows(static_cast<Eigen::Index>(i) * n2, n2);
  Eigen::Map<const RowMat> T2v(T2.data(), n1, static_cast<Eigen::Index>(P2) * P3);
  RowMat out = W1 * T2v;  // P1 x (P2 P3)
  return std::vector<cplx>(out.data(), out.data() + out.size());
}

std::vector<CVec3> transform(const std::vector<CVec3>& in, int n1, int n2, int n3, const RowMat& W1,
                             const RowMat& W2, const RowMat& W3, double factor) {
  const std::size_t N = in.size();
  const std::size_t M = static_cast<std::size_t>(W1.rows()) * W2.rows() * W3.rows();
  std::vector<CVec3> out(M, CVec3::Zero());
  std::vector<cplx> comp(N);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < N; ++i) comp[i] = in[i][c];
    const std::vector<cplx> r = contract3(comp, n1, n2, n3, W1, W2, W3);
    for (std::size_t i = 0; i < M; ++i) out[i][c] = factor * r[i];
  }
  return out;
}

Vec3 k_hat_of(const Vec3& k) { return k / k.norm(); }

}  // namespace

FieldState FieldState::zero(const KGrid& grid) {
  FieldState s;
  s.grid = grid;
  s.e_hat.assign(grid.size(), CVec3::Zero());
  s.b_hat.assign(grid.size(), CVec3::Zero());
  return s;
}

FieldState project_constraints(const FieldState& state) {
  FieldState out = state;
  const KGrid& g = state.grid;
  const std::size_t N = g.size();
  par::for_blocks(N, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t m = g.mirror(idx);
      const Vec3 kh = k_hat_of(g.k(idx));
      auto transverse = [&](const CVec3& v) -> CVec3 { return v - kh.cast<cplx>() * kh.cast<cplx>().dot(v); };
      const CVec3 e1 = transverse(state.e_hat[idx]), e2 = transverse(state.e_hat[m]);
      const CVec3 b1 = transverse(state.b_hat[idx]), b2 = transverse(state.b_hat[m]);
      const Vec3 e_odd = 0.5 * (e1 - e2).imag();
      const Vec3 b_even = 0.5 * (b1 + b2).real();
      out.e_hat[idx] = I1 * e_odd.cast<cplx>();
      out.b_hat[idx] = b_even.cast<cplx>();
    }
  });
  return out;
}

FieldState propagate_free(const FieldState& state, double dt) {
  FieldState out = state;
  const KGrid& g = state.grid;
  par::for_blocks(g.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const double r = k.norm();
      const CVec3 kh = (k / r).cast<cplx>();
      const double c = std::cos(r * dt), s = std::sin(r * dt);
      const CVec3& e = state.e_hat[idx];
      const CVec3& b = state.b_hat[idx];
      const CVec3 eL = kh * kh.dot(e), bL = kh * kh.dot(b);
      out.e_hat[idx] = eL + c * (e - eL) + (I1 * s) * ccross(kh, b);
      out.b_hat[idx] = bL + c * (b - bL) - (I1 * s) * ccross(kh, e);
    }
  });
  out.time = state.time + dt;
  return out;
}

FieldState add_source_step(const FieldState& state, const ModeTable& table, const OmegaTrajectory& omega_traj,
                           double t0, double dt) {
  FieldState out = state;
  const Vec3 W = omega_traj(t0 + 0.5 * dt);
  if (W.isZero(0.0)) return out;
  const KGrid& g = state.grid;
  par::for_blocks(g.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const double r = table.r[idx];
      const double sh = std::sin(0.5 * r * dt);
      const double ke = std::sin(r * dt) / r;      // int_0^dt cos(r(dt - s)) ds
      const double kb = 2.0 * sh * sh / r;          // int_0^dt sin(r(dt - s)) ds
      const Vec3 jre = table.rho_tilde[idx] * W.cross(k);  // j_hat = i * jre
      // e -= ke * j_hat ;  b += i kb k_hat x j_hat = -kb k_hat x jre
      out.e_hat[idx] -= (I1 * ke) * jre.cast<cplx>();
      out.b_hat[idx] -= (kb / r * k.cross(jre)).cast<cplx>();
    }
  });
  return out;
}

double ConstraintDefects::max() const {
  return std::max({parity_e, parity_b, phase_e, phase_b, div_e, div_b});
}

ConstraintDefects constraint_defects(const FieldState& state) {
  const KGrid& g = state.grid;
  struct Acc {
    double v[7] = {0, 0, 0, 0, 0, 0, 0};
    Acc operator+(const Acc& o) const {
      Acc a;
      for (int i = 0; i < 7; ++i) a.v[i] = std::max(v[i], o.v[i]);
      return a;
    }
  };
  const Acc a = par::reduce(g.size(), Acc{}, [&](std::size_t begin, std::size_t end) {
    Acc acc;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t m = g.mirror(idx);
      const Vec3 kh = k_hat_of(g.k(idx));
      const CVec3& e = state.e_hat[idx];
      const CVec3& b = state.b_hat[idx];
      acc.v[0] = std::max(acc.v[0], (e + state.e_hat[m]).norm());
      acc.v[1] = std::max(acc.v[1], (b - state.b_hat[m]).norm());
      acc.v[2] = std::max(acc.v[2], e.real().norm());
      acc.v[3] = std::max(acc.v[3], b.imag().norm());
      acc.v[4] = std::max(acc.v[4], std::abs(kh.cast<cplx>().dot(e)));
      acc.v[5] = std::max(acc.v[5], std::abs(kh.cast<cplx>().dot(b)));
      acc.v[6] = std::max({acc.v[6], e.norm(), b.norm()});
    }
    return acc;
  });
  const double scale = a.v[6] > 0.0 ? a.v[6] : 1.0;
  ConstraintDefects d;
  d.parity_e = a.v[0] / scale;
  d.parity_b = a.v[1] / scale;
  d.phase_e = a.v[2] / scale;
  d.phase_b = a.v[3] / scale;
  d.div_e = a.v[4] / scale;
  d.div_b = a.v[5] / scale;
  return d;
}

bool is_admissible(const FieldState& state, double tol) { return constraint_defects(state).max() <= tol; }

double l2_norm(const KGrid& grid, const std::vector<CVec3>& f) {
  const double s = par::reduce(f.size(), 0.0, [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += f[i].squaredNorm();
    return acc;
  });
  return std::sqrt(s * grid.cell_volume());
}

double field_energy(const FieldState& state) {
  const double ne = l2_norm(state.grid, state.e_hat), nb = l2_norm(state.grid, state.b_hat);
  return 0.5 * (ne * ne + nb * nb);
}

Vec3 XGridSpec::point(std::size_t idx) const {
  const int l = static_cast<int>(idx % count[2]);
  const int j = static_cast<int>((idx / count[2]) % count[1]);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(count[1]) * count[2]));
  return origin + spacing * Vec3(i, j, l);
}

XGridSpec natural_x_grid(const KGrid& grid) {
  XGridSpec s;
  s.spacing = grid.period() / grid.n;
  s.origin = Vec3::Constant(-0.5 * grid.n * s.spacing);
  s.count = {grid.n, grid.n, grid.n};
  return s;
}

std::vector<CVec3> synthesize_field(const KGrid& grid, const std::vector<CVec3>& f_hat, const XGridSpec& spec) {
  const RowMat W1 = axis_matrix(grid, spec.origin[0], spec.spacing, spec.count[0], 1.0);
  const RowMat W2 = axis_matrix(grid, spec.origin[1], spec.spacing, spec.count[1], 1.0);
  const RowMat W3 = axis_matrix(grid, spec.origin[2], spec.spacing, spec.count[2], 1.0);
  return transform(f_hat, grid.n, grid.n, grid.n, W1, W2, W3, fourier_norm * grid.cell_volume());
}

std::vector<CVec3> analyze_field(const XGridSpec& spec, const std::vector<CVec3>& f, const KGrid& grid) {
  auto conj_t = [&](int a) {
    RowMat W = axis_matrix(grid, spec.origin[a], spec.spacing, spec.count[a], -1.0);
    return RowMat(W.transpose());  // n x P
  };
  const RowMat W1 = conj_t(0), W2 = conj_t(1), W3 = conj_t(2);
  const double dx3 = spec.spacing * spec.spacing * spec.spacing;
  return transform(f, spec.count[0], spec.count[1], spec.count[2], W1, W2, W3, fourier_norm * dx3);
}

RealFields synthesize_x(const FieldState& state, const XGridSpec& spec) {
  RealFields out;
  out.spec = spec;
  const double extent = spec.spacing * *std::min_element(spec.count.begin(), spec.count.end());
  out.aliasing_warning = extent < pi / state.grid.dk();
  const std::vector<CVec3> e = synthesize_field(state.grid, state.e_hat, spec);
  const std::vector<CVec3> b = synthesize_field(state.grid, state.b_hat, spec);
  out.e.resize(e.size());
  out.b.resize(b.size());
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    out.e[i] = e[i].real();
    out.b[i] = b[i].real();
    re = std::max({re, e[i].real().norm(), b[i].real().norm()});
    im = std::max({im, e[i].imag().norm(), b[i].imag().norm()});
  }
  out.imag_residue = re > 0.0 ? im / re : im;
  if (out.imag_residue > 1e-12 && re > 0.0)
    throw PreconditionError("synthesize_x: state is not the image of real fields (imaginary residue " +
                            std::to_string(out.imag_residue) + ")");
  return out;
}

FieldState analyze_x(const RealFields& fields, const KGrid& grid) {
  FieldState s = FieldState::zero(grid);
  std::vector<CVec3> e(fields.e.size()), b(fields.b.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = fields.e[i].cast<cplx>();
    b[i] = fields.b[i].cast<cplx>();
  }
  s.e_hat = analyze_field(fields.spec, e, grid);
  s.b_hat = analyze_field(fields.spec, b, grid);
  return s;
}

Diagnostics diagnostics(const FieldState& state, const ChargeProfile& profile, const Vec3& omega_base,
                        bool with_moments) {
  const KGrid& g = state.grid;
  const ModeTable table = ModeTable::build(g, profile);
  const double I = profile.moment_of_inertia();
  Diagnostics d;
  d.norm_e = l2_norm(g, state.e_hat);
  d.norm_b = l2_norm(g, state.b_hat);
  d.H_pert = 0.5 * I * state.omega_pert.squaredNorm() + 0.5 * (d.norm_e * d.norm_e + d.norm_b * d.norm_b);

  // total fields: soliton closed forms plus perturbation, accumulated per mode
  using Acc = Eigen::Matrix<double, 8, 1>;
  const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
    Acc acc = Acc::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 k = g.k(idx);
      const SolitonMode sm = soliton_mode(k, table.r[idx], table.rho_hat[idx], table.rho_tilde[idx], omega_base);
      const CVec3 E = sm.E + state.e_hat[idx];
      const CVec3 B = sm.B + state.b_hat[idx];
      acc[0] += E.squaredNorm() + B.squaredNorm();
      const CVec3 P = ccross(E.conjugate(), B);
      acc.segment<3>(1) += P.real();
      acc.segment<3>(4) += P.imag();
    }
    return acc;
  });
  const Vec3 w = omega_base + state.omega_pert;
  d.H_total = 0.5 * I * w.squaredNorm() + 0.5 * a[0] * g.cell_volume();
  d.momentum = a.segment<3>(1) * g.cell_volume();
  d.momentum_imag = a.segment<3>(4).norm() * g.cell_volume();

  if (with_moments) {
    const RealFields x = synthesize_x(state, natural_x_grid(g));
    const double dx3 = std::pow(x.spec.spacing, 3);
    double we = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < x.e.size(); ++i) {
      const double rx = x.spec.point(i).norm();
      we += rx * x.e[i].squaredNorm();
      wb += rx * x.b[i].squaredNorm();
    }
    d.weighted_e = we * dx3;
    d.weighted_b = wb * dx3;
    d.angular_momentum = angular_momentum(state, profile, omega_base);
  }
  return d;
}

}  // namespace spincharge
