#include "spincharge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spincharge/parallel.hpp"

namespace spincharge {

namespace {

const cplx I1(0.0, 1.0);

// T2 = -i sum rho_tilde (k x e) dk^3 and S = sum rho_tilde b dk^3 of one state.
std::pair<Vec3, Vec3> torque_sums(const ModeTable& table, const std::vector<CVec3>& e, const std::vector<CVec3>& b) {
  const KGrid& g = table.grid;
  using Acc = Eigen::Matrix<double, 6, 1>;
  const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
    Acc acc = Acc::Zero();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double rt = table.rho_tilde[idx];
      const CVec3 kc = g.k(idx).cast<cplx>();
      acc.head<3>() += rt * (-I1 * ccross(kc, e[idx])).real();
      acc.tail<3>() += rt * b[idx].real();
    }
    return acc;
  });
  return {a.head<3>() * g.cell_volume(), a.tail<3>() * g.cell_volume()};
}

struct ShellCoeff {
  double c, s, s_over_r, omc, omc_over_r, omc_over_r2;
};

enum class Form { perturbation, absolute };

// Shared integrator for both forms. The torque is
//   (1/I) [K_lin x w + T2(C) - (w_shift + w) x S(C)],
// with (K_lin, w_shift) = (K_grid, omega) for perturbations and (0, 0) for the absolute system.
// Admissible states have e_hat = i E and b_hat = B with real E, B, and both the free flow and the
// source keep that exactly, so the loop works on the real vectors.
class Stepper {
 public:
  Stepper(const ChargeProfile& profile, const Vec3& omega_ref, Form form, const FieldState& init,
          const IntegratorSpec& spec)
      : table_(ModeTable::build(init.grid, profile)), form_(form), spec_(spec), omega_ref_(omega_ref),
        grid_(init.grid) {
    if (!(spec.dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(spec.t_end >= 0.0)) throw PreconditionError("t_end must be non-negative");
    if (spec.corrector_sweeps < 1) throw PreconditionError("corrector_sweeps must be >= 1");
    if (spec.record_every < 1) throw PreconditionError("record_every must be >= 1");
    const KGrid& g = grid_;
    if (g.k_max * spec.dt >= pi / 4.0) throw PreconditionError("dt too large for the grid: need k_max * dt < pi/4");
    I_ = profile.moment_of_inertia();
    if (form_ == Form::perturbation) {
      K_lin_ = K_vector_grid(table_, omega_ref_);
      w_shift_ = omega_ref_;
    }
    load(init);
    const double dt = spec.dt;
    coeff_.resize(table_.shells());
    for (std::size_t s = 0; s < table_.shells(); ++s) {
      const double r = table_.shell_r[s];
      const double h = std::sin(0.5 * r * dt);
      ShellCoeff& c = coeff_[s];
      c.c = std::cos(r * dt);
      c.s = std::sin(r * dt);
      c.s_over_r = c.s / r;
      c.omc = 2.0 * h * h;
      c.omc_over_r = c.omc / r;
      c.omc_over_r2 = c.omc / (r * r);
    }
    kvec_.resize(g.size());
    sol_e_.resize(g.size());
    sol_b_.resize(g.size());
    // Self-interaction of the deposited current during one step (cubic-lattice isotropy).
    double a = 0.0, b = 0.0, se = 0.0, sb = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const ShellCoeff& c = coeff_[table_.shell[idx]];
      const double rt2 = table_.rho_tilde[idx] * table_.rho_tilde[idx];
      a += rt2 * c.omc;
      b += rt2 * (dt - c.s_over_r);
      const Vec3 k = g.k(idx);
      const double r2 = table_.r[idx] * table_.r[idx];
      kvec_[idx] = k;
      sol_e_[idx] = -(table_.rho_hat[idx] / r2) * k;
      sol_b_[idx] = table_.rho_tilde[idx] * (k.dot(omega_ref_) / r2 * k - omega_ref_);
      se += sol_e_[idx].squaredNorm();
      sb += sol_b_[idx].squaredNorm();
    }
    A_s_ = (2.0 / 3.0) * a * g.cell_volume();
    B_s_ = (2.0 / 3.0) * b * g.cell_volume();
    sol_energy_ = 0.5 * (se + sb) * g.cell_volume();
  }

  Trajectory run() {
    Trajectory tr;
    const double dt = spec_.dt;
    const long nsteps = std::lround(spec_.t_end / dt);
    std::vector<long> snap_steps;
    for (double ts : spec_.snapshot_times) snap_steps.push_back(std::lround(ts / dt));

    Sums cur = sweep(nullptr);
    const double H0 = total_energy(cur);
    const double scale = std::abs(H0) > 0.0 ? std::abs(H0) : 1.0;
    auto record = [&](long n, const Sums& s) {
      const double H = total_energy(s);
      const double drift = std::abs(H - H0) / scale;
      tr.max_rel_energy_drift = std::max(tr.max_rel_energy_drift, drift);
      if (n % spec_.record_every == 0 || n == nsteps) tr.rows.push_back(row(s));
      if (std::find(snap_steps.begin(), snap_steps.end(), n) != snap_steps.end()) tr.snapshots.push_back(state());
      if (drift > 100.0 * spec_.energy_tol) {
        std::ostringstream os;
        os << "energy drift " << drift << " exceeds 100x tolerance " << spec_.energy_tol << " at t = " << time_;
        throw DriftAbort(os.str());
      }
    };
    record(0, cur);
    for (long n = 1; n <= nsteps; ++n) {
      const Vec3 w = w_;
      const Vec3 tau = (K_lin_.cross(w) + cur.T2 - (w_shift_ + w).cross(cur.S)) / I_;
      Vec3 w_mid = w + 0.5 * dt * tau;
      Vec3 w_next = w;
      for (int it = 0; it < spec_.corrector_sweeps; ++it) {
        w_next = w + (dt * K_lin_.cross(w_mid) + cur.T2bar - A_s_ * w_mid - (w_shift_ + w_mid).cross(cur.Sbar) +
                      B_s_ * w_shift_.cross(w_mid)) / I_;
        if (it + 1 < spec_.corrector_sweeps) w_mid = 0.5 * (w + w_next);
      }
      cur = sweep(&w_mid);
      w_ = w_next;
      time_ = t0_ + n * dt;
      if (spec_.projection_every > 0 && n % spec_.projection_every == 0) {
        tr.max_constraint_defect = std::max(tr.max_constraint_defect, defect());
        load(project(state()));
        cur = sweep(nullptr);
      }
      record(n, cur);
      ++tr.steps;
    }
    tr.max_constraint_defect = std::max(tr.max_constraint_defect, defect());
    return tr;
  }

 private:
  struct Sums {
    Vec3 T2 = Vec3::Zero(), S = Vec3::Zero(), T2bar = Vec3::Zero(), Sbar = Vec3::Zero();
    double ee = 0, bb = 0, cross_e = 0, cross_b = 0, dev_e = 0, dev_b = 0;
  };

  void load(const FieldState& s) {
    const std::size_t N = s.grid.size();
    E_.resize(N);
    B_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      E_[i] = s.e_hat[i].imag();
      B_[i] = s.b_hat[i].real();
    }
    w_ = s.omega_pert;
    time_ = s.time;
    if (!loaded_) t0_ = s.time;
    loaded_ = true;
  }

  FieldState state() const {
    FieldState s = FieldState::zero(grid_);
    for (std::size_t i = 0; i < E_.size(); ++i) {
      s.e_hat[i] = cplx(0.0, 1.0) * E_[i].cast<cplx>();
      s.b_hat[i] = B_[i].cast<cplx>();
    }
    s.omega_pert = w_;
    s.time = time_;
    return s;
  }

  // One pass over the grid. With w_src, advances the fields over one step (free flow plus the
  // Duhamel deposit of the current with w_src); then gathers the torque sums and the step
  // averages over [t, t + dt] of the free flow for the state now stored.
  Sums sweep(const Vec3* w_src) {
    const KGrid& g = grid_;
    using Acc = Eigen::Matrix<double, 18, 1>;
    const Acc a = par::reduce(g.size(), Acc(Acc::Zero()), [&](std::size_t begin, std::size_t end) {
      Acc acc = Acc::Zero();
      for (std::size_t idx = begin; idx < end; ++idx) {
        const Vec3& k = kvec_[idx];
        const double r = table_.r[idx];
        const Vec3 kh = k / r;
        const ShellCoeff& c = coeff_[table_.shell[idx]];
        const double rt = table_.rho_tilde[idx];
        Vec3& e = E_[idx];
        Vec3& b = B_[idx];
        if (w_src) {
          const double el = kh.dot(e), bl = kh.dot(b);
          const Vec3 ne = el * kh + c.c * (e - el * kh) + c.s * kh.cross(b);
          const Vec3 nb = bl * kh + c.c * (b - bl * kh) + c.s * kh.cross(e);
          const Vec3 jre = rt * w_src->cross(k);
          e = ne - c.s_over_r * jre;
          b = nb - c.omc_over_r2 * k.cross(jre);
        }
        const Vec3 bL = kh.dot(b) * kh;
        const Vec3 ke = k.cross(e);
        acc.segment<3>(0) += rt * ke;
        acc.segment<3>(3) += rt * b;
        acc.segment<3>(6) += rt * (c.s_over_r * ke - c.omc * (b - bL));
        acc.segment<3>(9) += rt * (spec_.dt * bL + c.s_over_r * (b - bL) + c.omc_over_r2 * ke);
        const Vec3& se = sol_e_[idx];
        const Vec3& sb = sol_b_[idx];
        acc[12] += e.squaredNorm();
        acc[13] += b.squaredNorm();
        acc[14] += se.dot(e);
        acc[15] += sb.dot(b);
        acc[16] += (e - se).squaredNorm();
        acc[17] += (b - sb).squaredNorm();
      }
      return acc;
    });
    const double dv = g.cell_volume();
    Sums s;
    s.T2 = a.segment<3>(0) * dv;
    s.S = a.segment<3>(3) * dv;
    s.T2bar = a.segment<3>(6) * dv;
    s.Sbar = a.segment<3>(9) * dv;
    s.ee = a[12] * dv;
    s.bb = a[13] * dv;
    s.cross_e = a[14] * dv;
    s.cross_b = a[15] * dv;
    s.dev_e = a[16] * dv;
    s.dev_b = a[17] * dv;
    return s;
  }

  double total_energy(const Sums& s) const {
    if (form_ == Form::perturbation)
      return 0.5 * I_ * (omega_ref_ + w_).squaredNorm() + sol_energy_ + s.cross_e + s.cross_b + 0.5 * (s.ee + s.bb);
    return 0.5 * I_ * w_.squaredNorm() + 0.5 * (s.ee + s.bb);
  }

  TrajectoryRow row(const Sums& s) const {
    TrajectoryRow r;
    r.t = time_;
    r.omega = w_;
    r.H_total = total_energy(s);
    if (form_ == Form::perturbation) {
      r.H_pert = 0.5 * I_ * w_.squaredNorm() + 0.5 * (s.ee + s.bb);
      r.norm_e = std::sqrt(s.ee);
      r.norm_b = std::sqrt(s.bb);
    } else {
      r.H_pert = 0.5 * I_ * (w_ - omega_ref_).squaredNorm() + 0.5 * (s.dev_e + s.dev_b);
      r.norm_e = std::sqrt(s.dev_e);
      r.norm_b = std::sqrt(s.dev_b);
    }
    return r;
  }

  double defect() const {
    if (form_ == Form::perturbation) return constraint_defects(state()).max();
    return absolute_defects(state(), table_).max();
  }

  FieldState project(const FieldState& st) const {
    if (form_ == Form::perturbation) {
      FieldState p = project_constraints(st);
      p.omega_pert = st.omega_pert;
      p.time = st.time;
      return p;
    }
    // remove the static Coulomb part, project the radiation part, restore
    FieldState rad = st;
    for (std::size_t idx = 0; idx < rad.e_hat.size(); ++idx) rad.e_hat[idx] -= I1 * sol_e_[idx].cast<cplx>();
    rad = project_constraints(rad);
    for (std::size_t idx = 0; idx < rad.e_hat.size(); ++idx) rad.e_hat[idx] += I1 * sol_e_[idx].cast<cplx>();
    rad.omega_pert = st.omega_pert;
    rad.time = st.time;
    return rad;
  }

  ModeTable table_;
  Form form_;
  IntegratorSpec spec_;
  Vec3 omega_ref_;
  KGrid grid_;
  std::vector<Vec3> E_, B_, kvec_, sol_e_, sol_b_;
  Vec3 w_ = Vec3::Zero();
  double time_ = 0.0, t0_ = 0.0;
  bool loaded_ = false;
  double I_ = 0.0;
  Vec3 K_lin_ = Vec3::Zero(), w_shift_ = Vec3::Zero();
  std::vector<ShellCoeff> coeff_;
  double A_s_ = 0.0, B_s_ = 0.0, sol_energy_ = 0.0;
};

}  // namespace

Vec3 torque_rhs(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& state) {
  const ModeTable table = ModeTable::build(state.grid, profile);
  const auto [T2, S] = torque_sums(table, state.e_hat, state.b_hat);
  const Vec3 K = K_vector(profile, omega_base);
  const Vec3& W = state.omega_pert;
  return (K.cross(W) + T2 - (omega_base + W).cross(S)) / profile.moment_of_inertia();
}

Vec3 torque_rhs_grid(const ChargeProfile& profile, const ModeTable& table, const Vec3& omega_base,
                     const FieldState& state) {
  const auto [T2, S] = torque_sums(table, state.e_hat, state.b_hat);
  const Vec3 K = K_vector_grid(table, omega_base);
  const Vec3& W = state.omega_pert;
  return (K.cross(W) + T2 - (omega_base + W).cross(S)) / profile.moment_of_inertia();
}

Vec3 torque_xspace(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& state,
                   int points_per_axis) {
  const double R = profile.support_radius();
  XGridSpec spec;
  spec.spacing = 2.0 * R / (points_per_axis - 1);
  spec.origin = Vec3::Constant(-R);
  spec.count = {points_per_axis, points_per_axis, points_per_axis};
  const RealFields x = synthesize_x(state, spec);
  const Vec3 w = omega_base + state.omega_pert;
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < x.e.size(); ++i) {
    const Vec3 p = spec.point(i);
    const double rho = profile.eval_rho(p.norm());
    if (rho == 0.0) continue;
    acc += rho * p.cross(x.e[i] + w.cross(p).cross(x.b[i]));
  }
  acc *= std::pow(spec.spacing, 3);
  const Vec3 K = K_vector(profile, omega_base);
  return (K.cross(state.omega_pert) + acc) / profile.moment_of_inertia();
}

Trajectory evolve(const ChargeProfile& profile, const Vec3& omega_base, const FieldState& init,
                  const IntegratorSpec& spec) {
  if (!is_admissible(init, 1e-10))
    throw PreconditionError("evolve: initial perturbation violates parity/transversality");
  Stepper st(profile, omega_base, Form::perturbation, init, spec);
  return st.run();
}

Trajectory evolve_absolute(const ChargeProfile& profile, const FieldState& init, const IntegratorSpec& spec,
                           const Vec3& omega_ref) {
  const ModeTable table = ModeTable::build(init.grid, profile);
  if (absolute_defects(init, table).max() > 1e-10)
    throw PreconditionError("evolve_absolute: initial fields violate the Gauss law or parity");
  Stepper st(profile, omega_ref, Form::absolute, init, spec);
  return st.run();
}

Trajectory evolve_absolute(const ChargeProfile& profile, const FieldState& init, const IntegratorSpec& spec) {
  return evolve_absolute(profile, init, spec, init.omega_pert);
}

FieldState soliton_total_state(const ModeTable& table, const Vec3& omega, const FieldState* perturbation) {
  const KGrid& g = table.grid;
  FieldState s = FieldState::zero(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const SolitonMode m = soliton_mode(g.k(idx), table.r[idx], table.rho_hat[idx], table.rho_tilde[idx], omega);
    s.e_hat[idx] = m.E;
    s.b_hat[idx] = m.B;
  }
  s.omega_pert = omega;
  if (perturbation) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      s.e_hat[idx] += perturbation->e_hat[idx];
      s.b_hat[idx] += perturbation->b_hat[idx];
    }
    s.omega_pert += perturbation->omega_pert;
    s.time = perturbation->time;
  }
  return s;
}

double AbsoluteDefects::max() const { return std::max({parity, phase, gauss_e, div_b}); }

AbsoluteDefects absolute_defects(const FieldState& state, const ModeTable& table) {
  const KGrid& g = table.grid;
  using Acc = Eigen::Matrix<double, 5, 1>;
  struct Mx {
    Acc a = Acc::Zero();
    Mx operator+(const Mx& o) const {
      Mx m;
      m.a = a.cwiseMax(o.a);
      return m;
    }
  };
  const Mx m = par::reduce(g.size(), Mx{}, [&](std::size_t begin, std::size_t end) {
    Mx acc;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t mi = g.mirror(idx);
      const Vec3 k = g.k(idx);
      const CVec3& e = state.e_hat[idx];
      const CVec3& b = state.b_hat[idx];
      Acc v;
      v[0] = std::max((e + state.e_hat[mi]).norm(), (b - state.b_hat[mi]).norm());
      v[1] = std::max(e.real().norm(), b.imag().norm());
      v[2] = std::abs(I1 * k.cast<cplx>().dot(e) - table.rho_hat[idx]) / table.r[idx];
      v[3] = std::abs((k / table.r[idx]).cast<cplx>().dot(b));
      v[4] = std::max(e.norm(), b.norm());
      acc.a = acc.a.cwiseMax(v);
    }
    return acc;
  });
  const double scale = m.a[4] > 0.0 ? m.a[4] : 1.0;
  AbsoluteDefects d;
  d.parity = m.a[0] / scale;
  d.phase = m.a[1] / scale;
  d.gauss_e = m.a[2] / scale;
  d.div_b = m.a[3] / scale;
  return d;
}

}  // namespace spincharge
