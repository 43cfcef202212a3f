#include "spincharge/charge_profile.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace spincharge {

namespace {

const double sqrt_2_over_pi = std::sqrt(2.0 / pi);

// sin(x)/x
double j0(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// (sin x - x cos x)/x^3 and its derivative divided by x. Both are even and
// entire; the closed forms cancel badly at small x, so use the series there.
void g12(double x, double& g1, double& g2) {
  if (std::abs(x) < 1.5) {
    const double x2 = x * x;
    // g1 = sum_{n>=1} (-1)^{n+1} 2n x^{2n-2} / (2n+1)!,  g2 = sum_{n>=2} (-1)^{n+1} 2n(2n-2) x^{2n-4} / (2n+1)!
    double fact = 6.0;  // (2n+1)! at n = 1
    double pw = 1.0;    // x^{2n-2}
    g1 = 0.0;
    g2 = 0.0;
    double pw2 = 1.0;  // x^{2n-4} for n >= 2
    for (int n = 1; n <= 13; ++n) {
      const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
      g1 += sgn * 2.0 * n * pw / fact;
      if (n >= 2) {
        g2 += sgn * 2.0 * n * (2.0 * n - 2.0) * pw2 / fact;
        pw2 *= x2;
      }
      pw *= x2;
      fact *= (2.0 * n + 2.0) * (2.0 * n + 3.0);
    }
    return;
  }
  const double s = std::sin(x), c = std::cos(x);
  const double x2 = x * x;
  g1 = (s - x * c) / (x2 * x);
  g2 = s / (x2 * x) - 3.0 * g1 / x2;
}

double bump(double s, double R) {
  if (s >= R) return 0.0;
  const double u = 1.0 - (s / R) * (s / R);
  const double u2 = u * u, u4 = u2 * u2;
  return u4 * u4;
}

}  // namespace

std::string to_string(ProfileKind kind) { return kind == ProfileKind::charged ? "charged" : "neutral"; }

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "charged") return ProfileKind::charged;
  if (s == "neutral") return ProfileKind::neutral;
  throw PreconditionError("unknown profile kind '" + s + "' (expected charged or neutral)");
}

double default_bump_amplitude(double R) {
  const QuadRule q = gauss_legendre(64, 0.0, R);
  double m = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) m += q.w[i] * q.x[i] * q.x[i] * bump(q.x[i], R);
  return 1.0 / (4.0 * pi * m);
}

struct ChargeProfile::Impl {
  ProfileKind kind = ProfileKind::charged;
  double amplitude = 1.0;
  double R = 1.0;
  double beta = 0.0;
  int nodes = 2048;
  std::function<double(double)> custom;  // empty for the default bump family
  double custom_scale = 1.0;

  QuadRule rule;
  std::vector<double> m2, m4, m6;  // w * s^{2,4,6} * rho(s) at the nodes
  double inertia = 0.0;

  mutable std::once_flag table_once;
  mutable KTable table;
  mutable double kcut = 0.0;

  double rho(double s) const {
    if (s >= R) return 0.0;
    if (custom) return custom_scale * custom(s);
    const double b = amplitude * bump(s, R);
    return kind == ProfileKind::neutral ? b * (1.0 - beta * s * s) : b;
  }

  void tabulate_nodes() {
    rule = gauss_legendre(nodes, 0.0, R);
    m2.resize(rule.size());
    m4.resize(rule.size());
    m6.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double s = rule.x[i], s2 = s * s;
      const double v = rule.w[i] * rho(s);
      m2[i] = v * s2;
      m4[i] = m2[i] * s2;
      m6[i] = m4[i] * s2;
    }
    double acc = 0.0;
    for (double v : m4) acc += v;
    inertia = 8.0 * pi / 3.0 * acc;
  }

  RadialSample sample(double r) const {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = r * rule.x[i];
      double g1, g2;
      g12(x, g1, g2);
      a0 += m2[i] * j0(x);
      a1 += m4[i] * g1;
      a2 += m6[i] * g2;
    }
    return {sqrt_2_over_pi * a0, -sqrt_2_over_pi * a1, -sqrt_2_over_pi * a2};
  }

  void build_table() const {
    // Envelope scan: max |rho_hat| over one oscillation window must fall below 1e-14 * rho_max.
    const double window = 2.0 * pi / R;
    double rho_max = 0.0;
    const double step = 0.05 / R;
    for (double r = 0.0; r <= 4.0 / R; r += step) rho_max = std::max(rho_max, std::abs(sample(r).rho_hat));
    double cut = 400.0 / R;
    for (double r0 = 4.0 / R; r0 < 400.0 / R; r0 += window) {
      double env = 0.0;
      for (int j = 0; j < 24; ++j) env = std::max(env, std::abs(sample(r0 + window * j / 24.0).rho_hat));
      if (env < 1e-14 * rho_max) {
        cut = r0;
        break;
      }
    }
    const double panel = 0.5 / R;
    const int panels = static_cast<int>(std::ceil(cut / panel));
    kcut = panels * panel;
    const QuadRule q = gauss_legendre_panels(panels, 24, 0.0, kcut);
    table.r = q.x;
    table.w = q.w;
    table.rho_hat.resize(q.size());
    table.rho_tilde.resize(q.size());
    table.rho_tilde_dr_over_r.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      const RadialSample s = sample(q.x[i]);
      table.rho_hat[i] = s.rho_hat;
      table.rho_tilde[i] = s.rho_tilde;
      table.rho_tilde_dr_over_r[i] = s.rho_tilde_dr_over_r;
    }
  }

  // int_a^b s^power rho(s) ds
  double moment(double a, double b, int power) const {
    if (b <= a) return 0.0;
    static const QuadRule ref = gauss_legendre(96, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double s = a + (b - a) * ref.x[i];
      acc += ref.w[i] * std::pow(s, power) * rho(s);
    }
    return (b - a) * acc;
  }

  const KTable& ktable() const {
    std::call_once(table_once, [this] { build_table(); });
    return table;
  }
};

ChargeProfile::ChargeProfile(const ProfileSpec& spec) {
  if (!(spec.support_radius > 0.0)) throw PreconditionError("support_radius must be positive");
  if (spec.quadrature_points < 8) throw PreconditionError("quadrature_points must be >= 8");
  auto p = std::make_shared<Impl>();
  p->kind = spec.kind;
  p->R = spec.support_radius;
  p->nodes = spec.quadrature_points;
  const double a = default_bump_amplitude(p->R);
  if (spec.kind == ProfileKind::charged) {
    p->amplitude = a;
  } else {
    // beta from int s^2 w (1 - beta s^2) = 0; the amplitude must be negative for I > 0
    const QuadRule q = gauss_legendre(64, 0.0, p->R);
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double s = q.x[i], w = q.w[i] * bump(s, p->R);
      s2 += w * s * s;
      s4 += w * s * s * s * s;
    }
    p->beta = s2 / s4;
    p->amplitude = -a;
  }
  p->tabulate_nodes();
  if (!(p->inertia > 0.0)) throw PreconditionError("profile has non-positive moment of inertia");
  impl_ = std::move(p);
}

ChargeProfile ChargeProfile::from_radial(std::function<double(double)> rho_rad, double R, int nodes) {
  if (!(R > 0.0)) throw PreconditionError("support_radius must be positive");
  auto p = std::make_shared<Impl>();
  p->R = R;
  p->nodes = nodes;
  p->custom = std::move(rho_rad);
  p->amplitude = p->custom(0.0);
  p->tabulate_nodes();
  double q = 0.0, qa = 0.0;
  for (std::size_t i = 0; i < p->m2.size(); ++i) {
    q += p->m2[i];
    qa += std::abs(p->m2[i]);
  }
  p->kind = std::abs(q) <= 1e-12 * qa ? ProfileKind::neutral : ProfileKind::charged;
  if (!(p->inertia > 0.0)) throw PreconditionError("profile has non-positive moment of inertia");
  return ChargeProfile(std::shared_ptr<const Impl>(std::move(p)));
}

ChargeProfile ChargeProfile::scaled(double factor) const {
  auto p = std::make_shared<Impl>();
  p->kind = impl_->kind;
  p->R = impl_->R;
  p->nodes = impl_->nodes;
  p->beta = impl_->beta;
  p->custom = impl_->custom;
  p->custom_scale = impl_->custom_scale * factor;
  p->amplitude = impl_->amplitude * factor;
  p->tabulate_nodes();
  if (!(p->inertia > 0.0)) throw PreconditionError("profile has non-positive moment of inertia");
  return ChargeProfile(std::shared_ptr<const Impl>(std::move(p)));
}

ProfileKind ChargeProfile::kind() const { return impl_->kind; }
double ChargeProfile::amplitude() const { return impl_->amplitude; }
double ChargeProfile::support_radius() const { return impl_->R; }
double ChargeProfile::neutralizer() const { return impl_->beta; }
int ChargeProfile::quadrature_points() const { return impl_->nodes; }
ProfileSpec ChargeProfile::spec() const { return {impl_->kind, impl_->R, impl_->nodes}; }

double ChargeProfile::eval_rho(double s) const {
  if (s < 0.0 || std::isnan(s)) throw DomainError("eval_rho: s must be >= 0");
  return impl_->rho(s);
}

double ChargeProfile::radial_fourier(double r) const {
  if (r < 0.0 || std::isnan(r)) throw DomainError("radial_fourier: r must be >= 0");
  return impl_->sample(r).rho_hat;
}

double ChargeProfile::rho_tilde(double r) const {
  if (r < 0.0 || std::isnan(r)) throw DomainError("rho_tilde: r must be >= 0");
  return impl_->sample(r).rho_tilde;
}

double ChargeProfile::rho_r_prime(double r) const { return r * rho_tilde(r); }

RadialSample ChargeProfile::radial(double r) const {
  if (r < 0.0 || std::isnan(r)) throw DomainError("radial: r must be >= 0");
  return impl_->sample(r);
}

double ChargeProfile::moment_of_inertia() const { return impl_->inertia; }

double ChargeProfile::moment_of_inertia_kspace() const {
  return -2.0 * std::pow(2.0 * pi, 1.5) * impl_->sample(0.0).rho_tilde;
}

double ChargeProfile::total_charge() const {
  double q = 0.0;
  for (double v : impl_->m2) q += v;
  return 4.0 * pi * q;
}

double ChargeProfile::k_cutoff() const {
  impl_->ktable();
  return impl_->kcut;
}

const KTable& ChargeProfile::ktable() const { return impl_->ktable(); }

double ChargeProfile::rho_tilde_sq_integral() const {
  const KTable& t = ktable();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) acc += t.w[i] * t.r[i] * t.r[i] * t.rho_tilde[i] * t.rho_tilde[i];
  return 4.0 * pi * acc;
}

double ChargeProfile::laplacian_integral() const {
  // Laplacian of a radial function: rho_r'' + 2 rho_r'/r = 3 rho_tilde + r rho_tilde'
  const KTable& t = ktable();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i];
    acc += t.w[i] * r * r * (3.0 * t.rho_tilde[i] + r * r * t.rho_tilde_dr_over_r[i]);
  }
  return 4.0 * pi * acc;
}

double ChargeProfile::rho_tilde_laplacian_integral() const {
  const KTable& t = ktable();
  double acc = 0.0;
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    const double r = t.r[i];
    acc += t.w[i] * r * r * t.rho_tilde[i] * (3.0 * t.rho_tilde[i] + r * r * t.rho_tilde_dr_over_r[i]);
  }
  return 4.0 * pi * acc;
}

double ChargeProfile::alpha_rho() const {
  const double I = moment_of_inertia();
  if (I == 0.0) throw PreconditionError("alpha_rho: degenerate profile (I = 0)");
  return -(2.0 / 3.0) * rho_tilde_sq_integral() / I;
}


double ChargeProfile::enclosed_charge_moment(double r) const {
  return impl_->moment(0.0, std::min(r, impl_->R), 2);
}

double ChargeProfile::enclosed_fourth_moment(double r) const {
  return impl_->moment(0.0, std::min(r, impl_->R), 4);
}

double ChargeProfile::outer_first_moment(double r) const {
  return impl_->moment(std::max(r, 0.0), impl_->R, 1);
}

const QuadRule& ChargeProfile::radial_rule() const { return impl_->rule; }

}  // namespace spincharge
