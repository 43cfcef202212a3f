#include "spincharge/kgrid.hpp"

#include <algorithm>
#include <cmath>

namespace spincharge {

KGrid::KGrid(int n_per_axis, double kmax) : n(n_per_axis), k_max(kmax) {
  if (n < 2 || n % 2 != 0) throw PreconditionError("n_per_axis must be even and >= 2");
  if (!(k_max > 0.0)) throw PreconditionError("k_max must be positive");
}

Vec3 KGrid::k(std::size_t idx) const {
  const int l = static_cast<int>(idx % n);
  const int j = static_cast<int>((idx / n) % n);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
  return {coord(i), coord(j), coord(l)};
}

std::size_t KGrid::mirror(std::size_t idx) const {
  const int l = static_cast<int>(idx % n);
  const int j = static_cast<int>((idx / n) % n);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
  return index(n - 1 - i, n - 1 - j, n - 1 - l);
}

std::int64_t KGrid::shell_key(std::size_t idx) const {
  const std::int64_t l = static_cast<std::int64_t>(idx % n);
  const std::int64_t j = static_cast<std::int64_t>((idx / n) % n);
  const std::int64_t i = static_cast<std::int64_t>(idx / (static_cast<std::size_t>(n) * n));
  const std::int64_t a = 2 * i - n + 1, b = 2 * j - n + 1, c = 2 * l - n + 1;
  return a * a + b * b + c * c;
}

double decay_ratio(const KGrid& grid, const ChargeProfile& profile) {
  const double R = profile.support_radius();
  double peak = 0.0;
  for (double r = 0.0; r < 6.0 / R; r += 0.02 / R) peak = std::max(peak, std::abs(profile.radial_fourier(r)));
  const double window = 2.0 * pi / R;
  double env = 0.0;
  for (int j = 0; j <= 32; ++j)
    env = std::max(env, std::abs(profile.radial_fourier(grid.k_max + window * (j / 32.0 - 0.5))));
  return env / peak;
}

ModeTable ModeTable::build(const KGrid& grid, const ChargeProfile& profile) {
  ModeTable t;
  t.grid = grid;
  const std::size_t N = grid.size();
  const std::int64_t kmax_key = 3LL * (grid.n - 1) * (grid.n - 1);
  std::vector<std::int64_t> slot(static_cast<std::size_t>(kmax_key + 1), -1);
  for (int i = 0; i < grid.n; ++i) {
    const std::int64_t a = 2 * i - grid.n + 1;
    for (int j = 0; j < grid.n; ++j) {
      const std::int64_t b = 2 * j - grid.n + 1;
      for (int l = 0; l < grid.n; ++l) {
        const std::int64_t c = 2 * l - grid.n + 1;
        slot[static_cast<std::size_t>(a * a + b * b + c * c)] = 0;
      }
    }
  }
  std::vector<double> sr, srh, srt, srd;
  for (std::int64_t key = 0; key <= kmax_key; ++key) {
    if (slot[static_cast<std::size_t>(key)] < 0) continue;
    slot[static_cast<std::size_t>(key)] = static_cast<std::int64_t>(sr.size());
    const double r = 0.5 * grid.dk() * std::sqrt(static_cast<double>(key));
    const RadialSample s = profile.radial(r);
    sr.push_back(r);
    srh.push_back(s.rho_hat);
    srt.push_back(s.rho_tilde);
    srd.push_back(s.rho_tilde_dr_over_r);
  }
  t.shell_r = sr;
  t.shell.resize(N);
  t.r.resize(N);
  t.rho_hat.resize(N);
  t.rho_tilde.resize(N);
  t.rho_tilde_dr_over_r.resize(N);
  for (std::size_t idx = 0; idx < N; ++idx) {
    const auto s = static_cast<std::uint32_t>(slot[static_cast<std::size_t>(grid.shell_key(idx))]);
    t.shell[idx] = s;
    t.r[idx] = sr[s];
    t.rho_hat[idx] = srh[s];
    t.rho_tilde[idx] = srt[s];
    t.rho_tilde_dr_over_r[idx] = srd[s];
  }
  return t;
}

}  // namespace spincharge
