#pragma once

#include <cstdint>
#include <vector>

#include "spincharge/charge_profile.hpp"
#include "spincharge/types.hpp"

namespace spincharge {

// Cell-centred Cartesian k-grid, symmetric under k -> -k and never touching k = 0.
// Node (i, j, l) sits at ((i - n/2 + 1/2) dk, ...); flat index (i n + j) n + l.
struct KGrid {
  int n = 64;
  double k_max = 12.0;

  KGrid() = default;
  KGrid(int n_per_axis, double kmax);

  double dk() const { return 2.0 * k_max / n; }
  double cell_volume() const { const double h = dk(); return h * h * h; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  double coord(int i) const { return (i - n / 2 + 0.5) * dk(); }
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n + j) * n + l;
  }
  Vec3 k(std::size_t idx) const;
  std::size_t mirror(std::size_t idx) const;
  // Exact integer label of |k|^2 in units of (dk/2)^2.
  std::int64_t shell_key(std::size_t idx) const;
  // Period of the associated x-space lattice (the grid sums see x modulo 2 pi / dk).
  double period() const { return 2.0 * pi / dk(); }

  bool operator==(const KGrid& o) const { return n == o.n && k_max == o.k_max; }
};

// Envelope of |rho_hat| near k_max relative to its maximum.
double decay_ratio(const KGrid& grid, const ChargeProfile& profile);

// Profile data per grid node, evaluated once per distinct |k| (shell).
struct ModeTable {
  KGrid grid;
  std::vector<std::uint32_t> shell;  // per node
  std::vector<double> shell_r;       // per shell
  std::vector<double> r, rho_hat, rho_tilde, rho_tilde_dr_over_r;  // per node

  static ModeTable build(const KGrid& grid, const ChargeProfile& profile);
  std::size_t shells() const { return shell_r.size(); }
};

}  // namespace spincharge
