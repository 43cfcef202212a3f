#pragma once

#include <cmath>
#include <random>

#include "spincharge/types.hpp"

namespace testutil {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline spincharge::Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  spincharge::Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

// 3-D trapezoid rule over the cube [-a, a]^3 with `m` points per axis.
template <class F>
double cube_trapezoid(double a, int m, F&& f) {
  const double h = 2.0 * a / (m - 1);
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) {
        const double w = (i == 0 || i == m - 1 ? 0.5 : 1.0) * (j == 0 || j == m - 1 ? 0.5 : 1.0) *
                         (l == 0 || l == m - 1 ? 0.5 : 1.0);
        acc += w * f(spincharge::Vec3(-a + i * h, -a + j * h, -a + l * h));
      }
  return acc * h * h * h;
}

}  // namespace testutil

#include "spincharge/spectral_field.hpp"

namespace testutil {

// Random Gaussian-windowed admissible perturbation (Omega left at zero).
inline spincharge::FieldState random_state(const spincharge::KGrid& g, std::uint64_t seed, double width = 2.0) {
  using namespace spincharge;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  FieldState st = FieldState::zero(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double env = std::exp(-g.k(idx).squaredNorm() / (2.0 * width * width));
    for (int c = 0; c < 3; ++c) {
      st.e_hat[idx][c] = env * cplx(n(rng), n(rng));
      st.b_hat[idx][c] = env * cplx(n(rng), n(rng));
    }
  }
  return project_constraints(st);
}

}  // namespace testutil
