#include "spincharge/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "spincharge/types.hpp"

namespace spincharge {

QuadRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw PreconditionError("gauss_legendre: n must be positive");
  QuadRule q;
  q.x.resize(n);
  q.w.resize(n);
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi's initial guess, then Newton on P_n
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    q.x[i] = xm - xl * z;
    q.x[n - 1 - i] = xm + xl * z;
    q.w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    q.w[n - 1 - i] = q.w[i];
  }
  if (n % 2 == 1) q.x[m - 1] = xm;
  return q;
}

QuadRule gauss_legendre_panels(int panels, int order, double a, double b) {
  if (panels < 1) throw PreconditionError("gauss_legendre_panels: panels must be positive");
  const QuadRule ref = gauss_legendre(order, 0.0, 1.0);
  QuadRule q;
  q.x.reserve(static_cast<std::size_t>(panels) * order);
  q.w.reserve(static_cast<std::size_t>(panels) * order);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      q.x.push_back(lo + h * ref.x[i]);
      q.w.push_back(h * ref.w[i]);
    }
  }
  return q;
}

}  // namespace spincharge
