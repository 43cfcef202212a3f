#pragma once

#include <vector>

namespace spincharge {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre rule on [a, b].
QuadRule gauss_legendre(int n, double a, double b);

// Composite rule: [a, b] split into `panels` equal panels of `order` nodes each.
QuadRule gauss_legendre_panels(int panels, int order, double a, double b);

}  // namespace spincharge
