#pragma once

#include <vector>

namespace onlineid::fem {

/// Quadrature on the reference interval [0, 1]; weights sum to 1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  /// Highest polynomial degree integrated exactly.
  int exact_degree = 0;

  std::size_t size() const noexcept { return points.size(); }
};

/// n-point Gauss-Legendre rule (exact to degree 2n - 1), n >= 1.
QuadratureRule gauss_legendre(int n);

/// The per-element rule used by every assembly and norm routine:
/// 5 points, exact to degree 9 (cubic * cubic * cubic).
const QuadratureRule& default_rule();

}  // namespace onlineid::fem
