#include "onlineid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "onlineid/errors.hpp"

namespace onlineid::fem {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// Legendre recurrence, weights the squared first eigenvector components.
QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: need n >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()[a] < eig.eigenvalues()[b];
  });

  QuadratureRule rule;
  rule.exact_degree = 2 * n - 1;
  for (int k : order) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.points.push_back(0.5 * (eig.eigenvalues()[k] + 1.0));
    rule.weights.push_back(v0 * v0);  // 2 v0^2 on [-1,1], halved for [0,1]
  }
  return rule;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = gauss_legendre(5);
  return rule;
}

}  // namespace onlineid::fem
