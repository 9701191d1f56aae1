#include "onlineid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "onlineid/errors.hpp"

namespace onlineid::fem {

Mesh1D::Mesh1D(int n_nodes) : n_nodes_(n_nodes), h_(0.0) {
  if (n_nodes < 3) {
    throw InputError("Mesh1D: need at least 3 nodes, got " +
                     std::to_string(n_nodes));
  }
  h_ = 1.0 / static_cast<double>(n_nodes - 1);
}

double Mesh1D::node(int j) const {
  if (j < 0 || j >= n_nodes_) {
    throw std::out_of_range("Mesh1D::node: index " + std::to_string(j));
  }
  // Exact endpoints; interior nodes as j/(N-1) rather than accumulated h.
  if (j == n_nodes_ - 1) return 1.0;
  return static_cast<double>(j) / static_cast<double>(n_nodes_ - 1);
}

std::vector<double> Mesh1D::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(n_nodes_));
  for (int j = 0; j < n_nodes_; ++j) x[static_cast<std::size_t>(j)] = node(j);
  return x;
}

int Mesh1D::element_of(double x) const {
  const int e = static_cast<int>(std::floor(x / h_));
  return std::clamp(e, 0, n_elements() - 1);
}

}  // namespace onlineid::fem
