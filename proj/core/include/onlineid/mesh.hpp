#pragma once

#include <vector>

namespace onlineid::fem {

/// Uniform grid 0 = x_0 < x_1 < ... < x_{N-1} = 1 on the unit interval.
///
/// Nodes are zero-based here. Element `e` spans [x_e, x_{e+1}].
class Mesh1D {
 public:
  /// Throws InputError when n_nodes < 3.
  explicit Mesh1D(int n_nodes);

  int n_nodes() const noexcept { return n_nodes_; }
  int n_elements() const noexcept { return n_nodes_ - 1; }
  /// Two Hermite degrees of freedom per node.
  int n_dofs() const noexcept { return 2 * n_nodes_; }
  double h() const noexcept { return h_; }

  double node(int j) const;
  std::vector<double> nodes() const;

  /// Element containing x; nodes belong to the element on their right
  /// except x = 1, which belongs to the last element.
  int element_of(double x) const;

  /// Local coordinate s in [0, 1] of x within element e.
  double local_coordinate(int e, double x) const noexcept {
    return (x - node(e)) / h_;
  }

  friend bool operator==(const Mesh1D& a, const Mesh1D& b) noexcept {
    return a.n_nodes_ == b.n_nodes_;
  }

 private:
  int n_nodes_;
  double h_;
};

}  // namespace onlineid::fem
