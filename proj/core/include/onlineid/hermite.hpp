#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "onlineid/mesh.hpp"

namespace onlineid::fem {

/// phi_j carries the nodal value, psi_j the nodal slope.
enum class BasisKind { Value, Slope };

enum class Boundary { DirichletZero, Free };

/// The four cubic Hermite shape functions of one element and their first
/// and second x-derivatives, ordered [left value, left slope, right value,
/// right slope] to match the interleaved dof layout.
struct ElementShape {
  std::array<double, 4> value;
  std::array<double, 4> d1;
  std::array<double, 4> d2;
};

ElementShape element_shape(double s, double h) noexcept;

/// Global basis function phi_j / psi_j (zero-based node j) at x in [0, 1].
/// Throws std::out_of_range for j outside [0, N-1] and InputError for x
/// outside the domain.
double eval_basis(const Mesh1D& mesh, int j, BasisKind kind, double x);
double eval_basis_derivative(const Mesh1D& mesh, int j, BasisKind kind,
                             double x);

inline int value_dof(int node) noexcept { return 2 * node; }
inline int slope_dof(int node) noexcept { return 2 * node + 1; }

/// Scalar field in the C^1 cubic Hermite space, stored as interleaved
/// (value, slope) coefficients per node.
class HermiteField {
 public:
  explicit HermiteField(Mesh1D mesh, Boundary boundary = Boundary::Free);
  HermiteField(Mesh1D mesh, Eigen::VectorXd dofs,
               Boundary boundary = Boundary::Free);

  const Mesh1D& mesh() const noexcept { return mesh_; }
  Boundary boundary() const noexcept { return boundary_; }
  const Eigen::VectorXd& dofs() const noexcept { return dofs_; }

  /// Replaces the coefficients, re-imposing the boundary constraint.
  void set_dofs(Eigen::VectorXd dofs);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// Evaluation on element e at local coordinate s (no element search).
  double value_on(int e, double s) const noexcept;
  double derivative_on(int e, double s) const noexcept;
  double second_derivative_on(int e, double s) const noexcept;

  HermiteField& operator+=(const HermiteField& other);
  HermiteField& operator-=(const HermiteField& other);
  HermiteField& operator*=(double s);

 private:
  void enforce_boundary() noexcept;

  Mesh1D mesh_;
  Eigen::VectorXd dofs_;
  Boundary boundary_;
};

HermiteField operator+(HermiteField a, const HermiteField& b);
HermiteField operator-(HermiteField a, const HermiteField& b);
HermiteField operator*(double s, HermiteField a);

using ScalarFunction = std::function<double(double)>;

/// Hermite interpolant: value dof = f(x_j), slope dof = f'(x_j). Exact for
/// cubic polynomials. Throws InputError on non-finite samples.
HermiteField interpolate(const Mesh1D& mesh, const ScalarFunction& f,
                         const ScalarFunction& df,
                         Boundary boundary = Boundary::Free);

}  // namespace onlineid::fem
