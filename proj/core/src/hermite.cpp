#include "onlineid/hermite.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "onlineid/errors.hpp"

namespace onlineid::fem {

ElementShape element_shape(double s, double h) noexcept {
  const double s2 = s * s;
  const double s3 = s2 * s;
  ElementShape sh{};
  sh.value = {1.0 - 3.0 * s2 + 2.0 * s3, h * (s - 2.0 * s2 + s3),
              3.0 * s2 - 2.0 * s3, h * (s3 - s2)};
  sh.d1 = {(-6.0 * s + 6.0 * s2) / h, 1.0 - 4.0 * s + 3.0 * s2,
           (6.0 * s - 6.0 * s2) / h, 3.0 * s2 - 2.0 * s};
  sh.d2 = {(-6.0 + 12.0 * s) / (h * h), (-4.0 + 6.0 * s) / h,
           (6.0 - 12.0 * s) / (h * h), (6.0 * s - 2.0) / h};
  return sh;
}

namespace {

void check_basis_args(const Mesh1D& mesh, int j, double x) {
  if (j < 0 || j >= mesh.n_nodes()) {
    throw std::out_of_range("eval_basis: node index " + std::to_string(j) +
                            " outside [0, " +
                            std::to_string(mesh.n_nodes() - 1) + "]");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError("eval_basis: x outside [0, 1]");
  }
}

// Which local shape (0..3) of which element represents basis (j, kind) at x,
// or -1 if x lies outside the support.
std::pair<int, int> locate(const Mesh1D& mesh, int j, BasisKind kind,
                           double x) {
  const int offset = kind == BasisKind::Value ? 0 : 1;
  const double xj = mesh.node(j);
  if (x < xj) {
    if (j == 0 || x <= mesh.node(j - 1)) return {-1, -1};
    return {j - 1, 2 + offset};
  }
  if (x > xj) {
    if (j == mesh.n_nodes() - 1 || x >= mesh.node(j + 1)) return {-1, -1};
    return {j, offset};
  }
  return {j < mesh.n_nodes() - 1 ? j : j - 1,
          j < mesh.n_nodes() - 1 ? offset : 2 + offset};
}

}  // namespace

double eval_basis(const Mesh1D& mesh, int j, BasisKind kind, double x) {
  check_basis_args(mesh, j, x);
  const auto [e, local] = locate(mesh, j, kind, x);
  if (e < 0) return 0.0;
  return element_shape(mesh.local_coordinate(e, x), mesh.h())
      .value[static_cast<std::size_t>(local)];
}

double eval_basis_derivative(const Mesh1D& mesh, int j, BasisKind kind,
                             double x) {
  check_basis_args(mesh, j, x);
  const auto [e, local] = locate(mesh, j, kind, x);
  if (e < 0) return 0.0;
  return element_shape(mesh.local_coordinate(e, x), mesh.h())
      .d1[static_cast<std::size_t>(local)];
}

HermiteField::HermiteField(Mesh1D mesh, Boundary boundary)
    : mesh_(mesh), dofs_(Eigen::VectorXd::Zero(mesh.n_dofs())),
      boundary_(boundary) {}

HermiteField::HermiteField(Mesh1D mesh, Eigen::VectorXd dofs,
                           Boundary boundary)
    : mesh_(mesh), dofs_(std::move(dofs)), boundary_(boundary) {
  if (dofs_.size() != mesh_.n_dofs()) {
    throw InputError("HermiteField: expected " +
                     std::to_string(mesh_.n_dofs()) + " dofs, got " +
                     std::to_string(dofs_.size()));
  }
  enforce_boundary();
}

void HermiteField::set_dofs(Eigen::VectorXd dofs) {
  if (dofs.size() != mesh_.n_dofs()) {
    throw InputError("HermiteField::set_dofs: size mismatch");
  }
  dofs_ = std::move(dofs);
  enforce_boundary();
}

void HermiteField::enforce_boundary() noexcept {
  if (boundary_ == Boundary::DirichletZero) {
    dofs_[value_dof(0)] = 0.0;
    dofs_[value_dof(mesh_.n_nodes() - 1)] = 0.0;
  }
}

double HermiteField::value_on(int e, double s) const noexcept {
  const auto sh = element_shape(s, mesh_.h());
  const auto c = dofs_.segment<4>(2 * e);
  return c[0] * sh.value[0] + c[1] * sh.value[1] + c[2] * sh.value[2] +
         c[3] * sh.value[3];
}

double HermiteField::derivative_on(int e, double s) const noexcept {
  const auto sh = element_shape(s, mesh_.h());
  const auto c = dofs_.segment<4>(2 * e);
  return c[0] * sh.d1[0] + c[1] * sh.d1[1] + c[2] * sh.d1[2] +
         c[3] * sh.d1[3];
}

double HermiteField::second_derivative_on(int e, double s) const noexcept {
  const auto sh = element_shape(s, mesh_.h());
  const auto c = dofs_.segment<4>(2 * e);
  return c[0] * sh.d2[0] + c[1] * sh.d2[1] + c[2] * sh.d2[2] +
         c[3] * sh.d2[3];
}

double HermiteField::value(double x) const {
  const int e = mesh_.element_of(x);
  return value_on(e, mesh_.local_coordinate(e, x));
}

double HermiteField::derivative(double x) const {
  const int e = mesh_.element_of(x);
  return derivative_on(e, mesh_.local_coordinate(e, x));
}

double HermiteField::second_derivative(double x) const {
  const int e = mesh_.element_of(x);
  return second_derivative_on(e, mesh_.local_coordinate(e, x));
}

HermiteField& HermiteField::operator+=(const HermiteField& other) {
  if (!(mesh_ == other.mesh_)) throw InputError("HermiteField: mesh mismatch");
  dofs_ += other.dofs_;
  enforce_boundary();
  return *this;
}

HermiteField& HermiteField::operator-=(const HermiteField& other) {
  if (!(mesh_ == other.mesh_)) throw InputError("HermiteField: mesh mismatch");
  dofs_ -= other.dofs_;
  enforce_boundary();
  return *this;
}

HermiteField& HermiteField::operator*=(double s) {
  dofs_ *= s;
  enforce_boundary();
  return *this;
}

HermiteField operator+(HermiteField a, const HermiteField& b) {
  a += b;
  return a;
}

HermiteField operator-(HermiteField a, const HermiteField& b) {
  a -= b;
  return a;
}

HermiteField operator*(double s, HermiteField a) {
  a *= s;
  return a;
}

HermiteField interpolate(const Mesh1D& mesh, const ScalarFunction& f,
                         const ScalarFunction& df, Boundary boundary) {
  Eigen::VectorXd dofs(mesh.n_dofs());
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    const double x = mesh.node(j);
    const double v = f(x);
    const double dv = df(x);
    if (!std::isfinite(v) || !std::isfinite(dv)) {
      throw InputError("interpolate: non-finite sample at x = " +
                       std::to_string(x));
    }
    dofs[value_dof(j)] = v;
    dofs[slope_dof(j)] = dv;
  }
  return HermiteField(mesh, std::move(dofs), boundary);
}

}  // namespace onlineid::fem
