#pragma once

#include <vector>

#include <Eigen/Dense>

namespace onlineid::fem {

/// Square matrix with `lower` sub- and `upper` super-diagonals, stored in
/// LAPACK general-band layout with room for the LU fill-in.
class BandedMatrix {
 public:
  BandedMatrix(int n, int lower, int upper);

  int rows() const noexcept { return n_; }
  int lower() const noexcept { return kl_; }
  int upper() const noexcept { return ku_; }

  bool in_band(int i, int j) const noexcept {
    return j - i <= ku_ && i - j <= kl_ && i >= 0 && j >= 0 && i < n_ &&
           j < n_;
  }

  /// Entry (i, j); zero outside the band.
  double operator()(int i, int j) const noexcept;
  /// Mutable entry; throws ContractError outside the band.
  double& at(int i, int j);
  void add(int i, int j, double v) { at(i, j) += v; }

  /// Replaces row i by the i-th unit row.
  void set_identity_row(int i);

  /// this += s * other (shapes must agree).
  BandedMatrix& add_scaled(const BandedMatrix& other, double s);

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(*this * x); }
  Eigen::MatrixXd to_dense() const;

  /// 1-norm (max column sum), used for the condition estimate.
  double norm1() const noexcept;

  /// Raw LAPACK band storage and its leading dimension.
  const std::vector<double>& storage() const noexcept { return ab_; }
  int leading_dimension() const noexcept { return ldab_; }

 private:
  std::size_t index(int i, int j) const noexcept {
    // LAPACK: AB(kl + ku + i - j, j), column-major.
    return static_cast<std::size_t>(kl_ + ku_ + i - j) +
           static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_);
  }

  int n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;
};

/// Direct banded LU solve (row/column equilibration, partial pivoting).
/// Throws SolverError when a row or column is zero, a pivot vanishes or the
/// reciprocal condition estimate of the equilibrated matrix falls below
/// `min_rcond`.
Eigen::VectorXd solve_linear(const BandedMatrix& a, const Eigen::VectorXd& rhs,
                             double min_rcond = 1e-14);

}  // namespace onlineid::fem
