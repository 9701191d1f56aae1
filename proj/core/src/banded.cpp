#include "onlineid/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <lapacke.h>

#include "onlineid/errors.hpp"

namespace onlineid::fem {

BandedMatrix::BandedMatrix(int n, int lower, int upper)
    : n_(n), kl_(lower), ku_(upper), ldab_(2 * lower + upper + 1) {
  if (n < 1 || lower < 0 || upper < 0) {
    throw InputError("BandedMatrix: invalid shape");
  }
  ab_.assign(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n_),
             0.0);
}

double BandedMatrix::operator()(int i, int j) const noexcept {
  return in_band(i, j) ? ab_[index(i, j)] : 0.0;
}

double& BandedMatrix::at(int i, int j) {
  if (!in_band(i, j)) {
    throw ContractError("BandedMatrix: entry (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") outside band");
  }
  return ab_[index(i, j)];
}

void BandedMatrix::set_identity_row(int i) {
  for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
    ab_[index(i, j)] = i == j ? 1.0 : 0.0;
  }
}

BandedMatrix& BandedMatrix::add_scaled(const BandedMatrix& other, double s) {
  if (other.n_ != n_ || other.kl_ != kl_ || other.ku_ != ku_) {
    throw ContractError("BandedMatrix::add_scaled: shape mismatch");
  }
  for (std::size_t k = 0; k < ab_.size(); ++k) ab_[k] += s * other.ab_[k];
  return *this;
}

Eigen::VectorXd BandedMatrix::operator*(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw ContractError("BandedMatrix: size mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    const int i0 = std::max(0, j - ku_);
    const int i1 = std::min(n_ - 1, j + kl_);
    for (int i = i0; i <= i1; ++i) y[i] += ab_[index(i, j)] * x[j];
  }
  return y;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) {
      d(i, j) = ab_[index(i, j)];
    }
  }
  return d;
}

double BandedMatrix::norm1() const noexcept {
  double best = 0.0;
  for (int j = 0; j < n_; ++j) {
    double col = 0.0;
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) {
      col += std::abs(ab_[index(i, j)]);
    }
    best = std::max(best, col);
  }
  return best;
}

Eigen::VectorXd solve_linear(const BandedMatrix& a, const Eigen::VectorXd& rhs,
                             double min_rcond) {
  const int n = a.rows();
  if (rhs.size() != n) {
    throw ContractError("solve_linear: rhs size " + std::to_string(rhs.size()) +
                        " != " + std::to_string(n));
  }
  // Equilibrate rows and columns first so that the condition estimate
  // reflects the problem rather than the scaling of individual equations.
  std::vector<double> ab = a.storage();
  const int ld = a.leading_dimension();
  std::vector<double> r(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
  double rowcnd = 0.0, colcnd = 0.0, amax = 0.0;
  const lapack_int eq = LAPACKE_dgbequ(LAPACK_COL_MAJOR, n, n, a.lower(), a.upper(),
                                       ab.data() + a.lower(), ld, r.data(), c.data(),
                                       &rowcnd, &colcnd, &amax);
  if (eq > 0) {
    throw SolverError("solve_linear: zero " +
                          std::string(eq <= n ? "row " + std::to_string(eq - 1)
                                              : "column " + std::to_string(eq - n - 1)),
                      std::numeric_limits<double>::infinity());
  }
  BandedMatrix scaled = a;
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - a.upper()); i <= std::min(n - 1, j + a.lower()); ++i) {
      scaled.at(i, j) *= r[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
    }
  }
  ab = scaled.storage();
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, a.lower(), a.upper(), ab.data(), ld,
                     ipiv.data());
  if (info < 0) {
    throw ContractError("solve_linear: dgbtrf argument " +
                        std::to_string(-info) + " invalid");
  }
  if (info > 0) {
    throw SolverError("solve_linear: zero pivot at row " +
                          std::to_string(info - 1),
                      std::numeric_limits<double>::infinity());
  }
  double rcond = 0.0;
  LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n, a.lower(), a.upper(), ab.data(),
                 ld, ipiv.data(), scaled.norm1(), &rcond);
  if (!(rcond >= min_rcond)) {
    std::ostringstream msg;
    msg << "solve_linear: ill-conditioned system (condition estimate "
        << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity())
        << ")";
    throw SolverError(msg.str(), rcond > 0.0
                                     ? 1.0 / rcond
                                     : std::numeric_limits<double>::infinity());
  }
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = r[static_cast<std::size_t>(i)] * rhs[i];
  LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, a.lower(), a.upper(), 1, ab.data(), ld,
                 ipiv.data(), x.data(), n);
  for (int i = 0; i < n; ++i) x[i] *= c[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace onlineid::fem
