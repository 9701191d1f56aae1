#pragma once

#include <optional>
#include <vector>

#include "onlineid/banded.hpp"
#include "onlineid/hermite.hpp"
#include "onlineid/window.hpp"

namespace onlineid::fem {

/// Diffusion coefficient: a constant (the default, D = 1) or a Hermite
/// field, in which case (D v')' uses the product rule pointwise.
class Diffusion {
 public:
  /// Throws InputError for a non-finite constant.
  Diffusion(double constant = 1.0);  // NOLINT(google-explicit-constructor)
  /// Throws InputError if any coefficient is non-finite.
  explicit Diffusion(HermiteField field);

  bool is_constant() const noexcept { return !field_.has_value(); }
  double value_on(int e, double s) const noexcept;
  double derivative_on(int e, double s) const noexcept;

 private:
  double constant_ = 1.0;
  std::optional<HermiteField> field_;
};

/// Integration region relative to an observation window.
enum class Region { Domain, Observed, Unobserved };

/// Integration points of element e: the split points of `window` when given,
/// otherwise the plain 5-point rule (all flagged observed).
const std::vector<obs::QuadPoint>& element_points(
    const Mesh1D& mesh, const obs::ObservationWindow* window, int e);

inline bool in_region(const obs::QuadPoint& p, Region region) noexcept {
  switch (region) {
    case Region::Domain: return true;
    case Region::Observed: return p.observed;
    case Region::Unobserved: return !p.observed;
  }
  return false;
}

/// Bandwidth of every 2N x 2N Hermite operator (one neighbour node).
inline constexpr int kHermiteBand = 3;

/// (phi_i, phi_j) over the region. Symmetric positive definite on Domain.
BandedMatrix assemble_mass(const Mesh1D& mesh,
                           const obs::ObservationWindow* window = nullptr,
                           Region region = Region::Domain);

/// (D phi_i', phi_j') over the region; |D| when `absolute` is set.
BandedMatrix assemble_stiffness(const Mesh1D& mesh, const Diffusion& d,
                                const obs::ObservationWindow* window = nullptr,
                                Region region = Region::Domain,
                                bool absolute = false);

/// (w phi_i, phi_j) over the region: the Galerkin matrix of v -> w v.
BandedMatrix assemble_weighted_mass(const Mesh1D& mesh, const HermiteField& w,
                                    const obs::ObservationWindow* window = nullptr,
                                    Region region = Region::Domain);

/// Load vector (f, phi_i) over the domain.
Eigen::VectorXd assemble_load(const Mesh1D& mesh, const ScalarFunction& f);

}  // namespace onlineid::fem
