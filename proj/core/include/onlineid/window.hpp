#pragma once

#include <vector>

#include "onlineid/mesh.hpp"

namespace onlineid::obs {

enum class ElementClass { Observed, Unobserved, Partial };

/// One integration point of an element, possibly of a sub-interval when the
/// element is cut by an endpoint of the window.
struct QuadPoint {
  double s;       ///< local coordinate in [0, 1]
  double weight;  ///< physical weight (includes h)
  bool observed;  ///< chi_omega at the point
};

/// Observation subdomain omega = (a, b) on a mesh. Partial elements are
/// split at a and b so that integrals against chi_omega stay exact for
/// polynomial integrands.
class ObservationWindow {
 public:
  /// Throws InputError unless 0 <= a < b <= 1.
  ObservationWindow(fem::Mesh1D mesh, double a, double b);

  /// omega = (0, 1).
  static ObservationWindow full(fem::Mesh1D mesh);

  const fem::Mesh1D& mesh() const noexcept { return mesh_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double measure() const noexcept { return b_ - a_; }
  bool is_full() const noexcept { return a_ == 0.0 && b_ == 1.0; }

  ElementClass element_class(int e) const { return classes_.at(static_cast<std::size_t>(e)); }
  const std::vector<QuadPoint>& element_points(int e) const {
    return points_.at(static_cast<std::size_t>(e));
  }

  /// chi_omega(x) for the open interval (a, b).
  bool contains(double x) const noexcept { return x > a_ && x < b_; }

 private:
  fem::Mesh1D mesh_;
  double a_;
  double b_;
  std::vector<ElementClass> classes_;
  std::vector<std::vector<QuadPoint>> points_;
};

}  // namespace onlineid::obs
