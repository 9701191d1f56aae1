#include "onlineid/window.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onlineid/errors.hpp"
#include "onlineid/quadrature.hpp"

namespace onlineid::obs {

ObservationWindow::ObservationWindow(fem::Mesh1D mesh, double a, double b)
    : mesh_(mesh), a_(a), b_(b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && a < b &&
        b <= 1.0)) {
    throw InputError("ObservationWindow: need 0 <= a < b <= 1, got (" +
                     std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  const auto& rule = fem::default_rule();
  const double h = mesh_.h();
  classes_.reserve(static_cast<std::size_t>(mesh_.n_elements()));
  points_.resize(static_cast<std::size_t>(mesh_.n_elements()));

  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const double x0 = mesh_.node(e);
    const double x1 = mesh_.node(e + 1);
    ElementClass cls;
    if (x0 >= a_ && x1 <= b_) {
      cls = ElementClass::Observed;
    } else if (x1 <= a_ || x0 >= b_) {
      cls = ElementClass::Unobserved;
    } else {
      cls = ElementClass::Partial;
    }
    classes_.push_back(cls);

    // Break points in local coordinates.
    std::vector<double> cuts{0.0};
    for (double c : {a_, b_}) {
      if (c > x0 && c < x1) cuts.push_back((c - x0) / h);
    }
    cuts.push_back(1.0);

    auto& pts = points_[static_cast<std::size_t>(e)];
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k];
      const double len = cuts[k + 1] - lo;
      const double mid = x0 + (lo + 0.5 * len) * h;
      const bool observed = mid > a_ && mid < b_;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        pts.push_back({lo + len * rule.points[q], rule.weights[q] * len * h,
                       observed});
      }
    }
  }
}

ObservationWindow ObservationWindow::full(fem::Mesh1D mesh) {
  return ObservationWindow(mesh, 0.0, 1.0);
}

}  // namespace onlineid::obs
