#include "onlineid/norms.hpp"

#include <algorithm>
#include <cmath>

#include "onlineid/errors.hpp"

namespace onlineid::fem {

const char* to_string(NormKind kind) noexcept {
  switch (kind) {
    case NormKind::X: return "X";
    case NormKind::Q: return "Q";
    case NormKind::Z: return "Z";
    case NormKind::Vtil: return "Vtil";
    case NormKind::Vhat: return "Vhat";
    case NormKind::VXtil: return "VXtil";
    case NormKind::VXhat: return "VXhat";
  }
  return "?";
}

namespace {

struct Integrals {
  double value_sq = 0.0;     // int v^2
  double slope_sq = 0.0;     // int |D| v'^2 (or v'^2 when unweighted)
  double flux_div_sq = 0.0;  // int ((D v')')^2
};

Integrals integrate(const HermiteField& v, const obs::ObservationWindow* window,
                    Region region, const Diffusion* d) {
  const Mesh1D& mesh = v.mesh();
  Integrals out;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& p : element_points(mesh, window, e)) {
      if (!in_region(p, region)) continue;
      const double val = v.value_on(e, p.s);
      const double d1 = v.derivative_on(e, p.s);
      out.value_sq += p.weight * val * val;
      if (d) {
        const double dc = d->value_on(e, p.s);
        const double flux_div =
            d->derivative_on(e, p.s) * d1 + dc * v.second_derivative_on(e, p.s);
        out.slope_sq += p.weight * std::abs(dc) * d1 * d1;
        out.flux_div_sq += p.weight * flux_div * flux_div;
      } else {
        out.slope_sq += p.weight * d1 * d1;
      }
    }
  }
  return out;
}

}  // namespace

double norm(const HermiteField& v, NormKind kind,
            const obs::ObservationWindow* window, const Diffusion& d) {
  const bool windowed = kind != NormKind::X && kind != NormKind::Q;
  if (windowed && window == nullptr) {
    throw ContractError(std::string("norm: ") + to_string(kind) +
                        " norm requires an observation window");
  }
  if (window && !(window->mesh() == v.mesh())) {
    throw ContractError("norm: window built on a different mesh");
  }
  switch (kind) {
    case NormKind::X:
      return std::sqrt(integrate(v, nullptr, Region::Domain, nullptr).value_sq);
    case NormKind::Q: {
      const auto i = integrate(v, nullptr, Region::Domain, nullptr);
      return std::sqrt(i.value_sq + i.slope_sq);
    }
    case NormKind::Z:
      return std::sqrt(integrate(v, window, Region::Observed, nullptr).value_sq);
    case NormKind::Vtil:
    case NormKind::Vhat: {
      const auto r = kind == NormKind::Vtil ? Region::Observed : Region::Unobserved;
      const auto i = integrate(v, window, r, &d);
      return std::sqrt(i.flux_div_sq) + std::sqrt(i.value_sq);
    }
    case NormKind::VXtil:
    case NormKind::VXhat: {
      const auto r = kind == NormKind::VXtil ? Region::Observed : Region::Unobserved;
      const auto i = integrate(v, window, r, &d);
      return std::sqrt(i.slope_sq + i.value_sq);
    }
  }
  return 0.0;
}

double inner_product(const HermiteField& v, const HermiteField& w,
                     const obs::ObservationWindow* window, Region region) {
  if (!(v.mesh() == w.mesh())) throw ContractError("inner_product: mesh mismatch");
  const Mesh1D& mesh = v.mesh();
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& p : element_points(mesh, window, e)) {
      if (in_region(p, region)) sum += p.weight * v.value_on(e, p.s) * w.value_on(e, p.s);
    }
  }
  return sum;
}

double max_abs(const HermiteField& v) {
  const Mesh1D& mesh = v.mesh();
  double best = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int k = 0; k <= 8; ++k) {
      best = std::max(best, std::abs(v.value_on(e, k / 8.0)));
    }
  }
  return best;
}

}  // namespace onlineid::fem

namespace onlineid::fem {

double region_l2(const HermiteField& v, const obs::ObservationWindow& window,
                 Region region) {
  return std::sqrt(inner_product(v, v, &window, region));
}

}  // namespace onlineid::fem
