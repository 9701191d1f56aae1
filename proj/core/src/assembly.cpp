#include "onlineid/assembly.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "onlineid/errors.hpp"
#include "onlineid/quadrature.hpp"

namespace onlineid::fem {

Diffusion::Diffusion(double constant) : constant_(constant) {
  if (!std::isfinite(constant)) {
    throw InputError("Diffusion: non-finite coefficient");
  }
}

Diffusion::Diffusion(HermiteField field) : field_(std::move(field)) {
  if (!field_->dofs().allFinite()) {
    throw InputError("Diffusion: field has non-finite coefficients");
  }
}

double Diffusion::value_on(int e, double s) const noexcept {
  return field_ ? field_->value_on(e, s) : constant_;
}

double Diffusion::derivative_on(int e, double s) const noexcept {
  return field_ ? field_->derivative_on(e, s) : 0.0;
}

namespace {

// Per-mesh cache of the unsplit reference points scaled by h.
const std::vector<std::vector<obs::QuadPoint>>& plain_points(const Mesh1D& mesh) {
  static std::mutex guard;
  static std::map<int, std::unique_ptr<std::vector<std::vector<obs::QuadPoint>>>> cache;
  std::lock_guard lock(guard);
  auto& slot = cache[mesh.n_nodes()];
  if (!slot) {
    const auto& rule = default_rule();
    slot = std::make_unique<std::vector<std::vector<obs::QuadPoint>>>();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      std::vector<obs::QuadPoint> pts;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        pts.push_back({rule.points[q], rule.weights[q] * mesh.h(), true});
      }
      slot->push_back(std::move(pts));
    }
  }
  return *slot;
}

template <typename Kernel>
BandedMatrix assemble(const Mesh1D& mesh, const obs::ObservationWindow* window,
                      Region region, Kernel&& kernel) {
  if (window && !(window->mesh() == mesh)) {
    throw ContractError("assemble: window built on a different mesh");
  }
  BandedMatrix m(mesh.n_dofs(), kHermiteBand, kHermiteBand);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double local[4][4] = {};
    for (const auto& p : element_points(mesh, window, e)) {
      if (!in_region(p, region)) continue;
      const auto sh = element_shape(p.s, mesh.h());
      kernel(e, p, sh, local);
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) m.add(2 * e + a, 2 * e + b, local[a][b]);
    }
  }
  return m;
}

}  // namespace

const std::vector<obs::QuadPoint>& element_points(
    const Mesh1D& mesh, const obs::ObservationWindow* window, int e) {
  if (window) return window->element_points(e);
  return plain_points(mesh)[static_cast<std::size_t>(e)];
}

BandedMatrix assemble_mass(const Mesh1D& mesh,
                           const obs::ObservationWindow* window, Region region) {
  return assemble(mesh, window, region,
                  [](int, const obs::QuadPoint& p, const ElementShape& sh,
                     double (&local)[4][4]) {
                    for (int a = 0; a < 4; ++a) {
                      for (int b = 0; b < 4; ++b) {
                        local[a][b] += p.weight * sh.value[a] * sh.value[b];
                      }
                    }
                  });
}

BandedMatrix assemble_stiffness(const Mesh1D& mesh, const Diffusion& d,
                                const obs::ObservationWindow* window,
                                Region region, bool absolute) {
  return assemble(mesh, window, region,
                  [&](int e, const obs::QuadPoint& p, const ElementShape& sh,
                      double (&local)[4][4]) {
                    double coef = d.value_on(e, p.s);
                    if (absolute) coef = std::abs(coef);
                    for (int a = 0; a < 4; ++a) {
                      for (int b = 0; b < 4; ++b) {
                        local[a][b] += p.weight * coef * sh.d1[a] * sh.d1[b];
                      }
                    }
                  });
}

BandedMatrix assemble_weighted_mass(const Mesh1D& mesh, const HermiteField& w,
                                    const obs::ObservationWindow* window,
                                    Region region) {
  if (!(w.mesh() == mesh)) {
    throw ContractError("assemble_weighted_mass: weight on a different mesh");
  }
  return assemble(mesh, window, region,
                  [&](int e, const obs::QuadPoint& p, const ElementShape& sh,
                      double (&local)[4][4]) {
                    const double coef = w.value_on(e, p.s);
                    for (int a = 0; a < 4; ++a) {
                      for (int b = 0; b < 4; ++b) {
                        local[a][b] += p.weight * coef * sh.value[a] * sh.value[b];
                      }
                    }
                  });
}

Eigen::VectorXd assemble_load(const Mesh1D& mesh, const ScalarFunction& f) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_dofs());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& p : element_points(mesh, nullptr, e)) {
      const auto sh = element_shape(p.s, mesh.h());
      const double fx = f(mesh.node(e) + p.s * mesh.h());
      for (int a = 0; a < 4; ++a) load[2 * e + a] += p.weight * fx * sh.value[a];
    }
  }
  return load;
}

}  // namespace onlineid::fem
