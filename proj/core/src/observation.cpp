#include "onlineid/observation.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "onlineid/errors.hpp"
#include "onlineid/norms.hpp"

namespace onlineid::obs {

ProjectedField::ProjectedField(fem::HermiteField field,
                               const ObservationWindow& window,
                               bool keep_inside, bool keep_outside)
    : field_(std::move(field)), window_(&window), inside_(keep_inside),
      outside_(keep_outside) {
  if (!(field_.mesh() == window.mesh())) {
    throw ContractError("ProjectedField: window built on a different mesh");
  }
}

double ProjectedField::value(double x) const {
  const bool keep = window_->contains(x) ? inside_ : outside_;
  return keep ? field_.value(x) : 0.0;
}

double ProjectedField::value_at(int e, const QuadPoint& p) const noexcept {
  const bool keep = p.observed ? inside_ : outside_;
  return keep ? field_.value_on(e, p.s) : 0.0;
}

ProjectedField project_R(const fem::HermiteField& v, const ObservationWindow& w) {
  return ProjectedField(v, w, true, false);
}

ProjectedField project_P(const fem::HermiteField& v, const ObservationWindow& w) {
  return ProjectedField(v, w, false, true);
}

ProjectedField project_R(const ProjectedField& v) {
  return ProjectedField(v.field(), v.window(), v.keeps_inside(), false);
}

ProjectedField project_P(const ProjectedField& v) {
  return ProjectedField(v.field(), v.window(), false, v.keeps_outside());
}

double inner_product(const ProjectedField& a, const ProjectedField& b) {
  const auto& mesh = a.field().mesh();
  if (!(mesh == b.field().mesh())) {
    throw ContractError("inner_product: mesh mismatch");
  }
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& p : a.window().element_points(e)) {
      sum += p.weight * a.value_at(e, p) * b.value_at(e, p);
    }
  }
  return sum;
}

fem::HermiteField regularized_lift(const fem::HermiteField& trace, double alpha) {
  if (!(alpha >= 0.0)) {
    throw ContractError("regularized_lift: alpha must be >= 0");
  }
  if (alpha == 0.0) return trace;
  return (1.0 / (1.0 + alpha)) * trace;
}

void validate(const NoiseModel& model) {
  if (!(model.level >= 0.0)) throw ContractError("noise level must be >= 0");
  if (model.smoothing_window < 0) {
    throw ContractError("smoothing window must be >= 0");
  }
  if (!(model.sigma >= 0.0)) throw ContractError("sigma must be >= 0");
  if (!(model.alpha >= 0.0)) throw ContractError("alpha must be >= 0");
}

NoisyTrace make_noisy(const fem::HermiteField& z, const NoiseModel& model,
                      const ObservationWindow& window, std::uint64_t step) {
  if (!(model.level >= 0.0)) {
    throw ContractError("make_noisy: noise level must be >= 0");
  }
  if (model.level == 0.0) return {z, false};

  const auto& mesh = z.mesh();
  std::seed_seq seq{static_cast<std::uint32_t>(model.seed),
                    static_cast<std::uint32_t>(model.seed >> 32),
                    static_cast<std::uint32_t>(step),
                    static_cast<std::uint32_t>(step >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd eta(mesh.n_dofs());
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    eta[fem::value_dof(j)] = normal(rng);
    eta[fem::slope_dof(j)] = normal(rng) / mesh.h();
  }
  fem::HermiteField noise(mesh, std::move(eta), fem::Boundary::Free);

  const double z_norm = fem::norm(z, fem::NormKind::Z, &window);
  const double eta_norm = fem::norm(noise, fem::NormKind::Z, &window);
  const bool fallback = z_norm == 0.0;
  const double target = model.level * (fallback ? 1.0 : z_norm);
  noise *= target / eta_norm;

  fem::HermiteField out(mesh, z.dofs() + noise.dofs(), fem::Boundary::Free);
  return {std::move(out), fallback};
}

fem::HermiteField smooth(std::span<const fem::HermiteField> history, int window) {
  if (history.empty()) throw ContractError("smooth: empty history");
  if (window < 1) throw ContractError("smooth: window must be >= 1");
  const std::size_t count =
      std::min(history.size(), static_cast<std::size_t>(window));
  const auto first = history.end() - static_cast<std::ptrdiff_t>(count);
  Eigen::VectorXd sum = first->dofs();
  for (auto it = first + 1; it != history.end(); ++it) sum += it->dofs();
  if (count > 1) sum /= static_cast<double>(count);
  return fem::HermiteField(first->mesh(), std::move(sum), first->boundary());
}

bool defect_condition_violated(const DefectSample& s, double c_m,
                               double big_c_m) {
  if (s.r_x == 0.0) return s.d_vtil > 0.0;
  return s.d_vtil > c_m / (2.0 * big_c_m) * s.r_vxtil * s.r_vxtil / s.r_x;
}

std::optional<std::size_t> detect_tstar(std::span<const DefectSample> samples,
                                        double c_m, double big_c_m) {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].t > 0.0 &&
        defect_condition_violated(samples[k], c_m, big_c_m)) {
      return k;
    }
  }
  return std::nullopt;
}

DataFeed::DataFeed(NoiseModel model, const ObservationWindow& window,
                   double time_step)
    : model_(model), window_(&window), time_step_(time_step) {
  validate(model_);
  if (!(time_step > 0.0)) throw ContractError("DataFeed: time step must be > 0");
}

ObservedStep DataFeed::next(const fem::HermiteField& exact_trace,
                            std::uint64_t step) {
  auto noisy = make_noisy(exact_trace, model_, *window_, step);
  const double noise_z =
      fem::norm(noisy.trace - exact_trace, fem::NormKind::Z, window_);

  fem::HermiteField data = noisy.trace;
  if (model_.smoothing_window > 0) {
    history_.push_back(noisy.trace);
    while (history_.size() > static_cast<std::size_t>(model_.smoothing_window)) {
      history_.pop_front();
    }
    std::vector<fem::HermiteField> window(history_.begin(), history_.end());
    data = smooth(window, model_.smoothing_window);
  }

  fem::HermiteField lifted = regularized_lift(data, model_.alpha);
  fem::HermiteField defect(exact_trace.mesh(),
                           lifted.dofs() - exact_trace.dofs(),
                           fem::Boundary::Free);
  fem::HermiteField rate(exact_trace.mesh(), fem::Boundary::Free);
  if (previous_defect_) {
    rate.set_dofs((defect.dofs() - previous_defect_->dofs()) / time_step_);
  }
  previous_defect_ = defect;

  return ObservedStep{exact_trace,        std::move(data), std::move(lifted),
                      std::move(defect),  std::move(rate), noise_z,
                      noisy.absolute_fallback};
}

}  // namespace onlineid::obs
