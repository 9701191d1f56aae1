#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "onlineid/hermite.hpp"
#include "onlineid/window.hpp"

namespace onlineid::obs {

/// A Hermite field multiplied by chi_omega and/or chi_{Omega\omega}.
/// R keeps the inside, P the outside; composition intersects the masks.
class ProjectedField {
 public:
  ProjectedField(fem::HermiteField field, const ObservationWindow& window,
                 bool keep_inside, bool keep_outside);

  const fem::HermiteField& field() const noexcept { return field_; }
  bool keeps_inside() const noexcept { return inside_; }
  bool keeps_outside() const noexcept { return outside_; }
  const ObservationWindow& window() const noexcept { return *window_; }

  double value(double x) const;
  /// Value at a window quadrature point of element e.
  double value_at(int e, const QuadPoint& p) const noexcept;

 private:
  fem::HermiteField field_;
  const ObservationWindow* window_;
  bool inside_;
  bool outside_;
};

ProjectedField project_R(const fem::HermiteField& v, const ObservationWindow& w);
ProjectedField project_P(const fem::HermiteField& v, const ObservationWindow& w);
ProjectedField project_R(const ProjectedField& v);
ProjectedField project_P(const ProjectedField& v);

/// L2(Omega) inner product of two projected fields, integrated on the
/// window's split quadrature (exact on partial elements).
double inner_product(const ProjectedField& a, const ProjectedField& b);

/// Tikhonov-regularized lift of an omega-trace back into X,
/// (G*G + alpha I)^{-1} G* z. For the restriction operator G this is
/// chi_omega z / (1 + alpha) pointwise. The trace is carried as a Hermite
/// field whose values only matter inside omega; the returned field has the
/// same coefficients scaled by 1 / (1 + alpha) and is implicitly masked by R.
/// Throws ContractError for alpha < 0.
fem::HermiteField regularized_lift(const fem::HermiteField& trace, double alpha);

struct NoiseModel {
  double level = 0.0;         ///< relative noise delta
  std::uint64_t seed = 1;
  int smoothing_window = 0;   ///< number of past steps averaged (0 = off)
  double sigma = 0.0;         ///< damping of q_hat
  double alpha = 0.0;         ///< Tikhonov parameter
};

/// Throws ContractError if any field of the model is out of range.
void validate(const NoiseModel& model);

struct NoisyTrace {
  fem::HermiteField trace;
  /// Set when ||z||_Z = 0 forced the absolute scale delta * 1.
  bool absolute_fallback = false;
};

/// z + eta with eta i.i.d. Gaussian on every nodal dof (slope dofs scaled by
/// 1/h), rescaled so that ||eta||_Z = level * ||z||_Z exactly. The stream is
/// a pure function of (seed, step).
NoisyTrace make_noisy(const fem::HermiteField& z, const NoiseModel& model,
                      const ObservationWindow& window, std::uint64_t step);

/// Arithmetic mean of the last min(W, history.size()) traces.
/// Throws ContractError on empty history or W < 1.
fem::HermiteField smooth(std::span<const fem::HermiteField> history, int window);

/// Per-step quantities entering the smallness condition on the data defect.
struct DefectSample {
  double t = 0.0;
  double d_vtil = 0.0;   ///< ||d_alpha^delta||_Vtil
  double r_vxtil = 0.0;  ///< ||r||_VXtil
  double r_x = 0.0;      ///< ||r||_X
};

/// True when ||d||_Vtil > c_M/(2 C_M) ||r||_VXtil^2 / ||r||_X (strict).
/// With ||r||_X = 0 the step counts as violated iff ||d||_Vtil > 0.
bool defect_condition_violated(const DefectSample& s, double c_m, double big_c_m);

/// Index of the first sample with t > 0 that violates the condition, or
/// nullopt when it never does (T* = infinity).
std::optional<std::size_t> detect_tstar(std::span<const DefectSample> samples,
                                        double c_m, double big_c_m);

/// Data delivered to the estimator at one time level.
struct ObservedStep {
  fem::HermiteField exact;       ///< z: the exact trace (truth interpolant)
  fem::HermiteField noisy;       ///< z^delta (smoothed when W > 0)
  fem::HermiteField lifted;      ///< u_alpha^delta
  fem::HermiteField defect;      ///< d_alpha^delta = u_alpha^delta - R u*
  /// Backward difference of the defect in time; zero at the first step.
  fem::HermiteField defect_rate;
  double noise_z = 0.0;          ///< ||z^delta - z||_Z before smoothing
  bool absolute_fallback = false;
};

/// Turns the exact trace sequence into the noisy, lifted and smoothed data
/// stream, keeping the history needed for smoothing and the defect rate.
class DataFeed {
 public:
  DataFeed(NoiseModel model, const ObservationWindow& window, double time_step);

  ObservedStep next(const fem::HermiteField& exact_trace, std::uint64_t step);

 private:
  NoiseModel model_;
  const ObservationWindow* window_;
  double time_step_;
  std::deque<fem::HermiteField> history_;
  std::optional<fem::HermiteField> previous_defect_;
};

}  // namespace onlineid::obs
