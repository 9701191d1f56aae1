#pragma once

#include <functional>
#include <vector>

#include "onlineid/assembly.hpp"
#include "onlineid/hermite.hpp"

namespace onlineid::est {

/// f(t, x)
using Forcing = std::function<double(double, double)>;

/// Backward-Euler states u(t_0), ..., u(t_n) on a uniform time grid.
struct Trajectory {
  double time_step = 0.0;
  std::vector<double> times;
  std::vector<fem::HermiteField> states;
};

enum class Provenance { Analytic, ForwardSolve };

const char* to_string(Provenance p) noexcept;

/// Ground truth of the identification experiment: parameter q*, state u*(t),
/// forcing and diffusion.
class TruthModel {
 public:
  /// Closed-form state; `u_star` and `du_star` are u*(t, x) and its x-derivative.
  TruthModel(fem::Mesh1D mesh, double diffusion, fem::HermiteField q_star,
             std::function<double(double, double)> u_star,
             std::function<double(double, double)> du_star, Forcing f);
  /// State taken from a stored trajectory; u_star(t) requires t on its grid.
  TruthModel(fem::Mesh1D mesh, double diffusion, fem::HermiteField q_star,
             Trajectory trajectory, Forcing f);

  const fem::Mesh1D& mesh() const noexcept { return mesh_; }
  double diffusion() const noexcept { return diffusion_; }
  const fem::HermiteField& q_star() const noexcept { return q_star_; }
  const Forcing& forcing() const noexcept { return f_; }
  Provenance provenance() const noexcept { return provenance_; }

  /// Hermite interpolant of u*(t) (analytic) or the stored state (forward).
  /// Throws InputError when t is not a stored time of a forward truth.
  fem::HermiteField u_star(double t) const;
  /// Pointwise value; for a forward truth this evaluates the stored state.
  double u_star_at(double t, double x) const;

 private:
  fem::Mesh1D mesh_;
  double diffusion_;
  fem::HermiteField q_star_;
  Forcing f_;
  Provenance provenance_;
  std::function<double(double, double)> u_;
  std::function<double(double, double)> du_;
  Trajectory trajectory_;
};

/// q* = 0.025 x^2 - 0.025 x
double q_star_value(double x) noexcept;
double q_star_derivative(double x) noexcept;

/// u*(t, x) = sin(pi x) / (1 + t), q* as above, and the forcing
/// f = (D pi^2 - 1/(1+t) + q*) sin(pi x) / (1 + t) that makes them solve
/// u_t - (D u_x)_x + q u = f with u = 0 on the boundary.
TruthModel truth_analytic(const fem::Mesh1D& mesh, double diffusion = 1.0);

/// Backward Euler for u_t - (D u_x)_x + q u = f, u = 0 at x = 0, 1, up to
/// the last step t_n <= horizon (n = round(horizon / time_step)).
/// Throws SolverError naming the failing time.
Trajectory forward_solve(const fem::HermiteField& q, const fem::HermiteField& u0,
                         const Forcing& f, double diffusion, double time_step,
                         double horizon);

/// The analytic experiment with u* replaced by forward_solve(q*, u0).
TruthModel truth_forward(const fem::Mesh1D& mesh, double diffusion,
                         double time_step, double horizon);

/// Number of steps of a run: round(horizon / time_step).
int step_count(double time_step, double horizon);

}  // namespace onlineid::est
