#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "onlineid/assembly.hpp"
#include "onlineid/config.hpp"
#include "onlineid/gains.hpp"
#include "onlineid/observation.hpp"
#include "onlineid/truth.hpp"

namespace onlineid::est {

/// The time-independent matrices of the coupled step on one mesh and window.
struct Operators {
  Operators(const obs::ObservationWindow& window, const fem::Diffusion& d);

  const obs::ObservationWindow* window;
  fem::Diffusion diffusion;
  fem::BandedMatrix mass;         ///< (v, w)_X
  fem::BandedMatrix gram_q;       ///< (v, w)_Q = mass + (v', w')
  fem::BandedMatrix stiff_in;     ///< (D v', w') on omega
  fem::BandedMatrix stiff_out;    ///< (D v', w') on Omega \ omega
  fem::BandedMatrix m_op;         ///< (R M v, w): |D|-stiffness + mass on omega
  fem::BandedMatrix n_op;         ///< (P N v, w): the same on Omega \ omega
};

struct EstimatorState {
  double t = 0.0;
  fem::HermiteField q_hat;  ///< free boundary
  fem::HermiteField u_hat;  ///< Dirichlet zero
};

/// Everything a step needs besides the state. `target_old` and `target_new`
/// are R u* (exact data) or u_alpha^delta at t_n and t_{n+1}; only their
/// restriction to omega is used.
struct StepInputs {
  double time_step = 0.0;
  const fem::HermiteField* target_old = nullptr;
  const fem::HermiteField* target_new = nullptr;
  Eigen::VectorXd load_new;  ///< (f(t_{n+1}), phi_i)
  /// mu divided by |R u_hat - target|_Vtil at t_n; 0 drops the term.
  double mu_scaled = 0.0;
  double nu = 0.0;
  double sigma = 0.0;
};

/// One semi-implicit backward-Euler step of the coupled (q_hat, u_hat)
/// system. The A-operator argument (target on omega, u_hat outside), the
/// gains and the normalisation are frozen at t_n; q_hat and u_hat are
/// implicit. Throws SolverError on a singular system.
EstimatorState advance(const Operators& ops, const EstimatorState& s,
                       const StepInputs& in);

/// mu / |R u_hat - target|_Vtil, or 0 when the gain is inactive or the
/// norm is at or below `floor`.
double scaled_mu(const gains::Gain& mu, const EstimatorState& s,
                 const fem::HermiteField& target, const Operators& ops,
                 double floor);

/// Exact data: the target is the interpolant of u*.
EstimatorState step_exact(const Operators& ops, const EstimatorState& s,
                          const TruthModel& truth, const gains::Gains& g,
                          double time_step, double floor);
/// Noisy data: the target is u_alpha^delta and q_hat is damped by sigma.
EstimatorState step_noisy(const Operators& ops, const EstimatorState& s,
                          const obs::ObservedStep& old_data,
                          const obs::ObservedStep& new_data, const TruthModel& truth,
                          const gains::Gains& g, double sigma, double time_step,
                          double floor);
/// Smoothed noisy data: step_noisy with sigma = 0.
EstimatorState step_smooth(const Operators& ops, const EstimatorState& s,
                           const obs::ObservedStep& old_data,
                           const obs::ObservedStep& new_data, const TruthModel& truth,
                           const gains::Gains& g, double time_step, double floor);

/// One row of the run trace.
struct TraceRecord {
  double t = 0.0;
  gains::ErrorNorms norms;
  double pustar_vhat = 0.0;  ///< |P u*|_Vhat
  double mu = 0.0;
  bool mu_active = false;
  double nu = 0.0;
  double z_z = 0.0;          ///< |z|_Z
  double noise_z = 0.0;      ///< |z^delta - z|_Z
  double cond_rhs = 0.0;     ///< c_M / (2 C_M) |r|_VXtil^2 / |r|_X
  bool tstar_flag = false;   ///< smallness condition on d violated
};

struct Snapshot {
  double t = 0.0;
  fem::HermiteField q_hat;
  fem::HermiteField u_hat;
  fem::HermiteField u_star;
};

struct RunTrace {
  RunConfig config;
  gains::Constants constants;
  fem::HermiteField q_star;
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;
  /// u_hat and u* at every step (needed by the excitation probe).
  std::vector<fem::HermiteField> u_hat;
  std::vector<fem::HermiteField> u_star;
  std::optional<std::size_t> tstar_step;
  bool complete = true;
  std::string failure;  ///< message when a step failed

  double lyapunov(std::size_t k) const {
    const auto& n = records[k].norms;
    return n.e_q * n.e_q + n.r_x * n.r_x;
  }
};

/// Runs the configured experiment. A failing step ends the run with
/// `complete = false` and the records gathered so far; `rethrow` turns that
/// into a SolverError instead.
RunTrace run(const RunConfig& config, bool rethrow = false);

/// Structural constants of the configured experiment (estimate_constants
/// over u* on the run's time grid, with c1, nu_min and sigma from the config).
gains::Constants constants_for(const RunConfig& config, const fem::HermiteField& q_star,
                               std::span<const fem::HermiteField> u_star);
gains::Constants constants_for(const RunConfig& config);

/// h_t * trapezoid sum of |R u_hat - R u*|_X^2, the tuning objective.
double observed_error_integral(const RunTrace& trace);

/// Norms of the error components at one state. `target` is the data
/// (R u* for exact data).
gains::ErrorNorms error_norms(const EstimatorState& s, const fem::HermiteField& q_star,
                              const fem::HermiteField& u_star,
                              const fem::HermiteField& target,
                              const fem::HermiteField& defect_rate,
                              const Operators& ops);

}  // namespace onlineid::est
