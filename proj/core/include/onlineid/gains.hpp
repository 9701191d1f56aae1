#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "onlineid/hermite.hpp"

namespace onlineid::gains {

/// Oracle modes evaluate the lower bounds on mu and nu from the true errors
/// (available in synthetic experiments); heuristic mode uses constants.
enum class GainMode { OracleExact, OracleNoisy, OracleSmooth, Heuristic };

const char* to_string(GainMode mode) noexcept;
GainMode gain_mode_from_string(const std::string& s);

/// Constants of the structural assumptions on C, A, M and N.
struct Constants {
  double c1 = 1.0;          ///< c_1 (also used as the noisy-data c~_1)
  double nu_min = 1.0;      ///< lower bound for nu
  double lipschitz_c = 1.0; ///< L_C
  double c_m = 1.0;         ///< coercivity of M
  double big_c_m = 1.0;     ///< bound |R M v|_X <= C_M |v|_Vtil
  double c_n = 1.0;
  double big_c_n = 1.0;
  double c_a = 1.0;         ///< bound on |A(u* + v)|_{Q->X}
  double embed_v_vx = 1.0;  ///< C_{Vhat -> VXhat}
  double embed_vx_x = 1.0;  ///< C_{VXhat -> X}
  double sigma = 0.0;
};

struct GainSchedule {
  GainMode mode = GainMode::OracleExact;
  Constants constants;
  double mu_bar = 1.0;  ///< heuristic mu
  double nu_bar = 1.0;  ///< heuristic nu
};

/// Norms of the error components at one time level.
/// e = q_hat - q*, r = R(u_hat - u*), p = P(u_hat - u*),
/// d = u_alpha^delta - R u*, rd = R u_hat - u_alpha^delta = r - d,
/// dtil = time derivative of d (smoothed data only).
struct ErrorNorms {
  double e_q = 0.0;
  double r_x = 0.0, r_vtil = 0.0, r_vxtil = 0.0;
  double p_x = 0.0, p_vhat = 0.0, p_vxhat = 0.0;
  double d_x = 0.0, d_vtil = 0.0;
  double rd_x = 0.0, rd_vtil = 0.0, rd_vxtil = 0.0;
  double dtil_x = 0.0;
};

/// `active` is false when the normalising denominator fell below the floor;
/// the integrator then drops the stabilisation term for that step.
struct Gain {
  double value = 0.0;
  bool active = false;
};

/// mu >= max{2 L_C/c_M |p|_Vhat, c_1 |r|_X} |r|_X |r|_Vtil / |r|_VXtil^2
Gain mu_exact(const ErrorNorms& n, const Constants& c, double floor);
/// nu >= max{nu_min, 4 (L_C + C_A (|e|_Q + C_{V,VX} C_{VX,X} / 2)) / c_N
///                   * |p|_Vhat |p|_X / |p|_VXhat^2}
Gain nu_exact(const ErrorNorms& n, const Constants& c, double floor);
/// Noisy-data mu: the first branch carries 4 L_C (|d|_Vtil + |p|_Vhat)|r|_X
/// plus the C_A coupling through |d|_X, the second c~_1 |r|_X^2, and a
/// third (2 sigma / c_M)|r|_X^2 when sigma > 0; all times |rd|_Vtil/|r|_VXtil^2.
Gain mu_noisy(const ErrorNorms& n, const Constants& c, double floor);
/// Shared by the noisy and the smoothed-noisy regime.
Gain nu_noisy(const ErrorNorms& n, const Constants& c, double floor);
/// Smoothed-data mu: r replaced by rd and the |dtil|_X inhomogeneity added.
Gain mu_smooth(const ErrorNorms& n, const Constants& c, double floor);
inline Gain nu_smooth(const ErrorNorms& n, const Constants& c, double floor) {
  return nu_noisy(n, c, floor);
}

struct Gains {
  Gain mu;
  Gain nu;
};

/// Dispatch on the schedule's mode.
Gains evaluate(const GainSchedule& schedule, const ErrorNorms& n, double floor);

/// {0.1, 0.2, ..., 0.9, 1, 2, ..., 9, 10, 20, ..., 900, 1000}: every
/// decade from `lo` to `hi` in steps of its leading digit.
std::vector<double> decimal_grid(double lo = 0.1, double hi = 1000.0);

struct ScoreEntry {
  std::vector<double> point;
  double score = 0.0;
  bool ok = true;
  std::string message;
};

struct TuneResult {
  std::size_t best = 0;
  std::vector<ScoreEntry> table;
  bool complete = true;
};

using Objective = std::function<double(std::span<const double>)>;

/// Exhaustive search. Objective exceptions or non-finite scores count as
/// +infinity and are recorded; ties go to the lexicographically smaller
/// point. `should_stop` is polled between points; `on_entry` sees each row
/// as soon as it is scored. Throws ContractError for an empty grid.
TuneResult tune_heuristic(const Objective& objective,
                          const std::vector<std::vector<double>>& grid,
                          const std::function<bool()>& should_stop = {},
                          const std::function<void(const ScoreEntry&)>& on_entry = {});

/// Constants for the diffusion experiment with known truth.
struct ConstantsEstimate {
  Constants constants;
  double q_star_sup = 0.0;      ///< |q*|_inf
  double u_star_sup_l2 = 0.0;   ///< sup_t |u*(t)|_X over the samples
  double embedding_q_linf = 0.0;///< C_{H1 -> Linf} on (0, 1)
  std::vector<std::string> notes;
};

/// L_C = max{1, |q*|_inf}; C_A = C_{H1->Linf} max{1, sup_t |u*(t)|_X};
/// c_M = c_N = C_M = C_N = 1 for the |D|-weighted M, N. Other members of
/// `base` (c1, nu_min, sigma) are kept.
ConstantsEstimate estimate_constants(const fem::HermiteField& q_star,
                                     std::span<const fem::HermiteField> u_star_samples,
                                     const Constants& base = {});

/// Sharp constant of |v|_inf <= C |v|_{H1(0,1)}: sqrt(coth 1).
double h1_linf_embedding_constant() noexcept;

}  // namespace onlineid::gains
