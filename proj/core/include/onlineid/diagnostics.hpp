#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onlineid/config.hpp"
#include "onlineid/estimator.hpp"
#include "onlineid/gains.hpp"
#include "onlineid/hermite.hpp"
#include "onlineid/window.hpp"

namespace onlineid::diag {

// ---------------------------------------------------------------------------
// Persistence of excitation

/// The 2N basis functions and `n_random` seeded random fields, each scaled
/// to unit Q-norm.
std::vector<fem::HermiteField> canonical_directions(const fem::Mesh1D& mesh,
                                                    std::size_t n_random = 8,
                                                    std::uint64_t seed = 1);

struct PEPair {
  double t_a = 0.0;
  std::size_t direction = 0;
  double best_t_b = 0.0;
  double value = 0.0;  ///< max over t_b of |int R A(u* + p) xi|_X
};

struct PEProbeReport {
  double gamma0 = 0.0;
  double t0 = 0.0;
  std::vector<PEPair> pairs;
  double epsilon0 = 0.0;  ///< min over pairs; 0 when there are none
};

/// Scans t_b in [t_a, t_a + t0] on the stored steps for every (t_a, xi) and
/// records the largest |int_{t_b}^{t_b + gamma0} chi_omega (u* + p) xi dtau|_X,
/// the time integral by the trapezoid rule. u* + p equals u* on omega and
/// u_hat outside. gamma0 and t0 are rounded to whole steps.
/// Throws ContractError when gamma0 < time_step, when a direction is not of
/// unit Q-norm (to 1e-10), or when the sequences differ in length.
PEProbeReport probe_pe(std::span<const fem::HermiteField> u_star,
                       std::span<const fem::HermiteField> u_hat,
                       const obs::ObservationWindow& window, double time_step,
                       std::span<const fem::HermiteField> directions, double gamma0,
                       double t0, std::span<const double> t_a);

// ---------------------------------------------------------------------------
// Link conditions

struct LinkSeries {
  double time_step = 0.0;
  std::vector<double> r_x, r_vtil, r_vxtil, p_vhat, mu;
};

LinkSeries link_series(std::span<const est::TraceRecord> records, double time_step);

struct LinkOptions {
  double gamma0 = 6.0;
  double lambda = 1.0;
  double kappa = 1.0;
  double t_from = 0.0;   ///< T_lambda = T_kappa
  double floor = 1e-12;  ///< pairs with |r|_X or |p|_Vhat at or below are skipped
};

struct LinkConstantsReport {
  std::optional<double> rho;       ///< slope of log |p|_Vhat against log |r|_X
  std::optional<double> c_rho;     ///< max |p|_Vhat / |r|_X^rho over the pairs
  std::size_t pairs_used = 0;
  std::optional<double> c_int;     ///< min |r|_VXtil^2 / (|r|_Vtil |r|_X)
  std::optional<double> big_c_int; ///< max of the same ratio
  std::optional<double> c_lambda;  ///< max over windows
  std::optional<double> c_kappa;
};

LinkConstantsReport estimate_link_constants(const LinkSeries& s, const LinkOptions& opt = {});

// ---------------------------------------------------------------------------
// Semiconvergence

struct Semiconvergence {
  std::size_t min_index = 0;
  double t_min = 0.0;
  double min_value = 0.0;  ///< smoothed value at the minimum
  bool growth = false;
};

/// Global minimum of the centred moving average (width `window`, truncated
/// at the ends). Growth is flagged when the minimum is interior and the mean
/// of the last `window` raw values exceeds `factor` times the minimum.
/// Throws ContractError for fewer than 3 samples.
Semiconvergence detect_semiconvergence(std::span<const double> t,
                                       std::span<const double> series, int window = 5,
                                       double factor = 1.1);

// ---------------------------------------------------------------------------
// Proposition audits

enum class AuditStatus { Pass, Fail, NotComputable, NotApplicable };
const char* to_string(AuditStatus s) noexcept;

struct AuditLine {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  AuditStatus status = AuditStatus::NotComputable;
  std::string note;
};

struct AuditInput {
  Regime regime = Regime::Exact;
  double sigma = 0.0;
  double time_step = 0.0;
  gains::Constants constants;
  double q_star_q = 0.0;  ///< |q*|_Q
  std::vector<est::TraceRecord> records;
};

AuditInput audit_input(const est::RunTrace& trace);

struct AuditOptions {
  double slack = 0.1;
  /// Step-to-step growth of |e|_Q^2 + |r|_X^2 allowed as lyapunov_c * h_t^2.
  double lyapunov_c = 0.05;
};

struct AuditReport {
  std::vector<AuditLine> lines;
  /// First step with t > 0 at which the smallness condition on d fails.
  std::optional<std::size_t> first_cond_violation;
  /// max_k (E_{k+1} - E_k)^+ / h_t^2 with E = |e|_Q^2 + |r|_X^2.
  double lyapunov_growth_c = 0.0;
  Semiconvergence semiconvergence;
  bool all_pass() const;
};

/// Evaluates the boundedness statements for the run's regime from the trace:
/// exact data (three items plus the stepwise Lyapunov check), noisy data on
/// [0, T*) and smoothed data. Lines whose inputs are non-finite are marked
/// not computable.
AuditReport audit_propositions(const AuditInput& in, const AuditOptions& opt = {});

std::string format_report(const AuditReport& report);

/// E(t) = |e|_Q^2 + |r|_X^2 per record.
std::vector<double> lyapunov_series(std::span<const est::TraceRecord> records);

}  // namespace onlineid::diag
