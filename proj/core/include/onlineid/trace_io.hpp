#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "onlineid/diagnostics.hpp"
#include "onlineid/estimator.hpp"
#include "onlineid/gains.hpp"

namespace onlineid::io {

/// One row per step: t, e_Q2, r_X2, p_X2, rd_X2, mu, nu, tstar_flag, then the
/// individual norms the audits and the link-constant fit need.
void write_trace(std::ostream& out, const est::RunTrace& trace);
/// Inverse of write_trace (the norm columns); throws InputError naming a
/// missing column.
std::vector<est::TraceRecord> read_trace(std::istream& in);

/// t, x, q_hat, u_hat, q_star, u_star on `samples` uniform points per snapshot.
void write_snapshots(std::ostream& out, const est::RunTrace& trace, int samples);
/// Truth-only snapshots (t, x, q_star, u_star) at the given fields.
void write_truth_snapshots(std::ostream& out, const std::vector<double>& times,
                           const std::vector<fem::HermiteField>& u_star,
                           const fem::HermiteField& q_star, int samples);

/// t, |z|_Z, |z^delta - z|_Z, |d|_Vtil, tstar_flag.
void write_observations(std::ostream& out, const est::RunTrace& trace);

/// Coefficients of u_hat and u* per step: t, field, d0 ... d_{2N-1}.
void write_trajectory(std::ostream& out, const est::RunTrace& trace);

struct StoredTrajectory {
  int n_nodes = 0;
  double time_step = 0.0;
  std::vector<double> times;
  std::vector<fem::HermiteField> u_hat;
  std::vector<fem::HermiteField> u_star;
};
StoredTrajectory read_trajectory(std::istream& in);

/// value columns (one per tuned constant), score, status, message.
void write_score_header(std::ostream& out, const std::vector<std::string>& names);
void write_score_row(std::ostream& out, const gains::ScoreEntry& e);

void write_pe_report(std::ostream& out, const diag::PEProbeReport& r);

}  // namespace onlineid::io
