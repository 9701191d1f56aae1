#include "onlineid/gains.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "onlineid/errors.hpp"
#include "onlineid/norms.hpp"

namespace onlineid::gains {

const char* to_string(GainMode mode) noexcept {
  switch (mode) {
    case GainMode::OracleExact: return "oracle_exact";
    case GainMode::OracleNoisy: return "oracle_noisy";
    case GainMode::OracleSmooth: return "oracle_smooth";
    case GainMode::Heuristic: return "heuristic";
  }
  return "?";
}

GainMode gain_mode_from_string(const std::string& s) {
  if (s == "oracle_exact") return GainMode::OracleExact;
  if (s == "oracle_noisy") return GainMode::OracleNoisy;
  if (s == "oracle_smooth") return GainMode::OracleSmooth;
  if (s == "heuristic") return GainMode::Heuristic;
  throw ContractError("unknown gain mode '" + s + "'");
}

Gain mu_exact(const ErrorNorms& n, const Constants& c, double floor) {
  if (!(n.r_vxtil > floor)) return {0.0, false};
  const double lead = std::max(2.0 * c.lipschitz_c / c.c_m * n.p_vhat, c.c1 * n.r_x);
  return {lead * n.r_x * n.r_vtil / (n.r_vxtil * n.r_vxtil), true};
}

Gain nu_exact(const ErrorNorms& n, const Constants& c, double floor) {
  if (!(n.p_vxhat > floor)) return {c.nu_min, true};
  const double coupling =
      4.0 * (c.lipschitz_c + c.c_a * (n.e_q + 0.5 * c.embed_v_vx * c.embed_vx_x)) / c.c_n;
  return {std::max(c.nu_min, coupling * n.p_vhat * n.p_x / (n.p_vxhat * n.p_vxhat)), true};
}

Gain mu_noisy(const ErrorNorms& n, const Constants& c, double floor) {
  if (!(n.r_vxtil > floor)) return {0.0, false};
  const double first =
      4.0 * c.lipschitz_c / c.c_m * (n.d_vtil + n.p_vhat) * n.r_x +
      4.0 * c.c_a / c.c_m * (1.0 + n.d_vtil + n.p_vhat) * n.e_q * n.d_x;
  double lead = std::max(first, c.c1 * n.r_x * n.r_x);
  if (c.sigma > 0.0) lead = std::max(lead, 2.0 * c.sigma / c.c_m * n.r_x * n.r_x);
  return {lead * n.rd_vtil / (n.r_vxtil * n.r_vxtil), true};
}

Gain nu_noisy(const ErrorNorms& n, const Constants& c, double floor) {
  if (!(n.p_vxhat > floor)) return {c.nu_min, true};
  const double lead =
      4.0 * (c.lipschitz_c + c.c_a * n.e_q) / c.c_n * (n.p_vhat + n.d_vtil) +
      2.0 * c.c_a * c.embed_v_vx * c.embed_vx_x / c.c_n * n.p_vhat;
  return {std::max(c.nu_min, lead * n.p_x / (n.p_vxhat * n.p_vxhat)), true};
}

Gain mu_smooth(const ErrorNorms& n, const Constants& c, double floor) {
  if (!(n.rd_vxtil > floor)) return {0.0, false};
  const double lead = std::max(
      2.0 / c.c_m * (c.lipschitz_c * (n.d_vtil + n.p_vhat) + n.dtil_x),
      c.c1 * n.rd_x);
  return {lead * n.rd_x * n.rd_vtil / (n.rd_vxtil * n.rd_vxtil), true};
}

Gains evaluate(const GainSchedule& schedule, const ErrorNorms& n, double floor) {
  const auto& c = schedule.constants;
  switch (schedule.mode) {
    case GainMode::OracleExact: return {mu_exact(n, c, floor), nu_exact(n, c, floor)};
    case GainMode::OracleNoisy: return {mu_noisy(n, c, floor), nu_noisy(n, c, floor)};
    case GainMode::OracleSmooth: return {mu_smooth(n, c, floor), nu_smooth(n, c, floor)};
    case GainMode::Heuristic: return {{schedule.mu_bar, true}, {schedule.nu_bar, true}};
  }
  return {};
}

std::vector<double> decimal_grid(double lo, double hi) {
  if (!(lo > 0.0 && hi >= lo)) throw ContractError("decimal_grid: need 0 < lo <= hi");
  std::vector<double> grid;
  // Walk decades by integer exponent so every entry is digit * 10^k exactly
  // as the nearest double.
  int k = static_cast<int>(std::floor(std::log10(lo) + 1e-9));
  for (;; ++k) {
    for (int digit = 1; digit <= 9; ++digit) {
      const double v = k >= 0 ? digit * std::pow(10.0, k) : digit / std::pow(10.0, -k);
      if (v > hi * (1 + 1e-12)) return grid;
      if (v >= lo * (1 - 1e-12)) grid.push_back(v);
    }
  }
}

TuneResult tune_heuristic(const Objective& objective,
                          const std::vector<std::vector<double>>& grid,
                          const std::function<bool()>& should_stop,
                          const std::function<void(const ScoreEntry&)>& on_entry) {
  if (grid.empty()) throw ContractError("tune_heuristic: empty grid");
  TuneResult result;
  for (const auto& point : grid) {
    if (should_stop && should_stop()) {
      result.complete = false;
      break;
    }
    ScoreEntry entry{point, 0.0, true, {}};
    try {
      entry.score = objective(point);
      if (!std::isfinite(entry.score)) {
        entry.ok = false;
        entry.message = "non-finite objective";
      }
    } catch (const std::exception& ex) {
      entry.ok = false;
      entry.message = ex.what();
    }
    if (!entry.ok) entry.score = std::numeric_limits<double>::infinity();
    result.table.push_back(entry);
    if (on_entry) on_entry(result.table.back());
  }
  if (result.table.empty()) return result;

  std::size_t best = 0;
  for (std::size_t k = 1; k < result.table.size(); ++k) {
    const auto& cand = result.table[k];
    const auto& cur = result.table[best];
    if (cand.score < cur.score ||
        (cand.score == cur.score && cand.point < cur.point)) {
      best = k;
    }
  }
  result.best = best;
  return result;
}

double h1_linf_embedding_constant() noexcept {
  // Diagonal of the Neumann Green's function of -v'' + v on (0, 1),
  // cosh(x) cosh(1 - x) / sinh(1), is largest at the endpoints.
  return std::sqrt(std::cosh(1.0) / std::sinh(1.0));
}

ConstantsEstimate estimate_constants(const fem::HermiteField& q_star,
                                     std::span<const fem::HermiteField> u_star_samples,
                                     const Constants& base) {
  ConstantsEstimate out;
  out.constants = base;
  out.q_star_sup = fem::max_abs(q_star);
  for (const auto& u : u_star_samples) {
    out.u_star_sup_l2 = std::max(out.u_star_sup_l2, fem::norm(u, fem::NormKind::X));
  }
  out.embedding_q_linf = h1_linf_embedding_constant();

  auto& c = out.constants;
  c.lipschitz_c = std::max(1.0, out.q_star_sup);
  c.c_a = out.embedding_q_linf * std::max(1.0, out.u_star_sup_l2);
  c.c_m = 1.0;
  c.big_c_m = 1.0;
  c.c_n = 1.0;
  c.big_c_n = 1.0;
  c.embed_v_vx = 1.0;
  c.embed_vx_x = 1.0;

  out.notes = {
      "L_C = max{1, |q*|_inf} from the Lipschitz bound of C(q*, .) in Vtil + Vhat",
      "C_A = C_{H1->Linf} max{1, sup_t |u*(t)|_X}, C_{H1->Linf} = sqrt(coth 1)",
      "c_M = c_N = 1: (Mv, v)_X equals |v|_VXtil^2 for the |D|-weighted M (N likewise)",
      "C_M = C_N = 1: |Mv|_X <= |v|_Vtil by integration by parts against test functions in omega",
      "C_{Vhat->VXhat} = C_{VXhat->X} = 1 for the norms as defined",
  };
  return out;
}

}  // namespace onlineid::gains
