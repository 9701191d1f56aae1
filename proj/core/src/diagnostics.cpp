#include "onlineid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "onlineid/errors.hpp"
#include "onlineid/norms.hpp"

namespace onlineid::diag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t whole_steps(double span, double time_step) {
  return static_cast<std::size_t>(std::max(0L, std::lround(span / time_step)));
}

double trapezoid(std::span<const double> f, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) s += 0.5 * h * (f[k] + f[k + 1]);
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<fem::HermiteField> canonical_directions(const fem::Mesh1D& mesh,
                                                    std::size_t n_random,
                                                    std::uint64_t seed) {
  std::vector<fem::HermiteField> out;
  const int n = mesh.n_dofs();
  auto push_unit = [&](Eigen::VectorXd dofs) {
    fem::HermiteField f(mesh, std::move(dofs));
    f *= 1.0 / fem::norm(f, fem::NormKind::Q);
    out.push_back(std::move(f));
  };
  for (int i = 0; i < n; ++i) push_unit(Eigen::VectorXd::Unit(n, i));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < n_random; ++k) {
    Eigen::VectorXd dofs(n);
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      dofs[fem::value_dof(j)] = normal(rng);
      dofs[fem::slope_dof(j)] = normal(rng) / mesh.h();
    }
    push_unit(std::move(dofs));
  }
  return out;
}

PEProbeReport probe_pe(std::span<const fem::HermiteField> u_star,
                       std::span<const fem::HermiteField> u_hat,
                       const obs::ObservationWindow& window, double time_step,
                       std::span<const fem::HermiteField> directions, double gamma0,
                       double t0, std::span<const double> t_a) {
  if (!(time_step > 0.0)) throw ContractError("probe_pe: time step must be positive");
  if (gamma0 < time_step) throw ContractError("probe_pe: gamma0 below the time step");
  if (u_star.size() != u_hat.size()) throw ContractError("probe_pe: length mismatch");
  for (const auto& xi : directions) {
    if (std::abs(fem::norm(xi, fem::NormKind::Q) - 1.0) > 1e-10) {
      throw ContractError("probe_pe: directions must have unit Q-norm");
    }
  }

  PEProbeReport report;
  report.gamma0 = gamma0;
  report.t0 = t0;
  const std::size_t steps = u_star.size();
  const std::size_t m = whole_steps(gamma0, time_step);
  const std::size_t scan = whole_steps(t0, time_step);
  const auto& mesh = window.mesh();

  // Observed quadrature points and the running trapezoid integral of
  // u* + p at each of them.
  struct Point {
    int e;
    obs::QuadPoint q;
  };
  std::vector<Point> points;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& q : window.element_points(e)) {
      if (q.observed) points.push_back({e, q});
    }
  }
  Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps),
                                                     static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 1; k < steps; ++k) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      // u* + p is u* inside omega; u_hat only enters outside.
      auto w = [&](std::size_t s) {
        return p.q.observed ? u_star[s].value_on(p.e, p.q.s) : u_hat[s].value_on(p.e, p.q.s);
      };
      cumulative(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          cumulative(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(i)) +
          0.5 * time_step * (w(k - 1) + w(k));
    }
  }

  std::vector<Eigen::VectorXd> xi_at;
  for (const auto& xi : directions) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = xi.value_on(points[i].e, points[i].q.s);
    }
    xi_at.push_back(std::move(v));
  }
  Eigen::VectorXd weights(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    weights[static_cast<Eigen::Index>(i)] = points[i].q.weight;
  }

  double eps = kInf;
  for (double ta : t_a) {
    const std::size_t ka = whole_steps(ta, time_step);
    if (ka + m >= steps) continue;
    for (std::size_t d = 0; d < directions.size(); ++d) {
      PEPair pair{ta, d, 0.0, -1.0};
      for (std::size_t kb = ka; kb <= ka + scan && kb + m < steps; ++kb) {
        const Eigen::VectorXd integral =
            (cumulative.row(static_cast<Eigen::Index>(kb + m)) -
             cumulative.row(static_cast<Eigen::Index>(kb)))
                .transpose()
                .cwiseProduct(xi_at[d]);
        const double value = std::sqrt(weights.dot(integral.cwiseAbs2()));
        if (value > pair.value) {
          pair.value = value;
          pair.best_t_b = static_cast<double>(kb) * time_step;
        }
      }
      eps = std::min(eps, pair.value);
      report.pairs.push_back(pair);
    }
  }
  report.epsilon0 = report.pairs.empty() ? 0.0 : eps;
  return report;
}

LinkSeries link_series(std::span<const est::TraceRecord> records, double time_step) {
  LinkSeries s;
  s.time_step = time_step;
  for (const auto& r : records) {
    s.r_x.push_back(r.norms.r_x);
    s.r_vtil.push_back(r.norms.r_vtil);
    s.r_vxtil.push_back(r.norms.r_vxtil);
    s.p_vhat.push_back(r.norms.p_vhat);
    s.mu.push_back(r.mu);
  }
  return s;
}

namespace {

// Windowed link integral: (int (a^exp / theta)^{1/(exp-1)})^{(exp-1)/exp}, or
// the sup of a / theta when exp = 1. Returns nullopt when a step of the
// window has no positive theta.
std::optional<double> link_window(std::span<const double> a, std::span<const double> theta,
                                  double exponent, double h) {
  std::vector<double> f;
  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(theta[k] > 0.0) || !std::isfinite(theta[k])) return std::nullopt;
    if (exponent == 1.0) {
      sup = std::max(sup, a[k] / theta[k]);
    } else {
      f.push_back(std::pow(std::pow(a[k], exponent) / theta[k], 1.0 / (exponent - 1.0)));
    }
  }
  if (exponent == 1.0) return sup;
  return std::pow(trapezoid(f, h), (exponent - 1.0) / exponent);
}

}  // namespace

LinkConstantsReport estimate_link_constants(const LinkSeries& s, const LinkOptions& opt) {
  if (opt.lambda < 1.0 || opt.kappa < 1.0) {
    throw ContractError("estimate_link_constants: lambda and kappa must be >= 1");
  }
  LinkConstantsReport rep;
  const std::size_t n = s.r_x.size();

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < n; ++k) {
    if (s.r_x[k] > opt.floor && s.p_vhat[k] > opt.floor) {
      lx.push_back(std::log(s.r_x[k]));
      ly.push_back(std::log(s.p_vhat[k]));
    }
  }
  rep.pairs_used = lx.size();
  if (lx.size() >= 3) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx > 0.0) {
      const double rho = sxy / sxx;
      double c = 0.0;
      for (std::size_t k = 0; k < lx.size(); ++k) c = std::max(c, std::exp(ly[k] - rho * lx[k]));
      rep.rho = rho;
      rep.c_rho = c;
    }
  }

  std::vector<double> theta(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (s.r_x[k] > opt.floor && s.r_vtil[k] > opt.floor) {
      const double ratio = s.r_vxtil[k] * s.r_vxtil[k] / (s.r_vtil[k] * s.r_x[k]);
      rep.c_int = std::min(rep.c_int.value_or(kInf), ratio);
      rep.big_c_int = std::max(rep.big_c_int.value_or(0.0), ratio);
      theta[k] = s.mu[k] * s.r_vxtil[k] * s.r_vxtil[k] / s.r_vtil[k];
    }
  }

  const std::size_t m = whole_steps(opt.gamma0, s.time_step);
  const std::size_t first = whole_steps(opt.t_from, s.time_step);
  for (std::size_t k = first; k + m < n; ++k) {
    const std::span<const double> th(theta.data() + k, m + 1);
    if (auto v = link_window({s.p_vhat.data() + k, m + 1}, th, opt.lambda, s.time_step)) {
      rep.c_lambda = std::max(rep.c_lambda.value_or(0.0), *v);
    }
    if (auto v = link_window({s.mu.data() + k, m + 1}, th, opt.kappa, s.time_step)) {
      rep.c_kappa = std::max(rep.c_kappa.value_or(0.0), *v);
    }
  }
  return rep;
}

Semiconvergence detect_semiconvergence(std::span<const double> t,
                                       std::span<const double> series, int window,
                                       double factor) {
  if (series.size() < 3) throw ContractError("detect_semiconvergence: need 3 samples");
  if (t.size() != series.size()) throw ContractError("detect_semiconvergence: length mismatch");
  if (window < 1) throw ContractError("detect_semiconvergence: window must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t half = window / 2;

  Semiconvergence out;
  out.min_value = kInf;
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - half);
    const std::ptrdiff_t hi = std::min(n - 1, k + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += series[static_cast<std::size_t>(j)];
    const double avg = sum / static_cast<double>(hi - lo + 1);
    if (avg < out.min_value) {
      out.min_value = avg;
      out.min_index = static_cast<std::size_t>(k);
    }
  }
  out.t_min = t[out.min_index];

  const std::ptrdiff_t tail = std::min<std::ptrdiff_t>(window, n);
  double tail_sum = 0.0;
  for (std::ptrdiff_t j = n - tail; j < n; ++j) tail_sum += series[static_cast<std::size_t>(j)];
  out.growth = static_cast<std::ptrdiff_t>(out.min_index) < n - 1 &&
               tail_sum / static_cast<double>(tail) > factor * out.min_value;
  return out;
}

const char* to_string(AuditStatus s) noexcept {
  switch (s) {
    case AuditStatus::Pass: return "PASS";
    case AuditStatus::Fail: return "FAIL";
    case AuditStatus::NotComputable: return "NOT-COMPUTABLE";
    case AuditStatus::NotApplicable: return "N/A";
  }
  return "?";
}

AuditInput audit_input(const est::RunTrace& trace) {
  AuditInput in;
  in.regime = trace.config.regime;
  in.sigma = trace.config.sigma;
  in.time_step = trace.config.time_step;
  in.constants = trace.constants;
  in.q_star_q = fem::norm(trace.q_star, fem::NormKind::Q);
  in.records = trace.records;
  return in;
}

std::vector<double> lyapunov_series(std::span<const est::TraceRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.norms.e_q * r.norms.e_q + r.norms.r_x * r.norms.r_x);
  return out;
}

bool AuditReport::all_pass() const {
  return std::none_of(lines.begin(), lines.end(),
                      [](const AuditLine& l) { return l.status == AuditStatus::Fail; });
}

namespace {

AuditLine bound(std::string name, double lhs, double rhs, double slack, std::string note = {}) {
  AuditLine line{std::move(name), lhs, rhs, AuditStatus::Pass, std::move(note)};
  if (!std::isfinite(lhs) || std::isnan(rhs)) {
    line.status = AuditStatus::NotComputable;
  } else if (lhs > rhs * (1.0 + slack) && lhs > rhs) {
    line.status = AuditStatus::Fail;
  }
  return line;
}

AuditLine not_applicable(std::string name, std::string note) {
  return {std::move(name), 0.0, 0.0, AuditStatus::NotApplicable, std::move(note)};
}

}  // namespace

AuditReport audit_propositions(const AuditInput& in, const AuditOptions& opt) {
  AuditReport rep;
  const auto& recs = in.records;
  const auto& c = in.constants;
  const double h = in.time_step;
  if (recs.empty()) return rep;

  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& n = recs[k].norms;
    const bool violated = n.r_x == 0.0
                              ? n.d_vtil > 0.0
                              : n.d_vtil > c.c_m / (2.0 * c.big_c_m) * n.r_vxtil * n.r_vxtil / n.r_x;
    if (recs[k].t > 0.0 && violated) {
      rep.first_cond_violation = k;
      break;
    }
  }

  const auto energy = lyapunov_series(recs);
  {
    std::vector<double> t;
    for (const auto& r : recs) t.push_back(r.t);
    if (recs.size() >= 3 && all_finite(energy)) {
      rep.semiconvergence = detect_semiconvergence(t, energy);
    }
  }

  // Statements for noisy data hold only before T*.
  std::size_t end = recs.size();
  if (in.regime == Regime::Noisy && rep.first_cond_violation) end = *rep.first_cond_violation;
  if (end == 0) end = 1;
  const std::span<const est::TraceRecord> span(recs.data(), end);

  std::vector<double> e2_r2, p_x, prod, p_x2;
  double sup_pu = 0.0;
  for (const auto& r : span) {
    const auto& n = r.norms;
    const double rr = in.regime == Regime::Smooth ? n.rd_x : n.r_x;
    e2_r2.push_back(n.e_q * n.e_q + rr * rr);
    p_x.push_back(n.p_x);
    p_x2.push_back(n.p_x * n.p_x);
    prod.push_back(n.p_vhat * rr);
  }
  for (const auto& r : recs) sup_pu = std::max(sup_pu, r.pustar_vhat);
  const double e0 = e2_r2.front();
  const double max_e = *std::max_element(e2_r2.begin(), e2_r2.end());
  const double max_p = *std::max_element(p_x.begin(), p_x.end());
  const double max_p2 = *std::max_element(p_x2.begin(), p_x2.end());
  const double integral = trapezoid(prod, h);
  const double vx = c.embed_vx_x;
  const double nu_min = c.nu_min;
  const double slack = opt.slack;

  switch (in.regime) {
    case Regime::Exact: {
      rep.lines.push_back(bound("P1.1 max |e|_Q^2+|r|_X^2 <= initial", max_e, e0, slack));
      double growth = 0.0;
      for (std::size_t k = 0; k + 1 < energy.size(); ++k) {
        growth = std::max(growth, energy[k + 1] - energy[k]);
      }
      rep.lyapunov_growth_c = growth / (h * h);
      rep.lines.push_back(bound("P1.1 stepwise growth / h_t^2 <= C", rep.lyapunov_growth_c,
                                opt.lyapunov_c, 0.0));
      if (nu_min > 0.0) {
        const double rhs = std::max(
            p_x.front(), c.c_a * c.c_a / (c.c_n * vx * vx * nu_min) * e0 +
                             c.big_c_n * c.big_c_n / (c.c_n * c.c_n) * sup_pu * sup_pu);
        rep.lines.push_back(bound("P1.2 max |p|_X <= bound", max_p, rhs, slack));
      } else {
        rep.lines.push_back({"P1.2 max |p|_X <= bound", max_p, kInf,
                             AuditStatus::NotComputable, "nu_min = 0"});
      }
      rep.lines.push_back(bound("P1.3 int |p|_Vhat |r|_X <= E(0)/L_C", integral,
                                e0 / c.lipschitz_c, slack));
      break;
    }
    case Regime::Noisy: {
      const std::string window_note =
          rep.first_cond_violation
              ? "evaluated on [0, T*), T* = " + std::to_string(recs[*rep.first_cond_violation].t)
              : "T* = inf";
      const double rhs1 = in.sigma > 0.0 ? std::max(in.q_star_q * in.q_star_q, e0) : e0;
      rep.lines.push_back(
          bound("P2.1 max |e|_Q^2+|r|_X^2 <= bound", max_e, rhs1, slack, window_note));
      if (nu_min > 0.0) {
        const double rhs = 2.0 * std::max(
            c.big_c_n * c.big_c_n * vx * vx * vx * vx / (c.c_n * c.c_n) * sup_pu * sup_pu +
                c.c_a * vx * vx / (c.c_n * nu_min) * e0,
            p_x2.front());
        rep.lines.push_back(bound("P2.2 max |p|_X^2 <= bound", max_p2, rhs, slack, window_note));
      } else {
        rep.lines.push_back({"P2.2 max |p|_X^2 <= bound", max_p2, kInf,
                             AuditStatus::NotComputable, "nu_min = 0"});
      }
      if (!rep.first_cond_violation && in.sigma == 0.0) {
        rep.lines.push_back(bound("P2.3 int |p|_Vhat |r|_X <= E(0)/(2 L_C)", integral,
                                  e0 / (2.0 * c.lipschitz_c), slack));
      } else {
        rep.lines.push_back(not_applicable("P2.3 int |p|_Vhat |r|_X <= E(0)/(2 L_C)",
                                           "requires T* = inf and sigma = 0"));
      }
      break;
    }
    case Regime::Smooth: {
      rep.lines.push_back(bound("P3.1 max |e|_Q^2+|rd|_X^2 <= initial", max_e, e0, slack));
      if (nu_min > 0.0) {
        const double rhs = std::max(
            p_x2.front(),
            c.big_c_n * c.big_c_n * vx * vx * vx * vx / (c.c_n * c.c_n) * sup_pu * sup_pu +
                c.c_a * vx * vx / (nu_min * c.c_n * c.c_n) * e0);
        rep.lines.push_back(bound("P3.2 max |p|_X^2 <= bound", max_p2, rhs, slack));
      } else {
        rep.lines.push_back({"P3.2 max |p|_X^2 <= bound", max_p2, kInf,
                             AuditStatus::NotComputable, "nu_min = 0"});
      }
      rep.lines.push_back(bound("P3.3 int |p|_Vhat |rd|_X <= E(0)/(2 L_C)", integral,
                                e0 / (2.0 * c.lipschitz_c), slack));
      break;
    }
  }
  return rep;
}

std::string format_report(const AuditReport& rep) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& l : rep.lines) {
    os << to_string(l.status) << "  " << l.name << "  lhs=" << l.lhs << " rhs=" << l.rhs;
    if (!l.note.empty()) os << "  (" << l.note << ")";
    os << '\n';
  }
  os << "cond_d first violation: ";
  if (rep.first_cond_violation) {
    os << "step " << *rep.first_cond_violation << '\n';
  } else {
    os << "none (T* = inf)\n";
  }
  os << "lyapunov growth constant: " << rep.lyapunov_growth_c << '\n';
  const auto& s = rep.semiconvergence;
  os << "semiconvergence: growth=" << (s.growth ? "true" : "false") << " t_min=" << s.t_min
     << " min=" << s.min_value << '\n';
  return os.str();
}

}  // namespace onlineid::diag
