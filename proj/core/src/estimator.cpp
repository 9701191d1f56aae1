#include "onlineid/estimator.hpp"

#include <cmath>
#include <limits>

#include "onlineid/errors.hpp"
#include "onlineid/norms.hpp"

namespace onlineid::est {

namespace {

using fem::BandedMatrix;
using fem::HermiteField;
using fem::NormKind;
using fem::Region;

// Coupled unknowns are interleaved per node as [q value, q slope, u value,
// u slope], so the bandwidth stays 7.
constexpr int kCoupledBand = 7;

int coupled(int block, int dof) { return 4 * (dof / 2) + 2 * block + dof % 2; }

void add_block(BandedMatrix& big, int row_block, int col_block, const BandedMatrix& a,
               double s) {
  const int n = a.rows();
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - a.lower());
    const int hi = std::min(n - 1, i + a.upper());
    for (int j = lo; j <= hi; ++j) {
      const double v = a(i, j);
      if (v != 0.0) big.add(coupled(row_block, i), coupled(col_block, j), s * v);
    }
  }
}

HermiteField difference(const HermiteField& a, const HermiteField& b) {
  return HermiteField(a.mesh(), a.dofs() - b.dofs(), fem::Boundary::Free);
}

BandedMatrix sum(BandedMatrix a, const BandedMatrix& b) {
  a.add_scaled(b, 1.0);
  return a;
}

double reference_floor(const HermiteField& u_star) {
  const double ref = fem::norm(u_star, NormKind::X);
  return 1e-12 * (ref > 0.0 ? ref : 1.0);
}

}  // namespace

Operators::Operators(const obs::ObservationWindow& w, const fem::Diffusion& d)
    : window(&w),
      diffusion(d),
      mass(fem::assemble_mass(w.mesh())),
      gram_q(sum(fem::assemble_mass(w.mesh()),
                 fem::assemble_stiffness(w.mesh(), fem::Diffusion(1.0)))),
      stiff_in(fem::assemble_stiffness(w.mesh(), d, &w, Region::Observed)),
      stiff_out(fem::assemble_stiffness(w.mesh(), d, &w, Region::Unobserved)),
      m_op(sum(fem::assemble_stiffness(w.mesh(), d, &w, Region::Observed, true),
               fem::assemble_mass(w.mesh(), &w, Region::Observed))),
      n_op(sum(fem::assemble_stiffness(w.mesh(), d, &w, Region::Unobserved, true),
               fem::assemble_mass(w.mesh(), &w, Region::Unobserved))) {}

EstimatorState advance(const Operators& ops, const EstimatorState& s,
                       const StepInputs& in) {
  if (!in.target_old || !in.target_new) throw ContractError("advance: missing target");
  const auto& mesh = s.u_hat.mesh();
  const auto* w = ops.window;
  const int n = mesh.n_dofs();
  const double h = in.time_step;

  const BandedMatrix a_in = fem::assemble_weighted_mass(mesh, *in.target_old, w,
                                                        Region::Observed);
  const BandedMatrix a_out = fem::assemble_weighted_mass(mesh, s.u_hat, w,
                                                         Region::Unobserved);

  BandedMatrix big(2 * n, kCoupledBand, kCoupledBand);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);

  // q rows: (1 + sigma h) G q - h A_in u = G q_n - h A_in y_new
  add_block(big, 0, 0, ops.gram_q, 1.0 + in.sigma * h);
  add_block(big, 0, 1, a_in, -h);
  const Eigen::VectorXd q_rhs =
      ops.gram_q * s.q_hat.dofs() - h * (a_in * in.target_new->dofs());

  // u rows: M u + h [K_out u + (A_in + A_out) q + mu M_op u + nu N_op u]
  //       = M u_n + h [F - K_in y_new + mu M_op y_new]
  add_block(big, 1, 1, ops.mass, 1.0);
  add_block(big, 1, 1, ops.stiff_out, h);
  add_block(big, 1, 0, a_in, h);
  add_block(big, 1, 0, a_out, h);
  if (in.mu_scaled != 0.0) add_block(big, 1, 1, ops.m_op, h * in.mu_scaled);
  if (in.nu != 0.0) add_block(big, 1, 1, ops.n_op, h * in.nu);
  Eigen::VectorXd u_rhs = ops.mass * s.u_hat.dofs() + h * in.load_new -
                          h * (ops.stiff_in * in.target_new->dofs());
  if (in.mu_scaled != 0.0) u_rhs += h * in.mu_scaled * (ops.m_op * in.target_new->dofs());

  for (int i = 0; i < n; ++i) {
    rhs[coupled(0, i)] = q_rhs[i];
    rhs[coupled(1, i)] = u_rhs[i];
  }
  for (int node : {0, mesh.n_nodes() - 1}) {
    const int row = coupled(1, fem::value_dof(node));
    big.set_identity_row(row);
    rhs[row] = 0.0;
  }

  const Eigen::VectorXd x = fem::solve_linear(big, rhs);
  Eigen::VectorXd q(n), u(n);
  for (int i = 0; i < n; ++i) {
    q[i] = x[coupled(0, i)];
    u[i] = x[coupled(1, i)];
  }
  return {s.t + h, HermiteField(mesh, std::move(q), fem::Boundary::Free),
          HermiteField(mesh, std::move(u), fem::Boundary::DirichletZero)};
}

double scaled_mu(const gains::Gain& mu, const EstimatorState& s,
                 const HermiteField& target, const Operators& ops, double floor) {
  if (!mu.active || mu.value == 0.0) return 0.0;
  const double r = fem::norm(difference(s.u_hat, target), NormKind::Vtil, ops.window,
                             ops.diffusion);
  return r > floor ? mu.value / r : 0.0;
}

namespace {

EstimatorState step_with(const Operators& ops, const EstimatorState& s,
                         const HermiteField& y_old, const HermiteField& y_new,
                         const TruthModel& truth, const gains::Gains& g, double sigma,
                         double time_step, double floor) {
  const double t_new = s.t + time_step;
  StepInputs in;
  in.time_step = time_step;
  in.target_old = &y_old;
  in.target_new = &y_new;
  in.load_new = fem::assemble_load(s.u_hat.mesh(), [&](double x) {
    return truth.forcing()(t_new, x);
  });
  in.mu_scaled = scaled_mu(g.mu, s, y_old, ops, floor);
  in.nu = g.nu.value;
  in.sigma = sigma;
  return advance(ops, s, in);
}

}  // namespace

EstimatorState step_exact(const Operators& ops, const EstimatorState& s,
                          const TruthModel& truth, const gains::Gains& g,
                          double time_step, double floor) {
  const HermiteField y_old = truth.u_star(s.t);
  const HermiteField y_new = truth.u_star(s.t + time_step);
  return step_with(ops, s, y_old, y_new, truth, g, 0.0, time_step, floor);
}

EstimatorState step_noisy(const Operators& ops, const EstimatorState& s,
                          const obs::ObservedStep& old_data,
                          const obs::ObservedStep& new_data, const TruthModel& truth,
                          const gains::Gains& g, double sigma, double time_step,
                          double floor) {
  return step_with(ops, s, old_data.lifted, new_data.lifted, truth, g, sigma, time_step,
                   floor);
}

EstimatorState step_smooth(const Operators& ops, const EstimatorState& s,
                           const obs::ObservedStep& old_data,
                           const obs::ObservedStep& new_data, const TruthModel& truth,
                           const gains::Gains& g, double time_step, double floor) {
  return step_noisy(ops, s, old_data, new_data, truth, g, 0.0, time_step, floor);
}

gains::ErrorNorms error_norms(const EstimatorState& s, const HermiteField& q_star,
                              const HermiteField& u_star, const HermiteField& target,
                              const HermiteField& defect_rate, const Operators& ops) {
  const auto& w = *ops.window;
  const auto& d = ops.diffusion;
  const HermiteField err = difference(s.u_hat, u_star);
  const HermiteField defect = difference(target, u_star);
  const HermiteField rd = difference(s.u_hat, target);

  gains::ErrorNorms n;
  n.e_q = fem::norm(difference(s.q_hat, q_star), NormKind::Q);
  n.r_x = fem::region_l2(err, w, Region::Observed);
  n.r_vtil = fem::norm(err, NormKind::Vtil, &w, d);
  n.r_vxtil = fem::norm(err, NormKind::VXtil, &w, d);
  n.p_x = fem::region_l2(err, w, Region::Unobserved);
  n.p_vhat = fem::norm(err, NormKind::Vhat, &w, d);
  n.p_vxhat = fem::norm(err, NormKind::VXhat, &w, d);
  n.d_x = fem::region_l2(defect, w, Region::Observed);
  n.d_vtil = fem::norm(defect, NormKind::Vtil, &w, d);
  n.rd_x = fem::region_l2(rd, w, Region::Observed);
  n.rd_vtil = fem::norm(rd, NormKind::Vtil, &w, d);
  n.rd_vxtil = fem::norm(rd, NormKind::VXtil, &w, d);
  n.dtil_x = fem::region_l2(defect_rate, w, Region::Observed);
  return n;
}

gains::Constants constants_for(const RunConfig& cfg, const HermiteField& q_star,
                               std::span<const HermiteField> u_star) {
  gains::Constants base;
  base.c1 = cfg.c1;
  base.nu_min = cfg.nu_min;
  base.sigma = cfg.sigma;
  return gains::estimate_constants(q_star, u_star, base).constants;
}

gains::Constants constants_for(const RunConfig& cfg) {
  validate(cfg);
  const fem::Mesh1D mesh(cfg.n_nodes);
  const TruthModel truth = cfg.truth == TruthKind::Analytic
                               ? truth_analytic(mesh, cfg.diffusion)
                               : truth_forward(mesh, cfg.diffusion, cfg.time_step,
                                               cfg.horizon);
  std::vector<HermiteField> u_star;
  const int steps = step_count(cfg.time_step, cfg.horizon);
  for (int k = 0; k <= steps; ++k) u_star.push_back(truth.u_star(k * cfg.time_step));
  return constants_for(cfg, truth.q_star(), u_star);
}

RunTrace run(const RunConfig& cfg, bool rethrow) {
  validate(cfg);
  const fem::Mesh1D mesh(cfg.n_nodes);
  const obs::ObservationWindow window(mesh, cfg.window_a, cfg.window_b);
  const TruthModel truth = cfg.truth == TruthKind::Analytic
                               ? truth_analytic(mesh, cfg.diffusion)
                               : truth_forward(mesh, cfg.diffusion, cfg.time_step,
                                               cfg.horizon);
  const Operators ops(window, fem::Diffusion(cfg.diffusion));
  const int steps = step_count(cfg.time_step, cfg.horizon);
  const double h = cfg.time_step;

  RunTrace trace{cfg, {}, truth.q_star(), {}, {}, {}, {}, std::nullopt, true, {}};
  trace.u_star.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) trace.u_star.push_back(truth.u_star(k * h));

  trace.constants = constants_for(cfg, truth.q_star(), trace.u_star);
  const gains::GainSchedule schedule{cfg.gain_mode, trace.constants, cfg.mu_bar,
                                     cfg.nu_bar};
  const auto& c = schedule.constants;

  std::optional<obs::DataFeed> feed;
  if (cfg.regime != Regime::Exact) {
    obs::NoiseModel model{cfg.noise_level, cfg.seed,
                          cfg.regime == Regime::Smooth ? cfg.smoothing_window : 0,
                          cfg.sigma, cfg.alpha};
    feed.emplace(model, window, h);
  }
  auto observe = [&](int k) {
    const auto& z = trace.u_star[static_cast<std::size_t>(k)];
    if (feed) return feed->next(z, static_cast<std::uint64_t>(k));
    HermiteField zero(mesh, fem::Boundary::Free);
    return obs::ObservedStep{z, z, z, zero, zero, 0.0, false};
  };

  std::vector<std::size_t> snapshot_steps;
  for (double t : cfg.snapshot_times) {
    snapshot_steps.push_back(static_cast<std::size_t>(std::lround(t / h)));
  }

  EstimatorState state{0.0, HermiteField(mesh, fem::Boundary::Free),
                       HermiteField(mesh, cfg.u_hat0_scale * trace.u_star[0].dofs(),
                                    fem::Boundary::DirichletZero)};
  obs::ObservedStep data = observe(0);

  auto record = [&](int k, const obs::ObservedStep& obs_k) {
    const auto& u_star = trace.u_star[static_cast<std::size_t>(k)];
    TraceRecord rec;
    rec.t = k * h;
    rec.norms = error_norms(state, truth.q_star(), u_star, obs_k.lifted,
                            obs_k.defect_rate, ops);
    rec.pustar_vhat = fem::norm(u_star, NormKind::Vhat, &window, ops.diffusion);
    const auto g = gains::evaluate(schedule, rec.norms, reference_floor(u_star));
    rec.mu = g.mu.value;
    rec.mu_active = g.mu.active;
    rec.nu = g.nu.value;
    rec.z_z = fem::norm(u_star, NormKind::Z, &window);
    rec.noise_z = obs_k.noise_z;
    const auto& n = rec.norms;
    rec.cond_rhs = n.r_x > 0.0
                       ? c.c_m / (2.0 * c.big_c_m) * n.r_vxtil * n.r_vxtil / n.r_x
                       : std::numeric_limits<double>::infinity();
    rec.tstar_flag = rec.t > 0.0 &&
                     obs::defect_condition_violated({rec.t, n.d_vtil, n.r_vxtil, n.r_x},
                                                    c.c_m, c.big_c_m);
    trace.records.push_back(rec);
    trace.u_hat.push_back(state.u_hat);
    for (std::size_t s = 0; s < snapshot_steps.size(); ++s) {
      if (snapshot_steps[s] == static_cast<std::size_t>(k)) {
        trace.snapshots.push_back({cfg.snapshot_times[s], state.q_hat, state.u_hat, u_star});
      }
    }
    return g;
  };

  gains::Gains g = record(0, data);
  for (int k = 0; k < steps; ++k) {
    try {
      obs::ObservedStep next = observe(k + 1);
      const double floor = reference_floor(trace.u_star[static_cast<std::size_t>(k)]);
      if (cfg.regime == Regime::Exact) {
        // Same targets as step_exact, taken from the stored interpolants so
        // that every regime sees bit-identical inputs on the time grid.
        state = step_with(ops, state, data.lifted, next.lifted, truth, g, 0.0, h, floor);
      } else if (cfg.regime == Regime::Noisy) {
        state = step_noisy(ops, state, data, next, truth, g, cfg.sigma, h, floor);
      } else {
        state = step_smooth(ops, state, data, next, truth, g, h, floor);
      }
      // Keep the step's time on the grid rather than accumulating h.
      state.t = (k + 1) * h;
      data = std::move(next);
    } catch (const SolverError& ex) {
      trace.complete = false;
      trace.failure = "step " + std::to_string(k + 1) + ": " + ex.what();
      if (rethrow) throw SolverError(trace.failure, ex.condition_estimate());
      break;
    }
    g = record(k + 1, data);
  }

  std::vector<obs::DefectSample> samples;
  for (const auto& r : trace.records) {
    samples.push_back({r.t, r.norms.d_vtil, r.norms.r_vxtil, r.norms.r_x});
  }
  trace.tstar_step = obs::detect_tstar(samples, c.c_m, c.big_c_m);
  return trace;
}

double observed_error_integral(const RunTrace& trace) {
  const auto& recs = trace.records;
  if (recs.size() < 2) return 0.0;
  const double h = trace.config.time_step;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    const double a = recs[k].norms.r_x, b = recs[k + 1].norms.r_x;
    sum += 0.5 * h * (a * a + b * b);
  }
  return sum;
}

}  // namespace onlineid::est
