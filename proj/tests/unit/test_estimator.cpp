#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "onlineid/assembly.hpp"
#include "onlineid/config.hpp"
#include "onlineid/estimator.hpp"
#include "onlineid/norms.hpp"
#include "onlineid/truth.hpp"
#include "onlineid/window.hpp"

using namespace onlineid;
using fem::HermiteField;
using fem::Mesh1D;

namespace {

constexpr double kPi = std::numbers::pi;

// Hermite basis written out piecewise, independent of the library's shapes.
struct Basis {
  const Mesh1D& m;
  double value(int dof, double x) const { return eval(dof, x, false); }
  double slope(int dof, double x) const { return eval(dof, x, true); }
  double eval(int dof, double x, bool deriv) const {
    const int j = dof / 2;
    const bool is_psi = dof % 2 == 1;
    const double h = m.h(), xj = m.node(j);
    if (j > 0 && x >= xj - h && x <= xj) {
      const double s = (x - (xj - h)) / h;
      if (!is_psi) return deriv ? (-6 * s * s + 6 * s) / h : -2 * s * s * s + 3 * s * s;
      return deriv ? 3 * s * s - 2 * s : h * (s * s * s - s * s);
    }
    if (j < m.n_nodes() - 1 && x >= xj && x <= xj + h) {
      const double s = (x - xj) / h;
      if (!is_psi) return deriv ? (-6 * s + 6 * s * s) / h : 1 - 3 * s * s + 2 * s * s * s;
      return deriv ? 3 * s * s - 4 * s + 1 : h * (s * s * s - 2 * s * s + s);
    }
    return 0.0;
  }
};

// 5-point Gauss-Legendre per element, exact for polynomial integrands of
// degree <= 9 (products of three cubics).
template <class F>
double integrate(const Mesh1D& m, F f) {
  static const double node[] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640,
                                -0.9061798459386640};
  static const double weight[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                  0.2369268850561891, 0.2369268850561891};
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const double mid = m.node(e) + m.h() / 2, half = m.h() / 2;
    for (int i = 0; i < 5; ++i) total += half * weight[i] * f(mid + half * node[i]);
  }
  return total;
}

RunConfig base_config() {
  RunConfig c;
  c.horizon = 12.0;
  c.snapshot_times = {0.0, 6.0, 12.0};
  return c;
}

}  // namespace

TEST(Advance, MatchesDenseReferenceFullObservation) {
  const Mesh1D m(9);
  const auto w = obs::ObservationWindow::full(m);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const auto truth = est::truth_analytic(m);
  const double h = 0.6, mu_s = 2.5, sigma = 0.3;
  const HermiteField y0 = truth.u_star(0.0), y1 = truth.u_star(h);

  est::EstimatorState s{0.0, HermiteField(m), y0};
  s.q_hat.set_dofs(Eigen::VectorXd::LinSpaced(m.n_dofs(), -0.01, 0.02));

  est::StepInputs in;
  in.time_step = h;
  in.target_old = &y0;
  in.target_new = &y1;
  in.load_new = fem::assemble_load(m, [&](double x) { return truth.forcing()(h, x); });
  in.mu_scaled = mu_s;
  in.nu = 0.7;
  in.sigma = sigma;
  const auto next = est::advance(ops, s, in);

  const int n = m.n_dofs();
  const Basis b{m};
  Eigen::MatrixXd mass(n, n), stiff(n, n), a(n, n);
  Eigen::VectorXd load(n);
  for (int i = 0; i < n; ++i) {
    load[i] = integrate(m, [&](double x) { return truth.forcing()(h, x) * b.value(i, x); });
    // the forcing is not polynomial: the library's Gauss rule differs slightly
    EXPECT_NEAR(in.load_new[i], load[i], 1e-7);
    for (int j = 0; j < n; ++j) {
      mass(i, j) = integrate(m, [&](double x) { return b.value(i, x) * b.value(j, x); });
      stiff(i, j) = integrate(m, [&](double x) { return b.slope(i, x) * b.slope(j, x); });
      a(i, j) = integrate(m, [&](double x) { return y0.value(x) * b.value(i, x) * b.value(j, x); });
    }
  }
  const Eigen::MatrixXd g = mass + stiff;
  const Eigen::MatrixXd mop = stiff + mass;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::VectorXd rhs(2 * n);
  big.topLeftCorner(n, n) = (1 + sigma * h) * g;
  big.topRightCorner(n, n) = -h * a;
  rhs.head(n) = g * s.q_hat.dofs() - h * a * y1.dofs();
  big.bottomLeftCorner(n, n) = h * a;
  big.bottomRightCorner(n, n) = mass + h * mu_s * mop;
  rhs.tail(n) = mass * s.u_hat.dofs() + h * (in.load_new - stiff * y1.dofs() + mu_s * mop * y1.dofs());
  for (int row : {n + 0, n + 2 * (m.n_nodes() - 1)}) {
    big.row(row).setZero();
    big(row, row) = 1.0;
    rhs[row] = 0.0;
  }
  const Eigen::VectorXd x = big.fullPivLu().solve(rhs);
  EXPECT_LT((next.u_hat.dofs() - x.tail(n)).lpNorm<Eigen::Infinity>(), 1e-11);
  EXPECT_DOUBLE_EQ(next.t, h);

  // parameter update is driven by the observed error alone
  const Eigen::VectorXd lhs = g * ((1 + sigma * h) * next.q_hat.dofs() - s.q_hat.dofs()) / h;
  EXPECT_LT((lhs - a * (next.u_hat.dofs() - y1.dofs())).lpNorm<Eigen::Infinity>(), 1e-11);
}

TEST(Advance, SigmaDampingWithoutCoupling) {
  const Mesh1D m(11);
  const obs::ObservationWindow w(m, 0.3, 0.87);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const HermiteField zero(m);
  est::EstimatorState s{0.0, fem::interpolate(m, [](double x) { return x; }, [](double) { return 1.0; }),
                        HermiteField(m, fem::Boundary::DirichletZero)};
  const Eigen::VectorXd q0 = s.q_hat.dofs();
  est::StepInputs in;
  in.time_step = 0.5;
  in.target_old = &zero;
  in.target_new = &zero;
  in.load_new = Eigen::VectorXd::Zero(m.n_dofs());
  in.sigma = 4.0;
  for (int k = 1; k <= 5; ++k) {
    s = est::advance(ops, s, in);
    EXPECT_LT((s.q_hat.dofs() - q0 / std::pow(1 + 4.0 * 0.5, k)).norm(), 1e-13);
    EXPECT_EQ(s.u_hat.dofs().norm(), 0.0);
  }
}

TEST(Advance, ScaledMuFloor) {
  const Mesh1D m(11);
  const obs::ObservationWindow w(m, 0.3, 0.87);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const auto truth = est::truth_analytic(m);
  const auto y = truth.u_star(0.0);
  est::EstimatorState s{0.0, HermiteField(m), y};
  EXPECT_EQ(est::scaled_mu({5.0, true}, s, y, ops, 1e-12), 0.0);
  s.u_hat = HermiteField(m, 0.5 * y.dofs(), fem::Boundary::DirichletZero);
  const double r = fem::norm(s.u_hat - y, fem::NormKind::Vtil, &w);
  EXPECT_NEAR(est::scaled_mu({5.0, true}, s, y, ops, 1e-12), 5.0 / r, 1e-14);
  EXPECT_EQ(est::scaled_mu({5.0, false}, s, y, ops, 1e-12), 0.0);
}

TEST(Advance, ExactInitialisationStaysClose) {
  // q_hat = q*, u_hat = u*, nu = 0 (nu > 0 damps P u_hat and moves it off u*).
  // What remains is the lag of the frozen A argument, h |q*| |u*_{n+1} - u*_n|.
  const Mesh1D m(31);
  const obs::ObservationWindow w(m, 0.3, 0.87);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const auto truth = est::truth_forward(m, 1.0, 0.6, 6.0);
  est::EstimatorState s{0.0, truth.q_star(), truth.u_star(0.0)};
  for (int k = 0; k < 10; ++k) {
    s = est::step_exact(ops, s, truth, {{10.0, true}, {0.0, true}}, 0.6, 1e-12);
    const auto err = s.u_hat - truth.u_star(s.t);
    const double lag = 0.6 * 0.00625 * fem::norm(truth.u_star(s.t) - truth.u_star(s.t - 0.6), fem::NormKind::X);
    EXPECT_LT(fem::norm(s.q_hat - truth.q_star(), fem::NormKind::Q), 1e-3);
    EXPECT_LT(fem::region_l2(err, w, fem::Region::Observed), 4 * lag + 1e-12);
  }
}

TEST(Advance, ZeroGainsReduceToSimulation) {
  const Mesh1D m(31);
  const obs::ObservationWindow w(m, 0.3, 0.87);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const auto truth = est::truth_forward(m, 1.0, 0.3, 6.0);
  est::EstimatorState s{0.0, truth.q_star(), truth.u_star(0.0)};
  for (int k = 0; k < 20; ++k) s = est::step_exact(ops, s, truth, {{0.0, false}, {0.0, true}}, 0.3, 1e-12);
  const double rel = fem::norm(s.u_hat - truth.u_star(6.0), fem::NormKind::X) /
                     fem::norm(truth.u_star(6.0), fem::NormKind::X);
  EXPECT_LT(rel, 0.05);
}

TEST(Run, RegimeReductionsAreBitwise) {
  auto exact = base_config();
  exact.gain_mode = gains::GainMode::Heuristic;
  exact.mu_bar = 100;
  exact.nu_bar = 0.1;
  exact.u_hat0_scale = 0.9;
  auto noisy = exact;
  noisy.regime = Regime::Noisy;
  const auto a = est::run(exact), b = est::run(noisy);
  ASSERT_EQ(a.u_hat.size(), b.u_hat.size());
  for (std::size_t k = 0; k < a.u_hat.size(); ++k) EXPECT_EQ(a.u_hat[k].dofs(), b.u_hat[k].dofs());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k)
    EXPECT_EQ(a.snapshots[k].q_hat.dofs(), b.snapshots[k].q_hat.dofs());

  noisy.noise_level = 0.05;
  auto smooth = noisy;
  smooth.regime = Regime::Smooth;
  smooth.smoothing_window = 1;
  const auto c = est::run(noisy), d = est::run(smooth);
  for (std::size_t k = 0; k < c.u_hat.size(); ++k) EXPECT_EQ(c.u_hat[k].dofs(), d.u_hat[k].dofs());
  EXPECT_EQ(c.snapshots.back().q_hat.dofs(), d.snapshots.back().q_hat.dofs());
}

TEST(Run, Deterministic) {
  auto c = base_config();
  c.regime = Regime::Noisy;
  c.noise_level = 0.05;
  c.seed = 17;
  c.gain_mode = gains::GainMode::Heuristic;
  const auto a = est::run(c), b = est::run(c);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].norms.e_q, b.records[k].norms.e_q);
    EXPECT_EQ(a.records[k].norms.r_x, b.records[k].norms.r_x);
  }
}

TEST(Run, ZeroHorizonHasInitialRecordOnly) {
  auto c = base_config();
  c.horizon = 0.0;
  c.snapshot_times = {0.0};
  const auto t = est::run(c);
  EXPECT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.snapshots.size(), 1u);
  EXPECT_TRUE(t.complete);
}

TEST(Run, FullObservationGrindsObservedErrorDown) {
  auto c = base_config();
  c.window_a = 0.0;
  c.window_b = 1.0;
  c.horizon = 60.0;
  c.u_hat0_scale = 0.5;
  c.snapshot_times = {0.0, 60.0};
  const auto t = est::run(c);
  ASSERT_TRUE(t.complete);
  EXPECT_EQ(t.records.size(), 101u);
  EXPECT_LT(t.records.back().norms.r_x, 0.1 * t.records.front().norms.r_x);
}

TEST(Run, OracleGainsMeetTheirBounds) {
  auto c = base_config();
  c.u_hat0_scale = 0.8;
  const auto t = est::run(c);
  const double floor = 1e-12;
  for (const auto& r : t.records) {
    const auto g = gains::mu_exact(r.norms, t.constants, floor);
    if (!r.mu_active) continue;
    EXPECT_GE(r.mu, g.value * (1 - 1e-12));
    EXPECT_GE(r.nu, t.constants.nu_min);
  }
}

TEST(Run, TstarOrderedByNoiseLevel) {
  std::optional<std::size_t> prev;
  bool first = true;
  for (double delta : {0.01, 0.05, 0.10}) {
    auto c = base_config();
    c.regime = Regime::Noisy;
    c.noise_level = delta;
    c.gain_mode = gains::GainMode::Heuristic;
    c.mu_bar = 300;
    c.nu_bar = 0.1;
    const auto t = est::run(c);
    const std::size_t step = t.tstar_step.value_or(SIZE_MAX);
    if (!first) {
      EXPECT_LE(step, prev.value_or(SIZE_MAX));
    }
    prev = t.tstar_step;
    first = false;
  }
  auto c = base_config();
  c.regime = Regime::Noisy;
  EXPECT_FALSE(est::run(c).tstar_step.has_value());
}

TEST(Run, ObservedErrorIntegralIsTrapezoid) {
  auto c = base_config();
  c.u_hat0_scale = 0.9;
  const auto t = est::run(c);
  double s = 0.0;
  for (std::size_t k = 1; k < t.records.size(); ++k)
    s += 0.3 * (std::pow(t.records[k - 1].norms.r_x, 2) + std::pow(t.records[k].norms.r_x, 2));
  EXPECT_NEAR(est::observed_error_integral(t), s, 1e-15 * s);
}
