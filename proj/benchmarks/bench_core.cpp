#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "onlineid/assembly.hpp"
#include "onlineid/banded.hpp"
#include "onlineid/estimator.hpp"
#include "onlineid/truth.hpp"

using namespace onlineid;

static void BM_AssembleMass(benchmark::State& state) {
  const fem::Mesh1D m(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fem::assemble_mass(m));
}
BENCHMARK(BM_AssembleMass)->Arg(31)->Arg(301);

static void BM_BandedSolve(benchmark::State& state) {
  const fem::Mesh1D m(static_cast<int>(state.range(0)));
  const auto mass = fem::assemble_mass(m);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m.n_dofs());
  for (auto _ : state) benchmark::DoNotOptimize(fem::solve_linear(mass, rhs));
}
BENCHMARK(BM_BandedSolve)->Arg(31)->Arg(301);

static void BM_EstimatorStep(benchmark::State& state) {
  const fem::Mesh1D m(31);
  const obs::ObservationWindow w(m, 0.3, 0.87);
  const est::Operators ops(w, fem::Diffusion(1.0));
  const auto truth = est::truth_analytic(m);
  gains::Gains g;
  g.mu = {10.0, true};
  g.nu = {0.1, true};
  est::EstimatorState s{0.0, fem::HermiteField(m), 0.9 * truth.u_star(0.0)};
  for (auto _ : state) benchmark::DoNotOptimize(est::step_exact(ops, s, truth, g, 0.6, 1e-12));
}
BENCHMARK(BM_EstimatorStep);

static void BM_FullRun(benchmark::State& state) {
  RunConfig c;
  c.gain_mode = gains::GainMode::Heuristic;
  c.mu_bar = 10;
  c.nu_bar = 0.1;
  c.u_hat0_scale = 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(est::run(c));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
