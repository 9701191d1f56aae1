// Command line front end: forward | run | tune | probe-pe | audit.

#include <atomic>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "onlineid/config.hpp"
#include "onlineid/csv.hpp"
#include "onlineid/diagnostics.hpp"
#include "onlineid/errors.hpp"
#include "onlineid/estimator.hpp"
#include "onlineid/norms.hpp"
#include "onlineid/trace_io.hpp"
#include "onlineid/truth.hpp"
#include "onlineid/tuning.hpp"

namespace fs = std::filesystem;
using namespace onlineid;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "noise seed (overrides seed)");
  cmd->add_flag("--force", c.force, "write into a non-empty output directory");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  if (c.seed) cfg.seed = *c.seed;
  validate(cfg);
  return cfg;
}

fs::path prepare_output(const RunConfig& cfg, bool force) {
  const fs::path dir(cfg.output_dir);
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw ConfigError("output_dir", dir.string() + " is not empty (use --force)");
  }
  fs::create_directories(dir);
  return dir;
}

std::ofstream open(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

int cmd_forward(const Common& common, bool refine) {
  const RunConfig cfg = resolve(common);
  const fs::path dir = prepare_output(cfg, common.force);
  const fem::Mesh1D mesh(cfg.n_nodes);
  const est::TruthModel truth =
      cfg.truth == TruthKind::Analytic
          ? est::truth_analytic(mesh, cfg.diffusion)
          : est::truth_forward(mesh, cfg.diffusion, cfg.time_step, cfg.horizon);

  std::vector<double> times;
  std::vector<fem::HermiteField> states;
  for (double t : cfg.snapshot_times) {
    const double on_grid = cfg.time_step * std::round(t / cfg.time_step);
    times.push_back(cfg.truth == TruthKind::Analytic ? t : on_grid);
    states.push_back(truth.u_star(times.back()));
  }
  auto snaps = open(dir / "snapshots.csv");
  io::write_truth_snapshots(snaps, times, states, truth.q_star(), cfg.snapshot_samples);

  if (refine) {
    // Forward solves with q* against the analytic state at halved steps.
    const est::TruthModel exact = est::truth_analytic(mesh, cfg.diffusion);
    auto table = open(dir / "refinement.csv");
    io::CsvWriter w(table, {"time_step", "max_error_X", "observed_order"});
    double previous = NAN;
    for (int level = 0; level < 5; ++level) {
      const double h = cfg.time_step / std::pow(2.0, level);
      const auto traj = est::forward_solve(exact.q_star(), exact.u_star(0.0), exact.forcing(),
                                           cfg.diffusion, h, cfg.horizon);
      double err = 0.0;
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        err = std::max(err, fem::norm(traj.states[k] - exact.u_star(traj.times[k]),
                                      fem::NormKind::X));
      }
      const double order = level == 0 ? NAN : std::log2(previous / err);
      const double row[] = {h, err, order};
      w.row(row);
      previous = err;
    }
  }
  save_config(cfg, dir / "config.yaml");
  return kOk;
}

void write_run_outputs(const est::RunTrace& trace, const fs::path& dir) {
  auto t = open(dir / "trace.csv");
  io::write_trace(t, trace);
  auto s = open(dir / "snapshots.csv");
  io::write_snapshots(s, trace, trace.config.snapshot_samples);
  auto o = open(dir / "observations.csv");
  io::write_observations(o, trace);
  auto j = open(dir / "trajectory.csv");
  io::write_trajectory(j, trace);

  const auto report = diag::audit_propositions(diag::audit_input(trace));
  auto a = open(dir / "audit.txt");
  a << "regime: " << to_string(trace.config.regime)
    << "  gain_mode: " << gains::to_string(trace.config.gain_mode) << '\n';
  a << "T* step: ";
  if (trace.tstar_step) a << *trace.tstar_step << " (t = " << trace.records[*trace.tstar_step].t << ")\n";
  else a << "none\n";
  a << diag::format_report(report);
  if (!trace.complete) a << "run aborted: " << trace.failure << '\n';
}

int cmd_run(const Common& common) {
  const RunConfig cfg = resolve(common);
  const fs::path dir = prepare_output(cfg, common.force);
  save_config(cfg, dir / "config.yaml");
  const est::RunTrace trace = est::run(cfg);
  write_run_outputs(trace, dir);
  if (!trace.complete) {
    std::cerr << "numerical failure: " << trace.failure << '\n';
    return kNumericalError;
  }
  return kOk;
}

int cmd_tune(const Common& common) {
  const RunConfig cfg = resolve(common);
  const fs::path dir = prepare_output(cfg, common.force);
  const auto setup = est::tune_setup(cfg);

  auto scores = open(dir / "scores.csv");
  io::write_score_header(scores, setup.names);
  std::signal(SIGINT, on_sigint);
  const auto result = est::tune(
      cfg, [] { return g_interrupted.load(); },
      [&](const gains::ScoreEntry& e) { io::write_score_row(scores, e); });
  std::signal(SIGINT, SIG_DFL);

  auto status = open(dir / "tune_status.txt");
  status << (result.complete ? "complete" : "incomplete") << '\n'
         << "evaluated " << result.table.size() << " of " << setup.grid.size() << " points\n";
  if (!result.table.empty()) {
    const auto& best = result.table[result.best];
    save_config(est::apply_point(cfg, setup, best.point), dir / "best_config.yaml");
    status << "best score " << io::format_double(best.score) << '\n';
  }
  return result.complete ? kOk : 130;
}

int cmd_probe_pe(const Common& common, const std::string& trajectory_path, double gamma0,
                 double t0, double t_a_step) {
  const RunConfig cfg = resolve(common);
  const fs::path dir = prepare_output(cfg, common.force);
  std::ifstream in(trajectory_path);
  if (!in) throw InputError("cannot read " + trajectory_path);
  const auto traj = io::read_trajectory(in);
  if (traj.n_nodes != cfg.n_nodes) {
    throw ConfigError("n_nodes", "does not match the trajectory file");
  }
  const fem::Mesh1D mesh(cfg.n_nodes);
  const obs::ObservationWindow window(mesh, cfg.window_a, cfg.window_b);
  const auto directions = diag::canonical_directions(mesh, 8, cfg.seed);
  std::vector<double> t_a;
  const double end = traj.times.back() - t0 - gamma0;
  for (double t = 0.0; t <= end + 1e-9; t += t_a_step) t_a.push_back(t);
  if (t_a.empty()) t_a.push_back(0.0);

  const auto report = diag::probe_pe(traj.u_star, traj.u_hat, window, traj.time_step,
                                     directions, gamma0, t0, t_a);
  auto out = open(dir / "pe_probe.csv");
  io::write_pe_report(out, report);
  auto summary = open(dir / "pe_summary.txt");
  summary << "gamma0 " << gamma0 << "\nT0 " << t0 << "\ndirections " << directions.size()
          << "\npairs " << report.pairs.size() << "\nepsilon0 "
          << io::format_double(report.epsilon0) << '\n';
  return kOk;
}

int cmd_audit(const Common& common, const std::string& trace_path) {
  const RunConfig cfg = resolve(common);
  const fs::path dir = prepare_output(cfg, common.force);
  std::ifstream in(trace_path);
  if (!in) throw InputError("cannot read " + trace_path);

  const fem::Mesh1D mesh(cfg.n_nodes);
  diag::AuditInput input;
  input.regime = cfg.regime;
  input.sigma = cfg.sigma;
  input.time_step = cfg.time_step;
  input.constants = est::constants_for(cfg);
  input.q_star_q = fem::norm(est::truth_analytic(mesh, cfg.diffusion).q_star(), fem::NormKind::Q);
  input.records = io::read_trace(in);
  const auto report = diag::audit_propositions(input);
  auto out = open(dir / "audit.txt");
  out << diag::format_report(report);
  std::cout << diag::format_report(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online parameter identification for a 1D parabolic problem"};
  app.require_subcommand(1);

  Common common;
  bool refine = false;
  std::string trace_path;
  double gamma0 = 6.0, t0 = 12.0, t_a_step = 6.0;

  auto* forward = app.add_subcommand("forward", "write the ground truth");
  add_common(forward, common);
  forward->add_flag("--refine", refine, "also write a time-step refinement table");

  auto* run = app.add_subcommand("run", "run the estimator and audit it");
  add_common(run, common);

  auto* tune = app.add_subcommand("tune", "exhaustive search over the gain grid");
  add_common(tune, common);

  auto* probe = app.add_subcommand("probe-pe", "probe persistence of excitation");
  add_common(probe, common);
  probe->add_option("--trace", trace_path, "trajectory.csv from a run")->required();
  probe->add_option("--gamma0", gamma0, "integration window length");
  probe->add_option("--T0", t0, "scan length for t_b");
  probe->add_option("--t-a-step", t_a_step, "spacing of the t_a grid");

  auto* audit = app.add_subcommand("audit", "audit a stored trace");
  add_common(audit, common);
  audit->add_option("--trace", trace_path, "trace.csv from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*forward) return cmd_forward(common, refine);
    if (*run) return cmd_run(common);
    if (*tune) return cmd_tune(common);
    if (*probe) return cmd_probe_pe(common, trace_path, gamma0, t0, t_a_step);
    if (*audit) return cmd_audit(common, trace_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
