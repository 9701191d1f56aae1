#include "onlineid/truth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "onlineid/banded.hpp"
#include "onlineid/errors.hpp"

namespace onlineid::est {

namespace {

constexpr double kPi = std::numbers::pi;

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  return p == Provenance::Analytic ? "analytic" : "forward";
}

int step_count(double time_step, double horizon) {
  if (!(time_step > 0.0)) throw InputError("time_step must be positive");
  if (!(horizon >= 0.0)) throw InputError("horizon must be nonnegative");
  return static_cast<int>(std::lround(horizon / time_step));
}

TruthModel::TruthModel(fem::Mesh1D mesh, double diffusion, fem::HermiteField q_star,
                       std::function<double(double, double)> u_star,
                       std::function<double(double, double)> du_star, Forcing f)
    : mesh_(std::move(mesh)),
      diffusion_(diffusion),
      q_star_(std::move(q_star)),
      f_(std::move(f)),
      provenance_(Provenance::Analytic),
      u_(std::move(u_star)),
      du_(std::move(du_star)) {}

TruthModel::TruthModel(fem::Mesh1D mesh, double diffusion, fem::HermiteField q_star,
                       Trajectory trajectory, Forcing f)
    : mesh_(std::move(mesh)),
      diffusion_(diffusion),
      q_star_(std::move(q_star)),
      f_(std::move(f)),
      provenance_(Provenance::ForwardSolve),
      trajectory_(std::move(trajectory)) {}

fem::HermiteField TruthModel::u_star(double t) const {
  if (provenance_ == Provenance::Analytic) {
    return fem::interpolate(
        mesh_, [&](double x) { return u_(t, x); },
        [&](double x) { return du_(t, x); }, fem::Boundary::DirichletZero);
  }
  const double k = t / trajectory_.time_step;
  const long n = std::lround(k);
  if (n < 0 || static_cast<std::size_t>(n) >= trajectory_.states.size() ||
      std::abs(k - static_cast<double>(n)) > 1e-9) {
    throw InputError("forward truth has no state at t = " + time_label(t));
  }
  return trajectory_.states[static_cast<std::size_t>(n)];
}

double TruthModel::u_star_at(double t, double x) const {
  if (provenance_ == Provenance::Analytic) return u_(t, x);
  return u_star(t).value(x);
}

double q_star_value(double x) noexcept { return 0.025 * x * x - 0.025 * x; }
double q_star_derivative(double x) noexcept { return 0.05 * x - 0.025; }

TruthModel truth_analytic(const fem::Mesh1D& mesh, double diffusion) {
  if (!std::isfinite(diffusion)) throw InputError("diffusion must be finite");
  auto q = fem::interpolate(mesh, q_star_value, q_star_derivative);
  auto u = [](double t, double x) { return std::sin(kPi * x) / (1.0 + t); };
  auto du = [](double t, double x) { return kPi * std::cos(kPi * x) / (1.0 + t); };
  auto f = [diffusion](double t, double x) {
    const double a = 1.0 / (1.0 + t);
    return a * (diffusion * kPi * kPi - a + q_star_value(x)) * std::sin(kPi * x);
  };
  return TruthModel(mesh, diffusion, std::move(q), u, du, f);
}

Trajectory forward_solve(const fem::HermiteField& q, const fem::HermiteField& u0,
                         const Forcing& f, double diffusion, double time_step,
                         double horizon) {
  const int steps = step_count(time_step, horizon);
  const auto& mesh = u0.mesh();
  if (!(q.mesh() == mesh)) throw ContractError("forward_solve: mesh mismatch");

  const fem::BandedMatrix mass = fem::assemble_mass(mesh);
  fem::BandedMatrix lhs = mass;
  lhs.add_scaled(fem::assemble_stiffness(mesh, fem::Diffusion(diffusion)), time_step);
  lhs.add_scaled(fem::assemble_weighted_mass(mesh, q), time_step);
  const int last = fem::value_dof(mesh.n_nodes() - 1);
  lhs.set_identity_row(fem::value_dof(0));
  lhs.set_identity_row(last);

  Trajectory out;
  out.time_step = time_step;
  out.times.reserve(static_cast<std::size_t>(steps) + 1);
  out.states.reserve(static_cast<std::size_t>(steps) + 1);
  fem::HermiteField u(mesh, u0.dofs(), fem::Boundary::DirichletZero);
  out.times.push_back(0.0);
  out.states.push_back(u);

  for (int n = 0; n < steps; ++n) {
    const double t = (n + 1) * time_step;
    Eigen::VectorXd rhs =
        mass * u.dofs() +
        time_step * fem::assemble_load(mesh, [&](double x) { return f(t, x); });
    rhs[fem::value_dof(0)] = 0.0;
    rhs[last] = 0.0;
    try {
      u.set_dofs(fem::solve_linear(lhs, rhs));
    } catch (const SolverError& ex) {
      throw SolverError("forward solve at t = " + time_label(t) + ": " + ex.what(),
                        ex.condition_estimate());
    }
    out.times.push_back(t);
    out.states.push_back(u);
  }
  return out;
}

TruthModel truth_forward(const fem::Mesh1D& mesh, double diffusion, double time_step,
                         double horizon) {
  TruthModel analytic = truth_analytic(mesh, diffusion);
  auto traj = forward_solve(analytic.q_star(), analytic.u_star(0.0), analytic.forcing(),
                            diffusion, time_step, horizon);
  return TruthModel(mesh, diffusion, analytic.q_star(), std::move(traj),
                    analytic.forcing());
}

}  // namespace onlineid::est
