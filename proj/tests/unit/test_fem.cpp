#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "onlineid/assembly.hpp"
#include "onlineid/banded.hpp"
#include "onlineid/errors.hpp"
#include "onlineid/hermite.hpp"
#include "onlineid/mesh.hpp"
#include "onlineid/norms.hpp"
#include "onlineid/quadrature.hpp"
#include "onlineid/window.hpp"

using namespace onlineid;
using fem::BasisKind;
using fem::Boundary;
using fem::HermiteField;
using fem::Mesh1D;
using fem::NormKind;

namespace {

constexpr double kPi = std::numbers::pi;

HermiteField sine_field(const Mesh1D& mesh, Boundary b = Boundary::Free) {
  return fem::interpolate(
      mesh, [](double x) { return std::sin(kPi * x); },
      [](double x) { return kPi * std::cos(kPi * x); }, b);
}

HermiteField random_field(const Mesh1D& mesh, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::VectorXd d(mesh.n_dofs());
  for (int i = 0; i < d.size(); ++i) d[i] = n(rng);
  return HermiteField(mesh, d);
}

// composite Simpson, independent of the element quadrature
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Mesh, Geometry) {
  Mesh1D m(31);
  EXPECT_EQ(m.n_elements(), 30);
  EXPECT_EQ(m.n_dofs(), 62);
  EXPECT_NEAR(m.h(), 1.0 / 30, 1e-15);
  EXPECT_DOUBLE_EQ(m.node(30), 1.0);
  EXPECT_EQ(m.element_of(1.0), 29);
  EXPECT_EQ(m.element_of(0.0), 0);
  EXPECT_THROW(Mesh1D(2), InputError);
}

TEST(Quadrature, GaussLegendreExactness) {
  const auto& rule = fem::default_rule();
  EXPECT_EQ(rule.exact_degree, 9);
  double wsum = 0.0;
  for (double w : rule.weights) {
    EXPECT_GT(w, 0.0);
    wsum += w;
  }
  EXPECT_NEAR(wsum, 1.0, 1e-15);
  for (int k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * std::pow(rule.points[i], k);
    EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << "degree " << k;
  }
}

TEST(Hermite, BasisAtNodes) {
  Mesh1D m(11);
  const int j = 4;
  const double xj = m.node(j);
  EXPECT_NEAR(fem::eval_basis(m, j, BasisKind::Value, xj), 1.0, 1e-15);
  EXPECT_NEAR(fem::eval_basis(m, j, BasisKind::Slope, xj), 0.0, 1e-15);
  EXPECT_NEAR(fem::eval_basis_derivative(m, j, BasisKind::Slope, xj), 1.0, 1e-12);
  EXPECT_NEAR(fem::eval_basis(m, j, BasisKind::Value, m.node(j - 1) + m.h() / 2), 0.5,
              1e-14);
  EXPECT_THROW(fem::eval_basis(m, 11, BasisKind::Value, 0.5), std::out_of_range);
  EXPECT_THROW(fem::eval_basis(m, 2, BasisKind::Value, 1.5), InputError);
}

TEST(Hermite, PartitionOfUnity) {
  Mesh1D m(21);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(m.h(), 1.0 - m.h());
  for (int k = 0; k < 10; ++k) {
    const double x = u(rng);
    double s = 0.0;
    for (int j = 0; j < m.n_nodes(); ++j) s += fem::eval_basis(m, j, BasisKind::Value, x);
    EXPECT_NEAR(s, 1.0, 1e-13);
  }
}

TEST(Hermite, CubicExactness) {
  Mesh1D m(13);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto f = [](double x) { return 2.0 - x + 3.0 * x * x - 1.5 * x * x * x; };
  auto df = [](double x) { return -1.0 + 6.0 * x - 4.5 * x * x; };
  const auto v = fem::interpolate(m, f, df);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng);
    EXPECT_NEAR(v.value(x), f(x), 1e-12);
    EXPECT_NEAR(v.derivative(x), df(x), 1e-11);
  }
  const auto c = fem::interpolate(
      m, [](double x) { return x * x * x; }, [](double x) { return 3 * x * x; });
  EXPECT_NEAR(c.value(0.5), 0.125, 1e-15);
}

TEST(Hermite, QuadraticParameterMatchesAtNodes) {
  Mesh1D m(31);
  const auto q = fem::interpolate(
      m, [](double x) { return 0.025 * x * x - 0.025 * x; },
      [](double x) { return 0.05 * x - 0.025; });
  for (int j = 0; j < m.n_nodes(); ++j) {
    const double x = m.node(j);
    EXPECT_NEAR(q.value(x), 0.025 * x * x - 0.025 * x, 1e-17);
  }
}

TEST(Hermite, SineInterpolationFourthOrder) {
  auto err = [](int n) {
    Mesh1D m(n);
    const auto v = sine_field(m);
    double e = 0.0;
    for (int j = 0; j < m.n_nodes(); ++j)
      EXPECT_NEAR(v.value(m.node(j)), std::sin(kPi * m.node(j)), 1e-15);
    for (int k = 0; k <= 2000; ++k) {
      const double x = k / 2000.0;
      e = std::max(e, std::abs(v.value(x) - std::sin(kPi * x)));
    }
    return e;
  };
  const double e1 = err(11), e2 = err(21);
  EXPECT_GT(std::log2(e1 / e2), 3.7);
}

TEST(Hermite, DirichletZeroKeepsSlopes) {
  Mesh1D m(11);
  const auto v = fem::interpolate(
      m, [](double x) { return 1.0 + x; }, [](double) { return 1.0; },
      Boundary::DirichletZero);
  EXPECT_EQ(v.dofs()[fem::value_dof(0)], 0.0);
  EXPECT_EQ(v.dofs()[fem::value_dof(10)], 0.0);
  EXPECT_EQ(v.dofs()[fem::slope_dof(0)], 1.0);
  EXPECT_EQ(v.dofs()[fem::slope_dof(10)], 1.0);
}

TEST(Assembly, MassOfConstantIsLength) {
  Mesh1D m(17);
  const auto one = fem::interpolate(
      m, [](double) { return 1.0; }, [](double) { return 0.0; });
  const auto mass = fem::assemble_mass(m);
  EXPECT_NEAR(mass.quadratic_form(one.dofs()), 1.0, 1e-14);
  const auto k = fem::assemble_stiffness(m, fem::Diffusion(1.0));
  EXPECT_LT((k * one.dofs()).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Assembly, MassSymmetricPositiveDefinite) {
  Mesh1D m(31);
  const Eigen::MatrixXd dense = fem::assemble_mass(m).to_dense();
  EXPECT_LT((dense - dense.transpose()).norm(), 1e-15);
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  EXPECT_EQ(llt.info(), Eigen::Success);
  const auto v = random_field(m, 11);
  EXPECT_GT(fem::assemble_mass(m).quadratic_form(v.dofs()), 0.0);
}

TEST(Assembly, SineQuadraticFormsConverge) {
  const int ns[] = {11, 21, 41, 81};
  double em[4], ek[4];
  for (int i = 0; i < 4; ++i) {
    Mesh1D m(ns[i]);
    const auto v = sine_field(m);
    em[i] = std::abs(fem::assemble_mass(m).quadratic_form(v.dofs()) - 0.5);
    ek[i] = std::abs(fem::assemble_stiffness(m, fem::Diffusion(1.0)).quadratic_form(v.dofs()) -
                     kPi * kPi / 2);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    EXPECT_GE(std::log2(ek[i] / ek[i + 1]), 3.5) << "N=" << ns[i];
    EXPECT_GE(std::log2(em[i] / em[i + 1]), 3.5) << "N=" << ns[i];
  }
  EXPECT_LT(ek[3], 1e-6);
}

TEST(Assembly, WeightedMassMatchesQuadratureOracle) {
  Mesh1D m(31);
  const auto q = fem::interpolate(
      m, [](double x) { return 0.025 * x * x - 0.025 * x; },
      [](double x) { return 0.05 * x - 0.025; });
  const auto u = sine_field(m);
  const double got = fem::assemble_weighted_mass(m, q).quadratic_form(u.dofs());
  const double oracle = simpson(
      [](double x) {
        const double s = std::sin(kPi * x);
        return (0.025 * x * x - 0.025 * x) * s * s;
      },
      0.0, 1.0);
  EXPECT_NEAR(got, oracle, 1e-9);
}

TEST(Assembly, WindowedMassSplitsExactly) {
  Mesh1D m(31);
  obs::ObservationWindow w(m, 0.3, 0.87);
  const auto v = random_field(m, 5);
  const double in = fem::assemble_mass(m, &w, fem::Region::Observed).quadratic_form(v.dofs());
  const double out = fem::assemble_mass(m, &w, fem::Region::Unobserved).quadratic_form(v.dofs());
  const double all = fem::assemble_mass(m).quadratic_form(v.dofs());
  EXPECT_NEAR(in + out, all, 1e-12 * all);
  const double oracle = simpson([&](double x) { return v.value(x) * v.value(x); }, 0.3, 0.87);
  EXPECT_NEAR(in, oracle, 1e-8 * std::max(1.0, oracle));
}

TEST(Norms, Examples) {
  Mesh1D m(31);
  obs::ObservationWindow w(m, 0.3, 0.87);
  // interpolant, so O(h^4) away from the continuous value
  EXPECT_NEAR(fem::norm(sine_field(m), NormKind::X), std::sqrt(0.5), 1e-6);
  EXPECT_EQ(fem::norm(HermiteField(m), NormKind::VXtil, &w), 0.0);
  const auto one = fem::interpolate(
      m, [](double) { return 1.0; }, [](double) { return 0.0; });
  EXPECT_NEAR(fem::norm(one, NormKind::Z, &w), std::sqrt(0.57), 1e-13);
  EXPECT_THROW(fem::norm(one, NormKind::Vtil), ContractError);
}

TEST(Norms, ConsistentWithMass) {
  Mesh1D m(25);
  const auto v = random_field(m, 9);
  const double x = fem::norm(v, NormKind::X);
  EXPECT_NEAR(x * x, fem::assemble_mass(m).quadratic_form(v.dofs()), 1e-12 * x * x);
  const double q = fem::norm(v, NormKind::Q);
  const double qf = fem::assemble_mass(m).quadratic_form(v.dofs()) +
                    fem::assemble_stiffness(m, fem::Diffusion(1.0)).quadratic_form(v.dofs());
  EXPECT_NEAR(q * q, qf, 1e-12 * qf);
}

TEST(Norms, WindowedNormsOfSine) {
  Mesh1D m(61);
  obs::ObservationWindow w(m, 0.3, 0.87);
  const auto v = sine_field(m);
  // |(v')'|_{L2(omega)} + |Rv|_X with v = sin(pi x)
  const double l2 = std::sqrt(simpson([](double x) { return std::pow(std::sin(kPi * x), 2); }, 0.3, 0.87));
  const double vtil = kPi * kPi * l2 + l2;
  EXPECT_NEAR(fem::norm(v, NormKind::Vtil, &w), vtil, 1e-3 * vtil);
  const double grad = simpson([](double x) { return std::pow(kPi * std::cos(kPi * x), 2); }, 0.3, 0.87);
  EXPECT_NEAR(fem::norm(v, NormKind::VXtil, &w), std::sqrt(grad + l2 * l2), 1e-6);
}

TEST(Banded, IdentityAndRoundTrip) {
  const int n = 12;
  fem::BandedMatrix id(n, 3, 3);
  for (int i = 0; i < n; ++i) id.set_identity_row(i);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  EXPECT_LT((fem::solve_linear(id, b) - b).norm(), 1e-15);

  Mesh1D m(31);
  const auto mass = fem::assemble_mass(m);
  const auto v = random_field(m, 2);
  const Eigen::VectorXd rhs = mass * v.dofs();
  EXPECT_LT((fem::solve_linear(mass, rhs) - v.dofs()).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Banded, MatchesDenseSolve) {
  const int n = 30;
  fem::BandedMatrix a(n, 2, 4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 4); ++j)
      a.at(i, j) = u(rng) + (i == j ? 6.0 : 0.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = u(rng);
  const Eigen::VectorXd ref = a.to_dense().partialPivLu().solve(b);
  EXPECT_LT((fem::solve_linear(a, b) - ref).norm(), 1e-12);
  EXPECT_THROW(a.at(0, 10), ContractError);
}

TEST(Banded, SingularThrows) {
  fem::BandedMatrix a(4, 1, 1);
  a.at(0, 0) = 1.0;
  a.at(1, 1) = 1.0;
  a.at(3, 3) = 1.0;
  try {
    fem::solve_linear(a, Eigen::VectorXd::Ones(4));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_TRUE(std::isinf(e.condition_estimate()));
  }
}

TEST(Banded, HeatStepDecay) {
  // one implicit step of u_t = u_xx from sin(pi x): factor 1/(1 + pi^2 dt)
  const double dt = 1e-3;
  Mesh1D m(41);
  auto a = fem::assemble_mass(m);
  a.add_scaled(fem::assemble_stiffness(m, fem::Diffusion(1.0)), dt);
  const auto u0 = sine_field(m, Boundary::DirichletZero);
  Eigen::VectorXd rhs = fem::assemble_mass(m) * u0.dofs();
  for (int j : {0, m.n_nodes() - 1}) {
    a.set_identity_row(fem::value_dof(j));
    rhs[fem::value_dof(j)] = 0.0;
  }
  const HermiteField u1(m, fem::solve_linear(a, rhs));
  const double factor = u1.value(0.5);
  EXPECT_NEAR(factor, 1.0 / (1.0 + kPi * kPi * dt), 1e-8);
  EXPECT_NEAR(factor, std::exp(-kPi * kPi * dt), 1e-4);
}
