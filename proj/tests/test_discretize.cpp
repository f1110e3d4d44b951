#include "dbwave/discretize.hpp"
#include "dbwave/model.hpp"

#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

using namespace dbwave;

namespace {

// Independent oracle: composite Gauss-Legendre with 10 points per cell on a
// grid of `cells` cells per element.
double fine_integral(const Mesh1D& mesh, const Eigen::VectorXd& full,
                     const std::function<double(double, double)>& f, int cells = 10) {
  static const double a[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                              0.8650633666889845, 0.9739065285171717};
  static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                              0.1494513491505806, 0.0666713443086881};
  double s = 0.0;
  for (int e = 0; e < mesh.n_elem(); ++e) {
    const double x0 = mesh.nodes()[e], h = mesh.h(e) / cells;
    for (int c = 0; c < cells; ++c) {
      const double mid = x0 + (c + 0.5) * h;
      for (int q = 0; q < 10; ++q) {
        const double x = mid + (q < 5 ? -a[q] : a[q - 5]) * 0.5 * h;
        s += 0.5 * h * w[q % 5] * f(x, mesh.interpolate(full, x));
      }
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("discretize") {

TEST_CASE("mesh validation") {
  CHECK_THROWS_AS(Mesh1D({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh1D({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh1D({0.1, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh1D({0.0, 0.5, 0.9}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh1D::uniform(1), std::invalid_argument);
  CHECK(Mesh1D::uniform(4).n_nodes() == 5);
}

TEST_CASE("two-element matrices") {
  const auto ops = assemble(Mesh1D::uniform(2));
  const Eigen::MatrixXd K = ops.full_stiffness.dense();
  Eigen::MatrixXd K_ref(3, 3);
  K_ref << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((K - K_ref).norm() < 1e-14);
  const Eigen::MatrixXd M = ops.full_mass.dense();
  Eigen::MatrixXd M_ref(3, 3);
  M_ref << 2, 1, 0, 1, 4, 1, 0, 1, 2;
  M_ref *= 0.5 / 6.0;
  CHECK((M - M_ref).norm() < 1e-15);
  // Reduced system drops node 0.
  CHECK(ops.n_dofs() == 2);
  CHECK((ops.stiffness.dense() - K_ref.bottomRightCorner(2, 2)).norm() < 1e-14);
  CHECK((ops.mass.dense() - M_ref.bottomRightCorner(2, 2)).norm() < 1e-15);
  const Eigen::MatrixXd Bg = ops.boundary_mass().dense();
  CHECK(Bg(1, 1) == 1.0);
  CHECK(Bg.cwiseAbs().sum() == 1.0);
}

TEST_CASE("reduced matrices are symmetric and definite") {
  const Mesh1D mesh({0.0, 0.1, 0.35, 0.4, 0.7, 1.0});
  const auto ops = assemble(mesh);
  const Eigen::MatrixXd M = ops.mass.dense(), K = ops.stiffness.dense();
  CHECK((M - M.transpose()).norm() == 0.0);
  CHECK((K - K.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M), ek(K);
  CHECK(em.eigenvalues().minCoeff() > 0.0);
  CHECK(ek.eigenvalues().minCoeff() > 0.0);
  // The full stiffness has the constants as kernel.
  CHECK(ops.full_stiffness.apply(Eigen::VectorXd::Ones(mesh.n_nodes())).norm() < 1e-12);
}

TEST_CASE("source load of zero and of constants") {
  const auto ops = assemble(Mesh1D::uniform(8));
  CHECK(source_load(Eigen::VectorXd::Zero(ops.n_dofs()), 4.0, ops).isZero());
  // u = 1 everywhere (boundary condition ignored): S = row sums of M.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.mesh.n_nodes());
  const Eigen::VectorXd S = power_load(ops.mesh, ops.quadrature, ones, 4.0);
  const Eigen::VectorXd rows = ops.full_mass.apply(ones);
  CHECK((S - rows).norm() < 1e-14);
}

TEST_CASE("source load of u = x integrates x^3") {
  const Mesh1D mesh = Mesh1D::uniform(256);
  const auto ops = assemble(mesh);
  Eigen::VectorXd x(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) x[i] = mesh.nodes()[i];
  const double total = source_load(ops.restrict_to_dofs(x), 4.0, ops).sum();
  CHECK(total == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("source jacobian matches central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  const auto ops = assemble(Mesh1D::uniform(12));
  for (double p : {3.0, 4.0, 4.5, 6.0}) {
    Eigen::VectorXd u(ops.n_dofs());
    for (auto& x : u) x = U(rng);
    const Eigen::MatrixXd J = source_jacobian(u, p, ops).dense();
    Eigen::MatrixXd Jfd(u.size(), u.size());
    const double h = 1e-6;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      Eigen::VectorXd up = u, um = u;
      up[j] += h;
      um[j] -= h;
      Jfd.col(j) = (source_load(up, p, ops) - source_load(um, p, ops)) / (2 * h);
    }
    CHECK((J - Jfd).norm() / J.norm() <= 1e-6);
  }
}

TEST_CASE("source load converges at second order against a fine quadrature oracle") {
  // Error of sum_j S_j(I_h u) against int |u|^{p-2} u for u = sin(2x) + x^2.
  auto u_exact = [](double x) { return std::sin(2 * x) + x * x; };
  const double p = 3.5;
  std::vector<double> errors;
  for (int n : {8, 16, 32, 64}) {
    const Mesh1D mesh = Mesh1D::uniform(n);
    const auto ops = assemble(mesh);
    Eigen::VectorXd full(mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i) full[i] = u_exact(mesh.nodes()[i]);
    const double discrete = source_load(ops.restrict_to_dofs(full), p, ops).sum() +
                            power_load(mesh, ops.quadrature, full, p)[0];
    const Mesh1D fine = Mesh1D::uniform(64);
    const double oracle = fine_integral(fine, Eigen::VectorXd::Zero(fine.n_nodes()),
                                        [&](double x, double) { return signed_pow(u_exact(x), p); });
    errors.push_back(std::abs(discrete - oracle));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) CHECK(std::log2(errors[i - 1] / errors[i]) >= 1.9);
}

TEST_CASE("power integral matches the oracle at quadrature order 4 for integer p") {
  const Mesh1D mesh({0.0, 0.2, 0.45, 0.8, 1.0});
  const auto ops = assemble(mesh, 4);
  Eigen::VectorXd full(5);
  full << 0.0, 0.7, -0.4, 1.1, 0.3;
  // |u_h|^4 is a degree-4 polynomial per element, exact with 4 Gauss points.
  const double oracle = fine_integral(mesh, full, [](double, double v) { return std::pow(v, 4); }, 1);
  CHECK(power_integral(mesh, ops.quadrature, full, 4.0) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("boundary damping") {
  CHECK(boundary_damping(2.0, 1.0, 2.0) == 2.0);
  CHECK(boundary_damping(2.0, 1.0, 4.0) == doctest::Approx(8.0));
  CHECK(boundary_damping(-2.0, 1.0, 4.0) == doctest::Approx(-8.0));
  CHECK(boundary_damping(0.0, 3.0, 2.5) == 0.0);
}

TEST_CASE("boundary damping jacobian") {
  CHECK(boundary_damping_jacobian(0.0, 1.0, 2.0, 0.0) == 1.0);
  CHECK(boundary_damping_jacobian(2.0, 1.0, 4.0, 0.0) == doctest::Approx(12.0));
  CHECK(boundary_damping_jacobian(0.0, 1.0, 2.5, 0.0) == 0.0);
  // Regularized slope is finite and positive at v = 0 for m > 2.
  CHECK(boundary_damping_jacobian(0.0, 1.0, 3.0, 1e-6) > 0.0);
  for (double v : {-1.3, 0.4, 2.0}) {
    const double h = 1e-6;
    const double fd = (boundary_damping(v + h, 0.7, 3.0) - boundary_damping(v - h, 0.7, 3.0)) / (2 * h);
    CHECK(boundary_damping_jacobian(v, 0.7, 3.0, 0.0) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("monotonicity of the damping nonlinearity") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (double m : {2.0, 2.5, 3.0, 4.0}) {
    for (int i = 0; i < 2000; ++i) {
      const double a = U(rng), b = U(rng);
      const double prod = (boundary_damping(a, 1.0, m) - boundary_damping(b, 1.0, m)) * (a - b);
      CHECK(prod >= 0.0);
      if (m == 2.0) CHECK(prod == doctest::Approx((a - b) * (a - b)).epsilon(1e-14));
    }
  }
}

TEST_CASE("interpolation and dof maps") {
  const Mesh1D mesh = Mesh1D::uniform(4);
  const auto ops = assemble(mesh);
  Eigen::VectorXd red(4);
  red << 1, 2, 3, 4;
  const Eigen::VectorXd full = ops.expand(red);
  CHECK(full[0] == 0.0);
  CHECK(ops.restrict_to_dofs(full) == red);
  CHECK(mesh.interpolate(full, 0.125) == doctest::Approx(0.5));
  CHECK(mesh.interpolate(full, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
  for (int order : {1, 2, 3, 4, 8, 16}) {
    const auto rule = gauss_rule(order);
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS(gauss_rule(11));
}

}
