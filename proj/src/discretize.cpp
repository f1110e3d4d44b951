#include "dbwave/discretize.hpp"

#include "dbwave/model.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbwave {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw std::invalid_argument("mesh needs at least 2 elements");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw std::invalid_argument("mesh must span [0, 1]");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i + 1] > nodes_[i]))
      throw std::invalid_argument(fmt::format("degenerate element {}", i));
}

Mesh1D Mesh1D::uniform(int n_elem) {
  if (n_elem < 2) throw std::invalid_argument("mesh needs at least 2 elements");
  std::vector<double> x(static_cast<std::size_t>(n_elem) + 1);
  for (int i = 0; i <= n_elem; ++i) x[i] = static_cast<double>(i) / n_elem;
  x.back() = 1.0;
  return Mesh1D(std::move(x));
}

double Mesh1D::interpolate(const Eigen::VectorXd& full, double x) const {
  if (x <= 0.0) return full[0];
  if (x >= 1.0) return full[n_elem()];
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const int e = static_cast<int>(it - nodes_.begin()) - 1;
  const double xi = (x - nodes_[e]) / h(e);
  return (1.0 - xi) * full[e] + xi * full[e + 1];
}

namespace {

template <unsigned N>
GaussRule make_rule() {
  using Q = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Q::abscissa();
  const auto& weight = Q::weights();
  GaussRule rule;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    const double a = abscissa[i];
    // boost stores the nonnegative half of a symmetric rule on [-1,1]
    const double w = 0.5 * weight[i];
    if (a == 0.0) {
      rule.points.push_back(0.5);
      rule.weights.push_back(w);
    } else {
      rule.points.push_back(0.5 - 0.5 * a);
      rule.weights.push_back(w);
      rule.points.push_back(0.5 + 0.5 * a);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

}  // namespace

GaussRule gauss_rule(int order) {
  switch (order) {
    case 1: return {{0.5}, {1.0}};
    case 2: return make_rule<2>();
    case 3: return make_rule<3>();
    case 4: return make_rule<4>();
    case 5: return make_rule<5>();
    case 6: return make_rule<6>();
    case 7: return make_rule<7>();
    case 8: return make_rule<8>();
    case 9: return make_rule<9>();
    case 10: return make_rule<10>();
    case 12: return make_rule<12>();
    case 16: return make_rule<16>();
    case 20: return make_rule<20>();
    default: throw std::invalid_argument(fmt::format("unsupported Gauss order {}", order));
  }
}

Tridiag AssembledOperators::boundary_mass() const {
  Tridiag bg(n_dofs());
  bg.diag[boundary_dof()] = 1.0;
  return bg;
}

Tridiag AssembledOperators::inertia() const { return mass + boundary_mass(); }

Eigen::VectorXd AssembledOperators::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd full(reduced.size() + 1);
  full[0] = 0.0;
  full.tail(reduced.size()) = reduced;
  return full;
}

Eigen::VectorXd AssembledOperators::restrict_to_dofs(const Eigen::VectorXd& full) const {
  return full.tail(full.size() - 1);
}

namespace {

Tridiag drop_first(const Tridiag& a) {
  const Eigen::Index n = a.size() - 1;
  Tridiag r(n);
  r.diag = a.diag.tail(n);
  r.lower = a.lower.tail(n - 1);
  r.upper = a.upper.tail(n - 1);
  return r;
}

}  // namespace

AssembledOperators assemble(const Mesh1D& mesh, int quadrature_order) {
  AssembledOperators ops{mesh, gauss_rule(quadrature_order), quadrature_order, {}, {}, {}, {}};
  const int n = mesh.n_nodes();
  ops.full_mass = Tridiag(n);
  ops.full_stiffness = Tridiag(n);
  for (int e = 0; e < mesh.n_elem(); ++e) {
    const double h = mesh.h(e);
    ops.full_mass.diag[e] += h / 3.0;
    ops.full_mass.diag[e + 1] += h / 3.0;
    ops.full_mass.upper[e] += h / 6.0;
    ops.full_mass.lower[e] += h / 6.0;
    ops.full_stiffness.diag[e] += 1.0 / h;
    ops.full_stiffness.diag[e + 1] += 1.0 / h;
    ops.full_stiffness.upper[e] -= 1.0 / h;
    ops.full_stiffness.lower[e] -= 1.0 / h;
  }
  ops.mass = drop_first(ops.full_mass);
  ops.stiffness = drop_first(ops.full_stiffness);
  return ops;
}

Eigen::VectorXd power_load(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                           double q) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(full.size());
  for (int e = 0; e < mesh.n_elem(); ++e) {
    const double h = mesh.h(e);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double xi = rule.points[k];
      const double uh = (1.0 - xi) * full[e] + xi * full[e + 1];
      const double f = signed_pow(uh, q) * rule.weights[k] * h;
      load[e] += f * (1.0 - xi);
      load[e + 1] += f * xi;
    }
  }
  return load;
}

double power_integral(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                      double q) {
  double total = 0.0;
  for (int e = 0; e < mesh.n_elem(); ++e) {
    double local = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double xi = rule.points[k];
      const double uh = (1.0 - xi) * full[e] + xi * full[e + 1];
      local += rule.weights[k] * std::pow(std::abs(uh), q);
    }
    total += local * mesh.h(e);
  }
  return total;
}

Tridiag power_jacobian(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                       double q) {
  Tridiag jac(full.size());
  for (int e = 0; e < mesh.n_elem(); ++e) {
    const double h = mesh.h(e);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double xi = rule.points[k];
      const double uh = (1.0 - xi) * full[e] + xi * full[e + 1];
      const double c = (q - 1.0) * std::pow(std::abs(uh), q - 2.0) * rule.weights[k] * h;
      jac.diag[e] += c * (1.0 - xi) * (1.0 - xi);
      jac.diag[e + 1] += c * xi * xi;
      jac.upper[e] += c * xi * (1.0 - xi);
      jac.lower[e] += c * xi * (1.0 - xi);
    }
  }
  return jac;
}

Eigen::VectorXd source_load(const Eigen::VectorXd& u, double p, const AssembledOperators& ops) {
  return ops.restrict_to_dofs(power_load(ops.mesh, ops.quadrature, ops.expand(u), p));
}

Tridiag source_jacobian(const Eigen::VectorXd& u, double p, const AssembledOperators& ops) {
  return drop_first(power_jacobian(ops.mesh, ops.quadrature, ops.expand(u), p));
}

double lp_power(const Eigen::VectorXd& u, double p, const AssembledOperators& ops) {
  return power_integral(ops.mesh, ops.quadrature, ops.expand(u), p);
}

double boundary_damping(double v, double r, double m) { return r * signed_pow(v, m); }

double boundary_damping_jacobian(double v, double r, double m, double eta) {
  const double s = v * v + eta * eta;
  if (m == 2.0) return r;
  if (s == 0.0) return 0.0;
  return r * (m - 1.0) * std::pow(s, 0.5 * (m - 2.0));
}

}  // namespace dbwave
