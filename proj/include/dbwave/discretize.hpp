#pragma once

#include "dbwave/linalg.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dbwave {

/// P1 grid on [0,1]: nodes[0] = 0, nodes.back() = 1, strictly increasing.
class Mesh1D {
 public:
  /// Throws std::invalid_argument for fewer than 2 elements, endpoints other
  /// than 0 and 1, or a degenerate element.
  explicit Mesh1D(std::vector<double> nodes);
  static Mesh1D uniform(int n_elem);

  const std::vector<double>& nodes() const { return nodes_; }
  int n_elem() const { return static_cast<int>(nodes_.size()) - 1; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  double h(int e) const { return nodes_[e + 1] - nodes_[e]; }

  /// Value at x of the P1 interpolant with nodal values `full`.
  double interpolate(const Eigen::VectorXd& full, double x) const;

 private:
  std::vector<double> nodes_;
};

/// Gauss-Legendre points and weights mapped to [0,1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Supported orders: 1-10, 12, 16, 20.
GaussRule gauss_rule(int order);

/// Galerkin operators of the semidiscrete problem. The Dirichlet node x = 0 is
/// eliminated; reduced dof i corresponds to mesh node i + 1 and the last dof
/// sits at the dynamic end x = 1.
///
///   (M + Bg) v' = -K u - alpha K v - G(v) e_last + S(u),   u' = v
struct AssembledOperators {
  Mesh1D mesh;
  GaussRule quadrature;
  int quadrature_order = 4;

  Tridiag full_mass;       ///< int phi_i phi_j over all nodes
  Tridiag full_stiffness;  ///< int phi_i' phi_j' over all nodes
  Tridiag mass;            ///< reduced M
  Tridiag stiffness;       ///< reduced K

  int n_dofs() const { return static_cast<int>(mass.size()); }
  int boundary_dof() const { return n_dofs() - 1; }
  /// Bg as a matrix: a single unit entry at (last, last).
  Tridiag boundary_mass() const;
  /// M + Bg.
  Tridiag inertia() const;

  /// Reduced -> full nodal vector (prepends the Dirichlet zero).
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
  Eigen::VectorXd restrict_to_dofs(const Eigen::VectorXd& full) const;
};

AssembledOperators assemble(const Mesh1D& mesh, int quadrature_order = 4);

/// Node-by-node integrals of the power nonlinearity on a full nodal vector,
/// each evaluated with the element Gauss rule on the P1 interpolant.
///   load_j   = int |u_h|^{q-2} u_h phi_j
///   integral = int |u_h|^q
///   jacobian = (q-1) int |u_h|^{q-2} phi_i phi_j
Eigen::VectorXd power_load(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                           double q);
double power_integral(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                      double q);
Tridiag power_jacobian(const Mesh1D& mesh, const GaussRule& rule, const Eigen::VectorXd& full,
                       double q);

/// S_j(u) = int |u_h|^{p-2} u_h phi_j on reduced dofs.
Eigen::VectorXd source_load(const Eigen::VectorXd& u, double p, const AssembledOperators& ops);
/// dS/du, tridiagonal.
Tridiag source_jacobian(const Eigen::VectorXd& u, double p, const AssembledOperators& ops);
/// ||u_h||_p^p.
double lp_power(const Eigen::VectorXd& u, double p, const AssembledOperators& ops);

/// r |v|^{m-2} v at the Gamma1 node.
double boundary_damping(double v, double r, double m);
/// r (m-1) (v^2 + eta^2)^{(m-2)/2}; eta only regularizes the Newton slope.
double boundary_damping_jacobian(double v, double r, double m, double eta = 1e-12);

}  // namespace dbwave
