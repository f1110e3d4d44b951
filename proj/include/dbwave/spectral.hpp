#pragma once

#include "dbwave/discretize.hpp"
#include "dbwave/model.hpp"
#include "dbwave/state.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace dbwave {

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BasisGenerator { monomials, dirichlet_neumann_sines };

std::string to_string(BasisGenerator g);
BasisGenerator basis_generator_from_string(const std::string& name);

/// Raw generator k (1-based): x^k, or sin((k - 1/2) pi x). Both vanish at 0.
double generator_value(BasisGenerator g, int k, double x);
double generator_derivative(BasisGenerator g, int k, double x);

/// Galerkin family orthonormal in <f,g> = int_0^1 f g dx + f(1) g(1).
/// Functions are held as samples on a composite Gauss grid (values,
/// derivatives, trace at x = 1) and as coefficient rows over the generators for
/// evaluation anywhere.
struct SpectralBasis {
  BasisGenerator generator = BasisGenerator::monomials;
  int n_modes = 0;
  std::vector<double> nodes;    ///< quadrature points on (0,1)
  std::vector<double> weights;
  Eigen::MatrixXd values;       ///< n_modes x nodes
  Eigen::MatrixXd derivatives;  ///< n_modes x nodes
  Eigen::VectorXd trace;        ///< w_j(1)
  Eigen::MatrixXd coefficients; ///< w_j = sum_k C(j,k) generator_{k+1}
  Eigen::MatrixXd stiffness;    ///< int w_i' w_j'

  double value(int j, double x) const;
  double derivative(int j, double x) const;

  /// Combined inner product of two sample vectors with trace values.
  double inner(const Eigen::VectorXd& f, double f1, const Eigen::VectorXd& g, double g1) const;
  /// Gram matrix of the stored samples in the combined inner product.
  Eigen::MatrixXd gram() const;
  /// Coefficients <f, w_j> of a profile.
  Eigen::VectorXd project(const Profile& f) const;
  /// Samples of a profile (or its derivative) on the quadrature grid.
  Eigen::VectorXd sample(const Profile& f) const;
  Eigen::VectorXd sample_derivative(const Profile& f) const;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Throws
/// RankDeficient when a generator is numerically in the span of the previous
/// ones. `panels` x `order` sets the quadrature grid.
SpectralBasis build_basis(int n_modes, BasisGenerator generator, int panels = 64, int order = 16);

enum class SpectralMode { direct, shifted };

/// phi(t,x) = u0(x) + t u1(x); phi_tt = 0.
struct ShiftFunction {
  Profile u0;
  Profile u1;

  double value(double t, double x) const { return u0.value(x) + t * u1.value(x); }
  double time_derivative(double x) const { return u1.value(x); }
};

/// Coefficient accelerations of the Galerkin system. In direct mode the
/// unknown is v = sum g_j w_j; in shifted mode it is v~ = v - phi with
///   g_j'' = -<(v~+phi)_x, w_j'> - alpha <(v~+phi)_xt, w_j'>
///           - r |(v~+phi)_t(1)|^{m-2} (v~+phi)_t(1) w_j(1) + int f w_j
/// and f = |v~+phi|^{p-2}(v~+phi).
Eigen::VectorXd spectral_rhs(const Eigen::VectorXd& g, const Eigen::VectorXd& gp, double t,
                             const SpectralBasis& basis, const ModelParams& params,
                             SpectralMode mode, const ShiftFunction& shift);

struct SpectralTrajectory {
  SpectralMode mode = SpectralMode::direct;
  ShiftFunction shift;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> g;
  std::vector<Eigen::VectorXd> gp;
};

struct SpectralOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_dt = 1e-4;
};

/// Integrates the coefficient system with an adaptive Dormand-Prince pair and
/// records it at `times` (increasing, starting at 0).
SpectralTrajectory spectral_solve(const SpectralBasis& basis, const ModelParams& params,
                                  const Profile& u0, const Profile& u1, SpectralMode mode,
                                  const std::vector<double>& times,
                                  const SpectralOptions& options = {});

/// u, u_x, u_t, u_xt on the quadrature grid and u(1), u_t(1) at sample i.
struct SpectralFields {
  Eigen::VectorXd u, ux, ut, uxt;
  double u1 = 0.0;
  double ut1 = 0.0;
};

SpectralFields spectral_fields(const SpectralTrajectory& traj, std::size_t i,
                               const SpectralBasis& basis);

/// sup over samples of the L2 distance between the direct solution and v~ + phi.
/// Throws GridMismatch when the time grids differ.
double shift_equivalence_check(const SpectralTrajectory& direct, const SpectralTrajectory& shifted,
                               const SpectralBasis& basis);

/// sup over samples of || u_fem - u_spectral ||_2 on the basis quadrature grid.
/// The FEM samples must sit at the spectral sample times.
double fem_spectral_gap(const Trajectory& fem, const AssembledOperators& ops,
                        const SpectralTrajectory& spectral, const SpectralBasis& basis);

/// Normalized energy-identity residual of a spectral trajectory, trapezoid
/// rule over its samples.
double spectral_identity_residual(const SpectralTrajectory& traj, const SpectralBasis& basis,
                                  const ModelParams& params);

}  // namespace dbwave
