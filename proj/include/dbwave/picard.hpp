#pragma once

#include "dbwave/discretize.hpp"
#include "dbwave/integrate.hpp"
#include "dbwave/model.hpp"
#include "dbwave/state.hpp"

#include <span>
#include <vector>

namespace dbwave {

/// Discrete analog of the mixed space-time norm
///   |w|^2 = max_t(||w_t||^2 + ||w_x||^2) + ||w_t(1)||^2_{L^m(0,T)} + int_0^T ||w_xt||^2
/// with trapezoid time integrals.
struct YTNorm {
  double value = 0.0;
  double energy_max = 0.0;  ///< max_t(||w_t||^2 + ||w_x||^2)
  double boundary_lm = 0.0; ///< (int |w_t(1)|^m dt)^{2/m}
  double viscous = 0.0;     ///< int ||w_xt||^2 dt
};

/// Y_T norm of a - b, sampled on a common grid.
YTNorm yt_distance(std::span<const State> a, std::span<const State> b,
                   const AssembledOperators& ops, double m);
/// Y_T norm of a single trajectory.
YTNorm yt_norm(std::span<const State> a, const AssembledOperators& ops, double m);

/// v = Phi(u): the problem with the source |u|^{p-2}u prescribed by `u_traj`
/// (midpoint values per step) and the nonlinear boundary damping in v. u_traj
/// must hold every step of the integrator grid up to ctl.t_end, else
/// GridMismatch.
std::vector<State> apply_phi(std::span<const State> u_traj, const InitialData& init,
                             const AssembledOperators& ops, const ModelParams& params,
                             const StepControl& ctl);

/// phi(t) = u0 + t u1 on the integrator grid, v = u1.
std::vector<State> shift_trajectory(const InitialData& init, const AssembledOperators& ops,
                                    const StepControl& ctl);

struct PicardRun {
  std::vector<std::vector<State>> iterates;
  std::vector<double> distances;  ///< d_k = |u^{k+1} - u^k|_{Y_T}
  std::vector<double> ratios;     ///< d_{k+1} / d_k
  double horizon = 0.0;
  double radius = 0.0;            ///< max Y_T norm over iterates
  bool converged = false;

  double median_ratio() const;
};

/// Iterates u^{k+1} = Phi(u^k) from u^0 = phi until the Y_T distance drops to
/// `tol` or `k_max` applications of Phi. Non-convergence is reported in the
/// result, not thrown.
PicardRun picard_iterate(const InitialData& init, const AssembledOperators& ops,
                         const ModelParams& params, const StepControl& ctl, int k_max, double tol);

}  // namespace dbwave
