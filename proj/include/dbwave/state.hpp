#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace dbwave {

/// Nodal displacement and velocity on the reduced dofs at time t.
struct State {
  double t = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

/// Energy functionals sampled at one time. H and L are NaN until well
/// constants are attached.
struct EnergyReport {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  double t = 0.0;
  double l2_u = 0.0;
  double h1semi_u = 0.0;  ///< ||u_x||_2
  double lp_u_p = 0.0;    ///< ||u||_p^p
  double l2_ut = 0.0;
  double l2g1_ut = 0.0;   ///< |u_t(1)|
  double E = 0.0;
  double H = unset;
  double L = unset;
  double identity_residual = 0.0;
};

enum class TerminationCause { t_end, blowup_detected, newton_diverged };

std::string to_string(TerminationCause cause);

struct Trajectory {
  std::vector<State> samples;
  std::vector<EnergyReport> reports;
  TerminationCause cause = TerminationCause::t_end;
  std::string message;
  /// Perturbation size used for L, NaN when L was not evaluated.
  double epsilon = std::numeric_limits<double>::quiet_NaN();

  double final_time() const { return samples.empty() ? 0.0 : samples.back().t; }
};

}  // namespace dbwave
