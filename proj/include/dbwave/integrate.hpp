#pragma once

#include "dbwave/discretize.hpp"
#include "dbwave/model.hpp"
#include "dbwave/state.hpp"

#include <optional>
#include <stdexcept>

namespace dbwave {

struct ThresholdConstants;

struct StepControl {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double t_end = 1.0;
  int output_every = 1;
  /// ||u||_inf above this ends a run as a blow-up outcome.
  double blowup_guard = 1e8;
  double jacobian_eta = 1e-12;

  bool operator==(const StepControl&) const = default;
};

class NewtonDiverged : public std::runtime_error {
 public:
  NewtonDiverged(double residual, int iterations);
  double last_residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class BlowupDetected : public std::runtime_error {
 public:
  explicit BlowupDetected(State state);
  const State& state() const { return state_; }

 private:
  State state_;
};

/// One implicit midpoint step. With `frozen_source` the midpoint source is the
/// given vector (for the linearized problem driven by a prescribed trajectory)
/// instead of S((u^n + u^{n+1})/2).
State step(const State& state, const AssembledOperators& ops, const ModelParams& params,
           const StepControl& ctl, const Eigen::VectorXd* frozen_source = nullptr);

/// Options for the diagnostics evaluated along a run.
struct AuxiliaryConfig {
  double epsilon = 1e-2;   ///< fixed value, or the cap in auto mode
  bool auto_epsilon = true;

  bool operator==(const AuxiliaryConfig&) const = default;
};

struct RunDiagnostics {
  std::optional<double> depth;  ///< d; enables H and L
  AuxiliaryConfig aux;
};

/// Integrates from the initial data to ctl.t_end, sampling every
/// ctl.output_every steps (and at the last step). Blow-up and Newton failure
/// end the run and are recorded in Trajectory::cause; the partial trajectory is
/// returned.
Trajectory run(const InitialData& init, const AssembledOperators& ops, const ModelParams& params,
               const StepControl& ctl, const RunDiagnostics& diag = {});

/// Initial state on the reduced dofs.
State initial_state(const InitialData& init, const AssembledOperators& ops);

/// Number of steps needed to reach t_end with the fixed dt.
long step_count(const StepControl& ctl);

}  // namespace dbwave
