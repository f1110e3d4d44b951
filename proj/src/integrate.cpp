#include "dbwave/integrate.hpp"

#include "dbwave/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dbwave {

std::string to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::t_end: return "t_end";
    case TerminationCause::blowup_detected: return "blowup_detected";
    case TerminationCause::newton_diverged: return "newton_diverged";
  }
  return "t_end";
}

NewtonDiverged::NewtonDiverged(double residual, int iterations)
    : std::runtime_error(
          fmt::format("Newton iteration stopped after {} iterations, residual {:.3e}", iterations,
                      residual)),
      residual_(residual),
      iterations_(iterations) {}

BlowupDetected::BlowupDetected(State state)
    : std::runtime_error(fmt::format("blow-up guard exceeded at t = {}", state.t)),
      state_(std::move(state)) {}

namespace {

double inf_norm(const Eigen::VectorXd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

}  // namespace

State step(const State& state, const AssembledOperators& ops, const ModelParams& params,
           const StepControl& ctl, const Eigen::VectorXd* frozen_source) {
  const double dt = ctl.dt;
  const int last = ops.boundary_dof();
  const Tridiag inertia = ops.inertia();
  const Tridiag& K = ops.stiffness;
  const bool live_source = params.source_on && frozen_source == nullptr;

  // Unknown: midpoint velocity w = (v^n + v^{n+1})/2, so that
  // u* = u^n + dt/2 w and v^{n+1} = 2w - v^n.
  Eigen::VectorXd w = state.v;
  auto residual = [&](const Eigen::VectorXd& mid_v, Eigen::VectorXd& u_mid) {
    u_mid = state.u + 0.5 * dt * mid_v;
    Eigen::VectorXd f = (2.0 / dt) * inertia.apply(mid_v - state.v) + K.apply(u_mid) +
                        params.alpha * K.apply(mid_v);
    f[last] += boundary_damping(mid_v[last], params.r, params.m);
    if (frozen_source != nullptr)
      f -= *frozen_source;
    else if (live_source)
      f -= source_load(u_mid, params.p, ops);
    return f;
  };

  Eigen::VectorXd u_mid;
  Eigen::VectorXd f = residual(w, u_mid);
  double fnorm = inf_norm(f);
  int iter = 0;
  while (fnorm > ctl.newton_tol) {
    if (iter >= ctl.newton_max_iter || !std::isfinite(fnorm)) throw NewtonDiverged(fnorm, iter);
    Tridiag jac = (2.0 / dt) * inertia + (0.5 * dt + params.alpha) * K;
    jac.diag[last] += boundary_damping_jacobian(w[last], params.r, params.m, ctl.jacobian_eta);
    if (live_source) jac += (-0.5 * dt) * source_jacobian(u_mid, params.p, ops);
    const Eigen::VectorXd delta = solve(jac, f);
    w -= delta;
    ++iter;
    f = residual(w, u_mid);
    fnorm = inf_norm(f);
    // Converged to the attainable precision when the update is at rounding level.
    if (inf_norm(delta) <= 4.0 * std::numeric_limits<double>::epsilon() * inf_norm(w) &&
        std::isfinite(fnorm))
      break;
  }

  State next;
  next.t = state.t + dt;
  next.u = state.u + dt * w;
  next.v = 2.0 * w - state.v;
  if (!next.u.allFinite() || inf_norm(next.u) > ctl.blowup_guard) throw BlowupDetected(next);
  return next;
}

State initial_state(const InitialData& init, const AssembledOperators& ops) {
  State s;
  s.t = 0.0;
  s.u = ops.restrict_to_dofs(init.u0);
  s.v = ops.restrict_to_dofs(init.u1);
  return s;
}

long step_count(const StepControl& ctl) {
  if (ctl.t_end <= 0.0) return 0;
  return std::lround(ctl.t_end / ctl.dt);
}

Trajectory run(const InitialData& init, const AssembledOperators& ops, const ModelParams& params,
               const StepControl& ctl, const RunDiagnostics& diag) {
  Trajectory traj;
  State current = initial_state(init, ops);
  IdentityAccumulator identity(ops, params, current);

  if (diag.depth) {
    try {
      traj.epsilon = resolve_epsilon(current, *diag.depth, diag.aux, ops, params);
    } catch (const NonpositiveWellGap& e) {
      traj.message = e.what();
    }
  }

  auto record = [&](const State& s) {
    EnergyReport rep = energy(s, ops, params);
    rep.identity_residual = identity.normalized();
    if (diag.depth) {
      rep.H = *diag.depth - rep.E;
      if (std::isfinite(traj.epsilon)) rep.L = auxiliary_L(s, rep, traj.epsilon, ops, params);
    }
    traj.samples.push_back(s);
    traj.reports.push_back(rep);
  };

  record(current);
  const long n_steps = step_count(ctl);
  const int stride = std::max(1, ctl.output_every);
  for (long k = 1; k <= n_steps; ++k) {
    try {
      current = step(current, ops, params, ctl);
    } catch (const BlowupDetected& e) {
      State blown = e.state();
      blown.t = static_cast<double>(k) * ctl.dt;
      identity.advance(blown);
      record(blown);
      traj.cause = TerminationCause::blowup_detected;
      traj.message = e.what();
      return traj;
    } catch (const NewtonDiverged& e) {
      if (traj.samples.back().t != current.t) record(current);
      traj.cause = TerminationCause::newton_diverged;
      traj.message = e.what();
      return traj;
    }
    // Pin sample times to the uniform grid.
    current.t = static_cast<double>(k) * ctl.dt;
    identity.advance(current);
    if (k % stride == 0 || k == n_steps) record(current);
  }
  traj.cause = TerminationCause::t_end;
  return traj;
}

}  // namespace dbwave
