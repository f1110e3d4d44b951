#include "dbwave/picard.hpp"

#include "dbwave/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dbwave {

YTNorm yt_distance(std::span<const State> a, std::span<const State> b,
                   const AssembledOperators& ops, double m) {
  if (a.size() != b.size()) throw GridMismatch("trajectories have different sample counts");
  YTNorm n;
  if (a.empty()) return n;
  const int last = ops.boundary_dof();
  double lm = 0.0;
  double prev_lm = 0.0, prev_visc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].t - b[i].t) > 1e-12 * std::max(1.0, std::abs(a[i].t)))
      throw GridMismatch(fmt::format("sample {} times differ", i));
    const Eigen::VectorXd du = a[i].u - b[i].u;
    const Eigen::VectorXd dv = a[i].v - b[i].v;
    n.energy_max = std::max(n.energy_max, ops.mass.form(dv, dv) + ops.stiffness.form(du, du));
    const double cur_lm = std::pow(std::abs(dv[last]), m);
    const double cur_visc = ops.stiffness.form(dv, dv);
    if (i > 0) {
      const double dt = a[i].t - a[i - 1].t;
      lm += 0.5 * dt * (prev_lm + cur_lm);
      n.viscous += 0.5 * dt * (prev_visc + cur_visc);
    }
    prev_lm = cur_lm;
    prev_visc = cur_visc;
  }
  n.boundary_lm = std::pow(lm, 2.0 / m);
  n.value = std::sqrt(n.energy_max + n.boundary_lm + n.viscous);
  return n;
}

YTNorm yt_norm(std::span<const State> a, const AssembledOperators& ops, double m) {
  std::vector<State> zero(a.begin(), a.end());
  for (auto& s : zero) {
    s.u.setZero();
    s.v.setZero();
  }
  return yt_distance(a, zero, ops, m);
}

std::vector<State> shift_trajectory(const InitialData& init, const AssembledOperators& ops,
                                    const StepControl& ctl) {
  const State s0 = initial_state(init, ops);
  const long n = step_count(ctl);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * ctl.dt;
    out.push_back({t, s0.u + t * s0.v, s0.v});
  }
  return out;
}

std::vector<State> apply_phi(std::span<const State> u_traj, const InitialData& init,
                             const AssembledOperators& ops, const ModelParams& params,
                             const StepControl& ctl) {
  const long n = step_count(ctl);
  if (static_cast<long>(u_traj.size()) != n + 1)
    throw GridMismatch(fmt::format("prescribed trajectory has {} samples, integrator grid needs {}",
                                   u_traj.size(), n + 1));
  for (long k = 0; k <= n; ++k)
    if (std::abs(u_traj[k].t - static_cast<double>(k) * ctl.dt) > 1e-9 * ctl.dt)
      throw GridMismatch(fmt::format("prescribed sample {} is off the integrator grid", k));

  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(initial_state(init, ops));
  const Eigen::VectorXd no_source = Eigen::VectorXd::Zero(ops.n_dofs());
  for (long k = 0; k < n; ++k) {
    const Eigen::VectorXd source =
        params.source_on
            ? source_load(0.5 * (u_traj[k].u + u_traj[k + 1].u), params.p, ops)
            : no_source;
    State next = step(out.back(), ops, params, ctl, &source);
    next.t = static_cast<double>(k + 1) * ctl.dt;
    out.push_back(std::move(next));
  }
  return out;
}

double PicardRun::median_ratio() const {
  if (ratios.empty()) return 0.0;
  std::vector<double> r = ratios;
  const std::size_t mid = r.size() / 2;
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(mid), r.end());
  if (r.size() % 2 == 1) return r[mid];
  const double upper = r[mid];
  const double lower = *std::max_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

PicardRun picard_iterate(const InitialData& init, const AssembledOperators& ops,
                         const ModelParams& params, const StepControl& ctl, int k_max, double tol) {
  if (k_max < 2) throw std::invalid_argument("picard iteration needs k_max >= 2");
  PicardRun run;
  run.horizon = static_cast<double>(step_count(ctl)) * ctl.dt;
  run.iterates.push_back(shift_trajectory(init, ops, ctl));
  run.radius = yt_norm(run.iterates.back(), ops, params.m).value;
  for (int k = 0; k < k_max; ++k) {
    run.iterates.push_back(apply_phi(run.iterates.back(), init, ops, params, ctl));
    const auto& cur = run.iterates.back();
    const auto& prev = run.iterates[run.iterates.size() - 2];
    run.radius = std::max(run.radius, yt_norm(cur, ops, params.m).value);
    const double d = yt_distance(cur, prev, ops, params.m).value;
    if (!run.distances.empty()) run.ratios.push_back(d / run.distances.back());
    run.distances.push_back(d);
    if (d <= tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace dbwave
