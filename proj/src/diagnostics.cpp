#include "dbwave/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dbwave {

EnergyReport energy(const State& state, const AssembledOperators& ops, const ModelParams& params) {
  EnergyReport rep;
  rep.t = state.t;
  const Tridiag& M = ops.mass;
  const Tridiag& K = ops.stiffness;
  const double grad2 = K.form(state.u, state.u);
  const double ut2 = M.form(state.v, state.v);
  const double trace = state.v[ops.boundary_dof()];
  rep.l2_u = std::sqrt(std::max(0.0, M.form(state.u, state.u)));
  rep.h1semi_u = std::sqrt(std::max(0.0, grad2));
  rep.lp_u_p = lp_power(state.u, params.p, ops);
  rep.l2_ut = std::sqrt(std::max(0.0, ut2));
  rep.l2g1_ut = std::abs(trace);
  rep.E = energy_from_channels(rep, params);
  return rep;
}

double energy_from_channels(const EnergyReport& r, const ModelParams& params) {
  const double potential = params.source_on ? r.lp_u_p / params.p : 0.0;
  return 0.5 * r.h1semi_u * r.h1semi_u - potential + 0.5 * r.l2_ut * r.l2_ut +
         0.5 * r.l2g1_ut * r.l2g1_ut;
}

namespace {

// int u_t u + u_t(1) u(1) + alpha/2 ||u_x||^2
double perturbation(const State& s, const AssembledOperators& ops, double alpha) {
  const int last = ops.boundary_dof();
  return ops.mass.form(s.v, s.u) + s.v[last] * s.u[last] + 0.5 * alpha * ops.stiffness.form(s.u, s.u);
}

}  // namespace

double resolve_epsilon(const State& initial, double depth, const AuxiliaryConfig& cfg,
                       const AssembledOperators& ops, const ModelParams& params) {
  const double H0 = depth - energy(initial, ops, params).E;
  if (!(H0 > 0.0))
    throw NonpositiveWellGap(fmt::format("H(0) = {} is not positive; growth regime does not apply", H0));
  if (!cfg.auto_epsilon) return cfg.epsilon;
  const int last = ops.boundary_dof();
  const double scale = std::abs(ops.mass.form(initial.v, initial.u)) +
                       std::abs(initial.v[last] * initial.u[last]) +
                       0.5 * params.alpha * ops.stiffness.form(initial.u, initial.u) + 1.0;
  return std::min(cfg.epsilon, H0 / (2.0 * scale));
}

double auxiliary_L(const State& state, const EnergyReport& report, double epsilon,
                   const AssembledOperators& ops, const ModelParams& params) {
  return report.H + epsilon * perturbation(state, ops, params.alpha);
}

IdentityAccumulator::IdentityAccumulator(const AssembledOperators& ops, const ModelParams& params,
                                         const State& start, const Eigen::VectorXd* source_u)
    : ops_(&ops),
      params_(params),
      start_quadratic_(quadratic_energy(start)),
      start_energy_(energy(start, ops, params).E),
      last_dissipation_(dissipation_rate(start)),
      last_source_(source_power(start, source_u)),
      last_t_(start.t) {}

double IdentityAccumulator::quadratic_energy(const State& s) const {
  const double trace = s.v[ops_->boundary_dof()];
  return 0.5 * (ops_->stiffness.form(s.u, s.u) + ops_->mass.form(s.v, s.v) + trace * trace);
}

double IdentityAccumulator::dissipation_rate(const State& s) const {
  const double trace = s.v[ops_->boundary_dof()];
  return params_.alpha * ops_->stiffness.form(s.v, s.v) + params_.r * std::pow(std::abs(trace), params_.m);
}

double IdentityAccumulator::source_power(const State& s, const Eigen::VectorXd* source_u) const {
  if (!params_.source_on) return 0.0;
  return source_load(source_u != nullptr ? *source_u : s.u, params_.p, *ops_).dot(s.v);
}

void IdentityAccumulator::advance(const State& next, const Eigen::VectorXd* source_u) {
  const double dt = next.t - last_t_;
  const double diss = dissipation_rate(next);
  const double src = source_power(next, source_u);
  dissipated_ += 0.5 * dt * (last_dissipation_ + diss);
  source_work_ += 0.5 * dt * (last_source_ + src);
  last_dissipation_ = diss;
  last_source_ = src;
  last_t_ = next.t;
  residual_ = quadratic_energy(next) - start_quadratic_ + dissipated_ - source_work_;
}

double IdentityAccumulator::normalized() const {
  return std::abs(residual_) / std::max(1.0, std::abs(start_energy_));
}

double identity_residual(std::span<const State> segment, const AssembledOperators& ops,
                         const ModelParams& params, std::span<const State> source_traj) {
  if (segment.size() < 2) throw std::invalid_argument("identity residual needs at least 2 samples");
  const bool external = !source_traj.empty();
  if (external && source_traj.size() != segment.size())
    throw std::invalid_argument("source trajectory length does not match segment");
  IdentityAccumulator acc(ops, params, segment[0], external ? &source_traj[0].u : nullptr);
  for (std::size_t i = 1; i < segment.size(); ++i)
    acc.advance(segment[i], external ? &source_traj[i].u : nullptr);
  return acc.normalized();
}

std::vector<FloorViolation> vitillaro_floor_check(std::span<const EnergyReport> reports,
                                                  const ThresholdConstants& th, double tol) {
  if (reports.empty()) throw std::invalid_argument("empty trajectory");
  const EnergyReport& first = reports.front();
  if (!(first.E < th.d))
    throw HypothesisNotMet(fmt::format("E(0) = {} is not below the well depth d = {}", first.E, th.d));
  if (!(first.h1semi_u > th.alpha1))
    throw HypothesisNotMet(
        fmt::format("||u0_x|| = {} does not exceed alpha1 = {}", first.h1semi_u, th.alpha1));

  const double a2 = alpha2(first.E, th.B, th.p).value;
  const double grad_floor = (1.0 - tol) * a2;
  const double lp_floor = (1.0 - tol) * th.B * a2;
  std::vector<FloorViolation> out;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (r.h1semi_u < grad_floor) out.push_back({i, r.t, "grad_u", r.h1semi_u, grad_floor});
    const double lp = std::pow(r.lp_u_p, 1.0 / th.p);
    if (lp < lp_floor) out.push_back({i, r.t, "lp_u", lp, lp_floor});
  }
  return out;
}

GrowthFit growth_fit(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  if (times.size() < 2) throw NonpositiveSamples("growth fit needs at least 2 samples");
  const auto n = static_cast<double>(times.size());
  double st = 0.0, sy = 0.0;
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw NonpositiveSamples(fmt::format("sample {} at t = {} is not positive ({})", i, times[i], values[i]));
    logs[i] = std::log(values[i]);
    st += times[i];
    sy += logs[i];
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double dt = times[i] - tm, dy = logs[i] - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt == 0.0) throw NonpositiveSamples("growth fit needs distinct sample times");
  GrowthFit fit;
  fit.mu_hat = sty / stt;
  fit.intercept = ym - fit.mu_hat * tm;
  fit.n_samples = logs.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double e = logs[i] - (fit.intercept + fit.mu_hat * times[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

GrowthFit growth_fit(std::span<const EnergyReport> reports, GrowthChannel channel, double t_a,
                     double t_b) {
  std::vector<double> t, y;
  for (const auto& r : reports) {
    if (r.t < t_a || r.t > t_b) continue;
    t.push_back(r.t);
    y.push_back(channel == GrowthChannel::L ? r.L : r.lp_u_p);
  }
  return growth_fit(t, y);
}

}  // namespace dbwave
