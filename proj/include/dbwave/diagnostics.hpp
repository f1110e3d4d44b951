#pragma once

#include "dbwave/discretize.hpp"
#include "dbwave/integrate.hpp"
#include "dbwave/model.hpp"
#include "dbwave/state.hpp"
#include "dbwave/thresholds.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbwave {

class NonpositiveWellGap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NonpositiveSamples : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Norm channels and
///   E = 1/2 ||u_x||^2 - 1/p ||u||_p^p + 1/2 ||u_t||^2 + 1/2 u_t(1)^2.
/// With the source switched off the potential term is dropped, so E is the
/// quadratic energy of the linear problem. H, L and identity_residual are left
/// unset.
EnergyReport energy(const State& state, const AssembledOperators& ops, const ModelParams& params);

/// E recomputed from the stored channels of `report`.
double energy_from_channels(const EnergyReport& report, const ModelParams& params);

/// Perturbation size for L. Fixed mode returns cfg.epsilon; auto mode picks
///   min(cap, H(0) / (2 (|int u1 u0| + |u1(1) u0(1)| + alpha/2 ||u0_x||^2 + 1)))
/// which keeps L(0) >= H(0)/2. Throws NonpositiveWellGap when H(0) <= 0.
double resolve_epsilon(const State& initial, double depth, const AuxiliaryConfig& cfg,
                       const AssembledOperators& ops, const ModelParams& params);

/// L = H + eps int u_t u + eps u_t(1) u(1) + eps alpha/2 ||u_x||^2.
/// `report.H` must be set.
double auxiliary_L(const State& state, const EnergyReport& report, double epsilon,
                   const AssembledOperators& ops, const ModelParams& params);

/// Running balance of the energy identity
///   [1/2(||v_x||^2 + ||v_t||^2 + v_t(1)^2)]_s^t + alpha int ||v_xt||^2
///     + r int |v_t(1)|^m - int int |u|^{p-2} u v_t = R(s,t)
/// with trapezoid time integrals over the states fed to it. The source
/// argument u defaults to the state's own displacement.
class IdentityAccumulator {
 public:
  IdentityAccumulator(const AssembledOperators& ops, const ModelParams& params, const State& start,
                      const Eigen::VectorXd* source_u = nullptr);

  void advance(const State& next, const Eigen::VectorXd* source_u = nullptr);

  double signed_residual() const { return residual_; }
  /// |R| / max(1, |E(s)|).
  double normalized() const;

 private:
  double quadratic_energy(const State& s) const;
  double dissipation_rate(const State& s) const;
  double source_power(const State& s, const Eigen::VectorXd* source_u) const;

  const AssembledOperators* ops_;
  ModelParams params_;
  double start_quadratic_;
  double start_energy_;
  double last_dissipation_;
  double last_source_;
  double last_t_;
  double dissipated_ = 0.0;
  double source_work_ = 0.0;
  double residual_ = 0.0;
};

/// Normalized identity residual over a whole segment (>= 2 samples, else
/// std::invalid_argument). `source_traj`, when given, supplies the u of the
/// source term sample by sample.
double identity_residual(std::span<const State> segment, const AssembledOperators& ops,
                         const ModelParams& params,
                         std::span<const State> source_traj = {});

struct FloorViolation {
  std::size_t index = 0;
  double t = 0.0;
  std::string channel;  ///< "grad_u" or "lp_u"
  double value = 0.0;
  double floor = 0.0;
};

/// Samples where ||u_x|| < (1 - tol) alpha2 or ||u||_p < (1 - tol) B alpha2.
/// Requires E(0) < d and ||u0_x|| > alpha1 on reports.front(), else throws
/// HypothesisNotMet.
std::vector<FloorViolation> vitillaro_floor_check(std::span<const EnergyReport> reports,
                                                  const ThresholdConstants& thresholds,
                                                  double tol = 1e-3);

enum class GrowthChannel { L, lp_u_p };

struct GrowthFit {
  double mu_hat = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_samples = 0;
};

/// Least-squares line through (t, log y). Throws NonpositiveSamples if any y
/// in use is not strictly positive (or fewer than 2 samples are given).
GrowthFit growth_fit(std::span<const double> times, std::span<const double> values);

/// Fit of a trajectory channel restricted to t in [t_a, t_b].
GrowthFit growth_fit(std::span<const EnergyReport> reports, GrowthChannel channel, double t_a,
                     double t_b);

}  // namespace dbwave
