#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbwave {

class Mesh1D;

/// Coefficients of
///   u_tt - u_xx - alpha u_xxt = |u|^{p-2} u          on (0,1)
///   u(0,t) = 0
///   u_tt(1,t) = -[u_x + alpha u_xt + r |u_t|^{m-2} u_t](1,t)
/// The wave speed coefficient a is fixed to 1.
struct ModelParams {
  double alpha = 0.0;
  double r = 0.0;
  double p = 4.0;
  double m = 2.0;
  bool strict_theorem_mode = false;
  /// Disables the interior source |u|^{p-2}u (and its potential in E).
  bool source_on = true;

  bool operator==(const ModelParams&) const = default;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string message;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  /// Critical trace exponent; +inf for N = 1, 2.
  double q_bar = std::numeric_limits<double>::infinity();

  bool ok() const;
  const HypothesisCheck* find(const std::string& name) const;
  /// First failing message, empty when everything passed.
  std::string first_failure() const;
};

/// Critical trace-embedding exponent 2(N-1)/(N-2), +inf for N <= 2.
double critical_exponent(int n_dim);

/// Never throws. With `growth_check` the extra hypothesis m < p of the
/// exponential growth result is included.
ValidationReport validate(const ModelParams& params, int n_dim, bool growth_check = false);

/// Sign-preserving power |x|^{q-1} sgn(x), i.e. |x|^{q-2} x.
inline double signed_pow(double x, double q) {
  if (x == 0.0) return 0.0;
  const double a = std::abs(x);
  return std::copysign(std::pow(a, q - 1.0), x);
}

/// Endpoint markers of (0,1): Dirichlet end Gamma0 = {0}, dynamic end Gamma1 = {1}.
struct Domain1D {
  static constexpr double length = 1.0;
  static constexpr double gamma0 = 0.0;
  static constexpr double gamma1 = 1.0;
};

enum class ProfileKind { zero, linear_ramp, sine_halfwave };

/// Named initial profile, optionally scaled by an amplitude.
/// All profiles vanish at x = 0.
struct Profile {
  ProfileKind kind = ProfileKind::zero;
  double amplitude = 1.0;

  double value(double x) const;
  double derivative(double x) const;

  bool operator==(const Profile&) const = default;
};

std::string to_string(ProfileKind kind);
/// Throws std::invalid_argument on an unknown name.
ProfileKind profile_from_string(const std::string& name);

inline Profile scaled(Profile base, double amplitude) {
  base.amplitude *= amplitude;
  return base;
}

/// Nodal initial data on a full mesh (node 0 included) together with the
/// continuous profiles they were interpolated from.
struct InitialData {
  Eigen::VectorXd u0;
  Eigen::VectorXd u1;
  Profile u0_profile;
  Profile u1_profile;
};

InitialData make_initial_data(const Profile& displacement, const Profile& velocity,
                              const Mesh1D& mesh);

}  // namespace dbwave
