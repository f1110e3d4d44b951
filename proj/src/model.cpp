#include "dbwave/model.hpp"

#include "dbwave/discretize.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dbwave {

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return c.message;
  return {};
}

double critical_exponent(int n_dim) {
  if (n_dim <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * (n_dim - 1) / (n_dim - 2.0);
}

namespace {

// q/(q+1-p) with its limit 1 as q -> +inf. A nonpositive denominator means
// no admissible m exists.
double lower_m_bound(double q_bar, double p) {
  if (std::isinf(q_bar)) return 1.0;
  const double denom = q_bar + 1.0 - p;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return q_bar / denom;
}

}  // namespace

ValidationReport validate(const ModelParams& params, int n_dim, bool growth_check) {
  ValidationReport report;
  report.q_bar = critical_exponent(n_dim);
  const double p = params.p;
  const double m = params.m;

  auto add = [&](std::string name, bool passed, std::string message) {
    report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(message)});
  };

  add("p > 2", p > 2.0, "p > 2 required for source nonlinearity");
  add("m >= 2", m >= 2.0, "m >= 2 required for boundary damping");
  add("alpha >= 0", params.alpha >= 0.0, "alpha >= 0 required");
  add("r >= 0", params.r >= 0.0, "r >= 0 required");
  add("n_dim >= 1", n_dim >= 1, "spatial dimension must be at least 1");

  if (params.strict_theorem_mode) {
    const double q = report.q_bar;
    add("2 <= p <= q_bar", p >= 2.0 && p <= q,
        fmt::format("existence theorem requires 2 <= p <= q_bar = {}", q));
    const double m_lo = std::max(2.0, lower_m_bound(q, p));
    add("max(2, q_bar/(q_bar+1-p)) <= m <= q_bar", m >= m_lo && m <= q,
        fmt::format("existence theorem requires {} <= m <= {}", m_lo, q));
  }
  if (growth_check) add("m < p", m < p, "growth result requires m < p");
  return report;
}

double Profile::value(double x) const {
  switch (kind) {
    case ProfileKind::zero: return 0.0;
    case ProfileKind::linear_ramp: return amplitude * x;
    case ProfileKind::sine_halfwave: return amplitude * std::sin(0.5 * std::numbers::pi * x);
  }
  return 0.0;
}

double Profile::derivative(double x) const {
  switch (kind) {
    case ProfileKind::zero: return 0.0;
    case ProfileKind::linear_ramp: return amplitude;
    case ProfileKind::sine_halfwave:
      return amplitude * 0.5 * std::numbers::pi * std::cos(0.5 * std::numbers::pi * x);
  }
  return 0.0;
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::zero: return "zero";
    case ProfileKind::linear_ramp: return "linear_ramp";
    case ProfileKind::sine_halfwave: return "sine_halfwave";
  }
  return "zero";
}

ProfileKind profile_from_string(const std::string& name) {
  if (name == "zero") return ProfileKind::zero;
  if (name == "linear_ramp") return ProfileKind::linear_ramp;
  if (name == "sine_halfwave") return ProfileKind::sine_halfwave;
  throw std::invalid_argument(fmt::format("unknown initial profile '{}'", name));
}

InitialData make_initial_data(const Profile& displacement, const Profile& velocity,
                              const Mesh1D& mesh) {
  const auto& x = mesh.nodes();
  InitialData data;
  data.u0_profile = displacement;
  data.u1_profile = velocity;
  data.u0.resize(static_cast<Eigen::Index>(x.size()));
  data.u1.resize(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    data.u0[k] = displacement.value(x[i]);
    data.u1[k] = velocity.value(x[i]);
  }
  // Dirichlet compatibility at Gamma0, exact rather than sin(0) rounding.
  data.u0[0] = 0.0;
  data.u1[0] = 0.0;
  return data;
}

}  // namespace dbwave
