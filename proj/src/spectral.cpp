#include "dbwave/spectral.hpp"

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace dbwave {

std::string to_string(BasisGenerator g) {
  return g == BasisGenerator::monomials ? "monomials" : "dirichlet_neumann_sines";
}

BasisGenerator basis_generator_from_string(const std::string& name) {
  if (name == "monomials") return BasisGenerator::monomials;
  if (name == "dirichlet_neumann_sines") return BasisGenerator::dirichlet_neumann_sines;
  throw std::invalid_argument(fmt::format("unknown basis generator '{}'", name));
}

double generator_value(BasisGenerator g, int k, double x) {
  if (g == BasisGenerator::monomials) return std::pow(x, k);
  return std::sin((k - 0.5) * std::numbers::pi * x);
}

double generator_derivative(BasisGenerator g, int k, double x) {
  if (g == BasisGenerator::monomials) return k * std::pow(x, k - 1);
  const double w = (k - 0.5) * std::numbers::pi;
  return w * std::cos(w * x);
}

double SpectralBasis::value(int j, double x) const {
  double s = 0.0;
  for (int k = 0; k < n_modes; ++k) s += coefficients(j, k) * generator_value(generator, k + 1, x);
  return s;
}

double SpectralBasis::derivative(int j, double x) const {
  double s = 0.0;
  for (int k = 0; k < n_modes; ++k)
    s += coefficients(j, k) * generator_derivative(generator, k + 1, x);
  return s;
}

double SpectralBasis::inner(const Eigen::VectorXd& f, double f1, const Eigen::VectorXd& g,
                            double g1) const {
  double s = 0.0;
  for (std::size_t q = 0; q < weights.size(); ++q) s += weights[q] * f[q] * g[q];
  return s + f1 * g1;
}

Eigen::MatrixXd SpectralBasis::gram() const {
  Eigen::MatrixXd G(n_modes, n_modes);
  for (int i = 0; i < n_modes; ++i)
    for (int j = 0; j < n_modes; ++j)
      G(i, j) = inner(values.row(i).transpose(), trace[i], values.row(j).transpose(), trace[j]);
  return G;
}

Eigen::VectorXd SpectralBasis::sample(const Profile& f) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q) s[q] = f.value(nodes[q]);
  return s;
}

Eigen::VectorXd SpectralBasis::sample_derivative(const Profile& f) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q) s[q] = f.derivative(nodes[q]);
  return s;
}

Eigen::VectorXd SpectralBasis::project(const Profile& f) const {
  const Eigen::VectorXd s = sample(f);
  const double f1 = f.value(1.0);
  Eigen::VectorXd c(n_modes);
  for (int j = 0; j < n_modes; ++j) c[j] = inner(s, f1, values.row(j).transpose(), trace[j]);
  return c;
}

SpectralBasis build_basis(int n_modes, BasisGenerator generator, int panels, int order) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be at least 1");
  SpectralBasis b;
  b.generator = generator;
  b.n_modes = n_modes;
  const GaussRule rule = gauss_rule(order);
  for (int e = 0; e < panels; ++e) {
    const double a = static_cast<double>(e) / panels;
    const double h = 1.0 / panels;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      b.nodes.push_back(a + h * rule.points[k]);
      b.weights.push_back(h * rule.weights[k]);
    }
  }
  const auto nq = static_cast<Eigen::Index>(b.nodes.size());
  b.values.resize(n_modes, nq);
  b.derivatives.resize(n_modes, nq);
  b.trace.resize(n_modes);
  b.coefficients = Eigen::MatrixXd::Identity(n_modes, n_modes);

  for (int j = 0; j < n_modes; ++j) {
    Eigen::VectorXd v(nq), d(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      v[q] = generator_value(generator, j + 1, b.nodes[q]);
      d[q] = generator_derivative(generator, j + 1, b.nodes[q]);
    }
    double t = generator_value(generator, j + 1, 1.0);
    Eigen::VectorXd c = Eigen::VectorXd::Unit(n_modes, j);
    const double original = std::sqrt(b.inner(v, t, v, t));

    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const double h = b.inner(v, t, b.values.row(i).transpose(), b.trace[i]);
        v -= h * b.values.row(i).transpose();
        d -= h * b.derivatives.row(i).transpose();
        t -= h * b.trace[i];
        c -= h * b.coefficients.row(i).transpose();
      }
    }
    const double norm = std::sqrt(b.inner(v, t, v, t));
    if (!(norm > 1e-10 * original))
      throw RankDeficient(fmt::format("generator {} is numerically dependent (relative norm {:.2e})",
                                      j + 1, norm / original));
    b.values.row(j) = v.transpose() / norm;
    b.derivatives.row(j) = d.transpose() / norm;
    b.trace[j] = t / norm;
    b.coefficients.row(j) = c.transpose() / norm;
  }

  const Eigen::Map<const Eigen::VectorXd> w(b.weights.data(), nq);
  b.stiffness = b.derivatives * w.asDiagonal() * b.derivatives.transpose();
  return b;
}

namespace {

// Shift samples reused by every right-hand-side evaluation.
struct ShiftSamples {
  Eigen::VectorXd u0, u1, du0, du1;
  double u0_at_1 = 0.0, u1_at_1 = 0.0;
  Eigen::VectorXd grad_u0, grad_u1;  // <phi_x components, w_j'>

  ShiftSamples(const SpectralBasis& b, const ShiftFunction& s) {
    u0 = b.sample(s.u0);
    u1 = b.sample(s.u1);
    du0 = b.sample_derivative(s.u0);
    du1 = b.sample_derivative(s.u1);
    u0_at_1 = s.u0.value(1.0);
    u1_at_1 = s.u1.value(1.0);
    const Eigen::Map<const Eigen::VectorXd> w(b.weights.data(), static_cast<Eigen::Index>(b.weights.size()));
    grad_u0 = b.derivatives * w.cwiseProduct(du0);
    grad_u1 = b.derivatives * w.cwiseProduct(du1);
  }
};

Eigen::VectorXd rhs_impl(const Eigen::VectorXd& g, const Eigen::VectorXd& gp, double t,
                         const SpectralBasis& b, const ModelParams& params, SpectralMode mode,
                         const ShiftSamples* shift) {
  const Eigen::Map<const Eigen::VectorXd> w(b.weights.data(), static_cast<Eigen::Index>(b.weights.size()));
  Eigen::VectorXd u = b.values.transpose() * g;
  double ut1 = b.trace.dot(gp);
  Eigen::VectorXd acc = -b.stiffness * g - params.alpha * (b.stiffness * gp);
  if (mode == SpectralMode::shifted) {
    u += shift->u0 + t * shift->u1;
    ut1 += shift->u1_at_1;
    acc -= shift->grad_u0 + t * shift->grad_u1 + params.alpha * shift->grad_u1;
  }
  acc -= boundary_damping(ut1, params.r, params.m) * b.trace;
  if (params.source_on) {
    Eigen::VectorXd f(u.size());
    for (Eigen::Index q = 0; q < u.size(); ++q) f[q] = signed_pow(u[q], params.p);
    acc += b.values * w.cwiseProduct(f);
  }
  return acc;
}

}  // namespace

Eigen::VectorXd spectral_rhs(const Eigen::VectorXd& g, const Eigen::VectorXd& gp, double t,
                             const SpectralBasis& basis, const ModelParams& params,
                             SpectralMode mode, const ShiftFunction& shift) {
  if (mode == SpectralMode::direct) return rhs_impl(g, gp, t, basis, params, mode, nullptr);
  const ShiftSamples samples(basis, shift);
  return rhs_impl(g, gp, t, basis, params, mode, &samples);
}

SpectralTrajectory spectral_solve(const SpectralBasis& basis, const ModelParams& params,
                                  const Profile& u0, const Profile& u1, SpectralMode mode,
                                  const std::vector<double>& times, const SpectralOptions& options) {
  namespace odeint = boost::numeric::odeint;
  using OdeState = std::vector<double>;
  if (times.empty() || times.front() != 0.0)
    throw std::invalid_argument("spectral sample times must start at 0");

  SpectralTrajectory traj;
  traj.mode = mode;
  traj.shift = ShiftFunction{u0, u1};
  const int n = basis.n_modes;
  const ShiftSamples shift(basis, traj.shift);

  OdeState y(2 * static_cast<std::size_t>(n), 0.0);
  if (mode == SpectralMode::direct) {
    const Eigen::VectorXd g0 = basis.project(u0);
    const Eigen::VectorXd gp0 = basis.project(u1);
    for (int j = 0; j < n; ++j) {
      y[j] = g0[j];
      y[n + j] = gp0[j];
    }
  }

  auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    const Eigen::Map<const Eigen::VectorXd> g(x.data(), n);
    const Eigen::Map<const Eigen::VectorXd> gp(x.data() + n, n);
    const Eigen::VectorXd acc = rhs_impl(g, gp, t, basis, params, mode, &shift);
    for (int j = 0; j < n; ++j) {
      dxdt[j] = x[n + j];
      dxdt[n + j] = acc[j];
    }
  };
  auto observer = [&](const OdeState& x, double t) {
    traj.times.push_back(t);
    traj.g.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    traj.gp.push_back(Eigen::Map<const Eigen::VectorXd>(x.data() + n, n));
  };

  if (times.size() == 1) {
    observer(y, 0.0);
    return traj;
  }
  auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<OdeState>());
  odeint::integrate_times(stepper, system, y, times.begin(), times.end(), options.initial_dt,
                          observer);
  return traj;
}

SpectralFields spectral_fields(const SpectralTrajectory& traj, std::size_t i,
                               const SpectralBasis& b) {
  SpectralFields f;
  const Eigen::VectorXd& g = traj.g[i];
  const Eigen::VectorXd& gp = traj.gp[i];
  f.u = b.values.transpose() * g;
  f.ux = b.derivatives.transpose() * g;
  f.ut = b.values.transpose() * gp;
  f.uxt = b.derivatives.transpose() * gp;
  f.u1 = b.trace.dot(g);
  f.ut1 = b.trace.dot(gp);
  if (traj.mode == SpectralMode::shifted) {
    const double t = traj.times[i];
    const ShiftSamples s(b, traj.shift);
    f.u += s.u0 + t * s.u1;
    f.ux += s.du0 + t * s.du1;
    f.ut += s.u1;
    f.uxt += s.du1;
    f.u1 += s.u0_at_1 + t * s.u1_at_1;
    f.ut1 += s.u1_at_1;
  }
  return f;
}

namespace {

double weighted_l2(const SpectralBasis& b, const Eigen::VectorXd& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < b.weights.size(); ++q) s += b.weights[q] * f[q] * f[q];
  return std::sqrt(s);
}

void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw GridMismatch("sample counts differ");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i])))
      throw GridMismatch(fmt::format("sample {} times differ ({} vs {})", i, a[i], b[i]));
}

}  // namespace

double shift_equivalence_check(const SpectralTrajectory& direct, const SpectralTrajectory& shifted,
                               const SpectralBasis& basis) {
  require_same_grid(direct.times, shifted.times);
  double gap = 0.0;
  for (std::size_t i = 0; i < direct.times.size(); ++i) {
    const SpectralFields a = spectral_fields(direct, i, basis);
    const SpectralFields b = spectral_fields(shifted, i, basis);
    gap = std::max(gap, weighted_l2(basis, a.u - b.u));
  }
  return gap;
}

double fem_spectral_gap(const Trajectory& fem, const AssembledOperators& ops,
                        const SpectralTrajectory& spectral, const SpectralBasis& basis) {
  std::vector<double> fem_times;
  fem_times.reserve(fem.samples.size());
  for (const auto& s : fem.samples) fem_times.push_back(s.t);
  require_same_grid(fem_times, spectral.times);
  double gap = 0.0;
  for (std::size_t i = 0; i < fem.samples.size(); ++i) {
    const Eigen::VectorXd full = ops.expand(fem.samples[i].u);
    const SpectralFields f = spectral_fields(spectral, i, basis);
    Eigen::VectorXd diff(f.u.size());
    for (Eigen::Index q = 0; q < diff.size(); ++q)
      diff[q] = ops.mesh.interpolate(full, basis.nodes[q]) - f.u[q];
    gap = std::max(gap, weighted_l2(basis, diff));
  }
  return gap;
}

double spectral_identity_residual(const SpectralTrajectory& traj, const SpectralBasis& b,
                                  const ModelParams& params) {
  if (traj.times.size() < 2) throw std::invalid_argument("identity residual needs at least 2 samples");
  const Eigen::Map<const Eigen::VectorXd> w(b.weights.data(), static_cast<Eigen::Index>(b.weights.size()));
  auto quadratic = [&](const SpectralFields& f) {
    return 0.5 * (w.dot(f.ux.cwiseAbs2()) + w.dot(f.ut.cwiseAbs2()) + f.ut1 * f.ut1);
  };
  auto dissipation = [&](const SpectralFields& f) {
    return params.alpha * w.dot(f.uxt.cwiseAbs2()) + params.r * std::pow(std::abs(f.ut1), params.m);
  };
  auto source = [&](const SpectralFields& f) {
    if (!params.source_on) return 0.0;
    double s = 0.0;
    for (Eigen::Index q = 0; q < f.u.size(); ++q) s += w[q] * signed_pow(f.u[q], params.p) * f.ut[q];
    return s;
  };
  auto potential = [&](const SpectralFields& f) {
    if (!params.source_on) return 0.0;
    double s = 0.0;
    for (Eigen::Index q = 0; q < f.u.size(); ++q) s += w[q] * std::pow(std::abs(f.u[q]), params.p);
    return s / params.p;
  };

  SpectralFields prev = spectral_fields(traj, 0, b);
  const double q0 = quadratic(prev);
  const double e0 = q0 - potential(prev);
  double integral = 0.0;
  double residual = 0.0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    SpectralFields cur = spectral_fields(traj, i, b);
    const double dt = traj.times[i] - traj.times[i - 1];
    integral += 0.5 * dt * (dissipation(prev) - source(prev) + dissipation(cur) - source(cur));
    residual = quadratic(cur) - q0 + integral;
    prev = std::move(cur);
  }
  return std::abs(residual) / std::max(1.0, std::abs(e0));
}

}  // namespace dbwave
