#include "dbwave/thresholds.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <random>

namespace dbwave {

std::string to_string(EmbeddingSpace space) {
  return space == EmbeddingSpace::H01 ? "H01" : "H1_Gamma0";
}

EmbeddingSpace embedding_space_from_string(const std::string& name) {
  if (name == "H01") return EmbeddingSpace::H01;
  if (name == "H1_Gamma0") return EmbeddingSpace::H1_Gamma0;
  throw std::invalid_argument(fmt::format("unknown embedding space '{}'", name));
}

namespace {

// Discrete space: full nodal vectors whose constrained end values are zero.
struct DiscreteSpace {
  const Mesh1D& mesh;
  GaussRule rule;
  Tridiag stiffness;  // on free dofs
  int first = 1;      // first free node
  int count = 0;      // number of free nodes

  DiscreteSpace(const Mesh1D& m, EmbeddingSpace space) : mesh(m), rule(gauss_rule(4)) {
    const int n = m.n_nodes();
    count = space == EmbeddingSpace::H01 ? n - 2 : n - 1;
    stiffness = Tridiag(count);
    for (int e = 0; e < m.n_elem(); ++e) {
      const double k = 1.0 / m.h(e);
      const int a = e - first, b = e + 1 - first;
      const bool a_free = a >= 0 && a < count, b_free = b >= 0 && b < count;
      if (a_free) stiffness.diag[a] += k;
      if (b_free) stiffness.diag[b] += k;
      if (a_free && b_free) {
        stiffness.upper[a] -= k;
        stiffness.lower[a] -= k;
      }
    }
  }

  Eigen::VectorXd full(const Eigen::VectorXd& free) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_nodes());
    f.segment(first, count) = free;
    return f;
  }

  double objective(const Eigen::VectorXd& free, double p) const {
    return power_integral(mesh, rule, full(free), p);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& free, double p) const {
    return p * power_load(mesh, rule, full(free), p).segment(first, count);
  }

  Eigen::VectorXd normalized(const Eigen::VectorXd& free) const {
    return free / std::sqrt(stiffness.form(free, free));
  }
};

struct AscentResult {
  Eigen::VectorXd u;
  double objective = 0.0;
  int iterations = 0;
  double step = 0.0;
  bool converged = false;
};

AscentResult projected_ascent(const DiscreteSpace& space, Eigen::VectorXd u, double p,
                              const EmbeddingOptions& opt) {
  AscentResult res;
  u = space.normalized(u);
  double q = space.objective(u, p);
  double tau = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    // Gradient in the K inner product, projected onto the tangent of the sphere.
    Eigen::VectorXd g = solve(space.stiffness, space.gradient(u, p));
    g -= space.stiffness.form(u, g) * u;
    bool accepted = false;
    while (tau > 1e-300) {
      Eigen::VectorXd trial = space.normalized(u + tau * g);
      const double q_trial = space.objective(trial, p);
      if (q_trial > q) {
        const double gain = (q_trial - q) / q;
        u = std::move(trial);
        q = q_trial;
        accepted = true;
        tau = std::min(2.0 * tau, 1e12);
        if (gain < opt.rel_tol) {
          res.converged = true;
        }
        break;
      }
      tau *= 0.5;
      if (tau * std::sqrt(std::max(0.0, space.stiffness.form(g, g))) < 1e-15) break;
    }
    if (!accepted || res.converged) {
      // No ascent possible above rounding: a stationary point.
      res.converged = true;
      break;
    }
  }
  res.u = std::move(u);
  res.objective = q;
  res.step = tau;
  return res;
}

}  // namespace

EmbeddingResult embedding_constant(double p, const Mesh1D& mesh, EmbeddingSpace space_kind,
                                   const EmbeddingOptions& options) {
  if (!(p >= 2.0)) throw std::invalid_argument("embedding constant requires p >= 2");
  const DiscreteSpace space(mesh, space_kind);
  if (space.count < 1) throw std::invalid_argument("mesh has no free nodes");

  EmbeddingResult best;
  best.provenance.space = space_kind;
  best.provenance.mesh_elements = mesh.n_elem();
  best.provenance.restarts = options.restarts;
  best.provenance.seed = options.seed;
  bool any = false;
  const double shift = space_kind == EmbeddingSpace::H01 ? 0.0 : 0.5;
  const auto& x = mesh.nodes();

  for (int restart = 0; restart < options.restarts; ++restart) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(restart));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int modes = std::min(16, space.count);
    Eigen::VectorXd coef(modes);
    for (int k = 0; k < modes; ++k) coef[k] = normal(rng) / (k + 1);
    Eigen::VectorXd u0(space.count);
    for (int i = 0; i < space.count; ++i) {
      double s = 0.0;
      for (int k = 0; k < modes; ++k)
        s += coef[k] * std::sin((k + 1 - shift) * std::numbers::pi * x[i + space.first]);
      u0[i] = s;
    }
    if (u0.norm() == 0.0) continue;
    AscentResult r = projected_ascent(space, u0, p, options);
    if (!r.converged) continue;
    const double B = std::pow(r.objective, 1.0 / p);
    if (!any || B > best.B) {
      any = true;
      best.B = B;
      best.maximizer = space.full(r.u);
      best.provenance.best_restart = restart;
      best.provenance.iterations = r.iterations;
      best.provenance.final_step = r.step;
    }
  }
  if (!any)
    throw NonConvergence(fmt::format("projected ascent did not converge in {} restarts", options.restarts));
  return best;
}

WellConstants well_constants(double B, double p) {
  WellConstants w;
  w.alpha1 = std::pow(B, -p / (p - 2.0));
  w.d = (0.5 - 1.0 / p) * w.alpha1 * w.alpha1;
  return w;
}

double well_function(double lambda, double B, double p) {
  return 0.5 * lambda * lambda - std::pow(B, p) / p * std::pow(lambda, p);
}

Alpha2Result alpha2(double E0, double B, double p) {
  const WellConstants w = well_constants(B, p);
  if (E0 > w.d)
    throw HypothesisNotMet(fmt::format("E(0) = {} exceeds the well depth d = {}", E0, w.d));
  Alpha2Result res;
  if (E0 == w.d) {
    res.value = w.alpha1;
    res.boundary = true;
    return res;
  }
  double lo = w.alpha1;
  double hi = 2.0 * w.alpha1;
  while (well_function(hi, B, p) > E0) hi *= 2.0;
  // g is decreasing on [alpha1, inf): g(lo) > E0 >= g(hi). Bisect to the
  // last representable midpoint.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    res.iterations = it + 1;
    if (mid <= lo || mid >= hi) break;
    if (well_function(mid, B, p) > E0)
      lo = mid;
    else
      hi = mid;
  }
  res.value = 0.5 * (lo + hi);
  return res;
}

ThresholdConstants make_thresholds(const EmbeddingResult& embedding, double p) {
  ThresholdConstants th = make_thresholds(embedding.B, p);
  th.provenance = embedding.provenance;
  th.provenance.injected = false;
  return th;
}

ThresholdConstants make_thresholds(double B, double p) {
  ThresholdConstants th;
  th.p = p;
  th.B = B;
  const WellConstants w = well_constants(B, p);
  th.alpha1 = w.alpha1;
  th.d = w.d;
  th.provenance.injected = true;
  return th;
}

}  // namespace dbwave
