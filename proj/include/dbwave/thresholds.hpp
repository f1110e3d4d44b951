#pragma once

#include "dbwave/discretize.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dbwave {

/// Discrete space for the embedding constant: H01 vanishes at both ends,
/// H1_Gamma0 only at x = 0.
enum class EmbeddingSpace { H01, H1_Gamma0 };

std::string to_string(EmbeddingSpace space);
EmbeddingSpace embedding_space_from_string(const std::string& name);

/// A precondition of the well-theory results does not hold for the data.
class HypothesisNotMet : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbeddingOptions {
  int restarts = 8;
  std::uint64_t seed = 12345;
  int max_iter = 20000;
  double rel_tol = 1e-13;  ///< stop when ||u||_p^p stalls to this relative change
};

/// How B was obtained.
struct EmbeddingProvenance {
  EmbeddingSpace space = EmbeddingSpace::H01;
  int mesh_elements = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int best_restart = 0;
  int iterations = 0;  ///< iterations of the winning restart
  double final_step = 0.0;
  bool injected = false;  ///< B was supplied by the caller rather than computed
};

struct EmbeddingResult {
  double B = 0.0;
  Eigen::VectorXd maximizer;  ///< full nodal vector with ||u_x|| = 1
  EmbeddingProvenance provenance;
};

/// B = max ||u||_p over ||u_x||_2 = 1 in the P1 space of `mesh`, by projected
/// gradient ascent (K-metric gradient, step halving) from seeded random
/// restarts. Works for any p >= 2; p = 2 gives the inverse square root of the
/// first eigenvalue.
EmbeddingResult embedding_constant(double p, const Mesh1D& mesh, EmbeddingSpace space,
                                   const EmbeddingOptions& options = {});

struct WellConstants {
  double alpha1 = 0.0;
  double d = 0.0;
};

/// alpha1 = B^{-p/(p-2)}, d = (1/2 - 1/p) alpha1^2.
WellConstants well_constants(double B, double p);

/// g(lambda) = lambda^2/2 - B^p lambda^p / p; its maximum over lambda >= 0 is
/// d, attained at alpha1.
double well_function(double lambda, double B, double p);

struct Alpha2Result {
  double value = 0.0;
  bool boundary = false;  ///< E0 == d, value is alpha1
  int iterations = 0;
};

/// The root lambda >= alpha1 of g(lambda) = E0, bisected down to adjacent doubles.
/// Throws HypothesisNotMet when E0 > d.
Alpha2Result alpha2(double E0, double B, double p);

struct ThresholdConstants {
  double p = 0.0;
  double B = 0.0;
  double alpha1 = 0.0;
  double d = 0.0;
  std::optional<double> alpha2;
  EmbeddingProvenance provenance;
};

ThresholdConstants make_thresholds(const EmbeddingResult& embedding, double p);
/// Constants from a caller-supplied B (marked as injected).
ThresholdConstants make_thresholds(double B, double p);

}  // namespace dbwave
