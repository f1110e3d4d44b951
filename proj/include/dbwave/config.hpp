#pragma once

#include "dbwave/diagnostics.hpp"
#include "dbwave/integrate.hpp"
#include "dbwave/model.hpp"
#include "dbwave/spectral.hpp"
#include "dbwave/thresholds.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dbwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiagnosticsConfig {
  AuxiliaryConfig aux;
  /// Fit window as fractions of the run length.
  double fit_lo = 0.2;
  double fit_hi = 0.9;
  double floor_tol = 1e-3;
  GrowthChannel fit_channel = GrowthChannel::L;

  bool operator==(const DiagnosticsConfig&) const = default;
};

struct ThresholdConfig {
  EmbeddingSpace space = EmbeddingSpace::H01;
  int mesh_n = 256;
  int restarts = 8;
  std::optional<double> inject_B;

  bool operator==(const ThresholdConfig&) const = default;
};

/// Cartesian grid; an empty list means the single value from the base config.
struct SweepConfig {
  std::vector<double> amplitudes;
  std::vector<double> alphas;
  std::vector<double> rs;

  bool operator==(const SweepConfig&) const = default;
};

struct PicardConfig {
  int k_max = 60;
  double tol = 1e-10;
  std::vector<double> horizons{0.02, 0.08, 0.32};

  bool operator==(const PicardConfig&) const = default;
};

struct OracleConfig {
  std::vector<int> n_modes{2, 4, 6, 8};
  BasisGenerator generator = BasisGenerator::monomials;
  double ode_tol = 1e-10;

  bool operator==(const OracleConfig&) const = default;
};

struct RunConfig {
  ModelParams model;
  int mesh_n = 128;
  int quadrature_order = 4;
  Profile displacement{ProfileKind::sine_halfwave, 1.0};
  Profile velocity{ProfileKind::zero, 0.0};
  StepControl time;
  DiagnosticsConfig diagnostics;
  ThresholdConfig thresholds;
  std::string kind = "run";
  std::string out_dir = "out";
  std::uint64_t seed = 12345;
  SweepConfig sweep;
  PicardConfig picard;
  OracleConfig oracle;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the sectioned key = value format:
///
///   [model]
///   alpha = 0.05
///   p = 4
///   [sweep]
///   amplitudes = [0.5, 1.0]
///
/// model.alpha, model.r, model.p and model.m are required. Errors name the
/// offending line or field.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every field, in a form parse_config reads back to an equal RunConfig.
std::string serialize(const RunConfig& config);

std::string to_string(GrowthChannel channel);
GrowthChannel growth_channel_from_string(const std::string& name);

}  // namespace dbwave
