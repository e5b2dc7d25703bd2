#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/model.hpp"
#include "qdyn/oracle.hpp"
#include "qdyn/presets.hpp"

namespace qdyn::config {

/// Everything a CLI run depends on. Parsed from a flat-section key = value
/// file; command-line overrides are applied afterwards.
struct RunConfig {
  model::PotentialSpec potential;
  std::string potential_name;  // "double_well", "harmonic" or "custom"
  std::vector<double> betas;

  std::optional<oracle::GridSpec> oracle_grid;  // unset: preset for each beta
  oracle::GridSpec grid_for(double beta) const;

  std::string scale_name = "ci";
  presets::Scale scale;
  int P = 0;             // 0: preset for each beta
  double window = 0.0;   // 0: preset for each beta
  long equilibration = 0;  // 0: a fifth of the production steps, at least 5000
  double step_fraction = 0.01;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;

  int bootstrap = 64;
  double Q_half_width = 1.5;
  int Q_points = 61;

  std::size_t cmd_members = 4096;
  double t_max = 20.0;
  double dt = 0.05;  // output spacing of all correlation series; t_max is a multiple

  std::vector<double> times() const;

  std::optional<double> Z_beta;

  std::string window_name = "hann";
  int padding = 1;

  double compare_threshold = 0.1;  // fraction of C^CAN(0)
  double compare_window = 2.0;     // t range of the max-deviation metric

  std::filesystem::path output_dir = "out";

  /// One line per key, sorted, with round-trip numbers; hashed into manifests.
  std::string canonical_text() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> scale;
};

/// Throws ConfigError naming the offending file, section and key.
RunConfig parse(const std::string& text, const Overrides& overrides = {});
RunConfig load(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace qdyn::config
