// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pilot_kalman/config.hpp"

namespace pilotkalman {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  std::string version = kArtifactVersion;
  std::uint64_t seed = 0;
  std::string timestamp;      // ISO 8601; JSON summary only, never the CSV
  std::string config;         // canonical key=value serialization
  std::string csv_path;
  std::string summary_path;
};

struct MethodOutput {
  std::string csv_path;
  std::string summary_path;
};

/// Writes <out_dir>/<method>.csv and <out_dir>/<method>.summary.json. The CSV
/// embeds the deterministic manifest fields as '#' comment lines and is
/// byte-identical for a fixed (config, seed). Partial files are removed on
/// I/O failure.
MethodOutput write_method_output(const std::string& out_dir, Method method,
                                 const MetricSeries& series, const ExperimentConfig& cfg,
                                 const RunManifest& manifest);

/// Runs every configured method and writes its files; returns the outputs in
/// method order.
std::vector<MethodOutput> run_and_write(const ExperimentConfig& cfg, const std::string& out_dir);

/// CSV serialization used by write_method_output (exposed for tests).
std::string render_csv(const MetricSeries& series, const ExperimentConfig& cfg,
                       const RunManifest& manifest);

}  // namespace pilotkalman
