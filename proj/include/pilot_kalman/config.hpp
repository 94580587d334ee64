// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "pilot_kalman/sim.hpp"

namespace pilotkalman {

/// Validation failure that names the offending config field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses the flat key=value config text ('#' comments, optional [section]
/// headers, keys globally unique). Unknown keys and dimension conflicts raise
/// ConfigError with the field name. An empty text yields the defaults
/// (exponential model, N_t=32, N_r=2, r=0.6, M=10, M_p=4, 15 dB, v=3 km/h,
/// 1000 runs).
ExperimentConfig parse_config_text(const std::string& text);

/// Reads and parses a config file.
ExperimentConfig parse_config_file(const std::string& path);

/// Applies one key=value override (CLI flags reuse the config key space).
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Named scenario presets selectable from the CLI.
ExperimentConfig preset_config(const std::string& name);

/// Canonical resolved key=value serialization (sorted keys); any result file
/// embedding this line can be reproduced from it.
std::string canonical_config(const ExperimentConfig& cfg);

std::string modulation_name(Modulation m);
std::string channel_model_name(ChannelModel m);
std::string fading_name(FadingModel f);

}  // namespace pilotkalman
