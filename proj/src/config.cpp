// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pilotkalman {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string modulation_name(Modulation m) {
  switch (m) {
    case Modulation::None: return "none";
    case Modulation::Qpsk: return "qpsk";
    case Modulation::Qam16: return "16qam";
  }
  return "none";
}

std::string channel_model_name(ChannelModel m) {
  switch (m) {
    case ChannelModel::Exponential: return "exponential";
    case ChannelModel::OneRing: return "one_ring";
    case ChannelModel::Upa: return "upa";
    case ChannelModel::DftTdt: return "dft_tdt";
  }
  return "exponential";
}

std::string fading_name(FadingModel f) {
  return f == FadingModel::Block ? "block" : "symbol";
}

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") {
    if (value == "exponential") cfg.model = ChannelModel::Exponential;
    else if (value == "one_ring") cfg.model = ChannelModel::OneRing;
    else if (value == "upa") cfg.model = ChannelModel::Upa;
    else if (value == "dft_tdt") cfg.model = ChannelModel::DftTdt;
    else throw ConfigError(key, "unknown channel model '" + value + "'");
  } else if (key == "n_tx") {
    cfg.n_tx = static_cast<int>(parse_int(key, value));
  } else if (key == "n_rx") {
    cfg.n_rx = static_cast<int>(parse_int(key, value));
  } else if (key == "exp_corr") {
    cfg.exp_corr = parse_double(key, value);
  } else if (key == "aoa_deg") {
    cfg.aoa_deg = parse_double(key, value);
  } else if (key == "spread_deg") {
    cfg.spread_deg = parse_double(key, value);
  } else if (key == "spacing") {
    cfg.spacing = parse_double(key, value);
  } else if (key == "upa_n_vertical") {
    cfg.upa.n_vertical = static_cast<int>(parse_int(key, value));
  } else if (key == "upa_n_horizontal") {
    cfg.upa.n_horizontal = static_cast<int>(parse_int(key, value));
  } else if (key == "upa_elevation_m") {
    cfg.upa.elevation_m = parse_double(key, value);
  } else if (key == "upa_ring_radius_m") {
    cfg.upa.ring_radius_m = parse_double(key, value);
  } else if (key == "upa_distance_m") {
    cfg.upa.distance_m = parse_double(key, value);
  } else if (key == "upa_horizontal_aoa_deg") {
    cfg.upa.horizontal_aoa = parse_double(key, value) * kPi / 180.0;
  } else if (key == "upa_path_loss_exponent") {
    cfg.upa.path_loss_exponent = parse_double(key, value);
  } else if (key == "upa_reference_distance_m") {
    cfg.upa.reference_distance_m = parse_double(key, value);
  } else if (key == "path_loss") {
    cfg.path_loss = parse_bool(key, value);
  } else if (key == "fading") {
    if (value == "symbol") cfg.fading = FadingModel::Symbolwise;
    else if (value == "block") cfg.fading = FadingModel::Block;
    else throw ConfigError(key, "expected symbol or block, got '" + value + "'");
  } else if (key == "M") {
    cfg.m = static_cast<int>(parse_int(key, value));
  } else if (key == "M_p") {
    cfg.m_p = static_cast<int>(parse_int(key, value));
  } else if (key == "snr_db") {
    cfg.snr_db = parse_double(key, value);
  } else if (key == "velocity_kmh") {
    cfg.velocity_kmh = parse_double(key, value);
  } else if (key == "carrier_hz") {
    cfg.carrier_hz = parse_double(key, value);
  } else if (key == "symbol_s") {
    cfg.symbol_s = parse_double(key, value);
  } else if (key == "a") {
    cfg.a_override = parse_double(key, value);
  } else if (key == "methods" || key == "method") {
    cfg.methods.clear();
    for (const std::string& name : split_csv(value)) {
      const auto m = method_from_name(name);
      if (!m) throw ConfigError(key, "unknown method '" + name + "'");
      cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty()) throw ConfigError(key, "no methods given");
  } else if (key == "round_robin_lp") {
    cfg.round_robin_lp = static_cast<int>(parse_int(key, value));
  } else if (key == "modulation") {
    if (value == "none") cfg.modulation = Modulation::None;
    else if (value == "qpsk") cfg.modulation = Modulation::Qpsk;
    else if (value == "16qam") cfg.modulation = Modulation::Qam16;
    else throw ConfigError(key, "unknown modulation '" + value + "'");
  } else if (key == "runs") {
    cfg.runs = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "horizon_slots") {
    cfg.horizon_slots = static_cast<int>(parse_int(key, value));
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

namespace {

void validate_named(const ExperimentConfig& cfg) {
  // Re-raise core validation failures with the offending field name.
  if (cfg.m_p < 1 || cfg.m_p > cfg.m)
    throw ConfigError("M_p", "must satisfy 1 <= M_p <= M (M = " + std::to_string(cfg.m) + ")");
  if (cfg.n_tx < 1) throw ConfigError("n_tx", "must be positive");
  if (cfg.n_rx < 1) throw ConfigError("n_rx", "must be positive");
  if (cfg.exp_corr < 0.0 || cfg.exp_corr >= 1.0)
    throw ConfigError("exp_corr", "must be in [0, 1)");
  if (cfg.runs < 1) throw ConfigError("runs", "must be >= 1");
  if (cfg.horizon_slots < 1) throw ConfigError("horizon_slots", "must be >= 1");
  if (cfg.a_override && (*cfg.a_override <= 0.0 || *cfg.a_override > 1.0))
    throw ConfigError("a", "must be in (0, 1]");
  if (cfg.velocity_kmh < 0.0) throw ConfigError("velocity_kmh", "must be >= 0");
  if (cfg.fading == FadingModel::Block && cfg.n_rx != 1)
    throw ConfigError("fading", "block fading is MISO; set n_rx = 1");
  if (cfg.model == ChannelModel::Upa && cfg.n_rx != 1)
    throw ConfigError("n_rx", "the UPA model is MISO; set n_rx = 1");
  for (Method mth : cfg.methods) {
    if (mth == Method::RoundRobin &&
        (cfg.round_robin_lp <= cfg.m_p || cfg.round_robin_lp > cfg.effective_n_tx()))
      throw ConfigError("round_robin_lp", "needs M_p < L_p <= N_t");
  }
  cfg.validate();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no), "malformed section header");
      continue;  // sections are organizational only; keys are global
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // Resolve the UPA lattice into the antenna count before validation.
  if (cfg.model == ChannelModel::Upa) cfg.n_tx = cfg.effective_n_tx();
  validate_named(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "fig3") {
    // Exponential-correlation MIMO tracking comparison.
    cfg.model = ChannelModel::Exponential;
    cfg.n_tx = 32;
    cfg.n_rx = 2;
    cfg.exp_corr = 0.6;
    cfg.m = 10;
    cfg.m_p = 4;
    cfg.snr_db = 15.0;
    cfg.a_override = 0.9999;
    cfg.horizon_slots = 40;
    cfg.methods = {Method::Proposed, Method::Orthogonal, Method::Random, Method::FixedEigen};
  } else if (name == "fig5") {
    // One-ring ULA, equal power vs water-filled power.
    cfg.model = ChannelModel::OneRing;
    cfg.n_tx = 32;
    cfg.n_rx = 1;
    cfg.m = 10;
    cfg.m_p = 3;
    cfg.snr_db = 5.0;
    cfg.a_override = 0.9999;
    cfg.horizon_slots = 60;
    cfg.runs = 200;
    cfg.methods = {Method::Proposed, Method::ProposedPower};
  } else if (name == "fig9") {
    // Block fading with the DFT-basis approximate design and the round-robin
    // baseline.
    cfg.model = ChannelModel::OneRing;
    cfg.n_tx = 32;
    cfg.n_rx = 1;
    cfg.fading = FadingModel::Block;
    cfg.m = 5;
    cfg.m_p = 2;
    cfg.snr_db = 10.0;
    cfg.a_override = 0.9999;
    cfg.horizon_slots = 60;
    cfg.runs = 200;
    cfg.round_robin_lp = 24;
    cfg.methods = {Method::BlockFadingProposed, Method::DftTdt, Method::RoundRobin};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "' (expected fig3, fig5 or fig9)");
  }
  validate_named(cfg);
  return cfg;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto num = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  kv["model"] = channel_model_name(cfg.model);
  kv["n_tx"] = std::to_string(cfg.n_tx);
  kv["n_rx"] = std::to_string(cfg.n_rx);
  kv["exp_corr"] = num(cfg.exp_corr);
  kv["aoa_deg"] = num(cfg.aoa_deg);
  kv["spread_deg"] = num(cfg.spread_deg);
  kv["spacing"] = num(cfg.spacing);
  kv["upa_n_vertical"] = std::to_string(cfg.upa.n_vertical);
  kv["upa_n_horizontal"] = std::to_string(cfg.upa.n_horizontal);
  kv["upa_elevation_m"] = num(cfg.upa.elevation_m);
  kv["upa_ring_radius_m"] = num(cfg.upa.ring_radius_m);
  kv["upa_distance_m"] = num(cfg.upa.distance_m);
  kv["upa_horizontal_aoa_deg"] = num(cfg.upa.horizontal_aoa * 180.0 / kPi);
  kv["upa_path_loss_exponent"] = num(cfg.upa.path_loss_exponent);
  kv["upa_reference_distance_m"] = num(cfg.upa.reference_distance_m);
  kv["path_loss"] = cfg.path_loss ? "true" : "false";
  kv["fading"] = fading_name(cfg.fading);
  kv["M"] = std::to_string(cfg.m);
  kv["M_p"] = std::to_string(cfg.m_p);
  kv["snr_db"] = num(cfg.snr_db);
  kv["velocity_kmh"] = num(cfg.velocity_kmh);
  kv["carrier_hz"] = num(cfg.carrier_hz);
  kv["symbol_s"] = num(cfg.symbol_s);
  if (cfg.a_override) kv["a"] = num(*cfg.a_override);
  std::string methods;
  for (Method m : cfg.methods) {
    if (!methods.empty()) methods += ",";
    methods += method_name(m);
  }
  kv["methods"] = methods;
  kv["round_robin_lp"] = std::to_string(cfg.round_robin_lp);
  kv["modulation"] = modulation_name(cfg.modulation);
  kv["runs"] = std::to_string(cfg.runs);
  kv["seed"] = std::to_string(cfg.seed);
  kv["horizon_slots"] = std::to_string(cfg.horizon_slots);

  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ";";
    out += k + "=" + v;
  }
  return out;
}

}  // namespace pilotkalman
