// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/output.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace pilotkalman {

namespace {

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double snr_db_floor(double snr_linear) {
  return 10.0 * std::log10(std::max(snr_linear, 1e-12));
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw std::runtime_error("output: non-finite metric value");
}

}  // namespace

std::string render_csv(const MetricSeries& series, const ExperimentConfig& cfg,
                       const RunManifest& manifest) {
  std::string out;
  out.reserve(static_cast<std::size_t>(series.symbols()) * 64);
  out += "# pilot-kalman " + manifest.version + "\n";
  out += "# seed=" + std::to_string(manifest.seed) + "\n";
  out += "# config: " + manifest.config + "\n";
  out += "k,nmse,empirical_nmse,received_snr_db,rate_bits,ber\n";
  const bool with_ber = cfg.modulation != Modulation::None;
  for (long k = 0; k < series.symbols(); ++k) {
    check_finite(series.nmse(k));
    check_finite(series.empirical_nmse(k));
    check_finite(series.received_snr(k));
    check_finite(series.rate_bits(k));
    out += std::to_string(k + 1);
    out += ",";
    out += fmt("%.9e", series.nmse(k));
    out += ",";
    out += fmt("%.9e", series.empirical_nmse(k));
    out += ",";
    out += fmt("%.6f", snr_db_floor(series.received_snr(k)));
    out += ",";
    out += fmt("%.6f", series.rate_bits(k));
    out += ",";
    if (with_ber && series.bits_sent[k] > 0) out += fmt("%.9e", series.ber(k));
    out += "\n";
  }
  return out;
}

MethodOutput write_method_output(const std::string& out_dir, Method method,
                                 const MetricSeries& series, const ExperimentConfig& cfg,
                                 const RunManifest& manifest) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  MethodOutput paths;
  paths.csv_path = (fs::path(out_dir) / (method_name(method) + ".csv")).string();
  paths.summary_path = (fs::path(out_dir) / (method_name(method) + ".summary.json")).string();

  auto cleanup = [&]() {
    std::error_code ec;
    fs::remove(paths.csv_path, ec);
    fs::remove(paths.summary_path, ec);
  };

  try {
    {
      std::ofstream csv(paths.csv_path, std::ios::binary | std::ios::trunc);
      if (!csv) throw std::runtime_error("cannot open " + paths.csv_path);
      csv << render_csv(series, cfg, manifest);
      if (!csv.good()) throw std::runtime_error("write failed: " + paths.csv_path);
    }

    long total_errors = 0, total_bits = 0;
    double rate_acc = 0.0;
    long data_symbols = 0;
    for (long k = 0; k < series.symbols(); ++k) {
      total_errors += series.bit_errors[k];
      total_bits += series.bits_sent[k];
      if (!series.is_pilot[k]) {
        rate_acc += series.rate_bits(k);
        ++data_symbols;
      }
    }

    nlohmann::ordered_json j;
    j["method"] = method_name(method);
    j["steady_state_nmse"] = series.steady_state_nmse(cfg.m);
    j["mean_rate"] = data_symbols > 0 ? rate_acc / data_symbols : 0.0;
    if (total_bits > 0)
      j["mean_ber"] = static_cast<double>(total_errors) / static_cast<double>(total_bits);
    else
      j["mean_ber"] = nullptr;
    nlohmann::ordered_json jm;
    jm["artifact_version"] = manifest.version;
    jm["seed"] = manifest.seed;
    jm["timestamp"] = manifest.timestamp;
    jm["config"] = manifest.config;
    jm["csv"] = paths.csv_path;
    j["manifest"] = jm;

    std::ofstream summary(paths.summary_path, std::ios::binary | std::ios::trunc);
    if (!summary) throw std::runtime_error("cannot open " + paths.summary_path);
    summary << j.dump(2) << "\n";
    if (!summary.good()) throw std::runtime_error("write failed: " + paths.summary_path);
  } catch (...) {
    cleanup();
    throw;
  }
  return paths;
}

std::vector<MethodOutput> run_and_write(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  RunManifest manifest;
  manifest.seed = cfg.seed;
  manifest.timestamp = now_iso8601();
  manifest.config = canonical_config(cfg);

  std::vector<MethodOutput> outputs;
  for (Method m : cfg.methods) {
    const MethodContext ctx = prepare_method(cfg, m);
    const MetricSeries series = monte_carlo(ctx, cfg.runs, cfg.threads);
    outputs.push_back(write_method_output(out_dir, m, series, cfg, manifest));
  }
  return outputs;
}

}  // namespace pilotkalman
