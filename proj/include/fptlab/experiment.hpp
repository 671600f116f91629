#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fptlab/montecarlo.hpp"

namespace fptlab {

std::string version();

struct ExperimentConfig {
  std::string name = "experiment";

  // Zero-mean process with gamma(t) = e^{-beta|t|} cos(alpha t).
  double beta = 0.5;
  double alpha = 0.0;
  double x0 = 0.0;

  // "soglia" sweeps d_values; "linear" is a + b t; "constant" is a.
  std::string boundary_kind = "soglia";
  double boundary_beta = 0.5;
  std::vector<double> d_values{0.25};
  double a = 1.0;
  double b = 0.0;

  // Any of boundary_curve, closed_form, volterra, simulate.
  std::vector<std::string> methods{"closed_form", "volterra", "simulate"};

  double dt = 0.005;
  double horizon = 10.0;
  double step = 0.01;

  std::size_t paths = 100000;
  std::uint64_t seed = 12345;
  BinSpec bins = FreedmanDiaconis{};
  // Memory parameters for the simulate method; empty means {alpha}.
  std::vector<double> alphas;
  unsigned threads = 0;  // 0: all hardware threads
  CrossingRule crossing = CrossingRule::BrownianBridge;

  std::filesystem::path output;

  /// Throws Error(ConfigInvalid) on malformed fields. Unknown keys are
  /// ignored so that a run manifest can be fed back in.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::vector<double> simulate_alphas() const { return alphas.empty() ? std::vector{alpha} : alphas; }
  bool uses(const std::string& method) const;
};

ExperimentConfig load_config(const std::filesystem::path& file);

/// Every constraint violation; empty when the config can run.
std::vector<std::string> validate(const ExperimentConfig& config);

struct MetricRow {
  std::string tag;
  std::string a;
  std::string b;
  DensityDistance distance;
};

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<MetricRow> metrics;
  double wall_seconds = 0.0;
};

/// Runs every selected method and writes CSV tables plus manifest.json into
/// config.output. Throws Error(ConfigInvalid) if validate() is not empty.
RunReport run(const ExperimentConfig& config);

/// Built-in presets: figure-1, figure-2, figure-3.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace fptlab
