#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fptlab/error.hpp"
#include "fptlab/experiment.hpp"

namespace {

constexpr int kConfigInvalid = 2;
constexpr int kNumericalFailure = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<unsigned> threads;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "master seed");
    app->add_option("--paths", paths, "number of simulated paths");
    app->add_option("--dt", dt, "simulation time step");
    app->add_option("--horizon", horizon, "time horizon T");
    app->add_option("--threads", threads, "worker threads (0 = all)");
    app->add_option("--out", out, "output directory (default: $FPTLAB_OUT)");
  }

  void apply(fptlab::ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (paths) c.paths = *paths;
    if (dt) c.dt = *dt;
    if (horizon) c.horizon = *horizon;
    if (threads) c.threads = *threads;
    if (!out.empty()) {
      c.output = out;
    } else if (c.output.empty()) {
      const char* env = std::getenv("FPTLAB_OUT");
      c.output = env && *env ? env : "fptlab-out";
    }
  }
};

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int report_error(const fptlab::Error& e) {
  std::cerr << fmt::format("error kind={} message=\"{}\"\n", fptlab::to_string(e.kind()), one_line(e.what()));
  return e.kind() == fptlab::ErrorKind::ConfigInvalid ? kConfigInvalid : kNumericalFailure;
}

int execute(const fptlab::ExperimentConfig& config) {
  if (const auto v = fptlab::validate(config); !v.empty()) {
    for (const auto& s : v) std::cerr << "violation: " << s << '\n';
    std::cerr << fmt::format("error kind=ConfigInvalid message=\"{} violation(s)\"\n", v.size());
    return kConfigInvalid;
  }
  const auto report = fptlab::run(config);
  for (const auto& m : report.metrics)
    std::cout << fmt::format("{} {} vs {}: L1={:.4g} sup={:.4g} KS={:.4g}\n", m.tag, m.a, m.b, m.distance.l1,
                             m.distance.sup, m.distance.ks);
  std::cout << fmt::format("wrote {} files to {} in {:.2f} s\n", report.files.size(), config.output.string(),
                           report.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage-time densities of Gaussian processes"};
  app.set_version_flag("--version", fptlab::version());
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_flags;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "JSON config or manifest")->required();
  run_flags.add_to(run_cmd);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "list config violations");
  validate_cmd->add_option("config", validate_path, "JSON config")->required();

  std::string preset_name;
  Overrides preset_flags;
  auto* preset_cmd = app.add_subcommand("preset", "run a built-in preset");
  preset_cmd->add_option("name", preset_name, "preset")
      ->required()
      ->check(CLI::IsMember(fptlab::preset_names()));
  preset_flags.add_to(preset_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigInvalid;
  }

  try {
    if (*run_cmd) {
      auto config = fptlab::load_config(config_path);
      run_flags.apply(config);
      return execute(config);
    }
    if (*validate_cmd) {
      auto config = fptlab::load_config(validate_path);
      const auto v = fptlab::validate(config);
      for (const auto& s : v) std::cout << s << '\n';
      if (v.empty()) std::cout << "ok\n";
      return v.empty() ? 0 : kConfigInvalid;
    }
    auto config = fptlab::preset(preset_name);
    preset_flags.apply(config);
    return execute(config);
  } catch (const fptlab::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error kind=Internal message=\"{}\"\n", one_line(e.what()));
    return kNumericalFailure;
  }
}
