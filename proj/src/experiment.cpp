#include "fptlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fptlab/analytic.hpp"
#include "fptlab/error.hpp"
#include "fptlab/parallel.hpp"
#include "fptlab/volterra.hpp"

#ifndef FPTLAB_VERSION
#define FPTLAB_VERSION "0.0.0"
#endif

namespace fptlab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kMethods{"boundary_curve", "closed_form", "volterra", "simulate"};

std::vector<double> number_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

BinSpec parse_bins(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "auto") fail(ErrorKind::ConfigInvalid, "bins must be \"auto\", a count or {\"width\": w}");
    return FreedmanDiaconis{};
  }
  if (j.is_number_integer()) {
    const auto n = j.get<long long>();
    if (n < 1) fail(ErrorKind::ConfigInvalid, "bin count must be >= 1");
    return BinCount{std::size_t(n)};
  }
  if (j.is_object() && j.contains("width")) return BinWidth{j.at("width").get<double>()};
  fail(ErrorKind::ConfigInvalid, "bins must be \"auto\", a count or {\"width\": w}");
}

json bins_json(const BinSpec& bins) {
  if (const auto* c = std::get_if<BinCount>(&bins)) return c->count;
  if (const auto* w = std::get_if<BinWidth>(&bins)) return json{{"width", w->width}};
  return "auto";
}

struct Case {
  std::string tag;
  BoundarySpec boundary;
};

std::vector<Case> cases(const ExperimentConfig& c) {
  std::vector<Case> out;
  if (c.boundary_kind == "soglia") {
    for (double d : c.d_values) out.push_back({fmt::format("d{}", d), BoundarySpec::soglia(c.boundary_beta, d)});
  } else if (c.boundary_kind == "linear") {
    out.push_back({"linear", BoundarySpec::linear(c.a, c.b)});
  } else {
    out.push_back({"constant", BoundarySpec::constant(c.a)});
  }
  return out;
}

std::size_t grid_count(double horizon, double h) { return std::size_t(std::llround(horizon / h)); }

bool multiple_of(double horizon, double h) {
  const double n = std::round(horizon / h);
  return n >= 1.0 && std::abs(n * h - horizon) <= 1e-9 * horizon;
}

struct Named {
  std::string name;
  DensityGrid grid;
  std::function<double(double)> density;  // empty for histograms
  std::vector<double> edges;              // histogram only
};

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& file) {
    const fs::path p = dir_ / file;
    std::ofstream os(p, std::ios::binary);
    if (!os) fail(ErrorKind::Io, fmt::format("cannot write {}", p.string()));
    files_.push_back(p);
    return os;
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

DensityDistance distance(const Named& a, const Named& b) {
  // Histograms are compared against bin averages of the other density.
  if (!a.edges.empty() && b.density) return compare_densities(a.grid, bin_average(b.density, a.edges, b.name));
  if (!b.edges.empty() && a.density) return compare_densities(bin_average(a.density, b.edges, a.name), b.grid);
  return compare_densities(a.grid, b.grid);
}

}  // namespace

std::string version() { return FPTLAB_VERSION; }

bool ExperimentConfig::uses(const std::string& method) const {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) fail(ErrorKind::ConfigInvalid, "config must be a JSON object");
    c.name = j.value("name", c.name);
    if (j.contains("process")) {
      const json& p = j.at("process");
      const std::string family = p.value("family", std::string("exp-cos"));
      if (family != "exp-cos") fail(ErrorKind::ConfigInvalid, fmt::format("unsupported process family '{}'", family));
      c.beta = p.value("beta", c.beta);
      c.alpha = p.value("alpha", c.alpha);
      c.x0 = p.value("x0", c.x0);
    }
    if (j.contains("boundary")) {
      const json& b = j.at("boundary");
      c.boundary_kind = b.value("kind", c.boundary_kind);
      c.boundary_beta = b.value("beta", c.beta);
      if (b.contains("d")) c.d_values = number_or_list(b.at("d"));
      c.a = b.value("a", c.a);
      c.b = b.value("b", c.b);
    }
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      c.dt = g.value("dt", c.dt);
      c.horizon = g.value("horizon", c.horizon);
      c.step = g.value("step", c.step);
    }
    if (j.contains("simulation")) {
      const json& s = j.at("simulation");
      c.paths = s.value("paths", c.paths);
      c.seed = s.value("seed", c.seed);
      if (s.contains("bins")) c.bins = parse_bins(s.at("bins"));
      if (s.contains("alphas")) c.alphas = s.at("alphas").get<std::vector<double>>();
      c.threads = s.value("threads", c.threads);
      const std::string rule = s.value("crossing", std::string("bridge"));
      if (rule == "bridge")
        c.crossing = CrossingRule::BrownianBridge;
      else if (rule == "grid")
        c.crossing = CrossingRule::GridOnly;
      else
        fail(ErrorKind::ConfigInvalid, fmt::format("crossing must be \"bridge\" or \"grid\", got '{}'", rule));
    }
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigInvalid, fmt::format("malformed config: {}", e.what()));
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json b{{"kind", boundary_kind}};
  if (boundary_kind == "soglia") {
    b["beta"] = boundary_beta;
    b["d"] = d_values;
  } else {
    b["a"] = a;
    if (boundary_kind == "linear") b["b"] = this->b;
  }
  json j{
      {"name", name},
      {"process", {{"family", "exp-cos"}, {"beta", beta}, {"alpha", alpha}, {"x0", x0}}},
      {"boundary", b},
      {"methods", methods},
      {"grid", {{"dt", dt}, {"horizon", horizon}, {"step", step}}},
      {"simulation",
       {{"paths", paths},
        {"seed", seed},
        {"bins", bins_json(bins)},
        {"alphas", simulate_alphas()},
        {"threads", threads},
        {"crossing", crossing == CrossingRule::GridOnly ? "grid" : "bridge"}}},
  };
  if (!output.empty()) j["output"] = output.string();
  return j;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream is(file);
  if (!is) fail(ErrorKind::ConfigInvalid, fmt::format("cannot read config {}", file.string()));
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigInvalid, fmt::format("{}: {}", file.string(), e.what()));
  }
  return ExperimentConfig::from_json(j);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.methods.empty()) v.push_back("at least one method must be selected");
  for (const auto& m : c.methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      v.push_back(fmt::format("unknown method '{}'", m));

  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) v.push_back(fmt::format("process beta must be > 0, got {}", c.beta));
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) v.push_back(fmt::format("process alpha must be >= 0, got {}", c.alpha));
  if (!std::isfinite(c.x0)) v.push_back("x0 must be finite");

  bool boundary_ok = true;
  if (c.boundary_kind == "soglia") {
    if (!(c.boundary_beta > 0.0)) {
      v.push_back(fmt::format("boundary beta must be > 0, got {}", c.boundary_beta));
      boundary_ok = false;
    }
    if (c.d_values.empty()) {
      v.push_back("boundary needs at least one d");
      boundary_ok = false;
    }
    for (double d : c.d_values)
      if (!(d > 0.0) || !std::isfinite(d)) {
        v.push_back(fmt::format("boundary d must be > 0, got {}", d));
        boundary_ok = false;
      }
  } else if (c.boundary_kind == "linear" || c.boundary_kind == "constant") {
    if (!std::isfinite(c.a) || !std::isfinite(c.b)) {
      v.push_back("boundary coefficients must be finite");
      boundary_ok = false;
    }
  } else {
    v.push_back(fmt::format("unknown boundary kind '{}'", c.boundary_kind));
    boundary_ok = false;
  }
  if (boundary_ok && std::isfinite(c.x0))
    for (const auto& k : cases(c))
      if (!(c.x0 < k.boundary(0.0)))
        v.push_back(fmt::format("x0 = {} must lie below S(0) = {} ({})", c.x0, k.boundary(0.0), k.tag));

  if (c.uses("closed_form")) {
    if (c.alpha != 0.0) v.push_back("closed form requires α=0");
    if (c.boundary_kind != "soglia") v.push_back("closed form requires the soglia boundary");
    else if (c.boundary_beta != c.beta) v.push_back("closed form requires boundary beta equal to process beta");
    if (c.x0 != 0.0) v.push_back("closed form requires x0 = 0");
  }
  if (c.uses("volterra") && c.alpha != 0.0) v.push_back("volterra requires α=0 (Gauss-Markov covariance)");

  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) v.push_back(fmt::format("horizon must be > 0, got {}", c.horizon));
  if (!(c.dt > 0.0)) v.push_back(fmt::format("dt must be > 0, got {}", c.dt));
  else if (c.horizon > 0.0 && !multiple_of(c.horizon, c.dt)) v.push_back("horizon must be a multiple of dt");
  if (!(c.step > 0.0)) v.push_back(fmt::format("solver step must be > 0, got {}", c.step));
  else if (c.horizon > 0.0 && !multiple_of(c.horizon, c.step)) v.push_back("horizon must be a multiple of the solver step");

  if (c.uses("simulate")) {
    if (c.paths < 1) v.push_back("paths must be >= 1");
    for (double a : c.simulate_alphas())
      if (!(a >= 0.0) || !std::isfinite(a)) v.push_back(fmt::format("simulation alpha must be >= 0, got {}", a));
    if (const auto* w = std::get_if<BinWidth>(&c.bins); w && !(w->width > 0.0))
      v.push_back("bin width must be > 0");
    if (const auto* n = std::get_if<BinCount>(&c.bins); n && n->count < 1) v.push_back("bin count must be >= 1");
  }
  return v;
}

RunReport run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  if (const auto v = validate(c); !v.empty()) {
    std::string all;
    for (const auto& s : v) all += (all.empty() ? "" : "; ") + s;
    fail(ErrorKind::ConfigInvalid, all);
  }
  if (c.output.empty()) fail(ErrorKind::ConfigInvalid, "output directory is not set");
  std::error_code ec;
  fs::create_directories(c.output, ec);
  if (ec) fail(ErrorKind::Io, fmt::format("cannot create {}: {}", c.output.string(), ec.message()));

  Writer out(c.output);
  RunReport report;
  const unsigned workers = c.threads == 0 ? default_workers() : c.threads;
  const std::size_t steps = grid_count(c.horizon, c.dt);
  const std::vector<double> alphas = c.simulate_alphas();

  std::ofstream stats;
  if (c.uses("simulate")) {
    stats = out.open("statistics.csv");
    stats << "case,alpha,paths,crossed,censored,mean,variance,mode,q1,median,q3,peak\n";
  }

  for (const Case& k : cases(c)) {
    std::vector<Named> results;
    if (c.uses("boundary_curve")) {
      auto os = out.open(fmt::format("boundary_{}.csv", k.tag));
      os << "t,S\n";
      for (std::size_t i = 0; i <= steps; ++i) {
        const double t = c.horizon * double(i) / double(steps);
        fmt::print(os, "{:.17g},{:.17g}\n", t, k.boundary(t));
      }
    }
    if (c.uses("closed_form")) {
      const double d = std::get<SogliaBoundary>(k.boundary.kind()).d;
      const double beta = c.beta;
      auto fn = [beta, d](double t) { return t <= 0.0 ? 0.0 : closed_form_soglia(beta, d, t); };
      const auto knots = uniform_knots(0.0, c.step, grid_count(c.horizon, c.step));
      results.push_back({"closed_form", DensityGrid::from_function(fn, knots, "closed_form"), fn, {}});
      auto os = out.open(fmt::format("closed_form_{}.csv", k.tag));
      results.back().grid.write_csv(os);
    }
    if (c.uses("volterra")) {
      SolverConfig sc;
      sc.step = c.step;
      sc.horizon = c.horizon;
      const auto sol = solve_fpt_volterra(make_exp_cos_process(c.beta, 0.0, c.x0), k.boundary, sc);
      auto os = out.open(fmt::format("volterra_{}.csv", k.tag));
      sol.density.write_csv(os);
      auto diag = out.open(fmt::format("volterra_{}_diagnostics.csv", k.tag));
      sol.write_diagnostics_csv(diag);
      DensityGrid grid = sol.density;
      results.push_back({"volterra", grid, [grid](double t) { return grid.interpolate(t); }, {}});
    }
    if (c.uses("simulate")) {
      for (double alpha : alphas) {
        const auto filter = build_filter(spectral_factorize(expcos_spectrum(c.beta, alpha)), c.dt);
        const auto samples =
            simulate_first_passage(filter, k.boundary, c.x0, c.paths, steps, c.seed, workers, c.crossing);
        const std::string label = fmt::format("{}_alpha{}", k.tag, alpha);
        {
          auto os = out.open(fmt::format("fpt_samples_{}.csv", label));
          samples.write_csv(os);
        }
        const Histogram h = estimate_density(samples, c.bins);
        {
          auto os = out.open(fmt::format("simulate_{}.csv", label));
          h.density.write_csv(os);
        }
        const SampleStatistics st = sample_statistics(samples, c.bins);
        const double peak = *std::max_element(h.density.values.begin(), h.density.values.end());
        fmt::print(stats, "{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", k.tag, alpha,
                   samples.total, samples.crossed(), samples.censored, st.mean, st.variance, st.mode, st.q1,
                   st.median, st.q3, peak);
        results.push_back({fmt::format("simulate_alpha{}", alpha), h.density, {}, h.edges});
      }
    }
    for (std::size_t i = 0; i < results.size(); ++i)
      for (std::size_t j = i + 1; j < results.size(); ++j)
        report.metrics.push_back({k.tag, results[i].name, results[j].name, distance(results[i], results[j])});
  }

  if (!report.metrics.empty()) {
    auto os = out.open("metrics.csv");
    os << "case,a,b,l1,sup,ks\n";
    for (const auto& m : report.metrics)
      fmt::print(os, "{},{},{},{:.17g},{:.17g},{:.17g}\n", m.tag, m.a, m.b, m.distance.l1, m.distance.sup,
                 m.distance.ks);
  }
  stats.close();

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = c.to_json();
  json files = json::array();
  for (const auto& f : out.files()) files.push_back(f.filename().string());
  manifest["run"] = {{"version", version()},
                     {"wall_time_seconds", report.wall_seconds},
                     {"workers", workers},
                     {"files", files}};
  {
    auto os = out.open("manifest.json");
    os << manifest.dump(2) << '\n';
  }
  report.files = out.files();
  return report;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.beta = 0.5;
  c.alpha = 0.0;
  c.boundary_kind = "soglia";
  c.boundary_beta = 0.5;
  if (name == "figure-1") {
    c.methods = {"boundary_curve"};
    c.d_values = {0.25, 0.5};
  } else if (name == "figure-2" || name == "figure-3") {
    c.methods = {"closed_form", "volterra", "simulate"};
    c.d_values = {name == "figure-2" ? 0.25 : 0.5};
    c.alphas = {1e-10, 0.25, 0.5};
  } else {
    fail(ErrorKind::ConfigInvalid, fmt::format("unknown preset '{}'", name));
  }
  return c;
}

std::vector<std::string> preset_names() { return {"figure-1", "figure-2", "figure-3"}; }

}  // namespace fptlab
