#include <cmath>
#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fptlab/analytic.hpp"
#include "fptlab/error.hpp"
#include "fptlab/experiment.hpp"
#include "fptlab/montecarlo.hpp"
#include "fptlab/parallel.hpp"
#include "fptlab/process.hpp"
#include "fptlab/spectral.hpp"
#include "fptlab/volterra.hpp"

namespace py = pybind11;
using namespace fptlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

template <class F>
py::array_t<double> map(const Array& t, F f) {
  py::array_t<double> out(t.request().shape);
  auto in = t.unchecked();
  const double* src = t.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < in.size(); ++i) dst[i] = f(src[i]);
  return out;
}

py::dict density_dict(const DensityGrid& g) {
  py::dict d;
  d["t"] = to_array(g.knots);
  d["g"] = to_array(g.values);
  d["method"] = g.method;
  d["total_mass"] = g.total_mass;
  return d;
}

DensityGrid grid_from(const Array& t, const Array& g, const std::string& method) {
  return DensityGrid::make(std::vector<double>(t.data(), t.data() + t.size()),
                           std::vector<double>(g.data(), g.data() + g.size()), method);
}

CrossingRule crossing_rule(const std::string& name) {
  if (name == "bridge") return CrossingRule::BrownianBridge;
  if (name == "grid") return CrossingRule::GridOnly;
  fail(ErrorKind::ConfigInvalid, "crossing must be \"bridge\" or \"grid\", got \"" + name + "\"");
}

BinSpec bin_spec(const py::object& bins) {
  if (bins.is_none() || (py::isinstance<py::str>(bins) && bins.cast<std::string>() == "auto"))
    return FreedmanDiaconis{};
  if (py::isinstance<py::int_>(bins)) return BinCount{bins.cast<std::size_t>()};
  if (py::isinstance<py::float_>(bins)) return BinWidth{bins.cast<double>()};
  fail(ErrorKind::ConfigInvalid, "bins must be \"auto\", an int count or a float width");
}

}  // namespace

PYBIND11_MODULE(_fptlab, m) {
  m.doc() = "First-passage-time densities of Gaussian processes";
  m.attr("__version__") = version();

  static py::exception<Error> error(m, "FptlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(py::str(e.what()));
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<BoundarySpec>(m, "Boundary")
      .def_static("soglia", &BoundarySpec::soglia, py::arg("beta"), py::arg("d"))
      .def_static("linear", &BoundarySpec::linear, py::arg("a"), py::arg("b"))
      .def_static("constant", &BoundarySpec::constant, py::arg("a"))
      .def_static("custom", &BoundarySpec::custom, py::arg("value"), py::arg("derivative"), py::arg("probe_lo") = 0.0,
                  py::arg("probe_hi") = 10.0)
      .def("__call__", [](const BoundarySpec& b, const Array& t) { return map(t, [&](double x) { return b(x); }); })
      .def("derivative",
           [](const BoundarySpec& b, const Array& t) { return map(t, [&](double x) { return b.derivative(x); }); })
      .def("__repr__", &BoundarySpec::describe);

  m.def(
      "closed_form_soglia",
      [](double beta, double d, const Array& t) {
        return map(t, [&](double x) { return x <= 0.0 ? 0.0 : closed_form_soglia(beta, d, x); });
      },
      py::arg("beta"), py::arg("d"), py::arg("t"));

  m.def(
      "wiener_linear_fpt",
      [](double a, double b, const Array& t) {
        return map(t, [&](double x) { return x <= 0.0 ? 0.0 : wiener_linear_fpt(a, b, 0.0, 0.0, x); });
      },
      py::arg("a"), py::arg("b"), py::arg("t"));

  m.def(
      "markov_violation",
      [](double beta, double alpha, const std::vector<double>& points) {
        const auto grid = triple_grid(points);
        return markov_condition_check(covariance_function(make_exp_cos_process(beta, alpha)), grid, 1e-12)
            .max_violation;
      },
      py::arg("beta"), py::arg("alpha"), py::arg("points"));

  m.def(
      "solve_volterra",
      [](double beta, const BoundarySpec& boundary, double step, double horizon, double x0) {
        SolverConfig config;
        config.step = step;
        config.horizon = horizon;
        VolterraSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_fpt_volterra(make_exp_cos_process(beta, 0.0, x0), boundary, config);
        }
        py::dict d = density_dict(sol.density);
        d["psi_diagonal"] = to_array(sol.psi_diagonal);
        d["clamp_count"] = sol.clamp_count;
        return d;
      },
      py::arg("beta"), py::arg("boundary"), py::arg("step") = 0.01, py::arg("horizon") = 10.0, py::arg("x0") = 0.0);

  py::class_<FptSampleSet>(m, "FptSamples")
      .def_property_readonly("crossing_times", [](const FptSampleSet& s) { return to_array(s.crossing_times); })
      .def_property_readonly("path_times", [](const FptSampleSet& s) { return to_array(s.path_times); })
      .def_readonly("censored", &FptSampleSet::censored)
      .def_readonly("total", &FptSampleSet::total)
      .def_readonly("horizon", &FptSampleSet::horizon)
      .def_readonly("dt", &FptSampleSet::dt)
      .def_readonly("seed", &FptSampleSet::master_seed)
      .def_property_readonly("crossed", &FptSampleSet::crossed)
      .def_property_readonly("crossing_fraction", &FptSampleSet::crossing_fraction)
      .def("to_csv", [](const FptSampleSet& s) {
        std::ostringstream os;
        s.write_csv(os);
        return os.str();
      });

  m.def(
      "simulate_first_passage",
      [](double beta, double alpha, const BoundarySpec& boundary, std::size_t paths, double dt, double horizon,
         std::uint64_t seed, unsigned workers, const std::string& crossing, double x0) {
        const auto rule = crossing_rule(crossing);
        const auto steps = std::size_t(std::llround(horizon / dt));
        py::gil_scoped_release release;
        const auto filter = build_filter(spectral_factorize(expcos_spectrum(beta, alpha)), dt);
        return simulate_first_passage(filter, boundary, x0, paths, steps, seed,
                                      workers == 0 ? default_workers() : workers, rule);
      },
      py::arg("beta"), py::arg("alpha"), py::arg("boundary"), py::arg("paths") = 100000, py::arg("dt") = 0.005,
      py::arg("horizon") = 10.0, py::arg("seed") = 12345, py::arg("workers") = 0, py::arg("crossing") = "bridge",
      py::arg("x0") = 0.0);

  m.def(
      "estimate_density",
      [](const FptSampleSet& s, const py::object& bins) {
        const Histogram h = estimate_density(s, bin_spec(bins));
        py::dict d = density_dict(h.density);
        d["edges"] = to_array(h.edges);
        std::vector<double> se(h.counts.size());
        for (std::size_t i = 0; i < se.size(); ++i) se[i] = h.standard_error(i);
        d["counts"] = h.counts;
        d["standard_error"] = to_array(se);
        return d;
      },
      py::arg("samples"), py::arg("bins") = "auto");

  m.def(
      "compare_densities",
      [](const Array& ta, const Array& ga, const Array& tb, const Array& gb) {
        const auto r = compare_densities(grid_from(ta, ga, "a"), grid_from(tb, gb, "b"));
        py::dict d;
        d["l1"] = r.l1;
        d["sup"] = r.sup;
        d["ks"] = r.ks;
        return d;
      },
      py::arg("t_a"), py::arg("g_a"), py::arg("t_b"), py::arg("g_b"));

  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) { return preset(name).to_json().dump(); }, py::arg("name"));
  m.def(
      "validate",
      [](const std::string& config_json) { return validate(ExperimentConfig::from_json(nlohmann::json::parse(config_json))); },
      py::arg("config_json"));
  m.def(
      "run",
      [](const std::string& config_json, const std::filesystem::path& output) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
          fail(ErrorKind::ConfigInvalid, e.what());
        }
        ExperimentConfig c = ExperimentConfig::from_json(j);
        c.output = output;
        py::gil_scoped_release release;
        const auto report = run(c);
        std::vector<std::string> files;
        for (const auto& f : report.files) files.push_back(f.string());
        return files;
      },
      py::arg("config_json"), py::arg("output"));
}
