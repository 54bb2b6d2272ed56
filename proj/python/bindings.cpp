// Python module: dict-in, dict-out wrappers over the C++ library. Structured
// values cross the boundary as JSON through Python's json module.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "bayesbench/benchfns.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/harness.hpp"
#include "bayesbench/modelcheck.hpp"
#include "bayesbench/optim.hpp"
#include "bayesbench/pipeline.hpp"
#include "bayesbench/posterior.hpp"

namespace py = pybind11;
using namespace bayesbench;

namespace {

nlohmann::json to_cpp(const py::object& o) {
  const auto text = py::module_::import("json").attr("dumps")(o).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<double> draws_array(const PosteriorDraws& d) {
  py::array_t<double> out({d.chains, d.iterations, d.dimension});
  std::copy(d.values.begin(), d.values.end(), out.mutable_data());
  return out;
}

py::dict fit_dict(const Fit& fit) {
  py::dict out;
  out["request"] = to_py(fit.request.to_json());
  out["names"] = fit.draws.names;
  out["draws"] = draws_array(fit.draws);
  out["divergences"] = fit.diagnostics.divergences;
  out["diagnostics"] = to_py(fit.diagnostics.to_json());
  out["converged"] = fit.diagnostics.converged();
  py::dict tables;
  for (const auto& [name, table] : fit_tables(fit)) tables[py::str(name)] = table.to_csv();
  out["tables"] = tables;
  return out;
}

}  // namespace

PYBIND11_MODULE(bayesbench, m) {
  m.doc() = "Bayesian analysis of optimizer benchmark experiments";
  m.attr("__version__") = BAYESBENCH_VERSION;

  // Derived classes after their base: later translators are tried first.
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_KeyError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("benchmarks", &registry_list, "Ids of the bundled benchmark functions.");
  m.def("catalog", [] { return to_py(registry_catalog()); });
  m.def(
      "evaluate",
      [](const std::string& id, const std::vector<double>& x) { return evaluate(registry_get(id), x); },
      py::arg("benchmark"), py::arg("x"));
  m.def("algorithms", [] {
    std::vector<std::string> out;
    for (auto id : all_algorithms()) out.push_back(to_string(id));
    return out;
  });

  m.def(
      "optimize",
      [](const std::string& algorithm, const std::string& benchmark, long budget, std::uint64_t seed,
         double noise) {
        const auto run = optimize(default_params(algorithm), registry_get(benchmark), NoiseSpec{noise}, budget,
                                  seed, false);
        py::dict out;
        out["best_x"] = run.best_x;
        out["best_f_true"] = run.best_f_true;
        out["evaluations_used"] = run.evaluations_used;
        std::vector<std::pair<long, double>> trace;
        for (const auto& t : run.trace) trace.emplace_back(t.evaluation, t.delta_f);
        out["trace"] = trace;
        return out;
      },
      py::arg("algorithm"), py::arg("benchmark"), py::arg("budget"), py::arg("seed") = 0, py::arg("noise") = 0.0);

  m.def(
      "bench",
      [](const py::object& config, const std::string& path, int jobs) {
        const auto c = ExperimentConfig::from_json(to_cpp(config));
        Dataset data;
        {
          py::gil_scoped_release release;
          data = run_experiment(c, jobs);
          write_csv(data, path);
        }
        return data.rows.size();
      },
      py::arg("config"), py::arg("path"), py::arg("jobs") = 1,
      "Runs the experiment grid, writes the dataset CSV and returns the row count.");

  m.def(
      "fit",
      [](const py::object& request, const std::string& data, const std::string& out, bool force) {
        auto req = FitRequest::from_json(to_cpp(request));
        if (!data.empty()) req.data = data;
        if (req.data.empty()) throw ValidationError("fit: no dataset");
        std::optional<Fit> fit;
        {
          py::gil_scoped_release release;
          fit.emplace(run_fit(req, read_csv(req.data)));
          if (!out.empty()) write_fit(*fit, out, force);
        }
        return fit_dict(*fit);
      },
      py::arg("request"), py::arg("data") = "", py::arg("out") = "", py::arg("force") = false,
      "Fits a model; `request` uses the fit config JSON schema.");

  m.def(
      "load_fit", [](const std::string& dir) { return fit_dict(load_fit(dir)); }, py::arg("dir"));

  m.def(
      "hpd_interval",
      [](const std::vector<double>& samples, double mass) {
        const auto i = hpd_interval(samples, mass);
        return std::make_pair(i.low, i.high);
      },
      py::arg("samples"), py::arg("mass") = 0.95);

  m.def(
      "waic",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> loglik) {
        if (loglik.ndim() != 2) throw ValidationError("waic: expected a draws x observations array");
        Matrix mat;
        mat.rows = loglik.shape(0);
        mat.cols = loglik.shape(1);
        mat.values.assign(loglik.data(), loglik.data() + loglik.size());
        const auto r = waic(mat);
        py::dict out;
        out["lppd"] = r.lppd;
        out["p_waic"] = r.p_waic;
        out["waic"] = r.waic;
        return out;
      },
      py::arg("loglik"));

  m.def("davidson_probabilities", &davidson_probabilities, py::arg("strength0"), py::arg("strength1"),
        py::arg("nu_tie"));
}
