#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "geoentropy/checks.hpp"
#include "geoentropy/config.hpp"
#include "geoentropy/error.hpp"
#include "geoentropy/report.hpp"

namespace py = pybind11;
using namespace geoentropy;

namespace {

// Configs arrive as JSON text or as a dict.
ExperimentConfig config_of(const py::object& cfg) {
  if (py::isinstance<py::str>(cfg)) return parse_config(cfg.cast<std::string>());
  auto text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
  return parse_config(text);
}

py::object from_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::array_t<double> to_array(const PursuitMatrix& m) {
  py::array_t<double> out({m.size(), m.size()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) v(i, j) = m.value(i, j);
  return out;
}

CountMethod method_of(const std::string& s) {
  if (s == "greedy") return CountMethod::greedy;
  if (s == "exact") return CountMethod::exact;
  throw InvalidArgument("method must be 'greedy' or 'exact'");
}

}  // namespace

PYBIND11_MODULE(geoentropy, m) {
  m.doc() = "Entropy of geometric structures on sampled manifolds";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  (void)config_error;

  m.def("zoo", [] {
    py::list out;
    for (auto& e : zoo_entries()) {
      py::dict d;
      d["name"] = e.name;
      d["expected"] = e.expected;
      d["summary"] = e.summary;
      d["vector_field"] = e.vector_field;
      out.append(d);
    }
    return out;
  }, "Built-in structures with their expected entropy class.");

  m.def("check_suites", &check_suites);

  m.def("validate", [](const py::object& cfg) { config_of(cfg); },
        "Raises ConfigError when the config does not validate.");

  m.def("estimate", [](const py::object& cfg) {
    auto c = config_of(cfg);
    EntropyEstimate est;
    std::string name;
    {
      py::gil_scoped_release nogil;
      auto g = build_structure(c.structure);
      name = g->name();
      if (c.local) {
        const auto& man = g->manifold();
        est = local_entropy(*g, select_points(man, c.local->K), select_points(man, c.local->U),
                            select_points(man, c.local->V), c.entropy);
      } else {
        est = estimate_entropy(*g, c.entropy);
      }
    }
    const auto& o = c.entropy;
    auto summary = from_json(summary_json(est, {name, o.r_grid, o.epsilon_grid, o.steps, o.mode, o.method}));
    py::list counts;
    for (auto& s : est.counts)
      counts.append(py::make_tuple(s.r, s.epsilon, s.count, std::string(to_string(s.method))));
    summary["counts"] = counts;
    return summary;
  }, py::arg("config"), "Runs the entropy pipeline; returns the JSON summary as a dict plus the raw counts.");

  m.def("check", [](const std::string& suite, const py::object& cfg) {
    auto c = config_of(cfg);
    CheckReport rep;
    {
      py::gil_scoped_release nogil;
      rep = run_check(suite, c);
    }
    return from_json(check_report_json(rep));
  }, py::arg("suite"), py::arg("config"));

  auto matrix = [](bool D) {
    return [D](const py::object& cfg, double r) {
      auto c = config_of(cfg);
      PursuitMatrix mat;
      {
        py::gil_scoped_release nogil;
        auto g = build_structure(c.structure);
        mat = D ? D_r_matrix(*g, r, c.entropy.steps, c.entropy.mode, c.entropy.matrix)
                : d_r_matrix(*g, r, c.entropy.steps, c.entropy.mode, c.entropy.matrix);
      }
      return to_array(mat);
    };
  };
  m.def("d_r", matrix(false), py::arg("config"), py::arg("r"), "d_r matrix of the config's structure at speed r.");
  m.def("D_r", matrix(true), py::arg("config"), py::arg("r"), "D_r matrix (unbounded pursuer) at speed r.");

  m.def("base_metric", [](const py::object& cfg) {
    auto g = build_structure(config_of(cfg).structure);
    const auto& man = g->manifold();
    py::array_t<double> out({man.size(), man.size()});
    std::copy(man.metric().begin(), man.metric().end(), out.mutable_data());
    return out;
  }, py::arg("config"));

  m.def("max_separated", [](py::array_t<double, py::array::c_style | py::array::forcecast> d, double epsilon,
                            const std::string& method) {
    if (d.ndim() != 2 || d.shape(0) != d.shape(1)) throw InvalidArgument("matrix must be square");
    auto n = static_cast<std::size_t>(d.shape(0));
    return max_separated(std::span<const double>(d.data(), n * n), n, epsilon, method_of(method));
  }, py::arg("matrix"), py::arg("epsilon"), py::arg("method") = "greedy");

  m.def("slope", [](const std::vector<double>& r, const std::vector<std::size_t>& counts, std::size_t window) {
    if (r.size() != counts.size()) throw InvalidArgument("r and counts differ in length");
    std::vector<SeparatedCount> cs;
    for (std::size_t i = 0; i < r.size(); ++i) cs.push_back({r[i], 1.0, counts[i], CountMethod::greedy});
    auto f = entropy_from_counts(cs, window);
    py::dict d;
    d["slope"] = f.slope;
    d["raw_slope"] = f.raw_slope;
    d["residual"] = f.residual;
    d["r_first"] = f.r_first;
    d["r_last"] = f.r_last;
    d["points"] = f.points;
    return d;
  }, py::arg("r"), py::arg("counts"), py::arg("window") = 0, "Least-squares slope of ln N against r.");

  m.def("format_number", &format_number, "Shortest round-trip decimal.");
}
