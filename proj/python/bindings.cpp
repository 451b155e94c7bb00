#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

#include "hjleak/errors.hpp"
#include "hjleak/io.hpp"
#include "hjleak/run.hpp"

namespace py = pybind11;
using namespace hjleak;

namespace {

template <class T>
py::array_t<T> stack(const Grid& grid, const std::vector<std::vector<T>>& slices) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(slices.size())};
  for (Index c : grid.counts()) shape.push_back(static_cast<py::ssize_t>(c));
  py::array_t<T> out(shape);
  T* dst = out.mutable_data();
  for (const auto& s : slices) dst = std::copy(s.begin(), s.end(), dst);
  return out;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_hjleak, m) {
  m.doc() = "Hamilton-Jacobi reachability with decomposition and leaking-corner repair";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CflError>(m, "CflError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DecompositionError>(m, "DecompositionError", PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<std::vector<double>, std::vector<double>, std::vector<Index>>(), py::arg("mins"),
           py::arg("maxs"), py::arg("counts"))
      .def_property_readonly("mins", &Grid::mins)
      .def_property_readonly("maxs", &Grid::maxs)
      .def_property_readonly("counts", &Grid::counts)
      .def_property_readonly("size", &Grid::size)
      .def("axis", [](const Grid& g, Index d) {
        if (d >= g.dims()) throw py::index_error("dimension out of range");
        std::vector<double> out(g.counts()[d]);
        for (Index i = 0; i < out.size(); ++i) out[i] = g.coordinate(d, i);
        return out;
      });

  py::class_<ValueSeries>(m, "ValueSeries")
      .def_readonly("grid", &ValueSeries::grid)
      .def_readonly("times", &ValueSeries::times)
      .def_property_readonly("values", [](const ValueSeries& s) { return stack(s.grid, s.slices); },
                             "Array of shape (times, *grid.counts)")
      .def("time_index", &ValueSeries::time_index);

  py::class_<LeakingMask>(m, "LeakingMask")
      .def_readonly("grid", &LeakingMask::grid)
      .def_readonly("times", &LeakingMask::times)
      .def_readonly("delta_used", &LeakingMask::delta_used)
      .def_readonly("manual", &LeakingMask::manual)
      .def_property_readonly("marked", [](const LeakingMask& k) { return stack(k.grid, k.marked); })
      .def("count", &LeakingMask::count);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("name", &RunConfig::name)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("threshold", &RunConfig::threshold)
      .def_readwrite("frontier_threshold", &RunConfig::frontier_threshold)
      .def_readonly("delta", &RunConfig::delta)
      .def_readonly("horizon", &RunConfig::horizon)
      .def("validate", &RunConfig::validate);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("report", [](const RunResult& r) { return parse_json(report_to_json(r.report)); })
      .def_property_readonly("report_text", [](const RunResult& r) { return report_to_text(r.report); })
      .def_readonly("direct", &RunResult::direct)
      .def_readonly("approx", &RunResult::approx)
      .def_readonly("corrected", &RunResult::corrected)
      .def_readonly("mask", &RunResult::mask);

  m.def("parse_run_config", [](const std::string& text) { return parse_run_config(text); }, py::arg("text"));
  m.def("load_run_config", &load_run_config, py::arg("path"));
  m.def(
      "run",
      [](const RunConfig& config, const std::filesystem::path& out_dir) {
        py::gil_scoped_release release;
        return run(config, out_dir);
      },
      py::arg("config"), py::arg("out_dir") = std::filesystem::path{});

  m.def(
      "read_series", [](const std::filesystem::path& path) { return read_series(path); }, py::arg("path"));
  m.def("read_mask", &read_mask, py::arg("path"));
  m.def(
      "compare",
      [](const ValueSeries& a, const ValueSeries& b, double threshold) {
        return parse_json(comparison_to_json(compare(a, b, threshold)));
      },
      py::arg("a"), py::arg("b"), py::arg("threshold") = 1e-3);
  m.def(
      "export_slice",
      [](const ValueSeries& series, const std::map<Index, double>& fixed, std::optional<double> t,
         const std::filesystem::path& path, const LeakingMask* mask, const std::filesystem::path& mask_path) {
        const auto e = export_slice(series, fixed, t.value_or(series.times.back()), path, mask, mask_path);
        return py::dict(py::arg("dims") = std::pair{e.dim_i, e.dim_j}, py::arg("rows") = e.rows,
                        py::arg("snapped") = e.snapped, py::arg("snap_distance") = e.snap_distance);
      },
      py::arg("series"), py::arg("fixed"), py::arg("time") = py::none(), py::arg("path"),
      py::arg("mask") = nullptr, py::arg("mask_path") = std::filesystem::path{});
}
