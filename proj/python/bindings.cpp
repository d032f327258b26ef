// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "satdash/dash/fdash.hpp"
#include "satdash/harness/matrix.hpp"
#include "satdash/harness/scenario.hpp"
#include "satdash/harness/simulation.hpp"
#include "satdash/metrics/fairness.hpp"
#include "satdash/metrics/report.hpp"

namespace py = pybind11;
using namespace satdash;

namespace {

harness::Cell make_cell(const std::string& transport, const std::string& algorithm) {
  const auto mode = transport::parse_mode(transport);
  if (!mode) throw py::value_error("unknown transport: " + transport);
  const auto alg = cc::parse_algorithm(algorithm);
  if (!alg) throw py::value_error("unknown congestion controller: " + algorithm);
  return {*mode, *alg};
}

py::dict session_dict(const metrics::SessionMetrics& m) {
  py::dict d;
  d["elapsed_s"] = m.elapsed_s();
  d["playback_s"] = m.playback_s();
  d["interruption_s"] = m.interruption_s();
  d["startup_s"] = m.startup_s();
  d["stall_count"] = m.stall_count;
  d["started"] = m.started;
  d["latency_median_ms"] = m.latency_median_ms;
  d["app_bytes"] = m.app_bytes;
  d["mean_throughput_bps"] = m.mean_throughput_bps;
  d["avg_playback_bitrate_bps"] = m.avg_playback_bitrate_bps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_satdash, m) {
  m.doc() = "DASH over a satellite-backhauled access network";

  py::register_exception<harness::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<metrics::JainUndefined>(m, "JainUndefined", PyExc_ValueError);

  py::class_<harness::ScenarioConfig>(m, "Scenario")
      .def(py::init<>())
      .def_static(
          "from_text",
          [](const std::string& text) {
            std::istringstream in(text);
            return harness::parse_scenario(in, "<python>");
          },
          py::arg("text"))
      .def_static("load", &harness::load_scenario, py::arg("path"))
      .def("to_text", &harness::to_text)
      .def_readwrite("n_users", &harness::ScenarioConfig::n_users)
      .def_readwrite("run_count", &harness::ScenarioConfig::run_count)
      .def_readwrite("base_seed", &harness::ScenarioConfig::base_seed)
      .def("__repr__", [](const harness::ScenarioConfig& c) {
        return "<Scenario n_users=" + std::to_string(c.n_users) + " run_count=" + std::to_string(c.run_count) + ">";
      });

  m.def("jain_index", [](const std::vector<double>& v) { return metrics::jain_index(v); }, py::arg("values"));

  m.def(
      "fdash_decide",
      [](double buffer_s, double delta) { return dash::FdashController{}.decide(buffer_s, delta); },
      py::arg("buffer_s"), py::arg("delta_s_per_s"));

  m.def(
      "select_representation",
      [](const std::vector<double>& ladder, double factor, std::optional<double> estimate) {
        return dash::select_representation(dash::Ladder(ladder), factor, estimate).index;
      },
      py::arg("ladder_bps"), py::arg("factor"), py::arg("estimate_bps") = py::none());

  m.def(
      "run_simulation",
      [](const harness::ScenarioConfig& cfg, const std::string& transport, const std::string& algorithm,
         std::uint64_t seed) {
        harness::SimulationResult r;
        {
          py::gil_scoped_release release;
          r = harness::run_simulation(cfg, make_cell(transport, algorithm), seed);
        }
        py::list users;
        for (std::size_t i = 0; i < r.users.size(); ++i) {
          py::dict d = session_dict(r.users[i]);
          d["playback_log"] = dash::format_log(r.playback_logs[i]);
          users.append(d);
        }
        return users;
      },
      py::arg("scenario"), py::arg("transport") = "tcp", py::arg("cc") = "cubic", py::arg("seed") = 1);

  m.def(
      "summary_json",
      [](const harness::ScenarioConfig& cfg, std::optional<std::vector<std::pair<std::string, std::string>>> cells,
         unsigned workers) {
        std::vector<harness::Cell> list;
        if (cells) {
          for (const auto& [t, a] : *cells) list.push_back(make_cell(t, a));
        } else {
          list = harness::default_matrix();
        }
        std::vector<metrics::CellReport> reports;
        {
          py::gil_scoped_release release;
          reports = harness::run_matrix(cfg, list, {workers});
        }
        return metrics::summary_json(reports);
      },
      py::arg("scenario"), py::arg("cells") = py::none(), py::arg("workers") = 1);
}
