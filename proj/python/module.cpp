#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <vector>

#include "octarm/scenario.hpp"

namespace py = pybind11;
using namespace octarm;

namespace {

std::array<double, 3> to_array(const Vec3& v) {
    return {v.x(), v.y(), v.z()};
}

}  // namespace

PYBIND11_MODULE(pyoctarm, m) {
    m.doc() = "Cosserat-rod muscular hydrostat simulation";
    m.attr("engine_version") = kEngineVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("config_hash", &TrajectoryRecord::config_hash)
        .def_readonly("engine_version", &TrajectoryRecord::engine_version)
        .def_readonly("wall_time_s", &TrajectoryRecord::wall_time_s)
        .def_readonly("max_penetration_ratio",
                      &TrajectoryRecord::max_penetration_ratio)
        .def_readonly("failure_frame", &TrajectoryRecord::failure_frame)
        .def_readonly("final_kinetic_energy",
                      &TrajectoryRecord::final_kinetic_energy)
        .def_readonly("final_elastic_energy",
                      &TrajectoryRecord::final_elastic_energy)
        .def("__len__",
             [](const TrajectoryRecord& r) { return r.frames.size(); })
        .def("times",
             [](const TrajectoryRecord& r) {
                 std::vector<double> t;
                 for (const auto& f : r.frames) t.push_back(f.time);
                 return t;
             })
        .def(
            "node_positions",
            [](const TrajectoryRecord& r, size_t frame, size_t rod) {
                if (frame >= r.frames.size() ||
                    rod >= r.frames[frame].node_positions.size())
                    throw py::index_error("frame or rod out of range");
                std::vector<std::array<double, 3>> out;
                for (const auto& p : r.frames[frame].node_positions[rod])
                    out.push_back(to_array(p));
                return out;
            },
            py::arg("frame"), py::arg("rod"))
        .def("save", [](const TrajectoryRecord& r, const std::string& path) {
            write_trajectory(r, path);
        });

    m.def("load_trajectory", &read_trajectory, py::arg("path"));
    m.def(
        "run_scenario",
        [](const std::string& json_text) {
            ScenarioConfig cfg = parse_scenario(json_text);
            cfg.source_text = scenario_to_json(cfg);
            return run(cfg);
        },
        py::arg("json_text"), "Run a scenario given as a JSON string");
    m.def(
        "rod_census",
        [](const std::string& json_text) {
            ScenarioConfig cfg = parse_scenario(json_text);
            return build_arm(cfg.arm).rods.size();
        },
        py::arg("json_text"), "Number of rods the arm spec instantiates");
    m.def(
        "analyze_knot",
        [](const TrajectoryRecord& rec) {
            std::vector<std::array<double, 5>> out;
            for (const auto& row : analyze_knot(rec))
                out.push_back(
                    {row.time, row.link, row.writhe, row.twist, row.residual});
            return out;
        },
        py::arg("record"), "Rows of (time, link, writhe, twist, residual)");
    m.def(
        "analyze_bend",
        [](const TrajectoryRecord& rec) {
            std::vector<std::array<double, 3>> out;
            for (const auto& row : analyze_bend(rec))
                out.push_back({row.time, row.arc_position, row.velocity});
            return out;
        },
        py::arg("record"), "Rows of (time, arc_position, velocity)");
    m.def("validation_suites", &validation_suite_names);
    m.def(
        "validate",
        [](const std::string& suite, unsigned seed) {
            const ValidationReport report = run_validation_suite(suite, seed);
            std::vector<py::dict> rows;
            for (const auto& row : report.rows) {
                py::dict d;
                d["id"] = row.id;
                d["measured"] = row.measured;
                d["bound"] = row.bound;
                d["pass"] = row.pass;
                rows.push_back(d);
            }
            return rows;
        },
        py::arg("suite"), py::arg("seed") = 0u);
}
