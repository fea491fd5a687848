// Python bindings for the main operations: grid geometry, the predictors,
// the closed-form cost model, and seeded simulation runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phls/analytic.hpp"
#include "phls/experiment.hpp"
#include "phls/grid.hpp"
#include "phls/locsvc.hpp"

namespace py = pybind11;
using namespace phls;

namespace {

ScenarioConfig config_from_kwargs(const py::kwargs& kwargs) {
    ScenarioConfig cfg;
    for (const auto& item : kwargs) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "area_side") cfg.area_side = py::cast<double>(item.second);
        else if (key == "radio_range") cfg.radio_range = py::cast<double>(item.second);
        else if (key == "node_count") cfg.node_count = py::cast<int>(item.second);
        else if (key == "v_max") cfg.v_max = py::cast<double>(item.second);
        else if (key == "pause_max") cfg.pause_max = py::cast<double>(item.second);
        else if (key == "duration") cfg.duration = py::cast<double>(item.second);
        else if (key == "requests_per_run") cfg.requests_per_run = py::cast<int>(item.second);
        else if (key == "runs") cfg.runs = py::cast<int>(item.second);
        else if (key == "protocol") cfg.protocol = parse_protocol(py::cast<std::string>(item.second));
        else if (key == "alpha") cfg.alpha = py::cast<double>(item.second);
        else if (key == "server_mobility")
            cfg.server_mobility = py::cast<std::string>(item.second) == "discard"
                                      ? ServerMobilityMode::Discard
                                      : ServerMobilityMode::HandOver;
        else if (key == "cell_side") cfg.cell_side = py::cast<double>(item.second);
        else if (key == "rng_seed") cfg.rng_seed = py::cast<std::uint64_t>(item.second);
        else if (key == "success_radius") cfg.success_radius = py::cast<double>(item.second);
        else if (key == "query_deadline") cfg.query_deadline = py::cast<double>(item.second);
        else throw InvalidConfig("unknown config key: " + key);
    }
    return cfg;
}

py::dict metrics_dict(const RunMetrics& m) {
    py::dict d;
    d["success_rate"] = m.success_rate;
    d["avg_location_error"] = m.avg_location_error;
    d["bandwidth"] = m.bandwidth;
    d["query_hops_mean"] = m.query_hops_mean;
    d["drop_noprogress"] = m.drop_noprogress;
    d["drop_deadline"] = m.drop_deadline;
    d["update_packets"] = m.update_packets;
    d["handover_packets"] = m.handover_packets;
    d["replies_received"] = m.replies_received;
    d["queries_issued"] = m.queries_issued;
    d["trace_hash"] = m.trace_hash;
    return d;
}

py::dict row_dict(const SweepRow& r) {
    py::dict d;
    d["axis_name"] = r.axis_name;
    d["axis_value"] = r.axis_value;
    d["protocol"] = r.protocol;
    d["runs"] = r.runs;
    d["success_rate_mean"] = r.success_rate_mean;
    d["success_rate_std"] = r.success_rate_std;
    d["location_error_mean_m"] = r.location_error_mean;
    d["location_error_std_m"] = r.location_error_std;
    d["bandwidth_mean_Bps_per_node"] = r.bandwidth_mean;
    d["bandwidth_std"] = r.bandwidth_std;
    d["query_hops_mean"] = r.query_hops_mean;
    d["drop_noprogress_count"] = r.drop_noprogress_count;
    d["drop_deadline_count"] = r.drop_deadline_count;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hierarchical location-service simulator and cost model";

    py::class_<RegionId>(m, "RegionId")
        .def(py::init<>())
        .def_readwrite("level", &RegionId::level)
        .def_readwrite("x", &RegionId::x)
        .def_readwrite("y", &RegionId::y)
        .def("__eq__", [](const RegionId& a, const RegionId& b) { return a == b; })
        .def("__repr__", [](const RegionId& r) {
            return "RegionId(level=" + std::to_string(r.level) + ", x=" + std::to_string(r.x) +
                   ", y=" + std::to_string(r.y) + ")";
        });

    py::class_<GridHierarchy>(m, "GridHierarchy")
        .def(py::init([](double side, double cell, int levels) {
                 return GridHierarchy({0.0, 0.0}, side, cell, levels);
             }),
             py::arg("side_length"), py::arg("cell_side"), py::arg("levels"))
        .def_property_readonly("levels", &GridHierarchy::levels)
        .def_property_readonly("cells_per_side", &GridHierarchy::cells_per_side)
        .def("cell_of",
             [](const GridHierarchy& g, double x, double y) { return g.cell_of({x, y}); },
             py::arg("x"), py::arg("y"))
        .def("region_of", &GridHierarchy::region_of, py::arg("cell"), py::arg("level"))
        .def("highest_crossed_level",
             [](const GridHierarchy& g, std::pair<double, double> a,
                std::pair<double, double> b) -> py::object {
                 const auto k = g.highest_crossed_level({a.first, a.second},
                                                        {b.first, b.second});
                 return k ? py::cast(*k) : py::none();
             },
             py::arg("p_old"), py::arg("p_new"));

    m.def("select_server",
          [](NodeId target, const std::vector<NodeId>& members) {
              return select_server(target, members);
          },
          py::arg("target_id"), py::arg("members"),
          "Modulo-hash election over members sorted ascending by id");

    m.def("predict_linear",
          [](std::pair<double, double> position, std::pair<double, double> velocity,
             double timestamp, double t_now, double area_side) {
              LocationRecord rec;
              rec.position = {position.first, position.second};
              rec.velocity = {velocity.first, velocity.second};
              rec.timestamp = timestamp;
              const Vec2 p = predict_linear(rec, t_now,
                                            Rect{{0.0, 0.0}, {area_side, area_side}});
              return std::make_pair(p.x, p.y);
          },
          py::arg("position"), py::arg("velocity"), py::arg("timestamp"), py::arg("t_now"),
          py::arg("area_side") = 1000.0);

    m.def("update_avg_velocity",
          [](std::pair<double, double> v_bar_old, std::pair<double, double> v_rec,
             double alpha) {
              const Vec2 v = update_avg_velocity({v_bar_old.first, v_bar_old.second},
                                                 {v_rec.first, v_rec.second}, alpha);
              return std::make_pair(v.x, v.y);
          },
          py::arg("v_bar_old"), py::arg("v_rec"), py::arg("alpha"));

    m.def("predict_avg",
          [](std::pair<double, double> position, std::pair<double, double> v_bar_new,
             double timestamp, double t_now, double area_side) {
              LocationRecord rec;
              rec.position = {position.first, position.second};
              rec.timestamp = timestamp;
              const Vec2 p = predict_avg(rec, {v_bar_new.first, v_bar_new.second}, t_now,
                                         Rect{{0.0, 0.0}, {area_side, area_side}});
              return std::make_pair(p.x, p.y);
          },
          py::arg("position"), py::arg("v_bar_new"), py::arg("timestamp"), py::arg("t_now"),
          py::arg("area_side") = 1000.0);

    auto an = m.def_submodule("analytic", "Closed-form scalability model");
    an.def("mean_chord", &analytic::mean_chord, py::arg("radius"));
    an.def("crossing_rate", &analytic::crossing_rate, py::arg("level"), py::arg("speed"),
           py::arg("cell_side"));
    an.def("hit_probability", &analytic::hit_probability, py::arg("level"), py::arg("levels"),
           py::arg("normalized") = false);
    an.def("storage_cost", &analytic::storage_cost, py::arg("levels"));
    an.def("unit_square_constant", &analytic::unit_square_constant);
    an.def("depth_for_network", &analytic::depth_for_network, py::arg("node_count"),
           py::arg("density"), py::arg("cell_side") = 125.0);
    an.def("costs",
           [](double node_count, double density, double speed, double cell_side,
              double hop_progress, int base, bool normalized) {
               analytic::AnalyticParams p;
               p.node_count = node_count;
               p.area = node_count / density;
               p.levels = analytic::depth_for_network(node_count, density, cell_side);
               p.cell_side = cell_side;
               p.speed = speed;
               p.hop_progress = hop_progress;
               p.unit_square_c = analytic::unit_square_constant();
               p.level_scale_exponent = base;
               p.normalize_hit_probs = normalized;
               const analytic::CostReport r = analytic::evaluate(p);
               py::dict d;
               d["levels"] = p.levels;
               d["maintenance_hops_per_s"] = r.maintenance;
               d["maintenance_closed_form"] = r.maintenance_closed;
               d["query_hops"] = r.query;
               d["query_closed_form"] = r.query_closed;
               d["storage_records"] = r.storage;
               return d;
           },
           py::arg("node_count"), py::arg("density") = 3e-4, py::arg("speed") = 10.0,
           py::arg("cell_side") = 125.0, py::arg("hop_progress") = 200.0, py::arg("base") = 4,
           py::arg("normalized") = false);

    m.def("run_scenario",
          [](std::uint64_t seed, const py::kwargs& kwargs) {
              ScenarioConfig cfg = config_from_kwargs(kwargs);
              cfg.validate();
              return metrics_dict(run_scenario(cfg, seed));
          },
          py::arg("seed") = 1, "Run one seeded scenario; scenario fields as keyword args");

    m.def("sweep",
          [](const std::string& axis, const std::vector<std::string>& protocols, int jobs,
             const py::kwargs& kwargs) {
              ScenarioConfig cfg = config_from_kwargs(kwargs);
              std::vector<Protocol> protos;
              for (const std::string& p : protocols) protos.push_back(parse_protocol(p));
              const SweepTable table =
                  sweep(cfg, axis == "density" ? SweepAxis::Density : SweepAxis::Speed,
                        protos, jobs);
              py::list rows;
              for (const SweepRow& r : table.rows) rows.append(row_dict(r));
              return rows;
          },
          py::arg("axis") = "speed",
          py::arg("protocols") = std::vector<std::string>{"hls", "phls1", "phls2"},
          py::arg("jobs") = 1, "Aggregate sweep; scenario fields as keyword args");

    m.attr("__version__") = "0.1.0";
}
