// Scenario configuration, query workload metrics, parameter sweeps and CSV
// emission. A scenario fixes the grid geometry, the mobility envelope, the
// protocol under test and the query workload; `run_scenario` executes one
// seeded simulation and `sweep` aggregates several seeds per axis point.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phls/locsvc.hpp"

namespace phls {

struct ScenarioConfig {
    double area_side = 1000.0;   // m
    double radio_range = 250.0;  // m
    int node_count = 300;
    double v_max = 10.0;         // m/s
    double pause_max = 10.0;     // s
    double duration = 300.0;     // s
    int requests_per_run = 1200;
    int runs = 5;
    Protocol protocol = Protocol::PHLS2;
    double alpha = 0.4;
    ServerMobilityMode server_mobility = ServerMobilityMode::HandOver;
    double cell_side = 125.0;    // m
    std::uint64_t rng_seed = 1;
    double success_radius = 250.0; // m; set very large for "any reply counts"
    double query_deadline = 5.0;   // s

    // Hierarchy depth implied by area_side / cell_side (a power of two).
    int levels() const;
    // Throws InvalidConfig when any invariant fails.
    void validate() const;
};

// Flat key-value text: one `key = value` per line, '#' comments, keys are
// exactly the ScenarioConfig field names. Unknown keys are a hard error.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

std::string protocol_name(Protocol p);
Protocol parse_protocol(const std::string& name);

struct RunMetrics {
    double success_rate = 0.0;       // fraction of queries answered in time and on target
    double avg_location_error = 0.0; // m, over all received replies
    double bandwidth = 0.0;          // bytes / s / node over the measurement window
    double query_hops_mean = 0.0;    // transmissions per issued query
    long drop_noprogress = 0;        // packets dropped at a greedy local maximum
    long drop_deadline = 0;          // packets dropped past their deadline
    long update_packets = 0;
    long handover_packets = 0;
    long replies_received = 0;
    long queries_issued = 0;
    std::uint64_t trace_hash = 0;    // fingerprint of the transmission log
};

RunMetrics run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

enum class SweepAxis { Speed, Density };

struct SweepRow {
    std::string axis_name;
    double axis_value = 0.0;
    std::string protocol;
    int runs = 0;
    double success_rate_mean = 0.0, success_rate_std = 0.0;
    double location_error_mean = 0.0, location_error_std = 0.0;
    double bandwidth_mean = 0.0, bandwidth_std = 0.0;
    double query_hops_mean = 0.0;
    double drop_noprogress_count = 0.0; // mean per run
    double drop_deadline_count = 0.0;   // mean per run
};

struct SweepTable {
    std::vector<SweepRow> rows; // axis ascending, protocol name ascending
};

// Executes cfg.runs seeded simulations per (axis value, protocol) and
// aggregates mean and sample standard deviation. Seeds are derived from
// cfg.rng_seed and the run index only, so every protocol and axis point
// sees the same mobility and workload realizations. jobs > 1 runs the
// simulations on a thread pool; results are identical either way.
SweepTable sweep(const ScenarioConfig& base, SweepAxis axis,
                 const std::vector<Protocol>& protocols, int jobs = 1);

// One scenario repeated over cfg.runs seeds, reported as a single-row table.
SweepTable run_aggregate(const ScenarioConfig& cfg, int jobs = 1);

std::string csv_string(const SweepTable& table);
void emit_csv(const SweepTable& table, const std::string& path);

} // namespace phls
