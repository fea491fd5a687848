#include "phls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "phls/rng.hpp"
#include "phls/simulation.hpp"

namespace phls {

int ScenarioConfig::levels() const {
    if (cell_side <= 0.0 || area_side <= 0.0)
        throw InvalidConfig("levels: sides must be positive");
    const double ratio = area_side / cell_side;
    const int h = static_cast<int>(std::lround(std::log2(ratio)));
    if (h < 1 || std::abs(cell_side * std::ldexp(1.0, h) - area_side) > 1e-6 * area_side)
        throw InvalidConfig("area_side must be cell_side * 2^H with H >= 1");
    return h;
}

void ScenarioConfig::validate() const {
    if (area_side <= 0.0 || radio_range <= 0.0 || cell_side <= 0.0)
        throw InvalidConfig("geometry values must be positive");
    if (node_count < 2)
        throw InvalidConfig("node_count must be at least 2");
    if (v_max <= 0.0)
        throw InvalidConfig("v_max must be positive");
    if (pause_max < 0.0)
        throw InvalidConfig("pause_max must be non-negative");
    if (duration <= 0.0)
        throw InvalidConfig("duration must be positive");
    if (requests_per_run < 1)
        throw InvalidConfig("requests_per_run must be at least 1");
    if (runs < 1)
        throw InvalidConfig("runs must be at least 1");
    if (alpha < 0.0 || alpha > 1.0)
        throw InvalidConfig("alpha must lie in [0, 1]");
    if (success_radius <= 0.0)
        throw InvalidConfig("success_radius must be positive");
    if (query_deadline <= 0.0)
        throw InvalidConfig("query_deadline must be positive");
    if (cell_side * std::sqrt(2.0) > radio_range + 1e-9)
        throw InvalidConfig("cell_side * sqrt(2) must not exceed radio_range");
    (void)levels();
}

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::HLS: return "hls";
        case Protocol::PHLS1: return "phls1";
        case Protocol::PHLS2: return "phls2";
    }
    return "hls";
}

Protocol parse_protocol(const std::string& name) {
    std::string low = name;
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (low == "hls") return Protocol::HLS;
    if (low == "phls1") return Protocol::PHLS1;
    if (low == "phls2") return Protocol::PHLS2;
    throw InvalidConfig("unknown protocol: " + name);
}

namespace {

ServerMobilityMode parse_mobility_mode(const std::string& name) {
    std::string low = name;
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (low == "handover") return ServerMobilityMode::HandOver;
    if (low == "discard") return ServerMobilityMode::Discard;
    throw InvalidConfig("unknown server_mobility: " + name);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("config line " + std::to_string(line_no) +
                                ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw InvalidConfig("config key '" + key + "' has no value");
        try {
            if (key == "area_side") cfg.area_side = std::stod(value);
            else if (key == "radio_range") cfg.radio_range = std::stod(value);
            else if (key == "node_count") cfg.node_count = std::stoi(value);
            else if (key == "v_max") cfg.v_max = std::stod(value);
            else if (key == "pause_max") cfg.pause_max = std::stod(value);
            else if (key == "duration") cfg.duration = std::stod(value);
            else if (key == "requests_per_run") cfg.requests_per_run = std::stoi(value);
            else if (key == "runs") cfg.runs = std::stoi(value);
            else if (key == "protocol") cfg.protocol = parse_protocol(value);
            else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "server_mobility") cfg.server_mobility = parse_mobility_mode(value);
            else if (key == "cell_side") cfg.cell_side = std::stod(value);
            else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
            else if (key == "success_radius") cfg.success_radius = std::stod(value);
            else if (key == "query_deadline") cfg.query_deadline = std::stod(value);
            else throw InvalidConfig("unknown config key: " + key);
        } catch (const std::invalid_argument& e) {
            if (dynamic_cast<const InvalidConfig*>(&e)) throw;
            throw InvalidConfig("config key '" + key + "': bad value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw InvalidConfig("config key '" + key + "': value out of range");
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

RunMetrics run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    Simulation sim(cfg, seed);
    sim.run();
    return sim.metrics();
}

namespace {

struct Aggregate {
    double mean = 0.0;
    double std_dev = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

SweepRow make_row(const std::string& axis_name, double axis_value, Protocol protocol,
                  const std::vector<RunMetrics>& runs) {
    SweepRow row;
    row.axis_name = axis_name;
    row.axis_value = axis_value;
    row.protocol = protocol_name(protocol);
    row.runs = static_cast<int>(runs.size());
    std::vector<double> success, error, bandwidth, hops, noprog, deadline;
    for (const RunMetrics& m : runs) {
        success.push_back(m.success_rate);
        error.push_back(m.avg_location_error);
        bandwidth.push_back(m.bandwidth);
        hops.push_back(m.query_hops_mean);
        noprog.push_back(static_cast<double>(m.drop_noprogress));
        deadline.push_back(static_cast<double>(m.drop_deadline));
    }
    const Aggregate s = aggregate(success);
    const Aggregate e = aggregate(error);
    const Aggregate b = aggregate(bandwidth);
    row.success_rate_mean = s.mean;
    row.success_rate_std = s.std_dev;
    row.location_error_mean = e.mean;
    row.location_error_std = e.std_dev;
    row.bandwidth_mean = b.mean;
    row.bandwidth_std = b.std_dev;
    row.query_hops_mean = aggregate(hops).mean;
    row.drop_noprogress_count = aggregate(noprog).mean;
    row.drop_deadline_count = aggregate(deadline).mean;
    return row;
}

// Fixed job list executed in any order, results keyed by index.
std::vector<RunMetrics> run_jobs(const std::vector<ScenarioConfig>& configs,
                                 const std::vector<std::uint64_t>& seeds, int jobs) {
    std::vector<RunMetrics> results(configs.size());
    if (jobs < 1) jobs = 1;
    const int workers = std::min<int>(jobs, static_cast<int>(configs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i)
            results[i] = run_scenario(configs[i], seeds[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            results[i] = run_scenario(configs[i], seeds[i]);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    return results;
}

} // namespace

SweepTable sweep(const ScenarioConfig& base, SweepAxis axis,
                 const std::vector<Protocol>& protocols, int jobs) {
    base.validate();
    if (protocols.empty())
        throw InvalidConfig("sweep: no protocols given");

    std::vector<double> values;
    std::string axis_name;
    if (axis == SweepAxis::Speed) {
        axis_name = "speed";
        values = {10.0, 20.0, 30.0, 40.0, 50.0};
    } else {
        axis_name = "density";
        values = {100.0, 200.0, 300.0, 400.0};
    }

    std::vector<Protocol> protos = protocols;
    std::sort(protos.begin(), protos.end(), [](Protocol a, Protocol b) {
        return protocol_name(a) < protocol_name(b);
    });
    protos.erase(std::unique(protos.begin(), protos.end()), protos.end());

    std::vector<ScenarioConfig> configs;
    std::vector<std::uint64_t> seeds;
    for (double value : values) {
        for (Protocol p : protos) {
            for (int r = 0; r < base.runs; ++r) {
                ScenarioConfig cfg = base;
                cfg.protocol = p;
                if (axis == SweepAxis::Speed)
                    cfg.v_max = value;
                else
                    cfg.node_count = static_cast<int>(value);
                configs.push_back(cfg);
                // Seeds depend on the run index alone so every protocol and
                // axis point sees the same mobility and workload draws.
                seeds.push_back(derive_seed(base.rng_seed, static_cast<std::uint64_t>(r)));
            }
        }
    }
    const std::vector<RunMetrics> results = run_jobs(configs, seeds, jobs);

    SweepTable table;
    std::size_t i = 0;
    for (double value : values) {
        for (Protocol p : protos) {
            std::vector<RunMetrics> group;
            for (int r = 0; r < base.runs; ++r) group.push_back(results[i++]);
            table.rows.push_back(make_row(axis_name, value, p, group));
        }
    }
    return table;
}

SweepTable run_aggregate(const ScenarioConfig& cfg, int jobs) {
    cfg.validate();
    std::vector<ScenarioConfig> configs(static_cast<std::size_t>(cfg.runs), cfg);
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < cfg.runs; ++r)
        seeds.push_back(derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(r)));
    const std::vector<RunMetrics> results = run_jobs(configs, seeds, jobs);
    SweepTable table;
    table.rows.push_back(make_row("speed", cfg.v_max, cfg.protocol, results));
    return table;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string csv_string(const SweepTable& table) {
    if (table.rows.empty())
        throw EmptyTable("csv: empty table");
    std::string out =
        "axis_name,axis_value,protocol,runs,success_rate_mean,success_rate_std,"
        "location_error_mean_m,location_error_std_m,bandwidth_mean_Bps_per_node,"
        "bandwidth_std,query_hops_mean,drop_noprogress_count,drop_deadline_count\n";
    for (const SweepRow& r : table.rows) {
        out += r.axis_name;
        out += ',';
        out += fmt(r.axis_value);
        out += ',';
        out += r.protocol;
        out += ',';
        out += std::to_string(r.runs);
        out += ',';
        out += fmt(r.success_rate_mean);
        out += ',';
        out += fmt(r.success_rate_std);
        out += ',';
        out += fmt(r.location_error_mean);
        out += ',';
        out += fmt(r.location_error_std);
        out += ',';
        out += fmt(r.bandwidth_mean);
        out += ',';
        out += fmt(r.bandwidth_std);
        out += ',';
        out += fmt(r.query_hops_mean);
        out += ',';
        out += fmt(r.drop_noprogress_count);
        out += ',';
        out += fmt(r.drop_deadline_count);
        out += '\n';
    }
    return out;
}

void emit_csv(const SweepTable& table, const std::string& path) {
    const std::string body = csv_string(table);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open output file: " + path);
    out << body;
    out.flush();
    if (!out)
        throw IoFailure("failed writing output file: " + path);
}

} // namespace phls
