// Command-line front end: seeded single runs, comparative sweeps, the
// closed-form cost model, and config validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "phls/analytic.hpp"
#include "phls/experiment.hpp"

namespace {

std::vector<phls::Protocol> parse_protocol_list(const std::string& csv) {
    std::vector<phls::Protocol> out;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ','))
        if (!token.empty()) out.push_back(phls::parse_protocol(token));
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ','))
        if (!token.empty()) out.push_back(std::stod(token));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int run_analytic(const std::string& n_list, const std::string& v_list, double density,
                 double cell_side, double hop_progress, int base, bool normalized,
                 const std::string& out_path) {
    const std::vector<double> ns = parse_double_list(n_list);
    const std::vector<double> vs = parse_double_list(v_list);
    const double c = phls::analytic::unit_square_constant();

    std::string csv =
        "n,v,h,level,crossing_rate_per_s,expected_hops,hit_probability,"
        "maintenance_hops_per_s,maintenance_closed_form,query_hops,query_closed_form,"
        "storage_records\n";
    for (double n : ns) {
        for (double v : vs) {
            phls::analytic::AnalyticParams p;
            p.node_count = n;
            p.area = n / density;
            p.levels = phls::analytic::depth_for_network(n, density, cell_side);
            p.cell_side = cell_side;
            p.speed = v;
            p.hop_progress = hop_progress;
            p.unit_square_c = c;
            p.level_scale_exponent = base;
            p.normalize_hit_probs = normalized;
            const phls::analytic::CostReport report = phls::analytic::evaluate(p);
            for (const auto& row : report.levels) {
                csv += fmt(n);
                csv += ',';
                csv += fmt(v);
                csv += ',';
                csv += std::to_string(p.levels);
                csv += ',';
                csv += std::to_string(row.level);
                csv += ',';
                csv += fmt(row.crossing_rate);
                csv += ',';
                csv += fmt(row.expected_hops);
                csv += ',';
                csv += fmt(row.hit_probability);
                csv += ',';
                csv += fmt(report.maintenance);
                csv += ',';
                csv += fmt(report.maintenance_closed);
                csv += ',';
                csv += fmt(report.query);
                csv += ',';
                csv += fmt(report.query_closed);
                csv += ',';
                csv += std::to_string(report.storage);
                csv += '\n';
            }
        }
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open " << out_path << "\n";
        return 1;
    }
    out << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical location-service simulator and cost model"};
    app.require_subcommand(1);

    std::string config_path, out_path, axis = "speed", protocols = "hls,phls1,phls2";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 0;

    auto* simulate = app.add_subcommand("simulate", "Run one scenario at a fixed seed");
    simulate->add_option("--config", config_path, "scenario config file")->required();
    simulate->add_option("--seed", seed, "run seed (defaults to rng_seed from the config)")
        ->each([&seed_given](const std::string&) { seed_given = true; });
    simulate->add_option("--out", out_path, "output CSV path")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep speed or density over protocols");
    sweep_cmd->add_option("--config", config_path, "scenario config file")->required();
    sweep_cmd->add_option("--axis", axis, "speed | density")
        ->check(CLI::IsMember({"speed", "density"}));
    sweep_cmd->add_option("--protocols", protocols, "comma list: hls,phls1,phls2");
    sweep_cmd->add_option("--out", out_path, "output CSV path")->required();
    sweep_cmd->add_option("--jobs", jobs, "parallel simulations (0 = hardware)");

    std::string n_list = "100,200,300,400", v_list = "10,20,30,40,50";
    double density = 3e-4, cell_side = 125.0, hop_progress = 200.0;
    int base = 4;
    bool normalized = false;
    auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form cost model sweep");
    analytic_cmd->add_option("--n", n_list, "node counts, comma list");
    analytic_cmd->add_option("--v", v_list, "speeds (m/s), comma list");
    analytic_cmd->add_option("--density", density, "nodes per m^2");
    analytic_cmd->add_option("--cell-side", cell_side, "level-0 side length R (m)");
    analytic_cmd->add_option("--hop-progress", hop_progress, "per-hop progress z (m)");
    analytic_cmd->add_option("--base", base, "per-level distance growth: 4 or 2")
        ->check(CLI::IsMember({2, 4}));
    analytic_cmd->add_flag("--normalized", normalized, "use normalized hit probabilities");
    analytic_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)");

    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("--config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            phls::ScenarioConfig cfg = phls::load_config(config_path);
            cfg.validate();
            if (seed_given) cfg.rng_seed = seed;
            const phls::RunMetrics m = phls::run_scenario(cfg, cfg.rng_seed);
            phls::SweepTable table;
            phls::SweepRow row;
            row.axis_name = "speed";
            row.axis_value = cfg.v_max;
            row.protocol = phls::protocol_name(cfg.protocol);
            row.runs = 1;
            row.success_rate_mean = m.success_rate;
            row.location_error_mean = m.avg_location_error;
            row.bandwidth_mean = m.bandwidth;
            row.query_hops_mean = m.query_hops_mean;
            row.drop_noprogress_count = static_cast<double>(m.drop_noprogress);
            row.drop_deadline_count = static_cast<double>(m.drop_deadline);
            table.rows.push_back(row);
            phls::emit_csv(table, out_path);
            std::cout << "success_rate " << m.success_rate << "  error_m "
                      << m.avg_location_error << "  bandwidth_Bps_per_node " << m.bandwidth
                      << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            phls::ScenarioConfig cfg = phls::load_config(config_path);
            cfg.validate();
            const auto protos = parse_protocol_list(protocols);
            const auto table =
                phls::sweep(cfg, axis == "speed" ? phls::SweepAxis::Speed
                                                 : phls::SweepAxis::Density,
                            protos, jobs == 0
                                ? static_cast<int>(std::thread::hardware_concurrency())
                                : jobs);
            phls::emit_csv(table, out_path);
            std::cout << "wrote " << table.rows.size() << " rows to " << out_path << "\n";
            return 0;
        }
        if (analytic_cmd->parsed())
            return run_analytic(n_list, v_list, density, cell_side, hop_progress, base,
                                normalized, out_path);
        if (validate->parsed()) {
            const phls::ScenarioConfig cfg = phls::load_config(config_path);
            cfg.validate();
            std::cout << "ok: " << cfg.node_count << " nodes, " << cfg.area_side << " m area, "
                      << (1 << cfg.levels()) << "x" << (1 << cfg.levels()) << " cells, H = "
                      << cfg.levels() << ", protocol " << phls::protocol_name(cfg.protocol)
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
