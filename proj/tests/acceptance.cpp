// Acceptance suite: reproduces the headline comparative trends and the
// closed-form checks end to end, one pass/fail line per criterion.
//
// The sweeps run the default scenario (1000 m area, 300 nodes, 250 m range,
// 1200 requests over 300 s) across protocols and seeds, so the whole suite
// takes a few minutes of CPU.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phls/analytic.hpp"
#include "phls/experiment.hpp"
#include "phls/locsvc.hpp"
#include "phls/rng.hpp"
#include "phls/simulation.hpp"

using namespace phls;

namespace {

int job_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

double pooled_std(double a, double b) { return std::sqrt(0.5 * (a * a + b * b)); }

struct Series {
    std::vector<double> mean;
    std::vector<double> std_dev;
};

// Rows for one protocol, ordered by axis value.
Series series(const SweepTable& table, const std::string& protocol, bool success) {
    Series s;
    for (const SweepRow& row : table.rows) {
        if (row.protocol != protocol) continue;
        s.mean.push_back(success ? row.success_rate_mean : row.location_error_mean);
        s.std_dev.push_back(success ? row.success_rate_std : row.location_error_std);
    }
    return s;
}

std::vector<double> bandwidth_series(const SweepTable& table, const std::string& protocol) {
    std::vector<double> out;
    for (const SweepRow& row : table.rows)
        if (row.protocol == protocol) out.push_back(row.bandwidth_mean);
    return out;
}

// Non-increasing allowing one inversion no larger than the pooled std of the
// two samples involved.
bool non_increasing_with_tolerance(const Series& s, std::string& why) {
    int inversions = 0;
    for (std::size_t i = 1; i < s.mean.size(); ++i) {
        if (s.mean[i] <= s.mean[i - 1]) continue;
        ++inversions;
        const double rise = s.mean[i] - s.mean[i - 1];
        const double tol = pooled_std(s.std_dev[i], s.std_dev[i - 1]);
        if (inversions > 1 || rise > tol) {
            std::ostringstream msg;
            msg << "rise " << rise << " at index " << i << " (tol " << tol << ", inversion "
                << inversions << ")";
            why = msg.str();
            return false;
        }
    }
    return true;
}

bool strictly_increasing(const std::vector<double>& v, std::string& why) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] <= v[i - 1]) {
            std::ostringstream msg;
            msg << "no increase at index " << i << " (" << v[i - 1] << " -> " << v[i] << ")";
            why = msg.str();
            return false;
        }
    }
    return true;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Suite {
    int failures = 0;
    void check(int number, const std::string& name, bool ok, const std::string& detail) {
        std::printf("%s  %2d. %-28s %s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

} // namespace

int main() {
    Suite suite;
    const int jobs = job_count();

    // Shared speed sweep for the first three criteria: the reference
    // scenario, five seeds per (speed, protocol).
    ScenarioConfig base;
    const auto sweep_start = std::chrono::steady_clock::now();
    const SweepTable speed_table =
        sweep(base, SweepAxis::Speed, {Protocol::HLS, Protocol::PHLS1, Protocol::PHLS2}, jobs);
    const double sweep_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count();

    const Series s_hls = series(speed_table, "hls", true);
    const Series s_p1 = series(speed_table, "phls1", true);
    const Series s_p2 = series(speed_table, "phls2", true);

    // 1. Query success vs. speed.
    {
        bool ok = true;
        std::ostringstream detail;
        std::string why;
        for (const auto* s : {&s_hls, &s_p1, &s_p2}) {
            if (!non_increasing_with_tolerance(*s, why)) {
                ok = false;
                detail << "monotonicity: " << why << "; ";
            }
        }
        for (std::size_t i = 0; i < s_hls.mean.size(); ++i) {
            if (!(s_p2.mean[i] >= s_p1.mean[i] && s_p1.mean[i] >= s_hls.mean[i])) {
                ok = false;
                detail << "ordering broken at speed index " << i << "; ";
            }
        }
        // Speeds 30, 40, 50 are indices 2..4.
        for (std::size_t i = 2; i < s_hls.mean.size(); ++i) {
            const double gap = s_p2.mean[i] - s_hls.mean[i];
            const double tol = pooled_std(s_p2.std_dev[i], s_hls.std_dev[i]);
            if (!(gap > tol)) {
                ok = false;
                detail << "gap " << gap << " <= pooled std " << tol << " at index " << i
                       << "; ";
            }
        }
        if (sweep_seconds > 600.0) {
            ok = false;
            detail << "sweep took " << sweep_seconds << " s; ";
        }
        if (ok) {
            detail << "hls " << s_hls.mean.front() << "->" << s_hls.mean.back() << ", phls2 "
                   << s_p2.mean.front() << "->" << s_p2.mean.back() << ", sweep "
                   << static_cast<int>(sweep_seconds) << " s";
        }
        suite.check(1, "success rate vs speed", ok, detail.str());
    }

    // 2. Location error vs. speed.
    {
        const Series e_hls = series(speed_table, "hls", false);
        const Series e_p1 = series(speed_table, "phls1", false);
        const Series e_p2 = series(speed_table, "phls2", false);
        bool ok = true;
        std::ostringstream detail;
        std::string why;
        for (const auto* e : {&e_hls, &e_p1, &e_p2}) {
            if (!strictly_increasing(e->mean, why)) {
                ok = false;
                detail << "monotonicity: " << why << "; ";
            }
        }
        // Speeds >= 20 are indices 1..4.
        for (std::size_t i = 1; i < e_hls.mean.size(); ++i) {
            if (!(e_p2.mean[i] < e_p1.mean[i] && e_p1.mean[i] < e_hls.mean[i])) {
                ok = false;
                detail << "ordering broken at speed index " << i << "; ";
            }
        }
        if (ok) {
            detail << "hls " << e_hls.mean.front() << "->" << e_hls.mean.back()
                   << " m, phls2 " << e_p2.mean.front() << "->" << e_p2.mean.back() << " m";
        }
        suite.check(2, "location error vs speed", ok, detail.str());
    }

    // 3. Bandwidth vs. speed.
    {
        const auto b_hls = bandwidth_series(speed_table, "hls");
        const auto b_p1 = bandwidth_series(speed_table, "phls1");
        const auto b_p2 = bandwidth_series(speed_table, "phls2");
        bool ok = true;
        std::ostringstream detail;
        std::string why;
        for (const auto* b : {&b_hls, &b_p1, &b_p2}) {
            if (!strictly_increasing(*b, why)) {
                ok = false;
                detail << "monotonicity: " << why << "; ";
            }
        }
        for (std::size_t i = 0; i < b_hls.size(); ++i) {
            if (!(b_p1[i] <= b_hls[i] && b_p2[i] <= b_hls[i])) {
                ok = false;
                detail << "unicast variant costlier at index " << i << "; ";
            }
        }
        const double gap10 = b_hls.front() - 0.5 * (b_p1.front() + b_p2.front());
        const double gap50 = b_hls.back() - 0.5 * (b_p1.back() + b_p2.back());
        if (!(gap50 > gap10)) {
            ok = false;
            detail << "gap did not grow (" << gap10 << " -> " << gap50 << "); ";
        }
        if (ok) {
            detail << "hls " << b_hls.front() << "->" << b_hls.back() << " B/s/node, gap "
                   << gap10 << "->" << gap50;
        }
        suite.check(3, "bandwidth vs speed", ok, detail.str());
    }

    // 4. Success vs. density at 10 m/s. Ten seeds per point: the curves
    // approach saturation where five-seed means still wobble.
    {
        ScenarioConfig dens = base;
        dens.v_max = 10.0;
        dens.runs = 10;
        const SweepTable table = sweep(
            dens, SweepAxis::Density, {Protocol::HLS, Protocol::PHLS1, Protocol::PHLS2},
            jobs);
        const Series d_hls = series(table, "hls", true);
        const Series d_p1 = series(table, "phls1", true);
        const Series d_p2 = series(table, "phls2", true);
        bool ok = true;
        std::ostringstream detail;
        for (const auto* s : {&d_hls, &d_p1, &d_p2}) {
            for (std::size_t i = 1; i < s->mean.size(); ++i) {
                if (s->mean[i] < s->mean[i - 1]) {
                    ok = false;
                    detail << "decrease at density index " << i << " (" << s->mean[i - 1]
                           << " -> " << s->mean[i] << "); ";
                }
            }
        }
        for (std::size_t i = 0; i < d_hls.mean.size(); ++i) {
            if (!(d_p1.mean[i] > d_hls.mean[i] && d_p2.mean[i] > d_hls.mean[i])) {
                ok = false;
                detail << "hls not below at density index " << i << "; ";
            }
        }
        if (ok) {
            detail << "hls " << d_hls.mean.front() << "->" << d_hls.mean.back() << ", phls1 "
                   << d_p1.mean.front() << "->" << d_p1.mean.back();
        }
        suite.check(4, "success rate vs density", ok, detail.str());
    }

    // 5. Exact analytic identities.
    {
        bool ok = true;
        std::ostringstream detail;
        for (int h = 0; h <= 10; ++h)
            if (analytic::storage_cost(h) != h + 1) ok = false;
        for (int i = 0; i < 12; ++i)
            if (analytic::crossing_rate(i + 1, 23.7, 125.0) /
                    analytic::crossing_rate(i, 23.7, 125.0) !=
                0.25)
                ok = false;
        analytic::AnalyticParams p;
        const double m1 = analytic::maintenance_cost(p);
        for (double scale : {2.0, 3.0, 7.5, 11.0, 64.0}) {
            analytic::AnalyticParams q = p;
            q.speed = p.speed * scale;
            const double rel =
                std::abs(analytic::maintenance_cost(q) - scale * m1) / (scale * m1);
            if (!(rel < 1e-12)) {
                ok = false;
                detail << "maintenance deviation " << rel << " at scale " << scale << "; ";
            }
        }
        if (ok) detail << "storage H+1, crossing ratio 1/4, maintenance linear in v";
        suite.check(5, "exact analytic checks", ok, detail.str());
    }

    // 6. Unit-square constant against a 1e7-sample Monte Carlo oracle.
    {
        const double c = analytic::unit_square_constant();
        Rng rng(20240229);
        const long samples = 10000000;
        double sum = 0.0;
        for (long i = 0; i < samples; ++i) {
            const double dx = rng.u01() - rng.u01();
            const double dy = rng.u01() - rng.u01();
            sum += std::hypot(dx, dy);
        }
        const double mc = sum / static_cast<double>(samples);
        const double kernel = analytic::mean_abs_diff_unit_interval();
        const bool ok = std::abs(c - mc) < 1e-3 && std::abs(kernel - 1.0 / 3.0) < 1e-6;
        std::ostringstream detail;
        detail << "quadrature " << c << ", monte carlo " << mc << ", 1-D kernel " << kernel;
        suite.check(6, "unit-square mean distance", ok, detail.str());
    }

    // 7. Hit probabilities: exhaustive cell-pair counting for the normalized
    // variant, and the printed values including the defective sum 4 - 3/4^H.
    {
        bool ok = true;
        std::ostringstream detail;
        for (int h = 1; h <= 3; ++h) {
            const int side = 1 << h;
            const long long cells = static_cast<long long>(side) * side;
            std::vector<long long> count(static_cast<std::size_t>(h) + 1, 0);
            for (int ax = 0; ax < side; ++ax)
                for (int ay = 0; ay < side; ++ay)
                    for (int bx = 0; bx < side; ++bx)
                        for (int by = 0; by < side; ++by) {
                            int level = 0;
                            while ((ax >> level) != (bx >> level) ||
                                   (ay >> level) != (by >> level))
                                ++level;
                            ++count[static_cast<std::size_t>(level)];
                        }
            const long long total = cells * cells;
            for (int i = 0; i <= h; ++i) {
                const long long num = i == 0 ? 1 : 3;
                const int shift = 2 * (i == 0 ? h : h - i + 1);
                if (count[static_cast<std::size_t>(i)] * (1LL << shift) != num * total) {
                    ok = false;
                    detail << "count mismatch H=" << h << " i=" << i << "; ";
                }
                const double exact =
                    static_cast<double>(count[static_cast<std::size_t>(i)]) /
                    static_cast<double>(total);
                if (analytic::hit_probability(i, h, true) != exact) {
                    ok = false;
                    detail << "normalized value mismatch H=" << h << " i=" << i << "; ";
                }
            }
            double sum = 0.0;
            for (int i = 0; i <= h; ++i) {
                const double expected =
                    i == 0 ? std::ldexp(1.0, -2 * h) : std::ldexp(3.0, -2 * (h - i));
                if (analytic::hit_probability(i, h, false) != expected) {
                    ok = false;
                    detail << "raw value mismatch H=" << h << " i=" << i << "; ";
                }
                sum += analytic::hit_probability(i, h, false);
            }
            if (sum != 4.0 - std::ldexp(3.0, -2 * h)) {
                ok = false;
                detail << "raw sum mismatch H=" << h << "; ";
            }
        }
        if (ok) detail << "H in {1,2,3} exact; raw sum = 4 - 3/4^H as printed";
        suite.check(7, "hit-probability brute force", ok, detail.str());
    }

    // 8. Scaling orders under the corrected reading (side doubles per level,
    // normalized hit probabilities).
    {
        const double density = 3e-4;
        std::vector<double> log_n, log_q, log_m;
        for (double n = 100.0; n <= 100000.0; n *= 1.2) {
            analytic::AnalyticParams p;
            p.node_count = n;
            p.area = n / density;
            p.levels = analytic::depth_for_network(n, density, p.cell_side);
            p.level_scale_exponent = 2;
            p.normalize_hit_probs = true;
            log_n.push_back(std::log10(n));
            log_q.push_back(std::log10(analytic::query_cost(p)));
            log_m.push_back(std::log10(analytic::maintenance_cost(p)));
        }
        const double qs = slope(log_n, log_q);
        const double ms = slope(log_n, log_m);
        const bool ok = qs >= 0.45 && qs <= 0.55 && ms >= 0.0 && ms < 0.2;
        std::ostringstream detail;
        detail << "query slope " << qs << ", maintenance slope " << ms;
        suite.check(8, "scaling orders", ok, detail.str());
    }

    // 9. Determinism and conservation.
    {
        ScenarioConfig cfg;
        cfg.node_count = 120;
        cfg.duration = 80.0;
        cfg.requests_per_run = 300;
        cfg.v_max = 30.0;
        cfg.runs = 2;
        bool ok = true;
        std::ostringstream detail;

        const std::string once = csv_string(run_aggregate(cfg, jobs));
        const std::string twice = csv_string(run_aggregate(cfg, 1));
        if (once != twice) {
            ok = false;
            detail << "repeated execution differs; ";
        }
        const auto serial = sweep(cfg, SweepAxis::Speed, {Protocol::PHLS1, Protocol::HLS}, 1);
        const auto parallel =
            sweep(cfg, SweepAxis::Speed, {Protocol::PHLS1, Protocol::HLS}, 4);
        if (csv_string(serial) != csv_string(parallel)) {
            ok = false;
            detail << "parallel sweep differs from serial; ";
        }

        Simulation sim(cfg, 99);
        sim.run();
        const RunMetrics m = sim.metrics();
        const EngineTunables tun;
        double bytes = 0.0;
        for (const Transmission& t : sim.transmissions())
            if (t.time >= tun.warmup && t.time <= cfg.duration) bytes += t.size;
        if (m.bandwidth != bytes / (cfg.duration * cfg.node_count)) {
            ok = false;
            detail << "bandwidth not recomputable; ";
        }
        if (sim.greedy_violations() != 0) {
            ok = false;
            detail << sim.greedy_violations() << " non-monotone forwarding steps; ";
        }
        if (ok)
            detail << "csv byte-identical, bandwidth recomputed exactly, greedy monotone";
        suite.check(9, "determinism and conservation", ok, detail.str());
    }

    // 10. Predictor unit behavior.
    {
        const Rect area{{0.0, 0.0}, {1000.0, 1000.0}};
        Rng rng(55);
        bool ok = true;
        std::ostringstream detail;
        for (int i = 0; i < 1000; ++i) {
            LocationRecord rec;
            rec.subject = 1;
            rec.position = {rng.u01() * 1000.0, rng.u01() * 1000.0};
            rec.velocity = {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
            rec.timestamp = rng.u01() * 100.0;
            const double t = rec.timestamp + rng.u01() * 60.0;
            const Vec2 v_bar = update_avg_velocity({rng.u01(), rng.u01()}, rec.velocity, 0.0);
            if (!(predict_avg(rec, v_bar, t, area) == predict_linear(rec, t, area))) {
                ok = false;
                detail << "alpha=0 equivalence failed; ";
                break;
            }
            if (!(predict_linear(rec, rec.timestamp, area) == rec.position)) {
                ok = false;
                detail << "zero-elapsed identity failed; ";
                break;
            }
        }
        if (!(update_avg_velocity({2, 2}, {4, 0}, 0.0) == Vec2{4, 0})) ok = false;
        if (!(update_avg_velocity({2, 2}, {4, 0}, 1.0) == Vec2{2, 2})) ok = false;
        if (ok) detail << "1000 randomized records, exact";
        suite.check(10, "predictor unit suite", ok, detail.str());
    }

    std::printf("%s: %d of 10 criteria failed\n", suite.failures == 0 ? "OK" : "FAILURES",
                suite.failures);
    return suite.failures == 0 ? 0 : 1;
}
