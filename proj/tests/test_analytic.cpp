#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "phls/analytic.hpp"
#include "phls/rng.hpp"

using namespace phls;
using namespace phls::analytic;

namespace {

AnalyticParams table_params() {
    AnalyticParams p;
    p.cell_side = 125.0;
    p.speed = 10.0;
    p.hop_progress = 200.0;
    p.unit_square_c = 0.5214;
    p.levels = 3;
    p.level_scale_exponent = 4;
    p.normalize_hit_probs = false;
    return p;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("mean_chord is 2R/pi") {
    CHECK(mean_chord(125.0) == doctest::Approx(79.5775).epsilon(1e-4));
    CHECK(mean_chord(std::numbers::pi / 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mean_chord(0.0), NonPositiveR);
}

TEST_CASE("mean_chord agrees with a Monte Carlo chord model") {
    // Chord through a circle entered at uniform angle theta: R * cos(theta).
    Rng rng(314);
    const double radius = 125.0;
    double sum = 0.0;
    const int samples = 1000000;
    for (int i = 0; i < samples; ++i)
        sum += radius * std::cos(rng.u01() * std::numbers::pi / 2.0);
    const double mc = sum / samples;
    CHECK(mean_chord(radius) == doctest::Approx(mc).epsilon(1e-3));
}

TEST_CASE("crossing_rate values and geometric decay") {
    CHECK(crossing_rate(0, 10.0, 125.0) == doctest::Approx(0.12566).epsilon(1e-4));
    CHECK(crossing_rate(1, 20.0, 125.0) == doctest::Approx(0.06283).epsilon(1e-4));
    CHECK(crossing_rate(2, 0.0, 125.0) == 0.0);
    for (int i = 0; i < 10; ++i)
        CHECK(crossing_rate(i + 1, 17.0, 125.0) / crossing_rate(i, 17.0, 125.0) == 0.25);
    CHECK_THROWS_AS(crossing_rate(0, 10.0, 0.0), NonPositiveR);
}

TEST_CASE("expected_hops scales by the selected base") {
    AnalyticParams p = table_params();
    CHECK(expected_hops(0, p) == doctest::Approx(0.325875));
    CHECK(expected_hops(1, p) == doctest::Approx(4.0 * 0.325875));
    p.level_scale_exponent = 2;
    CHECK(expected_hops(1, p) == doctest::Approx(2.0 * 0.325875));
}

TEST_CASE("hit_probability raw values reproduce the printed table") {
    // H = 2: P0 = 1/16, P1 = 3/4, P2 = 3; the sum is 4 - 3/16, not 1.
    CHECK(hit_probability(0, 2, false) == 0.0625);
    CHECK(hit_probability(1, 2, false) == 0.75);
    CHECK(hit_probability(2, 2, false) == 3.0);
    double sum = 0.0;
    for (int i = 0; i <= 2; ++i) sum += hit_probability(i, 2, false);
    CHECK(sum == doctest::Approx(3.8125));
    CHECK(hit_probability(0, 3, false) == doctest::Approx(1.0 / 64.0));
    CHECK_THROWS_AS(hit_probability(3, 2, false), LevelOutOfRange);
    CHECK_THROWS_AS(hit_probability(-1, 2, false), LevelOutOfRange);
}

TEST_CASE("hit_probability normalized values form a distribution") {
    CHECK(hit_probability(0, 2, true) == 0.0625);
    CHECK(hit_probability(1, 2, true) == doctest::Approx(3.0 / 16.0));
    CHECK(hit_probability(2, 2, true) == 0.75);
    for (int h = 1; h <= 10; ++h) {
        double sum = 0.0;
        for (int i = 0; i <= h; ++i) sum += hit_probability(i, h, true);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("normalized hit probabilities match exhaustive cell-pair counting") {
    // Ordered pairs of cells on the 2^H x 2^H grid: count pairs whose lowest
    // common level is i, compare as exact integers.
    for (int h = 1; h <= 5; ++h) {
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
            // P_i = count / total; the formula gives 1/4^H (i = 0) or
            // 3/4^(H-i+1). Cross-multiply to compare exactly.
            const long long num = i == 0 ? 1 : 3;
            const long long den = 1LL << (2 * (i == 0 ? h : h - i + 1));
            CHECK(count[static_cast<std::size_t>(i)] * den == num * total);
            CHECK(hit_probability(i, h, true) ==
                  static_cast<double>(count[static_cast<std::size_t>(i)]) /
                      static_cast<double>(total));
        }
    }
}

TEST_CASE("maintenance_cost sums to (H+1) equal terms under base 4") {
    const AnalyticParams p = table_params();
    const double term = crossing_rate(0, p.speed, p.cell_side) * expected_hops(0, p);
    CHECK(term == doctest::Approx(0.040952).epsilon(1e-4));
    CHECK(maintenance_cost(p) == doctest::Approx(4.0 * term));
    CHECK(maintenance_cost(p) == doctest::Approx(0.16381).epsilon(1e-4));

    // The printed closed form carries H where the direct sum carries H+1.
    const CostReport report = evaluate(p);
    CHECK(report.maintenance_closed == doctest::Approx(0.122856).epsilon(1e-4));
    CHECK(report.maintenance / report.maintenance_closed ==
          doctest::Approx((p.levels + 1.0) / p.levels));

    AnalyticParams still = p;
    still.speed = 0.0;
    CHECK(maintenance_cost(still) == 0.0);
}

TEST_CASE("maintenance_cost is exactly linear in speed") {
    AnalyticParams p = table_params();
    const double base = maintenance_cost(p);
    for (double scale : {2.0, 3.0, 7.5, 64.0}) {
        AnalyticParams q = p;
        q.speed = p.speed * scale;
        const double rel = std::abs(maintenance_cost(q) - scale * base) / (scale * base);
        CHECK(rel < 1e-12);
    }
}

TEST_CASE("query_cost direct sums") {
    AnalyticParams p = table_params();
    p.levels = 1;
    // Independent summation oracle.
    double expected = 0.0;
    for (int i = 0; i <= 1; ++i)
        expected += hit_probability(i, 1, false) * expected_hops(i, p);
    CHECK(query_cost(p) == expected);
    CHECK(query_cost(p) == doctest::Approx(3.9920).epsilon(1e-3));

    AnalyticParams n = table_params();
    n.levels = 2;
    n.level_scale_exponent = 2;
    n.normalize_hit_probs = true;
    double sum = 0.0;
    for (int i = 0; i <= 2; ++i)
        sum += hit_probability(i, 2, true) * expected_hops(i, n);
    CHECK(query_cost(n) == sum);
    // Dominated by the top term, 0.75 * 4 * E(n_0).
    CHECK(0.75 * expected_hops(2, n) == doctest::Approx(0.9777).epsilon(1e-3));

    AnalyticParams degenerate = table_params();
    degenerate.levels = 0;
    CHECK(query_cost(degenerate) == expected_hops(0, degenerate));
}

TEST_CASE("storage_cost is H + 1 exactly") {
    CHECK(storage_cost(3) == 4);
    CHECK(storage_cost(0) == 1);
    CHECK(storage_cost(10) == 11);
    for (int h = 0; h <= 10; ++h) CHECK(storage_cost(h) == h + 1);
    CHECK_THROWS_AS(storage_cost(-1), LevelOutOfRange);
}

TEST_CASE("unit square constant by quadrature") {
    const double closed_form = (2.0 + std::sqrt(2.0) + 5.0 * std::asinh(1.0)) / 15.0;
    const double c = unit_square_constant();
    CHECK(c == doctest::Approx(closed_form).epsilon(1e-8));
    CHECK(c == doctest::Approx(0.5214).epsilon(1e-3));
}

TEST_CASE("unit square constant agrees with a Monte Carlo oracle") {
    Rng rng(777);
    const int samples = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double dx = rng.u01() - rng.u01();
        const double dy = rng.u01() - rng.u01();
        const double d = std::hypot(dx, dy);
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / samples;
    const double variance = (sumsq / samples - mean * mean) / samples;
    const double sigma = std::sqrt(variance);
    CHECK(std::abs(unit_square_constant() - mean) < 3.0 * sigma + 1e-9);
}

TEST_CASE("1-D quadrature kernel: mean |x1 - x2| on the unit interval") {
    CHECK(mean_abs_diff_unit_interval() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("depth_for_network") {
    CHECK(depth_for_network(300, 3e-4, 125.0) == 3);
    CHECK(depth_for_network(1200, 3e-4, 125.0) == 4); // 4x nodes -> H + 1
    CHECK(depth_for_network(390625, 1.0, 125.0) == 3); // sqrt(A)/R = 5 rounds up
    CHECK(depth_for_network(1, 1.0, 125.0) == 1);
    CHECK_THROWS_AS(depth_for_network(0, 1.0, 125.0), InvalidConfig);
}

TEST_CASE("scaling orders: printed reading is linear, corrected one is sqrt") {
    const double density = 3e-4;
    std::vector<double> log_n, log_q_raw4, log_q_norm2, log_m;
    for (double n = 100.0; n <= 100000.0; n *= 1.2) {
        AnalyticParams p = table_params();
        p.node_count = n;
        p.area = n / density;
        p.levels = depth_for_network(n, density, p.cell_side);

        p.level_scale_exponent = 4;
        p.normalize_hit_probs = false;
        const double q_raw = query_cost(p);

        p.level_scale_exponent = 2;
        p.normalize_hit_probs = true;
        const double q_norm = query_cost(p);
        const double m = maintenance_cost(p);

        log_n.push_back(std::log10(n));
        log_q_raw4.push_back(std::log10(q_raw));
        log_q_norm2.push_back(std::log10(q_norm));
        log_m.push_back(std::log10(m));
    }
    CHECK(slope(log_n, log_q_raw4) == doctest::Approx(1.0).epsilon(0.1));
    const double s = slope(log_n, log_q_norm2);
    CHECK(s > 0.45);
    CHECK(s < 0.55);
    const double sm = slope(log_n, log_m);
    CHECK(sm >= 0.0);
    CHECK(sm < 0.2);
}

TEST_CASE("evaluate fills the per-level breakdown") {
    const CostReport r = evaluate(table_params());
    REQUIRE(r.levels.size() == 4);
    CHECK(r.storage == 4);
    for (const LevelBreakdown& row : r.levels) {
        CHECK(row.crossing_rate >= 0.0);
        CHECK(row.expected_hops > 0.0);
        CHECK(row.hit_probability > 0.0);
    }
    CHECK(r.levels[1].crossing_rate == 0.25 * r.levels[0].crossing_rate);
}
