#include "phls/analytic.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace phls {
namespace analytic {

namespace {

// Adaptive Simpson with explicit stack-free recursion depth guard.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

double mean_chord(double radius) {
    if (radius <= 0.0)
        throw NonPositiveR("mean_chord: radius must be positive");
    return 2.0 * radius / std::numbers::pi;
}

double crossing_rate(int level, double speed, double cell_side) {
    if (cell_side <= 0.0)
        throw NonPositiveR("crossing_rate: cell side must be positive");
    if (level < 0)
        throw LevelOutOfRange("crossing_rate: negative level");
    if (speed < 0.0)
        throw InvalidConfig("crossing_rate: negative speed");
    // 4^-i = 2^-2i is a power of two, so the per-level ratio is exact.
    return std::ldexp(std::numbers::pi * speed / (2.0 * cell_side), -2 * level);
}

double expected_hops(int level, const AnalyticParams& params) {
    if (level < 0)
        throw LevelOutOfRange("expected_hops: negative level");
    if (params.cell_side <= 0.0)
        throw NonPositiveR("expected_hops: cell side must be positive");
    if (params.hop_progress <= 0.0)
        throw InvalidConfig("expected_hops: hop progress must be positive");
    if (params.level_scale_exponent != 2 && params.level_scale_exponent != 4)
        throw InvalidConfig("expected_hops: level scale exponent must be 2 or 4");
    const int shift = params.level_scale_exponent == 4 ? 2 * level : level;
    return std::ldexp(params.cell_side * params.unit_square_c / params.hop_progress, shift);
}

double hit_probability(int level, int levels, bool normalized) {
    if (level < 0 || level > levels)
        throw LevelOutOfRange("hit_probability: level outside [0, H]");
    if (level == 0)
        return std::ldexp(1.0, -2 * levels);
    const int shift = normalized ? levels - level + 1 : levels - level;
    return std::ldexp(3.0, -2 * shift);
}

double maintenance_cost(const AnalyticParams& params) {
    double sum = 0.0;
    for (int i = 0; i <= params.levels; ++i)
        sum += crossing_rate(i, params.speed, params.cell_side) * expected_hops(i, params);
    return sum;
}

double query_cost(const AnalyticParams& params) {
    double sum = 0.0;
    for (int i = 0; i <= params.levels; ++i)
        sum += hit_probability(i, params.levels, params.normalize_hit_probs) *
               expected_hops(i, params);
    return sum;
}

int storage_cost(int levels) {
    if (levels < 0)
        throw LevelOutOfRange("storage_cost: negative level count");
    return levels + 1;
}

double unit_square_constant() {
    // Reduce the 4-D integral over two points to the difference vector
    // (u, w) with triangular density (1-u)(1-w) on the unit square.
    const double tol = 1e-10;
    auto outer = [tol](double u) {
        auto inner = [u](double w) {
            return (1.0 - w) * std::hypot(u, w);
        };
        return 4.0 * (1.0 - u) * integrate(inner, 0.0, 1.0, tol);
    };
    return integrate(outer, 0.0, 1.0, tol);
}

double mean_abs_diff_unit_interval() {
    auto f = [](double u) { return 2.0 * (1.0 - u) * u; };
    return integrate(f, 0.0, 1.0, 1e-10);
}

int depth_for_network(double node_count, double density, double cell_side) {
    if (node_count < 1.0 || density <= 0.0)
        throw InvalidConfig("depth_for_network: need N >= 1 and density > 0");
    if (cell_side <= 0.0)
        throw NonPositiveR("depth_for_network: cell side must be positive");
    const double area = node_count / density;
    const double ratio = std::sqrt(area) / cell_side;
    const int depth = static_cast<int>(std::ceil(std::log2(ratio) - 1e-9));
    return std::max(depth, 1);
}

CostReport evaluate(const AnalyticParams& params) {
    CostReport report;
    report.maintenance = maintenance_cost(params);
    report.maintenance_closed = params.speed * std::numbers::pi * params.unit_square_c *
                                params.levels / (2.0 * params.hop_progress);
    report.query = query_cost(params);
    report.query_closed = std::ldexp(3.0 * params.unit_square_c * params.cell_side /
                                     params.hop_progress, 2 * params.levels);
    report.storage = storage_cost(params.levels);
    for (int i = 0; i <= params.levels; ++i) {
        LevelBreakdown row;
        row.level = i;
        row.crossing_rate = crossing_rate(i, params.speed, params.cell_side);
        row.expected_hops = expected_hops(i, params);
        row.hit_probability = hit_probability(i, params.levels, params.normalize_hit_probs);
        report.levels.push_back(row);
    }
    return report;
}

} // namespace analytic
} // namespace phls
