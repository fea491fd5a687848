// Closed-form scalability model: maintenance, query and storage costs of a
// hierarchical location service, with the supporting per-level quantities.
//
// The direct sums over levels are the authoritative outputs. The source
// formulas contain two internal inconsistencies, so both readings are kept
// selectable and reported side by side:
//   - per-level packet distance growth: 4^i (as printed) or 2^i (the side
//     length of a quadtree region doubles per level) -> level_scale_exponent
//   - the printed hit probabilities do not sum to one (the top term is 3);
//     the normalized variant 3/4^(H-i+1) matches an exhaustive count over
//     cell pairs and sums to one -> normalize_hit_probs

#pragma once

#include <vector>

#include "phls/errors.hpp"

namespace phls {
namespace analytic {

struct AnalyticParams {
    double area = 1e6;        // A, m^2
    double node_count = 300;  // N
    int levels = 3;           // H
    double cell_side = 125.0; // R, m
    double speed = 10.0;      // v, m/s
    double hop_progress = 200.0; // z, m
    double unit_square_c = 0.5214054331647207; // c
    int level_scale_exponent = 4;    // 2 or 4
    bool normalize_hit_probs = false;
};

struct LevelBreakdown {
    int level = 0;
    double crossing_rate = 0.0; // rho_i, 1/s
    double expected_hops = 0.0; // E(n_i)
    double hit_probability = 0.0; // P_i under the selected mode
};

struct CostReport {
    double maintenance = 0.0;        // hops/s, direct sum
    double maintenance_closed = 0.0; // v*pi*c*H/(2z) for comparison
    double query = 0.0;              // hops/query, direct sum
    double query_closed = 0.0;       // 3*4^H*c*R/z for comparison
    int storage = 0;                 // records, H+1 exactly
    std::vector<LevelBreakdown> levels;
};

// Mean distance travelled through a circle of radius R entered at a uniform
// angle: 2R/pi.
double mean_chord(double radius);

// Boundary crossing rate of a level-i region: 4^-i * pi*v / (2R).
double crossing_rate(int level, double speed, double cell_side);

// Expected forwarding hops for a level-i packet: base^i * R * c / z.
double expected_hops(int level, const AnalyticParams& params);

// Probability that a query is satisfied at level i. Raw mode reproduces the
// printed values (1/4^H at i=0, 3/4^(H-i) above); normalized mode returns
// 3/4^(H-i+1) above level 0 and sums to one.
double hit_probability(int level, int levels, bool normalized);

// Direct sums over levels 0..H.
double maintenance_cost(const AnalyticParams& params);
double query_cost(const AnalyticParams& params);

int storage_cost(int levels);

// Mean distance between two uniform points in the unit square, evaluated by
// adaptive 2-D quadrature on the triangular-density reduction of the 4-D
// integral. Deterministic, accurate to well under 1e-6.
double unit_square_constant();

// 1-D analogue of the quadrature kernel: mean |x1 - x2| on [0,1] = 1/3.
double mean_abs_diff_unit_interval();

// Hierarchy depth for a network of N nodes at the given density keeping the
// cell side fixed: A = N/density, H = ceil(log2(sqrt(A)/R)), at least 1.
int depth_for_network(double node_count, double density, double cell_side);

CostReport evaluate(const AnalyticParams& params);

} // namespace analytic
} // namespace phls
