// Modified random-direction mobility: a node picks a speed, a direction and
// a travel time, moves until the time expires (bouncing off the area border
// by specular reflection), pauses, then picks fresh values.

#pragma once

#include "phls/geometry.hpp"
#include "phls/grid.hpp"
#include "phls/rng.hpp"

namespace phls {

enum class Phase { Moving, Paused };

struct MotionState {
    double time = 0.0;          // simulation time the state is valid at
    Vec2 position;
    Vec2 velocity;
    Phase phase = Phase::Moving;
    double phase_end = 0.0;     // time the current leg or pause expires
    Vec2 avg_velocity;          // smoothed velocity state kept per node
};

struct MobilityConfig {
    double v_max = 10.0;        // speed drawn uniformly on (0, v_max]
    double pause_max = 10.0;    // pause drawn uniformly on (0, pause_max]
    double leg_time_max = 30.0; // leg duration drawn uniformly on (0, leg_time_max]
    Rect area;
};

// Fresh moving state at time t: position as given, new speed/direction/leg
// drawn from rng (three draws, in that order).
MotionState start_moving(Vec2 position, double t, const MobilityConfig& cfg, Rng& rng);

// Advance the state to to_time. Piecewise-linear integration; the normal
// velocity component negates on boundary hits, phase transitions draw pause
// and leg parameters from rng. Position stays inside cfg.area.
MotionState advance(MotionState state, double to_time, const MobilityConfig& cfg, Rng& rng);

} // namespace phls
