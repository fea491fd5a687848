#include "phls/mobility.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace phls {

namespace {

// Move for dt seconds inside the area, reflecting off the walls.
void integrate(Vec2& pos, Vec2& vel, double dt, const Rect& area) {
    const Vec2 lo = area.min;
    const Vec2 hi = area.max();
    while (dt > 0.0) {
        double tx = std::numeric_limits<double>::infinity();
        double ty = std::numeric_limits<double>::infinity();
        if (vel.x > 0.0) tx = (hi.x - pos.x) / vel.x;
        else if (vel.x < 0.0) tx = (lo.x - pos.x) / vel.x;
        if (vel.y > 0.0) ty = (hi.y - pos.y) / vel.y;
        else if (vel.y < 0.0) ty = (lo.y - pos.y) / vel.y;
        const double hit = std::min(tx, ty);
        if (hit >= dt) {
            pos = area.clamp(pos + vel * dt);
            return;
        }
        pos = area.clamp(pos + vel * std::max(hit, 0.0));
        if (tx <= ty) vel.x = -vel.x;
        if (ty <= tx) vel.y = -vel.y;
        dt -= std::max(hit, 0.0);
    }
}

void begin_leg(MotionState& s, const MobilityConfig& cfg, Rng& rng) {
    const double speed = rng.uniform_pos(cfg.v_max);
    const double angle = rng.u01() * 2.0 * std::numbers::pi;
    const double leg = rng.uniform_pos(cfg.leg_time_max);
    s.phase = Phase::Moving;
    s.velocity = {speed * std::cos(angle), speed * std::sin(angle)};
    s.phase_end = s.time + leg;
}

void begin_pause(MotionState& s, const MobilityConfig& cfg, Rng& rng) {
    const double pause = rng.uniform_pos(cfg.pause_max);
    s.phase = Phase::Paused;
    s.velocity = {0.0, 0.0};
    s.phase_end = s.time + pause;
}

} // namespace

MotionState start_moving(Vec2 position, double t, const MobilityConfig& cfg, Rng& rng) {
    MotionState s;
    s.time = t;
    s.position = position;
    begin_leg(s, cfg, rng);
    s.avg_velocity = s.velocity;
    return s;
}

MotionState advance(MotionState state, double to_time, const MobilityConfig& cfg, Rng& rng) {
    while (state.time < to_time) {
        const double segment_end = std::min(state.phase_end, to_time);
        if (state.phase == Phase::Moving)
            integrate(state.position, state.velocity, segment_end - state.time, cfg.area);
        state.time = segment_end;
        if (state.time >= state.phase_end) {
            if (state.phase == Phase::Moving)
                begin_pause(state, cfg, rng);
            else
                begin_leg(state, cfg, rng);
        }
    }
    return state;
}

} // namespace phls
