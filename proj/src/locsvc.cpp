#include "phls/locsvc.hpp"

#include <algorithm>

namespace phls {

PredictorScheme scheme_of(Protocol p) {
    switch (p) {
        case Protocol::HLS: return PredictorScheme::None;
        case Protocol::PHLS1: return PredictorScheme::Linear;
        case Protocol::PHLS2: return PredictorScheme::MovingAverage;
    }
    return PredictorScheme::None;
}

bool cell_addressed(Protocol p) { return p == Protocol::HLS; }

Vec2 predict_linear(const LocationRecord& record, double t_now, const Rect& area) {
    if (t_now < record.timestamp)
        throw NegativeElapsed("predict_linear: t_now precedes the record");
    const double dt = t_now - record.timestamp;
    return area.clamp(record.position + record.velocity * dt);
}

Vec2 update_avg_velocity(Vec2 v_bar_old, Vec2 v_rec, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw AlphaOutOfRange("update_avg_velocity: alpha outside [0, 1]");
    return v_bar_old * alpha + v_rec * (1.0 - alpha);
}

Vec2 predict_avg(const LocationRecord& record, Vec2 v_bar_new, double t_now,
                 const Rect& area) {
    if (t_now < record.timestamp)
        throw NegativeElapsed("predict_avg: t_now precedes the record");
    const double dt = t_now - record.timestamp;
    return area.clamp(record.position + v_bar_new * dt);
}

bool ServerTable::store(const LocationRecord& record) {
    const Key key{record.subject, record.region.level};
    auto it = records_.find(key);
    if (it == records_.end()) {
        records_.emplace(key, StoredRecord{record, record.velocity});
        return true;
    }
    if (record.timestamp <= it->second.record.timestamp)
        return false;
    it->second.record = record; // smoothing state is kept across replacement
    return true;
}

StoredRecord* ServerTable::find(NodeId subject, int level) {
    auto it = records_.find(Key{subject, level});
    return it == records_.end() ? nullptr : &it->second;
}

const StoredRecord* ServerTable::find(NodeId subject, int level) const {
    auto it = records_.find(Key{subject, level});
    return it == records_.end() ? nullptr : &it->second;
}

void ServerTable::erase(NodeId subject, int level) {
    records_.erase(Key{subject, level});
}

Vec2 answer_position(StoredRecord& stored, const PredictorConfig& predictor,
                     double t_now, const Rect& area) {
    switch (predictor.scheme) {
        case PredictorScheme::None:
            return stored.record.position;
        case PredictorScheme::Linear:
            return predict_linear(stored.record, t_now, area);
        case PredictorScheme::MovingAverage: {
            const Vec2 v_bar = update_avg_velocity(stored.avg_velocity,
                                                   stored.record.velocity,
                                                   predictor.alpha);
            stored.avg_velocity = v_bar; // the new average becomes the old one
            return predict_avg(stored.record, v_bar, t_now, area);
        }
    }
    return stored.record.position;
}

RegionId responsible_cell(NodeId subject, const RegionId& region, const GridHierarchy& grid) {
    const auto cells = grid.cells_of(region);
    const std::size_t index = static_cast<std::size_t>(subject) % cells.size();
    return cells[index];
}

std::vector<PlannedUpdate> plan_boundary_updates(NodeId subject, RegionId new_cell,
                                                 int highest_level,
                                                 const GridHierarchy& grid,
                                                 const MembershipOracle& members_of,
                                                 bool to_cells) {
    std::vector<PlannedUpdate> out;
    out.reserve(static_cast<std::size_t>(highest_level) + 1);
    for (int level = 0; level <= highest_level; ++level) {
        PlannedUpdate u;
        u.level = level;
        u.region = grid.region_of(new_cell, level);
        if (to_cells) {
            u.to_cell = true;
            u.cell = responsible_cell(subject, u.region, grid);
        } else {
            const auto members = members_of(u.region);
            if (members.empty())
                u.dropped = true;
            else
                u.server = select_server(subject, members);
        }
        out.push_back(u);
    }
    return out;
}

ServerExitPlan plan_server_exit(const ServerTable& table, RegionId new_cell,
                                const GridHierarchy& grid,
                                const MembershipOracle& members_of,
                                ServerMobilityMode mode, bool cell_based,
                                const CurrencyOracle& is_current) {
    ServerExitPlan plan;
    for (const auto& [key, stored] : table.records()) {
        const RegionId& region = stored.record.region;
        // The anchor a record must stay inside: its region, or for the
        // cell-addressed variant the responsible cell queries will visit.
        const RegionId anchor =
            cell_based ? responsible_cell(key.first, region, grid) : region;
        if (cell_based ? (anchor == new_cell) : grid.region_contains(anchor, new_cell))
            continue;
        plan.discard.push_back(key);
        if (mode == ServerMobilityMode::HandOver && is_current(key, stored)) {
            HandOverAction act;
            act.subject = key.first;
            act.level = key.second;
            act.record = stored.record;
            const auto members = members_of(anchor);
            act.new_server = members.empty() ? -1 : select_server(key.first, members);
            plan.handovers.push_back(act);
        }
    }
    return plan;
}

} // namespace phls
