#include "phls/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phls {

namespace {

constexpr double kNoDeadline = std::numeric_limits<double>::infinity();

GridHierarchy make_grid(const ScenarioConfig& cfg) {
    return GridHierarchy({0.0, 0.0}, cfg.area_side, cfg.cell_side, cfg.levels());
}

int highest_differing_level(RegionId a, RegionId b, int levels) {
    for (int level = levels - 1; level >= 1; --level) {
        if ((a.x >> level) != (b.x >> level) || (a.y >> level) != (b.y >> level))
            return level;
    }
    return 0;
}

} // namespace

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed, EngineTunables tun)
    : cfg_(cfg), tun_(tun), grid_(make_grid(cfg)) {
    cfg_.validate();
    mobility_ = MobilityConfig{cfg_.v_max, cfg_.pause_max, tun_.leg_time_max, grid_.area()};
    predictor_ = PredictorConfig{scheme_of(cfg_.protocol), cfg_.alpha};
    to_cells_ = cell_addressed(cfg_.protocol);
    init_nodes(seed);
    beacon_positions_ = positions_;
    next_beacon_ = tun_.beacon_period;

    Rng workload(derive_seed(seed, 0x9e0f1ed5u));
    workload_.reserve(static_cast<std::size_t>(cfg_.requests_per_run));
    for (int q = 0; q < cfg_.requests_per_run; ++q) {
        PendingQuery p;
        p.at = tun_.warmup + workload.u01() * (cfg_.duration - tun_.warmup);
        p.requester = static_cast<NodeId>(workload.below(static_cast<std::uint64_t>(cfg_.node_count)));
        p.subject = static_cast<NodeId>(workload.below(static_cast<std::uint64_t>(cfg_.node_count - 1)));
        if (p.subject >= p.requester) ++p.subject;
        workload_.push_back(p);
    }
}

Simulation::Simulation(const ScenarioConfig& cfg, const std::vector<Vec2>& positions,
                       EngineTunables tun)
    : cfg_(cfg), tun_(tun), grid_(make_grid(cfg)), scripted_(true) {
    cfg_.node_count = static_cast<int>(positions.size());
    mobility_ = MobilityConfig{cfg_.v_max, cfg_.pause_max, tun_.leg_time_max, grid_.area()};
    predictor_ = PredictorConfig{scheme_of(cfg_.protocol), cfg_.alpha};
    to_cells_ = cell_addressed(cfg_.protocol);
    nodes_.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        Node n{MotionState{}, Rng(derive_seed(cfg_.rng_seed, i)), RegionId{}, {}, {}, {},
               false, true};
        n.motion.position = positions[i];
        n.motion.phase = Phase::Paused;
        n.motion.phase_end = kNoDeadline;
        n.tick_cell = grid_.cell_of(positions[i]);
        n.elected.assign(static_cast<std::size_t>(cfg_.levels()) + 1, -1);
        nodes_.push_back(std::move(n));
        positions_.push_back(positions[i]);
    }
    beacon_positions_ = positions_;
    next_beacon_ = tun_.beacon_period;
}

void Simulation::init_nodes(std::uint64_t seed) {
    nodes_.reserve(static_cast<std::size_t>(cfg_.node_count));
    positions_.reserve(static_cast<std::size_t>(cfg_.node_count));
    for (int i = 0; i < cfg_.node_count; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Vec2 pos{rng.u01() * cfg_.area_side, rng.u01() * cfg_.area_side};
        Node n{start_moving(pos, 0.0, mobility_, rng), rng, grid_.cell_of(pos),
               {}, {}, {}, false, false};
        n.elected.assign(static_cast<std::size_t>(cfg_.levels()) + 1, -1);
        nodes_.push_back(std::move(n));
        positions_.push_back(pos);
    }
}

void Simulation::sync(double now) {
    if (now <= now_) return;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& n = nodes_[i];
        if (!n.frozen) {
            n.motion = advance(n.motion, now, mobility_, n.rng);
            positions_[i] = n.motion.position;
        }
    }
    now_ = now;
    if (now_ >= next_beacon_) {
        beacon_positions_ = positions_;
        next_beacon_ = (std::floor(now_ / tun_.beacon_period) + 1.0) * tun_.beacon_period;
    }
}

std::vector<NodeId> Simulation::members_of(const RegionId& region) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i) {
        if (grid_.region_contains(region, grid_.cell_of(positions_[static_cast<std::size_t>(i)])))
            out.push_back(i);
    }
    return out;
}

std::vector<NodeId> Simulation::beacon_members_of(const RegionId& region) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i) {
        if (grid_.region_contains(
                region, grid_.cell_of(beacon_positions_[static_cast<std::size_t>(i)])))
            out.push_back(i);
    }
    return out;
}

RegionId Simulation::cell_of(NodeId node) const {
    return grid_.cell_of(positions_[static_cast<std::size_t>(node)]);
}

LocationRecord Simulation::current_record(NodeId node) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    LocationRecord rec;
    rec.subject = node;
    rec.position = positions_[static_cast<std::size_t>(node)];
    rec.velocity = predictor_.scheme == PredictorScheme::MovingAverage
                       ? n.motion.avg_velocity
                       : n.motion.velocity;
    rec.timestamp = now_;
    return rec;
}

void Simulation::bill(PacketKind kind, NodeId from, NodeId to, int size) {
    log_.push_back({now_, kind, from, to, size});
}

void Simulation::register_all() {
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i)
        emit_owner_updates(i, grid_.levels());
}

void Simulation::emit_owner_updates(NodeId node, int highest_level) {
    Node& n = nodes_[static_cast<std::size_t>(node)];
    // The average blends the node's distinct past velocities; re-recording
    // the same leg's velocity adds no new information and is not folded in.
    if (!n.folded_any || !(n.motion.velocity == n.folded_velocity)) {
        n.motion.avg_velocity =
            update_avg_velocity(n.motion.avg_velocity, n.motion.velocity, cfg_.alpha);
        n.folded_velocity = n.motion.velocity;
        n.folded_any = true;
    }
    const LocationRecord base = current_record(node);
    const auto oracle = [this](const RegionId& r) { return beacon_members_of(r); };
    const auto targets = plan_boundary_updates(node, cell_of(node), highest_level,
                                               grid_, oracle, to_cells_);
    for (const PlannedUpdate& target : targets) {
        LocationRecord rec = base;
        rec.region = target.region;
        send_update(node, target, rec);
    }
}

void Simulation::send_update(NodeId node, const PlannedUpdate& target,
                             const LocationRecord& record) {
    Node& n = nodes_[static_cast<std::size_t>(node)];
    if (target.dropped) return;
    ++update_packets_;
    if (target.to_cell) {
        // When the sender already stands in the responsible cell the leg
        // resolves on launch and only the local redistribution is billed.
        launch_leg(PacketKind::Update, node,
                   Recipient{Recipient::Kind::Cell, -1, target.cell},
                   grid_.cell_center(target.cell), record, kNoDeadline, -1, false, node, -1);
        return;
    }
    n.elected[static_cast<std::size_t>(target.level)] = target.server;
    if (target.server == node) {
        n.table.store(record); // elected itself; no packet needed
        return;
    }
    launch_leg(PacketKind::Update, node, Recipient{Recipient::Kind::Node, target.server, {}},
               beacon_positions_[static_cast<std::size_t>(target.server)], record,
               kNoDeadline, -1, false, node, -1);
}

void Simulation::handle_tick() {
    const int levels = grid_.levels();
    const auto oracle = [this](const RegionId& r) { return beacon_members_of(r); };
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        const RegionId cell = cell_of(i);
        if (cell == n.tick_cell) continue;
        const int k = highest_differing_level(n.tick_cell, cell, levels);

        // Records this node holds as a server for regions it just left.
        const auto is_current = [this, i](const ServerTable::Key& key,
                                          const StoredRecord& stored) {
            return is_live_copy(i, key, stored);
        };
        const ServerExitPlan plan = plan_server_exit(n.table, cell, grid_, oracle,
                                                     cfg_.server_mobility, to_cells_,
                                                     is_current);
        for (const auto& key : plan.discard)
            n.table.erase(key.first, key.second);
        for (const HandOverAction& act : plan.handovers) {
            if (act.new_server < 0) continue; // region emptied; record lost
            ++handover_packets_;
            launch_leg(PacketKind::HandOver, i,
                       Recipient{Recipient::Kind::Node, act.new_server, {}},
                       beacon_positions_[static_cast<std::size_t>(act.new_server)],
                       act.record, kNoDeadline, -1, false, act.subject, -1);
        }

        // Its own registrations for every level whose region changed.
        emit_owner_updates(i, k);

        // Under Discard no server forwards records, so the owner re-elects
        // servers that have wandered out of the regions they served.
        if (!to_cells_ && cfg_.server_mobility == ServerMobilityMode::Discard) {
            for (int level = k + 1; level <= levels; ++level) {
                const NodeId prior = n.elected[static_cast<std::size_t>(level)];
                if (prior < 0 || prior == i) continue;
                const RegionId region = grid_.region_of(cell, level);
                const RegionId prior_cell = grid_.cell_of(
                    beacon_positions_[static_cast<std::size_t>(prior)]);
                if (grid_.region_contains(region, prior_cell)) continue;
                const auto members = beacon_members_of(region);
                if (members.empty()) continue;
                PlannedUpdate target;
                target.level = level;
                target.region = region;
                target.server = select_server(i, members);
                LocationRecord rec = current_record(i);
                rec.region = region;
                send_update(i, target, rec);
            }
        }
        n.tick_cell = cell;
    }
}

int Simulation::launch_leg(PacketKind kind, NodeId from, const Recipient& to, Vec2 dest,
                           std::optional<LocationRecord> payload, double deadline, int walk,
                           bool critical, NodeId subject, NodeId requester) {
    Leg leg;
    leg.packet.kind = kind;
    leg.packet.origin = from;
    leg.packet.requester = requester;
    leg.packet.subject = subject;
    leg.packet.payload = std::move(payload);
    leg.packet.dest_position = dest;
    leg.packet.deadline = deadline;
    leg.holder = from;
    leg.recipient = to;
    leg.walk = walk;
    leg.critical = critical;
    legs_.push_back(std::move(leg));
    const int index = static_cast<int>(legs_.size()) - 1;

    Leg& l = legs_[static_cast<std::size_t>(index)];
    if (recipient_matches(l.recipient, l.holder, positions_, grid_)) {
        on_leg_delivered(index);
        return index;
    }
    // First transmission happens now; arrival is one latency later.
    forward_one_hop(index);
    return index;
}

// Returns false when the leg ended (dropped) instead of scheduling a hop.
bool Simulation::forward_one_hop(int leg_index) {
    Leg& leg = legs_[static_cast<std::size_t>(leg_index)];
    if (now_ > leg.packet.deadline) {
        on_leg_dropped(leg_index, DropCause::DeadlineExceeded);
        return false;
    }
    NodeId next = -1;
    const Vec2 here = positions_[static_cast<std::size_t>(leg.holder)];
    const double remaining = distance(here, leg.packet.dest_position);
    if (leg.recipient.kind == Recipient::Kind::Node) {
        // Hand straight to the addressee when it is in range and progress
        // is still strictly positive (it may have drifted off the position
        // snapshot the packet is aiming at).
        const NodeId target = leg.recipient.node;
        const Vec2 there = positions_[static_cast<std::size_t>(target)];
        if (distance(here, there) <= cfg_.radio_range &&
            distance(there, leg.packet.dest_position) < remaining)
            next = target;
    }
    if (next < 0) {
        const auto hop = greedy_next_hop(leg.holder, leg.packet.dest_position, positions_,
                                         cfg_.radio_range);
        if (std::holds_alternative<NoProgress>(hop)) {
            on_leg_dropped(leg_index, DropCause::NoProgress);
            return false;
        }
        next = std::get<NodeId>(hop);
    }
    if (distance(positions_[static_cast<std::size_t>(next)], leg.packet.dest_position) >=
        remaining)
        ++greedy_violations_;
    leg.packet.hops += 1;
    bill(leg.packet.kind, leg.holder, next, leg.packet.size);
    if (leg.walk >= 0)
        outcomes_[static_cast<std::size_t>(walks_[static_cast<std::size_t>(leg.walk)].outcome)]
            .walk_transmissions += 1;
    leg.holder = next;
    events_.push(now_ + tun_.hop_latency, HopEvent{leg_index});
    return true;
}

void Simulation::handle_hop(int leg_index) {
    Leg& leg = legs_[static_cast<std::size_t>(leg_index)];
    if (recipient_matches(leg.recipient, leg.holder, positions_, grid_)) {
        on_leg_delivered(leg_index);
        return;
    }
    forward_one_hop(leg_index);
}

void Simulation::on_leg_delivered(int leg_index) {
    Leg& leg = legs_[static_cast<std::size_t>(leg_index)];
    switch (leg.packet.kind) {
        case PacketKind::Update:
            if (leg.recipient.kind == Recipient::Kind::Cell) {
                deliver_geocast(leg.holder, leg_index);
            } else if (leg.packet.payload) {
                nodes_[static_cast<std::size_t>(leg.holder)].table.store(*leg.packet.payload);
            }
            break;
        case PacketKind::HandOver:
            if (leg.packet.payload)
                nodes_[static_cast<std::size_t>(leg.holder)].table.store(*leg.packet.payload);
            break;
        case PacketKind::Query:
        case PacketKind::QueryDescend: {
            const int wi = leg.walk;
            Walk& w = walks_[static_cast<std::size_t>(wi)];
            w.host = leg.holder;
            const Visit visit = *w.in_flight;
            w.in_flight.reset();
            walk_arrived(wi, visit);
            walk_continue(wi);
            break;
        }
        case PacketKind::Reply:
            deliver_reply(leg.walk, leg.packet);
            break;
    }
}

void Simulation::deliver_geocast(NodeId first, int leg_index) {
    Leg& leg = legs_[static_cast<std::size_t>(leg_index)];
    if (!leg.packet.payload) return;
    const auto members = members_of(leg.recipient.cell);
    for (NodeId m : members) {
        nodes_[static_cast<std::size_t>(m)].table.store(*leg.packet.payload);
        if (m != first) {
            // Local redistribution inside the cell; every delivery is billed.
            bill(leg.packet.kind, first, m, leg.packet.size);
            leg.packet.hops += 1;
        }
    }
}

void Simulation::on_leg_dropped(int leg_index, DropCause cause) {
    Leg& leg = legs_[static_cast<std::size_t>(leg_index)];
    if (cause == DropCause::NoProgress)
        ++drop_noprogress_;
    else
        ++drop_deadline_;
    if (leg.walk < 0) return;
    const int wi = leg.walk;
    Walk& w = walks_[static_cast<std::size_t>(wi)];
    if (leg.critical) {
        walk_fail(wi, cause);
        return;
    }
    // A lost fan-out branch only loses its candidates; the walk resumes
    // from the server that spawned it.
    const Visit lost = *w.in_flight;
    w.in_flight.reset();
    push_fallback(wi, lost);
    walk_continue(wi);
}

void Simulation::handle_query_start(int query_index) {
    const PendingQuery& q = workload_[static_cast<std::size_t>(query_index)];
    QueryOutcome outcome;
    outcome.issue_time = now_;
    outcome.requester = q.requester;
    outcome.subject = q.subject;
    outcomes_.push_back(std::move(outcome));

    Walk w;
    w.requester = q.requester;
    w.subject = q.subject;
    w.deadline = now_ + cfg_.query_deadline;
    w.host = q.requester;
    w.outcome = static_cast<int>(outcomes_.size()) - 1;
    w.stack.push_back(Visit{cell_of(q.requester), true, RegionId{}, false});
    walks_.push_back(std::move(w));
    walk_continue(static_cast<int>(walks_.size()) - 1);
}

void Simulation::walk_continue(int walk_index) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    while (!w.done && !w.in_flight) {
        if (now_ > w.deadline) {
            walk_fail(walk_index, DropCause::DeadlineExceeded);
            return;
        }
        if (w.stack.empty()) {
            walk_finish(walk_index);
            return;
        }
        const Visit visit = w.stack.back();
        w.stack.pop_back();

        if (to_cells_) {
            const RegionId target = responsible_cell(w.subject, visit.region, grid_);
            if (cell_of(w.host) == target) {
                walk_arrived(walk_index, visit);
                continue;
            }
            w.in_flight = visit;
            launch_leg(visit.ascend ? PacketKind::Query : PacketKind::QueryDescend, w.host,
                       Recipient{Recipient::Kind::Cell, -1, target}, grid_.cell_center(target),
                       w.best, w.deadline, walk_index, visit.ascend, w.subject, w.requester);
            continue;
        }

        // The server role for (subject, level, region) was fixed by the
        // election at update time and follows handovers; discovery of the
        // current role holder is oracle-resolved. No holder, no packet: the
        // query climbs on directly.
        const NodeId server = find_server(w.subject, visit.region);
        if (server < 0) {
            if (visit.ascend && visit.region.level < grid_.levels()) {
                Visit up;
                up.region = grid_.parent(visit.region);
                up.ascend = true;
                up.came_from = visit.region;
                up.has_origin = true;
                w.stack.push_back(up);
            }
            push_fallback(walk_index, visit);
            continue;
        }
        if (server == w.host) {
            walk_arrived(walk_index, visit);
            continue;
        }
        w.in_flight = visit;
        launch_leg(visit.ascend ? PacketKind::Query : PacketKind::QueryDescend, w.host,
                   Recipient{Recipient::Kind::Node, server, {}},
                   positions_[static_cast<std::size_t>(server)], w.best, w.deadline,
                   walk_index, visit.ascend, w.subject, w.requester);
    }
}

NodeId Simulation::find_server(NodeId subject, const RegionId& region) const {
    // Region-scoped discovery: a holder that wandered out of the region is
    // not reachable as its server until it hands the record back in.
    NodeId best = -1;
    double best_ts = 0.0;
    for (NodeId n = 0; n < static_cast<NodeId>(nodes_.size()); ++n) {
        const StoredRecord* s =
            nodes_[static_cast<std::size_t>(n)].table.find(subject, region.level);
        if (!s || !(s->record.region == region)) continue;
        if (!grid_.region_contains(region, cell_of(n))) continue;
        if (best < 0 || s->record.timestamp > best_ts) {
            best = n;
            best_ts = s->record.timestamp;
        }
    }
    return best;
}

bool Simulation::is_live_copy(NodeId host, const ServerTable::Key& key,
                              const StoredRecord& stored) const {
    for (NodeId n = 0; n < static_cast<NodeId>(nodes_.size()); ++n) {
        if (n == host) continue;
        const StoredRecord* s =
            nodes_[static_cast<std::size_t>(n)].table.find(key.first, key.second);
        if (!s) continue;
        if (s->record.timestamp > stored.record.timestamp) return false;
        if (s->record.timestamp == stored.record.timestamp && n < host) return false;
    }
    return true;
}

void Simulation::expand_visit(int walk_index, const Visit& visit,
                              const std::optional<RegionId>& guided) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    if (!visit.ascend) return;
    if (visit.region.level < grid_.levels()) {
        Visit up;
        up.region = grid_.parent(visit.region);
        up.ascend = true;
        up.came_from = visit.region;
        up.has_origin = true;
        w.stack.push_back(up); // popped after the fan-out below
    }
    // The ascending server fans the request one level down into the sibling
    // branches it covers. A prediction-holding server sends the request into
    // the predicted branch first.
    if (visit.region.level >= 1) {
        const auto kids = grid_.children(visit.region);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            if (visit.has_origin && *it == visit.came_from) continue;
            if (guided && *it == *guided) continue;
            w.stack.push_back(Visit{*it, false, RegionId{}, false, {}});
        }
        if (guided && !(visit.has_origin && *guided == visit.came_from))
            w.stack.push_back(Visit{*guided, false, RegionId{}, false, {}});
    }
}

void Simulation::push_fallback(int walk_index, const Visit& visit) {
    if (visit.fallback.empty()) return;
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    // The predicted branch came up empty; ask the remaining siblings.
    for (auto it = visit.fallback.rbegin(); it != visit.fallback.rend(); ++it)
        w.stack.push_back(Visit{*it, false, RegionId{}, false, {}});
}

void Simulation::walk_arrived(int walk_index, const Visit& visit) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    Node& host = nodes_[static_cast<std::size_t>(w.host)];
    StoredRecord* stored = host.table.find(w.subject, visit.region.level);
    if (stored && !(stored->record.region == visit.region)) stored = nullptr;
    if (!stored && to_cells_) {
        // Cell addressing queries the nodes of the cell, not one node: on a
        // local miss the receiver polls its cell and the freshest copy held
        // by any member answers. Both local transmissions are billed.
        const RegionId cell = cell_of(w.host);
        bill(PacketKind::Query, w.host, -1, kPacketBytes);
        if (w.outcome >= 0)
            outcomes_[static_cast<std::size_t>(w.outcome)].walk_transmissions += 1;
        NodeId holder = -1;
        double best_ts = 0.0;
        for (NodeId m : members_of(cell)) {
            if (m == w.host) continue;
            StoredRecord* s =
                nodes_[static_cast<std::size_t>(m)].table.find(w.subject, visit.region.level);
            if (!s || !(s->record.region == visit.region)) continue;
            if (holder < 0 || s->record.timestamp > best_ts) {
                holder = m;
                best_ts = s->record.timestamp;
            }
        }
        if (holder >= 0) {
            stored = nodes_[static_cast<std::size_t>(holder)].table.find(w.subject,
                                                                         visit.region.level);
            bill(PacketKind::Reply, holder, w.host, kPacketBytes);
            if (w.outcome >= 0)
                outcomes_[static_cast<std::size_t>(w.outcome)].walk_transmissions += 1;
        }
    }
    if (!stored) {
        expand_visit(walk_index, visit, std::nullopt);
        push_fallback(walk_index, visit);
        return;
    }

    outcomes_[static_cast<std::size_t>(w.outcome)]
        .candidate_timestamps.push_back(stored->record.timestamp);
    if (visit.region.level == 0) {
        walk_reply_exact(walk_index, *stored);
        return;
    }
    LocationRecord candidate = stored->record;
    candidate.position = answer_position(*stored, predictor_, now_, grid_.area());
    if (!w.best || candidate.timestamp > w.best->timestamp)
        w.best = candidate;

    // A server holding a record chases the real location downward. With a
    // velocity estimate the request follows the predicted position and asks
    // the remaining branches only if that misses; without one (cell-based
    // storage keeps no usable direction) it has to fan out to every child.
    if (predictor_.scheme == PredictorScheme::None) {
        if (visit.ascend) {
            expand_visit(walk_index, visit, std::nullopt);
        } else {
            const auto kids = grid_.children(visit.region);
            for (auto it = kids.rbegin(); it != kids.rend(); ++it)
                w.stack.push_back(Visit{*it, false, RegionId{}, false, {}});
        }
        return;
    }

    const RegionId guided = grid_.child_toward(visit.region, candidate.position);
    if (visit.ascend) {
        expand_visit(walk_index, visit, guided);
        return;
    }
    Visit down{guided, false, RegionId{}, false, {}};
    for (const RegionId& kid : grid_.children(visit.region))
        if (!(kid == guided)) down.fallback.push_back(kid);
    w.stack.push_back(std::move(down));
}

void Simulation::walk_finish(int walk_index) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    if (w.best) {
        walk_send_reply(walk_index, *w.best);
        return;
    }
    outcomes_[static_cast<std::size_t>(w.outcome)].no_record = true;
    w.done = true;
}

void Simulation::walk_reply_exact(int walk_index, const StoredRecord& stored) {
    // A level-0 record means "here, in my cell": the stored position is
    // returned verbatim, stale or not.
    walk_send_reply(walk_index, stored.record);
}

void Simulation::walk_send_reply(int walk_index, const LocationRecord& record) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    w.stack.clear();
    w.done = true;
    if (w.host == w.requester) {
        Packet p;
        p.kind = PacketKind::Reply;
        p.payload = record;
        deliver_reply(walk_index, p);
        return;
    }
    launch_leg(PacketKind::Reply, w.host, Recipient{Recipient::Kind::Node, w.requester, {}},
               positions_[static_cast<std::size_t>(w.requester)], record, w.deadline,
               walk_index, true, w.subject, w.requester);
}

void Simulation::walk_fail(int walk_index, DropCause cause) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    QueryOutcome& o = outcomes_[static_cast<std::size_t>(w.outcome)];
    if (cause == DropCause::NoProgress)
        o.dropped_noprogress = true;
    else
        o.dropped_deadline = true;
    w.done = true;
    w.stack.clear();
}

void Simulation::deliver_reply(int walk_index, const Packet& packet) {
    Walk& w = walks_[static_cast<std::size_t>(walk_index)];
    QueryOutcome& o = outcomes_[static_cast<std::size_t>(w.outcome)];
    w.done = true;
    o.replied = true;
    o.reply_time = now_;
    o.answer = packet.payload->position;
    o.exact = packet.payload->region.level == 0;
    o.answer_timestamp = packet.payload->timestamp;
    o.error = distance(o.answer, positions_[static_cast<std::size_t>(w.subject)]);
    o.success = o.reply_time <= w.deadline && o.error <= cfg_.success_radius;
}

void Simulation::inject_record(NodeId host, const LocationRecord& record) {
    nodes_[static_cast<std::size_t>(host)].table.store(record);
}

void Simulation::clear_tables() {
    for (Node& n : nodes_) n.table = ServerTable{};
}

void Simulation::schedule_query(NodeId requester, NodeId subject, double at) {
    workload_.push_back({requester, subject, at});
}

void Simulation::run() {
    if (!scripted_) {
        register_all();
        for (double t = tun_.mobility_tick; t <= cfg_.duration; t += tun_.mobility_tick)
            events_.push(t, TickEvent{});
    }
    for (std::size_t q = 0; q < workload_.size(); ++q)
        events_.push(workload_[q].at, QueryEvent{static_cast<int>(q)});

    while (!events_.empty()) {
        auto [time, event] = events_.pop();
        sync(time);
        std::visit(
            [this](auto&& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, TickEvent>)
                    handle_tick();
                else if constexpr (std::is_same_v<T, HopEvent>)
                    handle_hop(e.leg);
                else
                    handle_query_start(e.query);
            },
            event);
    }
}

RunMetrics Simulation::metrics() const {
    RunMetrics m;
    m.queries_issued = static_cast<long>(outcomes_.size());
    long successes = 0;
    long replied = 0;
    double error_sum = 0.0;
    double hops_sum = 0.0;
    for (const QueryOutcome& o : outcomes_) {
        if (o.success) ++successes;
        if (o.replied) {
            ++replied;
            error_sum += o.error;
        }
        hops_sum += o.walk_transmissions;
    }
    m.success_rate = outcomes_.empty() ? 0.0 : static_cast<double>(successes) /
                                               static_cast<double>(outcomes_.size());
    m.avg_location_error = replied == 0 ? 0.0 : error_sum / static_cast<double>(replied);
    m.replies_received = replied;
    m.query_hops_mean = outcomes_.empty() ? 0.0 : hops_sum / static_cast<double>(outcomes_.size());

    double bytes = 0.0;
    for (const Transmission& t : log_) {
        if (t.time >= tun_.warmup && t.time <= cfg_.duration)
            bytes += t.size;
    }
    m.bandwidth = bytes / (cfg_.duration * static_cast<double>(cfg_.node_count));
    m.drop_noprogress = drop_noprogress_;
    m.drop_deadline = drop_deadline_;
    m.update_packets = update_packets_;
    m.handover_packets = handover_packets_;
    m.trace_hash = trace_hash(log_);
    return m;
}

} // namespace phls
