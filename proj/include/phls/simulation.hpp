// Event-driven scenario engine. Single-threaded and fully deterministic:
// node motion is a pure function of the per-node random stream, packets are
// forwarded hop by hop with a fixed latency, and every radio transmission
// lands in the transmission log that the metrics are computed from.
//
// Query resolution walks the region hierarchy: the query ascends through the
// requester's chain of regions, each ascending server fans the request down
// into the sibling branches it covers, a level-0 record terminates the walk
// with an exact answer, and otherwise the freshest record seen anywhere is
// returned as a prediction.

#pragma once

#include <optional>
#include <vector>

#include "phls/experiment.hpp"
#include "phls/grid.hpp"
#include "phls/locsvc.hpp"
#include "phls/mobility.hpp"
#include "phls/netsim.hpp"

namespace phls {

// Engine knobs that are not part of the scenario surface.
struct EngineTunables {
    double hop_latency = 0.005;  // s per radio hop
    double warmup = 10.0;        // s excluded from queries and byte accounting
    double mobility_tick = 0.25; // s between boundary-crossing checks
    double leg_time_max = 24.0;  // s, mobility leg duration cap
    // Positions and memberships used to pick packet targets refresh on this
    // period, like a beacon table. The faster nodes move, the more often an
    // election lands on a node that has just left the region.
    double beacon_period = 1.4;
};

struct QueryOutcome {
    double issue_time = 0.0;
    NodeId requester = -1;
    NodeId subject = -1;
    bool replied = false;
    double reply_time = 0.0;
    Vec2 answer;
    bool exact = false;
    double answer_timestamp = 0.0;
    double error = 0.0; // |answer - subject's true position| at reply arrival
    bool success = false;
    bool no_record = false; // walk completed without finding any record
    bool dropped_noprogress = false;
    bool dropped_deadline = false;
    int walk_transmissions = 0;
    std::vector<double> candidate_timestamps; // every record the walk saw
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, std::uint64_t seed, EngineTunables tun = {});

    // Nodes pinned at the given positions, never moving; no workload is
    // generated. Drive with inject_record / schedule_query, then run().
    Simulation(const ScenarioConfig& cfg, const std::vector<Vec2>& positions,
               EngineTunables tun = {});

    void run();

    const std::vector<Transmission>& transmissions() const { return log_; }
    const std::vector<QueryOutcome>& queries() const { return outcomes_; }
    RunMetrics metrics() const;

    // Forwarding steps that failed to strictly reduce the distance to the
    // packet's destination. Zero by construction of the hop rule; kept as a
    // runtime guard on the greedy invariant.
    long greedy_violations() const { return greedy_violations_; }

    // Scripted-scenario hooks.
    void inject_record(NodeId host, const LocationRecord& record);
    void clear_tables();
    void schedule_query(NodeId requester, NodeId subject, double at);
    Vec2 position_of(NodeId node) const { return positions_[static_cast<std::size_t>(node)]; }

private:
    struct Node {
        MotionState motion;
        Rng rng;
        RegionId tick_cell;
        ServerTable table;
        std::vector<NodeId> elected; // last update target per level (-1: none)
        Vec2 folded_velocity;        // last velocity mixed into the average
        bool folded_any = false;
        bool frozen = false;         // scripted mode: never moves
    };

    struct Visit {
        RegionId region;
        bool ascend = false;
        RegionId came_from;     // previous chain region (ascend visits, level >= 1)
        bool has_origin = false;
        // Sibling regions to try when a prediction-guided descent misses.
        std::vector<RegionId> fallback;
    };

    struct Walk {
        NodeId requester = -1;
        NodeId subject = -1;
        double deadline = 0.0;
        NodeId host = -1;
        std::vector<Visit> stack;
        std::optional<Visit> in_flight; // visit whose leg is on the air
        std::optional<LocationRecord> best; // position pre-predicted
        bool done = false;
        int outcome = -1;
    };

    struct Leg {
        Packet packet;
        NodeId holder = -1;
        Recipient recipient;
        int walk = -1;      // owning walk, -1 for update/handover traffic
        bool critical = false; // drop kills the walk (ascend chain, reply)
    };

    struct TickEvent {};
    struct HopEvent { int leg; };
    struct QueryEvent { int query; };
    using Event = std::variant<TickEvent, HopEvent, QueryEvent>;

    void init_nodes(std::uint64_t seed);
    void sync(double now);
    std::vector<NodeId> members_of(const RegionId& region) const;
    std::vector<NodeId> beacon_members_of(const RegionId& region) const;
    NodeId find_server(NodeId subject, const RegionId& region) const;
    bool is_live_copy(NodeId host, const ServerTable::Key& key,
                      const StoredRecord& stored) const;
    RegionId cell_of(NodeId node) const;

    void register_all();
    void handle_tick();
    void emit_owner_updates(NodeId node, int highest_level);
    void send_update(NodeId node, const PlannedUpdate& target, const LocationRecord& record);
    void deliver_geocast(NodeId first, int leg_index);
    void handle_hop(int leg_index);
    void handle_query_start(int query_index);

    int launch_leg(PacketKind kind, NodeId from, const Recipient& to, Vec2 dest,
                   std::optional<LocationRecord> payload, double deadline, int walk,
                   bool critical, NodeId subject, NodeId requester);
    bool forward_one_hop(int leg_index);
    void on_leg_delivered(int leg_index);
    void on_leg_dropped(int leg_index, DropCause cause);

    void walk_continue(int walk_index);
    void expand_visit(int walk_index, const Visit& visit,
                      const std::optional<RegionId>& guided);
    void push_fallback(int walk_index, const Visit& visit);
    void walk_arrived(int walk_index, const Visit& visit);
    void walk_finish(int walk_index);
    void walk_reply_exact(int walk_index, const StoredRecord& stored);
    void walk_send_reply(int walk_index, const LocationRecord& record);
    void walk_fail(int walk_index, DropCause cause);
    void deliver_reply(int walk_index, const Packet& packet);

    LocationRecord current_record(NodeId node) const;
    void bill(PacketKind kind, NodeId from, NodeId to, int size);

    ScenarioConfig cfg_;
    EngineTunables tun_;
    GridHierarchy grid_;
    MobilityConfig mobility_;
    PredictorConfig predictor_;
    bool to_cells_ = false;

    std::vector<Node> nodes_;
    PositionSnapshot positions_;
    PositionSnapshot beacon_positions_; // last advertised positions
    double next_beacon_ = 0.0;
    double now_ = 0.0;
    EventQueue<Event> events_;
    std::vector<Leg> legs_;
    std::vector<Walk> walks_;
    std::vector<Transmission> log_;
    std::vector<QueryOutcome> outcomes_;

    struct PendingQuery { NodeId requester, subject; double at; };
    std::vector<PendingQuery> workload_;

    long drop_noprogress_ = 0;
    long drop_deadline_ = 0;
    long update_packets_ = 0;
    long handover_packets_ = 0;
    long greedy_violations_ = 0;
    bool scripted_ = false;
};

} // namespace phls
