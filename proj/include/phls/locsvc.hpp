// Location-service state and protocol rules shared by the three evaluated
// services:
//
//   HLS    — cell-addressed servers, geocast updates, no prediction
//   PHLS1  — node-addressed servers, unicast updates, raw-velocity prediction
//   PHLS2  — node-addressed servers, unicast updates, moving-average velocity
//
// The pure pieces live here (predictors, server tables, update/handover
// planning); the event-driven treewalk is orchestrated by the simulation
// engine on top of these rules.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "phls/errors.hpp"
#include "phls/geometry.hpp"
#include "phls/grid.hpp"
#include "phls/netsim.hpp"

namespace phls {

enum class Protocol { HLS, PHLS1, PHLS2 };

enum class PredictorScheme { None, Linear, MovingAverage };

struct PredictorConfig {
    PredictorScheme scheme = PredictorScheme::None;
    double alpha = 0.5; // filter gain in [0, 1]
};

enum class ServerMobilityMode { HandOver, Discard };

PredictorScheme scheme_of(Protocol p);
bool cell_addressed(Protocol p);

// --- Predictors -----------------------------------------------------------

// Raw-velocity extrapolation: position + velocity * (t_now - timestamp),
// clamped to the area (an extrapolated point outside the area is impossible
// for the target). Throws NegativeElapsed if t_now precedes the record.
Vec2 predict_linear(const LocationRecord& record, double t_now, const Rect& area);

// Exponential smoothing of the reported velocity: alpha * v_bar_old +
// (1 - alpha) * v_rec. Throws AlphaOutOfRange outside [0, 1].
Vec2 update_avg_velocity(Vec2 v_bar_old, Vec2 v_rec, double alpha);

// Like predict_linear but with the smoothed velocity.
Vec2 predict_avg(const LocationRecord& record, Vec2 v_bar_new, double t_now,
                 const Rect& area);

// --- Server-side record storage -------------------------------------------

struct StoredRecord {
    LocationRecord record;
    Vec2 avg_velocity; // per-subject smoothing state kept at this host
};

// Records a node holds as a location server, keyed by (subject, level).
// A record is replaced only by a newer timestamp; the smoothing state
// survives replacement so the velocity history accumulates.
class ServerTable {
public:
    // Returns true when stored (new key or newer timestamp).
    bool store(const LocationRecord& record);

    StoredRecord* find(NodeId subject, int level);
    const StoredRecord* find(NodeId subject, int level) const;

    void erase(NodeId subject, int level);
    std::size_t size() const { return records_.size(); }

    using Key = std::pair<NodeId, int>;
    const std::map<Key, StoredRecord>& records() const { return records_; }
    std::map<Key, StoredRecord>& records() { return records_; }

private:
    std::map<Key, StoredRecord> records_;
};

// Stored state turned into an answer at reply time. Scheme None returns the
// stored position verbatim; MovingAverage folds the record's velocity into
// the per-subject average first and keeps the new average as state.
Vec2 answer_position(StoredRecord& stored, const PredictorConfig& predictor,
                     double t_now, const Rect& area);

// --- Update / handover planning -------------------------------------------

// Current membership of a region, sorted ascending by id.
using MembershipOracle = std::function<std::vector<NodeId>(const RegionId&)>;

// The responsible cell of a region under the cell-addressed variant: the
// modulo hash applied to the region's cells in row-major order.
RegionId responsible_cell(NodeId subject, const RegionId& region, const GridHierarchy& grid);

struct PlannedUpdate {
    int level = 0;
    RegionId region;      // the region the record registers under
    bool to_cell = false; // geocast to `cell` rather than unicast to `server`
    NodeId server = -1;
    RegionId cell;
    bool dropped = false; // no member to elect; the update is lost
};

// Updates emitted after a move whose highest crossed level is k: one per
// level 0..k, addressed within the node's new regions. A node-addressed
// level with an empty region yields a dropped entry (one way updates get
// lost); cell-addressed updates always launch and fail in routing instead.
std::vector<PlannedUpdate> plan_boundary_updates(NodeId subject, RegionId new_cell,
                                                 int highest_level,
                                                 const GridHierarchy& grid,
                                                 const MembershipOracle& members_of,
                                                 bool to_cells);

struct HandOverAction {
    NodeId subject = -1;
    int level = 0;
    LocationRecord record;
    NodeId new_server = -1; // -1: region empty, record lost
};

struct ServerExitPlan {
    std::vector<HandOverAction> handovers; // HandOver mode only
    std::vector<ServerTable::Key> discard; // keys to erase from the table
};

// True when the holder's copy is the live one for (subject, level) — no
// fresher copy exists anywhere. Superseded copies are not worth forwarding;
// they die with their holder's departure, which keeps per-node storage at
// the steady state of one record per served (subject, level).
using CurrencyOracle = std::function<bool(const ServerTable::Key&, const StoredRecord&)>;

// What a server does with held records after moving to `new_cell`:
// records registered under regions it left (for the cell-addressed variant:
// whose responsible cell it left) are forwarded to a freshly elected member
// (HandOver, live copies only) or deleted (Discard).
ServerExitPlan plan_server_exit(const ServerTable& table, RegionId new_cell,
                                const GridHierarchy& grid,
                                const MembershipOracle& members_of,
                                ServerMobilityMode mode, bool cell_based,
                                const CurrencyOracle& is_current);

} // namespace phls
