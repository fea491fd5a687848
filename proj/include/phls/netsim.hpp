// Deterministic discrete-event plumbing: the tie-broken event queue, the
// unit-disk radio, greedy geographic forwarding and per-packet byte/hop
// accounting. The radio is idealized (no collisions, fixed per-hop latency);
// byte counts therefore measure protocol overhead, not channel load.

#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "phls/geometry.hpp"
#include "phls/grid.hpp"

namespace phls {

// Wire sizes, bit-exact for the bandwidth metric: 20 B header plus a 48 B
// location record (position 2x8, velocity 2x8, timestamp 8, region tag 8).
inline constexpr int kHeaderBytes = 20;
inline constexpr int kRecordBytes = 48;
inline constexpr int kPacketBytes = kHeaderBytes + kRecordBytes;

inline constexpr double kDefaultHopLatency = 0.005; // s
inline constexpr double kDefaultRadioRange = 250.0; // m

enum class PacketKind : std::uint8_t { Update, HandOver, Query, QueryDescend, Reply };

struct LocationRecord {
    NodeId subject = -1;
    Vec2 position;      // l_rec
    Vec2 velocity;      // v_rec
    double timestamp = 0.0;
    RegionId region;    // region the record was registered under
};

struct Packet {
    PacketKind kind = PacketKind::Update;
    NodeId origin = -1;
    NodeId requester = -1;
    NodeId subject = -1;
    std::optional<LocationRecord> payload;
    Vec2 dest_position;
    int size = kPacketBytes;
    int hops = 0;
    double deadline = 0.0;
};

// Time-ordered queue; equal timestamps dequeue in insertion order so event
// traces replay identically.
template <typename E>
class EventQueue {
public:
    void push(double time, E event) {
        heap_.push(Entry{time, next_seq_++, std::move(event)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    double next_time() const { return heap_.top().time; }

    std::pair<double, E> pop() {
        Entry e = heap_.top();
        heap_.pop();
        return {e.time, std::move(e.event)};
    }

private:
    struct Entry {
        double time;
        std::uint64_t seq;
        E event;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

// A position snapshot: index = node id, one entry per node.
using PositionSnapshot = std::vector<Vec2>;

// All other nodes within radio range of `node` (unit-disk model).
std::vector<NodeId> neighbors(NodeId node, const PositionSnapshot& snapshot,
                              double radio_range = kDefaultRadioRange);

struct NoProgress {};

// The neighbor strictly closer to dest_position than the current node,
// minimizing the remaining distance; NoProgress at a local maximum.
std::variant<NodeId, NoProgress> greedy_next_hop(NodeId current, Vec2 dest_position,
                                                 const PositionSnapshot& snapshot,
                                                 double radio_range = kDefaultRadioRange);

// Who finally accepts a routed packet: a concrete node, or any node located
// inside a target cell.
struct Recipient {
    enum class Kind { Node, Cell } kind = Kind::Node;
    NodeId node = -1;
    RegionId cell;
};

// True when `node` satisfies the recipient rule (is the addressed node, or
// currently stands inside the addressed cell).
bool recipient_matches(const Recipient& recipient, NodeId node,
                       const PositionSnapshot& snapshot, const GridHierarchy& grid);

enum class DropCause : std::uint8_t { NoProgress, DeadlineExceeded };

struct Delivered {
    NodeId at = -1;
};
struct Dropped {
    DropCause cause = DropCause::NoProgress;
};
using RouteOutcome = std::variant<Delivered, Dropped>;

// One radio transmission, the unit of byte accounting.
struct Transmission {
    double time = 0.0;
    PacketKind kind = PacketKind::Update;
    NodeId from = -1;
    NodeId to = -1;
    int size = 0;
};

// Multi-hop greedy forwarding over a fixed snapshot, used directly by tests
// and as the reference for the event-driven engine (which replays the same
// per-hop rules with moving positions). Every transmission appends to `log`
// and bumps packet.hops; `now` advances by hop_latency per hop.
RouteOutcome route(Packet& packet, NodeId from, const Recipient& recipient,
                   const PositionSnapshot& snapshot, const GridHierarchy& grid,
                   double& now, std::vector<Transmission>& log,
                   double radio_range = kDefaultRadioRange,
                   double hop_latency = kDefaultHopLatency);

// FNV-1a over the transmission log; two runs with equal hashes produced
// byte-identical traces.
std::uint64_t trace_hash(const std::vector<Transmission>& log);

} // namespace phls
