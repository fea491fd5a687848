#include "phls/netsim.hpp"

#include <cstring>

#include "phls/errors.hpp"

namespace phls {

std::vector<NodeId> neighbors(NodeId node, const PositionSnapshot& snapshot,
                              double radio_range) {
    if (node < 0 || static_cast<std::size_t>(node) >= snapshot.size())
        throw UnknownNode("neighbors: node not in snapshot");
    std::vector<NodeId> out;
    const Vec2 here = snapshot[static_cast<std::size_t>(node)];
    for (NodeId other = 0; other < static_cast<NodeId>(snapshot.size()); ++other) {
        if (other == node) continue;
        if (distance(here, snapshot[static_cast<std::size_t>(other)]) <= radio_range)
            out.push_back(other);
    }
    return out;
}

std::variant<NodeId, NoProgress> greedy_next_hop(NodeId current, Vec2 dest_position,
                                                 const PositionSnapshot& snapshot,
                                                 double radio_range) {
    if (current < 0 || static_cast<std::size_t>(current) >= snapshot.size())
        throw UnknownNode("greedy_next_hop: node not in snapshot");
    const Vec2 here = snapshot[static_cast<std::size_t>(current)];
    const double here_to_dest = distance(here, dest_position);
    NodeId best = -1;
    double best_remaining = here_to_dest;
    for (NodeId other = 0; other < static_cast<NodeId>(snapshot.size()); ++other) {
        if (other == current) continue;
        const Vec2 there = snapshot[static_cast<std::size_t>(other)];
        if (distance(here, there) > radio_range) continue;
        const double remaining = distance(there, dest_position);
        if (remaining < best_remaining) {
            best_remaining = remaining;
            best = other;
        }
    }
    if (best < 0) return NoProgress{};
    return best;
}

bool recipient_matches(const Recipient& r, NodeId node, const PositionSnapshot& snapshot,
                       const GridHierarchy& grid) {
    if (r.kind == Recipient::Kind::Node) return node == r.node;
    return grid.cell_of(snapshot[static_cast<std::size_t>(node)]) == r.cell;
}

RouteOutcome route(Packet& packet, NodeId from, const Recipient& recipient,
                   const PositionSnapshot& snapshot, const GridHierarchy& grid,
                   double& now, std::vector<Transmission>& log, double radio_range,
                   double hop_latency) {
    NodeId holder = from;
    while (true) {
        if (recipient_matches(recipient, holder, snapshot, grid))
            return Delivered{holder};
        if (now > packet.deadline)
            return Dropped{DropCause::DeadlineExceeded};
        const auto next = greedy_next_hop(holder, packet.dest_position, snapshot, radio_range);
        if (std::holds_alternative<NoProgress>(next))
            return Dropped{DropCause::NoProgress};
        const NodeId hop = std::get<NodeId>(next);
        now += hop_latency;
        packet.hops += 1;
        log.push_back({now, packet.kind, holder, hop, packet.size});
        holder = hop;
    }
}

std::uint64_t trace_hash(const std::vector<Transmission>& log) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const Transmission& t : log) {
        std::uint64_t bits = 0;
        static_assert(sizeof(bits) == sizeof(t.time));
        std::memcpy(&bits, &t.time, sizeof(bits));
        mix(&bits, sizeof(bits));
        const std::uint8_t kind = static_cast<std::uint8_t>(t.kind);
        mix(&kind, sizeof(kind));
        mix(&t.from, sizeof(t.from));
        mix(&t.to, sizeof(t.to));
        mix(&t.size, sizeof(t.size));
    }
    return h;
}

} // namespace phls
