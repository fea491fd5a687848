// Hierarchical square partition of the simulation area plus the modulo-hash
// location-server election.
//
// The area is a square of side cell_side * 2^levels. Level-0 regions are the
// cells; each level-(i+1) region groups a 2x2 block of level-i regions, and
// the single level-H region is the whole area. Cells are sized so that any
// two nodes inside one cell are within radio range (cell_side * sqrt(2) must
// not exceed the range).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phls/errors.hpp"
#include "phls/geometry.hpp"

namespace phls {

using NodeId = std::int32_t;

struct RegionId {
    int level = 0;
    int x = 0;
    int y = 0;

    constexpr bool operator==(const RegionId&) const = default;
};

class GridHierarchy {
public:
    // Throws InvalidConfig unless side_length == cell_side * 2^levels and
    // levels >= 1.
    GridHierarchy(Vec2 origin, double side_length, double cell_side, int levels);

    Vec2 origin() const { return origin_; }
    double side_length() const { return side_; }
    double cell_side() const { return cell_; }
    int levels() const { return levels_; }
    int cells_per_side() const { return cells_per_side_; }
    Rect area() const { return Rect{origin_, {side_, side_}}; }

    // Level-0 region containing the position. Boundary points belong to the
    // lower-index cell except on the area's max edge, which maps to the last
    // cell so the closed square is fully covered.
    RegionId cell_of(Vec2 position) const;

    // Ancestor of a level-0 region at the requested level.
    RegionId region_of(RegionId cell, int level) const;

    // Largest level whose region changed between the two positions, or
    // nullopt when the cell is unchanged. Always < levels(): the top region
    // is the whole area and cannot be left.
    std::optional<int> highest_crossed_level(Vec2 p_old, Vec2 p_new) const;

    bool region_contains(RegionId region, RegionId cell) const;

    Vec2 cell_center(RegionId cell) const;
    Vec2 region_center(RegionId region) const;

    // The 2^j x 2^j cells making up a region, in row-major order
    // (y ascending, x fastest). Used by the cell-based protocol variant.
    std::vector<RegionId> cells_of(RegionId region) const;

    // Parent region one level up.
    RegionId parent(RegionId region) const;

    // The four child regions one level down, row-major order.
    std::vector<RegionId> children(RegionId region) const;

    // The child region nearest to a position (the position is clamped into
    // the region first, so any point selects exactly one child).
    RegionId child_toward(RegionId region, Vec2 position) const;

private:
    Vec2 origin_;
    double side_;
    double cell_;
    int levels_;
    int cells_per_side_;
};

// Modulo-hash election: members must be sorted ascending by identity (the
// canonical ordering); returns members[target_id mod |members|].
// Throws EmptyRegion when members is empty.
NodeId select_server(NodeId target_id, std::span<const NodeId> members);

} // namespace phls
