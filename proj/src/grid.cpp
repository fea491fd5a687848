#include "phls/grid.hpp"

#include <cmath>

namespace phls {

GridHierarchy::GridHierarchy(Vec2 origin, double side_length, double cell_side, int levels)
    : origin_(origin), side_(side_length), cell_(cell_side), levels_(levels) {
    if (levels < 1)
        throw InvalidConfig("grid: levels must be >= 1");
    if (cell_side <= 0.0 || side_length <= 0.0)
        throw InvalidConfig("grid: lengths must be positive");
    cells_per_side_ = 1 << levels;
    const double expected = cell_side * static_cast<double>(cells_per_side_);
    if (std::abs(expected - side_length) > 1e-9 * side_length)
        throw InvalidConfig("grid: side_length must equal cell_side * 2^levels");
}

RegionId GridHierarchy::cell_of(Vec2 position) const {
    const double dx = position.x - origin_.x;
    const double dy = position.y - origin_.y;
    if (dx < 0.0 || dy < 0.0 || dx > side_ || dy > side_)
        throw PositionOutOfArea("cell_of: position outside the area");
    int ix = static_cast<int>(std::floor(dx / cell_));
    int iy = static_cast<int>(std::floor(dy / cell_));
    // Max edge is closed: points on it belong to the last cell.
    if (ix >= cells_per_side_) ix = cells_per_side_ - 1;
    if (iy >= cells_per_side_) iy = cells_per_side_ - 1;
    return {0, ix, iy};
}

RegionId GridHierarchy::region_of(RegionId cell, int level) const {
    if (level < 0 || level > levels_)
        throw LevelOutOfRange("region_of: level outside [0, H]");
    return {level, cell.x >> level, cell.y >> level};
}

std::optional<int> GridHierarchy::highest_crossed_level(Vec2 p_old, Vec2 p_new) const {
    const RegionId a = cell_of(p_old);
    const RegionId b = cell_of(p_new);
    if (a == b) return std::nullopt;
    int k = 0;
    for (int level = levels_ - 1; level >= 1; --level) {
        if ((a.x >> level) != (b.x >> level) || (a.y >> level) != (b.y >> level)) {
            k = level;
            break;
        }
    }
    return k;
}

bool GridHierarchy::region_contains(RegionId region, RegionId cell) const {
    return (cell.x >> region.level) == region.x && (cell.y >> region.level) == region.y;
}

Vec2 GridHierarchy::cell_center(RegionId cell) const {
    return {origin_.x + (cell.x + 0.5) * cell_,
            origin_.y + (cell.y + 0.5) * cell_};
}

Vec2 GridHierarchy::region_center(RegionId region) const {
    const double side = cell_ * static_cast<double>(1 << region.level);
    return {origin_.x + (region.x + 0.5) * side,
            origin_.y + (region.y + 0.5) * side};
}

std::vector<RegionId> GridHierarchy::cells_of(RegionId region) const {
    const int n = 1 << region.level;
    std::vector<RegionId> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            out.push_back({0, region.x * n + x, region.y * n + y});
    return out;
}

RegionId GridHierarchy::parent(RegionId region) const {
    if (region.level >= levels_)
        throw LevelOutOfRange("parent: top region has no parent");
    return {region.level + 1, region.x >> 1, region.y >> 1};
}

std::vector<RegionId> GridHierarchy::children(RegionId region) const {
    if (region.level < 1)
        throw LevelOutOfRange("children: cells have no children");
    std::vector<RegionId> out;
    out.reserve(4);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            out.push_back({region.level - 1, region.x * 2 + x, region.y * 2 + y});
    return out;
}

RegionId GridHierarchy::child_toward(RegionId region, Vec2 position) const {
    if (region.level < 1)
        throw LevelOutOfRange("child_toward: cells have no children");
    const double side = cell_ * static_cast<double>(1 << region.level);
    const Vec2 center{origin_.x + (region.x + 0.5) * side,
                      origin_.y + (region.y + 0.5) * side};
    const Rect box{{center.x - 0.5 * side, center.y - 0.5 * side}, {side, side}};
    const Vec2 p = box.clamp(position);
    const int dx = p.x >= center.x ? 1 : 0;
    const int dy = p.y >= center.y ? 1 : 0;
    return {region.level - 1, region.x * 2 + dx, region.y * 2 + dy};
}

NodeId select_server(NodeId target_id, std::span<const NodeId> members) {
    if (members.empty())
        throw EmptyRegion("select_server: no members in region");
    const std::size_t index =
        static_cast<std::size_t>(target_id) % members.size();
    return members[index];
}

} // namespace phls
