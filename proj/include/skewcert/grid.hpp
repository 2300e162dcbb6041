#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "skewcert/box.hpp"

namespace skewcert {

/// Cell index row * side + col, with col along Re and row along Im.
using CellId = std::uint32_t;

inline constexpr int kMaxGridLevel = 15;

struct IndexRange {
    std::uint32_t first = 1;
    std::uint32_t last = 0;  // inclusive; empty when first > last

    bool empty() const { return first > last; }
};

/// Uniform (2^level)^2 grid of closed cells tiling [-R, R]^2.
///
/// Cell edges are R * (2i - side) / side evaluated in double. The ratio is a
/// dyadic rational, so edges are monotone, -R, 0 and R are hit exactly, and a
/// cell's edges coincide with those of its four children one level down.
struct Grid {
    double half_width = 1;
    int level = 0;

    /// Throws std::invalid_argument on non-positive R or a level outside [0, 15].
    static Grid make(double half_width, int level);

    std::uint32_t side() const { return std::uint32_t{1} << level; }
    std::uint64_t cell_count() const { return std::uint64_t{side()} * side(); }
    double edge(std::uint32_t i) const;
    Interval span(std::uint32_t i) const { return Interval(edge(i), edge(i + 1)); }

    CellId id(std::uint32_t row, std::uint32_t col) const { return row * side() + col; }
    std::uint32_t row(CellId id) const { return id >> level; }
    std::uint32_t col(CellId id) const { return id & (side() - 1); }
    ComplexBox cell_box(CellId id) const { return {span(col(id)), span(row(id))}; }

    /// Indices of every closed cell span meeting x.
    IndexRange cover(const Interval& x) const;

    /// Ancestor of `id` on a coarser grid of the same half-width.
    CellId ancestor(CellId id, int coarser_level) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Index of a box in a base system (w = 0) or a fibered system.
struct BoxId {
    CellId z = 0;
    CellId w = 0;

    friend auto operator<=>(const BoxId&, const BoxId&) = default;
};

}  // namespace skewcert
