#include "skewcert/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace skewcert {

Grid Grid::make(double half_width, int level) {
    if (!(half_width > 0) || !std::isfinite(half_width)) throw std::invalid_argument("Grid: half-width must be positive");
    if (level < 0 || level > kMaxGridLevel) throw std::invalid_argument("Grid: level out of range");
    return Grid{half_width, level};
}

double Grid::edge(std::uint32_t i) const {
    const double n = side();
    return half_width * ((2.0 * i - n) / n);
}

IndexRange Grid::cover(const Interval& x) const {
    const std::uint32_t n = side();
    if (x.hi() < edge(0) || x.lo() > edge(n)) return {};
    // Estimate, then settle against the exact edges.
    const double h = 2 * half_width / n;
    auto guess = [&](double v) {
        const double g = std::floor((v + half_width) / h);
        if (!(g > 0)) return std::uint32_t{0};
        if (g >= n - 1) return n - 1;
        return static_cast<std::uint32_t>(g);
    };
    std::uint32_t first = guess(x.lo());
    while (first > 0 && edge(first) >= x.lo()) --first;
    while (first + 1 < n && edge(first + 1) < x.lo()) ++first;
    std::uint32_t last = guess(x.hi());
    while (last + 1 < n && edge(last + 1) <= x.hi()) ++last;
    while (last > 0 && edge(last) > x.hi()) --last;
    return {first, last};
}

CellId Grid::ancestor(CellId id, int coarser_level) const {
    const int d = level - coarser_level;
    if (d < 0) throw std::invalid_argument("Grid::ancestor: target level is finer");
    const std::uint32_t r = row(id) >> d;
    const std::uint32_t c = col(id) >> d;
    return (r << coarser_level) | c;
}

}  // namespace skewcert
