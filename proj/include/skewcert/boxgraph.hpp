#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewcert/digraph.hpp"
#include "skewcert/grid.hpp"
#include "skewcert/skew_map.hpp"

namespace skewcert {

/// Thrown when a refinement would exceed the configured box budget.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(std::uint64_t would_be, std::uint64_t cap);
    std::uint64_t would_be() const { return would_be_; }
    std::uint64_t cap() const { return cap_; }

private:
    std::uint64_t would_be_;
    std::uint64_t cap_;
};

class SelectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Active boxes on a base grid (z only) or on a product of a base grid and a
/// fiber grid. Boxes are kept sorted by (z, w); a box's position is its vertex
/// index in every graph built on the system.
class BoxSystem {
public:
    static BoxSystem base(const Grid& zgrid, std::vector<CellId> cells);
    static BoxSystem base_full(const Grid& zgrid);
    static BoxSystem fibered(const Grid& zgrid, const Grid& wgrid, std::vector<BoxId> boxes);
    /// Every w-cell over each of the given z-cells.
    static BoxSystem fibered_full(const Grid& zgrid, const Grid& wgrid, std::span<const CellId> zcells);

    bool is_fibered() const { return wgrid_.has_value(); }
    const Grid& zgrid() const { return zgrid_; }
    /// Throws std::logic_error on a base system.
    const Grid& wgrid() const;
    const std::optional<Grid>& wgrid_opt() const { return wgrid_; }

    std::size_t size() const { return boxes_.size(); }
    bool empty() const { return boxes_.empty(); }
    std::span<const BoxId> boxes() const { return boxes_; }
    BoxId id(VertexIndex v) const { return boxes_[v]; }
    ProductBox box(VertexIndex v) const;

    std::optional<VertexIndex> find(BoxId b) const;

    /// Vertex range [first, second) holding z-cell z; empty if z is inactive.
    std::pair<VertexIndex, VertexIndex> z_range(CellId z) const;
    std::span<const CellId> z_cells() const { return zs_; }

private:
    BoxSystem(const Grid& zgrid, std::optional<Grid> wgrid, std::vector<BoxId> boxes);

    Grid zgrid_;
    std::optional<Grid> wgrid_;
    std::vector<BoxId> boxes_;
    std::vector<CellId> zs_;
    std::vector<VertexIndex> zstart_;
    std::vector<std::uint32_t> dense_;  // z-cell -> slot in zs_, when the z-grid is small
};

/// Graph whose edges over-approximate {(k, j) : F(B_k) meets N(B_j, delta)}.
struct TransitionGraph {
    SkewMap map;
    BoxSystem system;
    Digraph graph;
    double delta = 0;
    std::uint64_t dropped_sources = 0;  // sources whose image overflowed
};

struct BuildOptions {
    double delta = 0;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Requires a nonempty system. Edge lists are sorted and independent of the
/// thread count.
TransitionGraph build_transition_graph(const SkewMap& m, BoxSystem sys, const BuildOptions& opts = {});

struct ModelProvenance {
    SkewMap map;
    Grid zgrid;
    std::optional<Grid> wgrid;
    double delta = 0;
    std::uint64_t timestamp = 0;
    std::uint64_t dropped_sources = 0;

    friend bool operator==(const ModelProvenance&, const ModelProvenance&) = default;
};

/// One box chain transitive component: a strongly connected subgraph whose
/// vertices are sorted box ids and whose edges use local vertex indices.
struct ChainComponent {
    std::vector<BoxId> boxes;
    Digraph edges;

    std::size_t vertex_count() const { return boxes.size(); }
    std::size_t edge_count() const { return edges.edge_count(); }
    friend bool operator==(const ChainComponent&, const ChainComponent&) = default;
};

/// Box chain recurrent model. Components are vertex-disjoint and ordered by
/// their smallest box id.
struct ChainModel {
    ModelProvenance provenance;
    std::vector<ChainComponent> components;

    bool is_fibered() const { return provenance.wgrid.has_value(); }
    std::size_t box_count() const;
    std::size_t edge_count() const;
    /// Component holding box b, if any.
    std::optional<std::size_t> component_of(BoxId b) const;

    friend bool operator==(const ChainModel&, const ChainModel&) = default;
};

/// Keeps the nontrivial strongly connected components (two or more vertices,
/// or a self-loop) together with their internal edges.
ChainModel cyclic_core(const TransitionGraph& g);

struct BaseSelection {
    std::size_t jp = 0;               // component holding the beta fixed point
    std::vector<std::size_t> ap;      // every other component
    std::vector<CellId> beta_cells;   // cells meeting the beta enclosure
};

/// Throws SelectionError when beta's cells are missing from the model or lie
/// in different components.
BaseSelection select_base_components(const ChainModel& model);

struct FiberSelection {
    std::optional<std::size_t> component;  // largest by edges, then vertices, then smallest box
    std::vector<std::size_t> candidates;   // every component over the designated cells
    bool ambiguous = false;                // runner-up within 10% of the winner's edge count
};

/// Picks the component over `base_cells` (sorted cell ids on a grid of level
/// `base_level` sharing the model's z half-width).
FiberSelection select_fiber_component(const ChainModel& model, std::span<const CellId> base_cells, int base_level);

enum class SplitMode { base_only, fiber_only, both };

/// Children of every box in the chosen components (all when `components` is
/// empty). Throws CapExceeded when more than max_boxes would result.
BoxSystem refine(const ChainModel& model, SplitMode split, std::uint64_t max_boxes,
                 std::span<const std::size_t> components = {});

/// Boxes of the chosen components as a system on the model's grids.
BoxSystem system_of(const ChainModel& model, std::span<const std::size_t> components = {});

}  // namespace skewcert
