#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace skewcert {

using VertexIndex = std::uint32_t;

/// Directed graph in compressed sparse row form. Successor lists are sorted.
class Digraph {
public:
    Digraph() : offsets_(1, 0) {}
    Digraph(std::vector<std::uint64_t> offsets, std::vector<VertexIndex> targets);

    /// Builds from an arbitrary edge list; duplicates are removed.
    static Digraph from_edges(std::size_t vertex_count, std::vector<std::pair<VertexIndex, VertexIndex>> edges);

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    std::size_t edge_count() const { return targets_.size(); }

    std::span<const VertexIndex> successors(VertexIndex v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    bool has_edge(VertexIndex from, VertexIndex to) const;

    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    const std::vector<VertexIndex>& targets() const { return targets_; }

    Digraph reversed() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    std::vector<std::uint64_t> offsets_;
    std::vector<VertexIndex> targets_;
};

struct SccResult {
    std::vector<std::uint32_t> component_of;  // per vertex
    std::uint32_t component_count = 0;
};

/// Strongly connected components by an iterative Tarjan walk (no recursion).
SccResult strongly_connected_components(const Digraph& g);

/// Vertices on a shortest directed cycle through v, v first; empty if none.
std::vector<VertexIndex> cycle_through(const Digraph& g, VertexIndex v);

}  // namespace skewcert
