#include "skewcert/digraph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace skewcert {

namespace {
constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
}

Digraph::Digraph(std::vector<std::uint64_t> offsets, std::vector<VertexIndex> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size()) {
        throw std::invalid_argument("Digraph: inconsistent offsets");
    }
}

Digraph Digraph::from_edges(std::size_t vertex_count, std::vector<std::pair<VertexIndex, VertexIndex>> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<std::uint64_t> offsets(vertex_count + 1, 0);
    std::vector<VertexIndex> targets;
    targets.reserve(edges.size());
    for (const auto& [from, to] : edges) {
        if (from >= vertex_count || to >= vertex_count) throw std::out_of_range("Digraph: edge endpoint out of range");
        ++offsets[from + 1];
        targets.push_back(to);
    }
    for (std::size_t v = 0; v < vertex_count; ++v) offsets[v + 1] += offsets[v];
    return Digraph(std::move(offsets), std::move(targets));
}

bool Digraph::has_edge(VertexIndex from, VertexIndex to) const {
    const auto s = successors(from);
    return std::binary_search(s.begin(), s.end(), to);
}

Digraph Digraph::reversed() const {
    const std::size_t n = vertex_count();
    std::vector<std::uint64_t> offsets(n + 1, 0);
    for (VertexIndex t : targets_) ++offsets[t + 1];
    for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
    std::vector<VertexIndex> targets(targets_.size());
    std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
    for (VertexIndex u = 0; u < n; ++u) {
        for (VertexIndex t : successors(u)) targets[fill[t]++] = u;
    }
    return Digraph(std::move(offsets), std::move(targets));
}

SccResult strongly_connected_components(const Digraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<VertexIndex> stack;
    SccResult out;
    out.component_of.assign(n, kUnvisited);

    struct Frame {
        VertexIndex v;
        std::uint64_t next;  // position in the successor array
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;

    for (VertexIndex root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, g.offsets()[root]});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;

        while (!call.empty()) {
            Frame& f = call.back();
            const VertexIndex v = f.v;
            if (f.next < g.offsets()[v + 1]) {
                const VertexIndex t = g.targets()[f.next++];
                if (index[t] == kUnvisited) {
                    index[t] = low[t] = counter++;
                    stack.push_back(t);
                    on_stack[t] = 1;
                    call.push_back({t, g.offsets()[t]});
                } else if (on_stack[t]) {
                    low[v] = std::min(low[v], index[t]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                VertexIndex u;
                do {
                    u = stack.back();
                    stack.pop_back();
                    on_stack[u] = 0;
                    out.component_of[u] = out.component_count;
                } while (u != v);
                ++out.component_count;
            }
            call.pop_back();
            if (!call.empty()) {
                const VertexIndex parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return out;
}

std::vector<VertexIndex> cycle_through(const Digraph& g, VertexIndex v) {
    const std::size_t n = g.vertex_count();
    std::vector<VertexIndex> parent(n, kUnvisited);
    std::deque<VertexIndex> queue;
    for (VertexIndex t : g.successors(v)) {
        if (t == v) return {v};
        if (parent[t] == kUnvisited) {
            parent[t] = v;
            queue.push_back(t);
        }
    }
    while (!queue.empty()) {
        const VertexIndex u = queue.front();
        queue.pop_front();
        for (VertexIndex t : g.successors(u)) {
            if (t == v) {
                std::vector<VertexIndex> path;
                for (VertexIndex x = u; x != v; x = parent[x]) path.push_back(x);
                path.push_back(v);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (parent[t] == kUnvisited) {
                parent[t] = u;
                queue.push_back(t);
            }
        }
    }
    return {};
}

}  // namespace skewcert
