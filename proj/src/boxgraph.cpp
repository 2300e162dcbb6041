#include "skewcert/boxgraph.hpp"

#include <algorithm>
#include <limits>

#include "skewcert/parallel.hpp"

namespace skewcert {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr int kDenseLevelLimit = 11;

void sort_unique(std::vector<BoxId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

CapExceeded::CapExceeded(std::uint64_t would_be, std::uint64_t cap)
    : std::runtime_error("box budget exceeded: " + std::to_string(would_be) + " boxes > cap " + std::to_string(cap)),
      would_be_(would_be),
      cap_(cap) {}

// ---------------------------------------------------------------------------
// BoxSystem

BoxSystem::BoxSystem(const Grid& zgrid, std::optional<Grid> wgrid, std::vector<BoxId> boxes)
    : zgrid_(zgrid), wgrid_(std::move(wgrid)), boxes_(std::move(boxes)) {
    sort_unique(boxes_);
    const std::uint64_t zcount = zgrid_.cell_count();
    const std::uint64_t wcount = wgrid_ ? wgrid_->cell_count() : 1;
    for (const BoxId& b : boxes_) {
        if (b.z >= zcount || b.w >= wcount) throw std::out_of_range("BoxSystem: cell id outside its grid");
    }
    if (boxes_.size() >= kNone) throw std::length_error("BoxSystem: too many boxes for 32-bit vertex indices");
    for (VertexIndex i = 0; i < boxes_.size(); ++i) {
        if (zs_.empty() || zs_.back() != boxes_[i].z) {
            zs_.push_back(boxes_[i].z);
            zstart_.push_back(i);
        }
    }
    zstart_.push_back(static_cast<VertexIndex>(boxes_.size()));
    if (zgrid_.level <= kDenseLevelLimit) {
        dense_.assign(zcount, kNone);
        for (std::uint32_t s = 0; s < zs_.size(); ++s) dense_[zs_[s]] = s;
    }
}

BoxSystem BoxSystem::base(const Grid& zgrid, std::vector<CellId> cells) {
    std::vector<BoxId> boxes;
    boxes.reserve(cells.size());
    for (CellId c : cells) boxes.push_back({c, 0});
    return BoxSystem(zgrid, std::nullopt, std::move(boxes));
}

BoxSystem BoxSystem::base_full(const Grid& zgrid) {
    std::vector<CellId> cells(zgrid.cell_count());
    for (CellId c = 0; c < cells.size(); ++c) cells[c] = c;
    return base(zgrid, std::move(cells));
}

BoxSystem BoxSystem::fibered(const Grid& zgrid, const Grid& wgrid, std::vector<BoxId> boxes) {
    return BoxSystem(zgrid, wgrid, std::move(boxes));
}

BoxSystem BoxSystem::fibered_full(const Grid& zgrid, const Grid& wgrid, std::span<const CellId> zcells) {
    std::vector<BoxId> boxes;
    boxes.reserve(zcells.size() * wgrid.cell_count());
    for (CellId z : zcells) {
        for (CellId w = 0; w < wgrid.cell_count(); ++w) boxes.push_back({z, w});
    }
    return BoxSystem(zgrid, wgrid, std::move(boxes));
}

const Grid& BoxSystem::wgrid() const {
    if (!wgrid_) throw std::logic_error("BoxSystem: base system has no fiber grid");
    return *wgrid_;
}

ProductBox BoxSystem::box(VertexIndex v) const {
    const BoxId b = boxes_[v];
    ProductBox out;
    out.z = zgrid_.cell_box(b.z);
    if (wgrid_) out.w = wgrid_->cell_box(b.w);
    return out;
}

std::optional<VertexIndex> BoxSystem::find(BoxId b) const {
    const auto it = std::lower_bound(boxes_.begin(), boxes_.end(), b);
    if (it == boxes_.end() || *it != b) return std::nullopt;
    return static_cast<VertexIndex>(it - boxes_.begin());
}

std::pair<VertexIndex, VertexIndex> BoxSystem::z_range(CellId z) const {
    std::uint32_t slot = kNone;
    if (!dense_.empty()) {
        if (z < dense_.size()) slot = dense_[z];
    } else {
        const auto it = std::lower_bound(zs_.begin(), zs_.end(), z);
        if (it != zs_.end() && *it == z) slot = static_cast<std::uint32_t>(it - zs_.begin());
    }
    if (slot == kNone) return {0, 0};
    return {zstart_[slot], zstart_[slot + 1]};
}

// ---------------------------------------------------------------------------
// Transition graph

TransitionGraph build_transition_graph(const SkewMap& m, BoxSystem sys, const BuildOptions& opts) {
    if (sys.empty()) throw std::invalid_argument("build_transition_graph: empty box system");
    const std::size_t n = sys.size();
    constexpr std::size_t kChunk = 2048;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;

    struct ChunkOut {
        std::vector<std::uint32_t> counts;
        std::vector<VertexIndex> targets;
        std::uint64_t dropped = 0;
    };
    std::vector<ChunkOut> out(chunks);
    const Grid& zg = sys.zgrid();
    const bool fibered = sys.is_fibered();
    const std::span<const BoxId> all = sys.boxes();

    parallel_chunks(n, kChunk, opts.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        ChunkOut& o = out[c];
        o.counts.assign(end - begin, 0);
        for (std::size_t i = begin; i < end; ++i) {
            const ProductBox b = sys.box(static_cast<VertexIndex>(i));
            const ComplexBox pz = eval_p(m, b.z).inflate(opts.delta);
            ComplexBox qw;
            if (fibered) qw = eval_q(m, b.z, b.w).inflate(opts.delta);
            if (pz.overflow() || (fibered && qw.overflow())) {
                ++o.dropped;
                continue;
            }
            const IndexRange zc = zg.cover(pz.re);
            const IndexRange zr = zg.cover(pz.im);
            if (zc.empty() || zr.empty()) continue;
            IndexRange wc, wr;
            if (fibered) {
                wc = sys.wgrid().cover(qw.re);
                wr = sys.wgrid().cover(qw.im);
                if (wc.empty() || wr.empty()) continue;
            }
            const std::size_t before = o.targets.size();
            for (std::uint32_t row = zr.first; row <= zr.last; ++row) {
                for (std::uint32_t col = zc.first; col <= zc.last; ++col) {
                    const auto [zb, ze] = sys.z_range(zg.id(row, col));
                    if (zb == ze) continue;
                    if (!fibered) {
                        o.targets.push_back(zb);
                        continue;
                    }
                    const Grid& wg = sys.wgrid();
                    auto it = all.begin() + zb;
                    const auto stop = all.begin() + ze;
                    for (std::uint32_t wrow = wr.first; wrow <= wr.last && it != stop; ++wrow) {
                        const CellId lo = wg.id(wrow, wc.first);
                        const CellId hi = wg.id(wrow, wc.last);
                        it = std::lower_bound(it, stop, lo, [](const BoxId& x, CellId w) { return x.w < w; });
                        for (; it != stop && it->w <= hi; ++it) {
                            o.targets.push_back(static_cast<VertexIndex>(it - all.begin()));
                        }
                    }
                }
            }
            o.counts[i - begin] = static_cast<std::uint32_t>(o.targets.size() - before);
        }
    });

    TransitionGraph g{m, std::move(sys), {}, opts.delta, 0};
    std::vector<std::uint64_t> offsets(n + 1, 0);
    std::size_t total = 0;
    for (const ChunkOut& o : out) total += o.targets.size();
    std::vector<VertexIndex> targets;
    targets.reserve(total);
    std::size_t v = 0;
    for (ChunkOut& o : out) {
        for (std::uint32_t cnt : o.counts) {
            offsets[v + 1] = offsets[v] + cnt;
            ++v;
        }
        targets.insert(targets.end(), o.targets.begin(), o.targets.end());
        g.dropped_sources += o.dropped;
        o = ChunkOut{};
    }
    g.graph = Digraph(std::move(offsets), std::move(targets));
    return g;
}

// ---------------------------------------------------------------------------
// Chain model

std::size_t ChainModel::box_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.vertex_count();
    return n;
}

std::size_t ChainModel::edge_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.edge_count();
    return n;
}

std::optional<std::size_t> ChainModel::component_of(BoxId b) const {
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& bx = components[i].boxes;
        if (std::binary_search(bx.begin(), bx.end(), b)) return i;
    }
    return std::nullopt;
}

ChainModel cyclic_core(const TransitionGraph& g) {
    const Digraph& graph = g.graph;
    const std::size_t n = graph.vertex_count();
    const SccResult scc = strongly_connected_components(graph);

    std::vector<std::uint32_t> size(scc.component_count, 0);
    for (std::uint32_t c : scc.component_of) ++size[c];
    std::vector<char> keep(scc.component_count, 0);
    for (VertexIndex v = 0; v < n; ++v) {
        const std::uint32_t c = scc.component_of[v];
        if (size[c] >= 2 || graph.has_edge(v, v)) keep[c] = 1;
    }

    // Number retained components by their smallest vertex.
    std::vector<std::uint32_t> order(scc.component_count, kNone);
    std::vector<std::uint32_t> local(n, kNone);
    std::vector<std::vector<VertexIndex>> members;
    for (VertexIndex v = 0; v < n; ++v) {
        const std::uint32_t c = scc.component_of[v];
        if (!keep[c]) continue;
        if (order[c] == kNone) {
            order[c] = static_cast<std::uint32_t>(members.size());
            members.emplace_back();
        }
        local[v] = static_cast<std::uint32_t>(members[order[c]].size());
        members[order[c]].push_back(v);
    }

    ChainModel model;
    model.provenance.map = g.map;
    model.provenance.zgrid = g.system.zgrid();
    model.provenance.wgrid = g.system.wgrid_opt();
    model.provenance.delta = g.delta;
    model.provenance.dropped_sources = g.dropped_sources;
    model.components.reserve(members.size());
    for (const auto& verts : members) {
        ChainComponent comp;
        comp.boxes.reserve(verts.size());
        std::vector<std::uint64_t> offsets(verts.size() + 1, 0);
        std::vector<VertexIndex> targets;
        const std::uint32_t c = scc.component_of[verts.front()];
        for (std::size_t i = 0; i < verts.size(); ++i) {
            comp.boxes.push_back(g.system.id(verts[i]));
            for (VertexIndex t : graph.successors(verts[i])) {
                if (scc.component_of[t] == c) targets.push_back(local[t]);
            }
            offsets[i + 1] = targets.size();
        }
        comp.edges = Digraph(std::move(offsets), std::move(targets));
        model.components.push_back(std::move(comp));
    }
    return model;
}

// ---------------------------------------------------------------------------
// Selection

BaseSelection select_base_components(const ChainModel& model) {
    if (model.is_fibered()) throw SelectionError("base selection needs a base model");
    const Grid& zg = model.provenance.zgrid;
    const ComplexBox beta = base_fixed_points(model.provenance.map).beta;
    const IndexRange cols = zg.cover(beta.re);
    const IndexRange rows = zg.cover(beta.im);
    BaseSelection sel;
    std::optional<std::size_t> jp;
    if (!cols.empty() && !rows.empty()) {
        for (std::uint32_t r = rows.first; r <= rows.last; ++r) {
            for (std::uint32_t c = cols.first; c <= cols.last; ++c) {
                const CellId id = zg.id(r, c);
                sel.beta_cells.push_back(id);
                const auto comp = model.component_of({id, 0});
                if (!comp) continue;
                if (jp && *jp != *comp) {
                    throw SelectionError("beta fixed point straddles cells of different components; refine");
                }
                jp = comp;
            }
        }
    }
    if (!jp) throw SelectionError("no model component contains the beta fixed point");
    sel.jp = *jp;
    for (std::size_t i = 0; i < model.components.size(); ++i) {
        if (i != sel.jp) sel.ap.push_back(i);
    }
    return sel;
}

FiberSelection select_fiber_component(const ChainModel& model, std::span<const CellId> base_cells, int base_level) {
    if (!model.is_fibered()) throw SelectionError("fiber selection needs a fibered model");
    const Grid& zg = model.provenance.zgrid;
    FiberSelection sel;
    for (std::size_t i = 0; i < model.components.size(); ++i) {
        const CellId anc = zg.ancestor(model.components[i].boxes.front().z, base_level);
        if (std::binary_search(base_cells.begin(), base_cells.end(), anc)) sel.candidates.push_back(i);
    }
    if (sel.candidates.empty()) return sel;
    auto better = [&](std::size_t a, std::size_t b) {
        const auto& ca = model.components[a];
        const auto& cb = model.components[b];
        if (ca.edge_count() != cb.edge_count()) return ca.edge_count() > cb.edge_count();
        if (ca.vertex_count() != cb.vertex_count()) return ca.vertex_count() > cb.vertex_count();
        return a < b;  // components are ordered by smallest box
    };
    std::vector<std::size_t> ranked = sel.candidates;
    std::sort(ranked.begin(), ranked.end(), better);
    sel.component = ranked.front();
    if (ranked.size() > 1) {
        const double top = static_cast<double>(model.components[ranked[0]].edge_count());
        const double second = static_cast<double>(model.components[ranked[1]].edge_count());
        sel.ambiguous = second >= 0.9 * top;
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Refinement

namespace {

std::vector<std::size_t> all_or(const ChainModel& model, std::span<const std::size_t> components) {
    std::vector<std::size_t> ids(components.begin(), components.end());
    if (ids.empty()) {
        ids.resize(model.components.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    }
    return ids;
}

void push_children(const Grid& g, CellId id, CellId out[4]) {
    const std::uint32_t r = g.row(id) * 2;
    const std::uint32_t c = g.col(id) * 2;
    const std::uint32_t side = g.side() * 2;
    out[0] = r * side + c;
    out[1] = r * side + c + 1;
    out[2] = (r + 1) * side + c;
    out[3] = (r + 1) * side + c + 1;
}

}  // namespace

BoxSystem refine(const ChainModel& model, SplitMode split, std::uint64_t max_boxes,
                 std::span<const std::size_t> components) {
    const auto ids = all_or(model, components);
    const ModelProvenance& p = model.provenance;
    if (!model.is_fibered() && split != SplitMode::base_only) {
        throw std::invalid_argument("refine: a base model can only be split along z");
    }
    std::uint64_t parents = 0;
    for (std::size_t i : ids) parents += model.components.at(i).vertex_count();
    const std::uint64_t factor = split == SplitMode::both ? 16 : 4;
    if (parents * factor > max_boxes) throw CapExceeded(parents * factor, max_boxes);

    const bool split_z = split != SplitMode::fiber_only;
    const bool split_w = split != SplitMode::base_only;
    const Grid zg = split_z ? Grid::make(p.zgrid.half_width, p.zgrid.level + 1) : p.zgrid;
    std::optional<Grid> wg = p.wgrid;
    if (split_w) wg = Grid::make(p.wgrid->half_width, p.wgrid->level + 1);

    std::vector<BoxId> boxes;
    boxes.reserve(parents * factor);
    for (std::size_t i : ids) {
        for (const BoxId& b : model.components[i].boxes) {
            CellId zs[4] = {b.z, b.z, b.z, b.z};
            CellId ws[4] = {b.w, b.w, b.w, b.w};
            if (split_z) push_children(p.zgrid, b.z, zs);
            if (split_w) push_children(*p.wgrid, b.w, ws);
            const int nz = split_z ? 4 : 1;
            const int nw = split_w ? 4 : 1;
            for (int a = 0; a < nz; ++a) {
                for (int c = 0; c < nw; ++c) boxes.push_back({zs[a], ws[c]});
            }
        }
    }
    if (wg) return BoxSystem::fibered(zg, *wg, std::move(boxes));
    std::vector<CellId> cells;
    cells.reserve(boxes.size());
    for (const BoxId& b : boxes) cells.push_back(b.z);
    return BoxSystem::base(zg, std::move(cells));
}

BoxSystem system_of(const ChainModel& model, std::span<const std::size_t> components) {
    const auto ids = all_or(model, components);
    std::vector<BoxId> boxes;
    for (std::size_t i : ids) {
        const auto& b = model.components.at(i).boxes;
        boxes.insert(boxes.end(), b.begin(), b.end());
    }
    if (model.is_fibered()) return BoxSystem::fibered(model.provenance.zgrid, *model.provenance.wgrid, std::move(boxes));
    std::vector<CellId> cells;
    for (const BoxId& b : boxes) cells.push_back(b.z);
    return BoxSystem::base(model.provenance.zgrid, std::move(cells));
}

}  // namespace skewcert
