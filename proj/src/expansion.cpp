#include "skewcert/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "skewcert/parallel.hpp"

namespace skewcert {

namespace {
constexpr VertexIndex kNoParent = std::numeric_limits<VertexIndex>::max();
}

WeightedComponent vertex_weights(const ChainModel& model, std::size_t component, DerivativeKind kind,
                                 unsigned threads) {
    const ChainComponent& comp = model.components.at(component);
    const ModelProvenance& p = model.provenance;
    if (kind == DerivativeKind::fiber && !p.wgrid) {
        throw std::invalid_argument("vertex_weights: fiber weights need a fibered model");
    }
    WeightedComponent wc;
    wc.component_id = component;
    wc.kind = kind;
    wc.edges = comp.edges;
    wc.weights.assign(comp.vertex_count(), 0.0);
    parallel_chunks(comp.vertex_count(), 4096, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const BoxId id = comp.boxes[k];
            wc.weights[k] = kind == DerivativeKind::base ? derivative_lower_base(p.map, p.zgrid.cell_box(id.z))
                                                         : derivative_lower_fiber(p.map, p.wgrid->cell_box(id.w));
        }
    });
    for (VertexIndex k = 0; k < wc.weights.size(); ++k) {
        if (!(wc.weights[k] > 0)) wc.zero_weight_vertices.push_back(k);
    }
    return wc;
}

WeightedComponent make_weighted(Digraph edges, std::vector<double> weights, DerivativeKind kind) {
    if (edges.vertex_count() != weights.size()) throw std::invalid_argument("make_weighted: size mismatch");
    WeightedComponent wc;
    wc.kind = kind;
    wc.edges = std::move(edges);
    wc.weights = std::move(weights);
    for (VertexIndex k = 0; k < wc.weights.size(); ++k) {
        if (!(wc.weights[k] > 0)) wc.zero_weight_vertices.push_back(k);
    }
    return wc;
}

// ---------------------------------------------------------------------------
// Metric construction

namespace {

// Cycle in the parent forest (parent[t] = u records edge u -> t), returned in
// edge order; empty when the forest is acyclic.
std::vector<VertexIndex> parent_cycle(const std::vector<VertexIndex>& parent) {
    const std::size_t n = parent.size();
    std::vector<std::uint8_t> state(n, 0);
    std::vector<VertexIndex> walk;
    for (VertexIndex v = 0; v < n; ++v) {
        if (state[v]) continue;
        walk.clear();
        VertexIndex u = v;
        while (u != kNoParent && state[u] == 0) {
            state[u] = 1;
            walk.push_back(u);
            u = parent[u];
        }
        if (u != kNoParent && state[u] == 1) {
            std::vector<VertexIndex> cyc;
            VertexIndex x = u;
            do {
                cyc.push_back(x);
                x = parent[x];
            } while (x != u);
            std::reverse(cyc.begin(), cyc.end());
            return cyc;
        }
        for (VertexIndex w : walk) state[w] = 2;
    }
    return {};
}

}  // namespace

MetricSolution solve_metric(const WeightedComponent& wc, double L) {
    if (!(L > 1)) throw std::invalid_argument("solve_metric: L must exceed 1");
    const std::size_t n = wc.vertex_count();
    MetricSolution out;
    for (VertexIndex k : wc.zero_weight_vertices) {
        if (wc.edges.successors(k).empty()) continue;
        auto cyc = cycle_through(wc.edges, k);
        if (cyc.empty()) cyc = {k};
        out.failure = MetricFailure{MetricFailureKind::critical_point, std::move(cyc)};
        return out;
    }
    if (n == 0) return out;

    const double log_l = std::log(L);
    std::vector<double> gain(n);
    for (std::size_t k = 0; k < n; ++k) gain[k] = log_l - std::log(wc.weights[k]) + kLogMargin;

    std::vector<double> x(n, 0.0);
    std::vector<VertexIndex> parent(n, kNoParent);
    std::vector<char> queued(n, 1);
    std::deque<VertexIndex> queue(n);
    std::iota(queue.begin(), queue.end(), VertexIndex{0});
    std::uint64_t relaxations = 0;

    while (!queue.empty()) {
        const VertexIndex u = queue.front();
        queue.pop_front();
        queued[u] = 0;
        const double cand = x[u] + gain[u];
        for (VertexIndex t : wc.edges.successors(u)) {
            if (!(cand > x[t])) continue;
            x[t] = cand;
            parent[t] = u;
            if (!queued[t]) {
                queued[t] = 1;
                queue.push_back(t);
            }
            if (++relaxations % n == 0) {
                auto cyc = parent_cycle(parent);
                if (!cyc.empty()) {
                    out.failure = MetricFailure{MetricFailureKind::positive_cycle, std::move(cyc)};
                    return out;
                }
            }
        }
    }

    const double top = *std::max_element(x.begin(), x.end());
    out.phi.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.phi[k] = std::exp(x[k] - top);
    return out;
}

std::optional<EdgeViolation> find_violation(const WeightedComponent& wc, double L, std::span<const double> phi,
                                            unsigned threads) {
    const std::size_t n = wc.vertex_count();
    if (phi.size() != n) throw std::invalid_argument("find_violation: phi size mismatch");
    constexpr std::size_t kChunk = 8192;
    std::vector<std::optional<EdgeViolation>> first((n + kChunk - 1) / kChunk);
    parallel_chunks(n, kChunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const double rhs = rounding::mul_up(L, phi[k]);
            for (VertexIndex j : wc.edges.successors(static_cast<VertexIndex>(k))) {
                if (!(rounding::mul_down(phi[j], wc.weights[k]) >= rhs)) {
                    first[c] = EdgeViolation{static_cast<VertexIndex>(k), j};
                    return;
                }
            }
        }
    });
    for (const auto& f : first) {
        if (f) return f;
    }
    return std::nullopt;
}

bool validate_certificate(const WeightedComponent& wc, double L, std::span<const double> phi, unsigned threads) {
    if (!(L > 1) || !std::isfinite(L) || phi.size() != wc.vertex_count()) return false;
    for (double v : phi) {
        if (!(v > 0) || !std::isfinite(v)) return false;
    }
    return !find_violation(wc, L, phi, threads).has_value();
}

// ---------------------------------------------------------------------------
// Minimum cycle mean

namespace {

// Howard policy iteration for the minimum cycle mean of a graph in which the
// weight of edge (u, v) is cost[u] and every vertex has a successor.
double howard_min_mean(const std::vector<std::vector<std::uint32_t>>& succ, const std::vector<double>& cost) {
    const std::size_t n = succ.size();
    double scale = 1;
    for (double c : cost) scale = std::max(scale, std::fabs(c));
    const double tol = 1e-12 * scale;

    std::vector<std::uint32_t> policy(n);
    for (std::size_t u = 0; u < n; ++u) policy[u] = succ[u].front();
    std::vector<double> eta(n), val(n);
    std::vector<std::uint8_t> state(n);
    std::vector<std::uint32_t> path;

    for (int iter = 0; iter < 100000; ++iter) {
        // Value determination on the functional graph of the policy.
        std::fill(state.begin(), state.end(), 0);
        for (std::uint32_t s = 0; s < n; ++s) {
            if (state[s]) continue;
            path.clear();
            std::uint32_t u = s;
            while (state[u] == 0) {
                state[u] = 1;
                path.push_back(u);
                u = policy[u];
            }
            std::size_t tail = path.size();
            if (state[u] == 1) {
                const std::size_t at = static_cast<std::size_t>(std::find(path.begin(), path.end(), u) - path.begin());
                double sum = 0;
                for (std::size_t i = at; i < path.size(); ++i) sum += cost[path[i]];
                const double lambda = sum / static_cast<double>(path.size() - at);
                // Pin the smallest vertex of the cycle so that a cycle kept
                // across iterations keeps its values.
                const auto h = std::min_element(path.begin() + static_cast<std::ptrdiff_t>(at), path.end()) - path.begin();
                const std::size_t len = path.size() - at;
                val[path[h]] = 0;
                eta[path[h]] = lambda;
                for (std::size_t step = 1; step < len; ++step) {
                    const std::uint32_t v = path[at + (h - at + len - step) % len];
                    eta[v] = lambda;
                    val[v] = cost[v] - lambda + val[policy[v]];
                }
                tail = at;
            }
            for (std::size_t i = tail; i-- > 0;) {
                const std::uint32_t v = path[i];
                eta[v] = eta[policy[v]];
                val[v] = cost[v] - eta[v] + val[policy[v]];
            }
            for (std::uint32_t v : path) state[v] = 2;
        }

        // Policy improvement: first on cycle means, then on values.
        bool changed = false;
        for (std::uint32_t u = 0; u < n; ++u) {
            std::uint32_t best = policy[u];
            for (std::uint32_t v : succ[u]) {
                if (eta[v] < eta[best] - tol) best = v;
            }
            if (eta[best] < eta[u] - tol) {
                policy[u] = best;
                changed = true;
            }
        }
        if (!changed) {
            for (std::uint32_t u = 0; u < n; ++u) {
                std::uint32_t best = policy[u];
                double best_val = val[u];
                for (std::uint32_t v : succ[u]) {
                    if (std::fabs(eta[v] - eta[u]) > tol) continue;
                    const double cand = cost[u] - eta[u] + val[v];
                    if (cand < best_val - tol * (1 + std::fabs(best_val))) {
                        best = v;
                        best_val = cand;
                    }
                }
                if (best != policy[u]) {
                    policy[u] = best;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return *std::min_element(eta.begin(), eta.end());
}

}  // namespace

double max_feasible_L(const WeightedComponent& wc) {
    if (!wc.zero_weight_vertices.empty()) throw ZeroWeightError("max_feasible_L: zero derivative bound on a vertex");
    const Digraph& g = wc.edges;
    const SccResult scc = strongly_connected_components(g);
    std::vector<std::vector<VertexIndex>> members(scc.component_count);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) members[scc.component_of[v]].push_back(v);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> local(g.vertex_count());
    for (std::uint32_t c = 0; c < scc.component_count; ++c) {
        const auto& vs = members[c];
        for (std::uint32_t i = 0; i < vs.size(); ++i) local[vs[i]] = i;
        std::vector<std::vector<std::uint32_t>> succ(vs.size());
        std::vector<double> cost(vs.size());
        bool cyclic = true;
        for (std::uint32_t i = 0; i < vs.size(); ++i) {
            cost[i] = std::log(wc.weights[vs[i]]);
            for (VertexIndex t : g.successors(vs[i])) {
                if (scc.component_of[t] == c) succ[i].push_back(local[t]);
            }
            if (succ[i].empty()) cyclic = false;
        }
        if (!cyclic) continue;  // single vertex without a self-loop
        best = std::min(best, howard_min_mean(succ, cost));
    }
    return std::exp(best);
}

// ---------------------------------------------------------------------------
// Certificates

PhiStats phi_stats(std::span<const double> phi) {
    PhiStats s;
    if (phi.empty()) return s;
    s.min = *std::min_element(phi.begin(), phi.end());
    s.max = *std::max_element(phi.begin(), phi.end());
    s.avg = std::accumulate(phi.begin(), phi.end(), 0.0) / static_cast<double>(phi.size());
    return s;
}

ExpansionCertificate make_certificate(const WeightedComponent& wc, std::string tier, double L, std::vector<double> phi,
                                      unsigned threads) {
    ExpansionCertificate c;
    c.tier = std::move(tier);
    c.component_id = wc.component_id;
    c.vertex_count = wc.vertex_count();
    c.edge_count = wc.edge_count();
    c.kind = wc.kind;
    c.L = L;
    c.validated = validate_certificate(wc, L, phi, threads);
    c.stats = phi_stats(phi);
    c.phi = std::move(phi);
    return c;
}

std::string serialize_certificate(const ExpansionCertificate& cert) {
    using textfmt::hex;
    std::string s = "CERT v1\n";
    s += "tier " + cert.tier + '\n';
    s += "component " + std::to_string(cert.component_id) + ' ' + std::to_string(cert.vertex_count) + ' ' +
         std::to_string(cert.edge_count) + '\n';
    s += cert.kind == DerivativeKind::base ? "kind base\n" : "kind fiber\n";
    s += "L " + hex(cert.L) + '\n';
    for (std::size_t k = 0; k < cert.phi.size(); ++k) s += "phi " + std::to_string(k) + ' ' + hex(cert.phi[k]) + '\n';
    s += cert.validated ? "validated true\n" : "validated false\n";
    s += "stats " + hex(cert.stats.min) + ' ' + hex(cert.stats.max) + ' ' + hex(cert.stats.avg) + '\n';
    return textfmt::seal(std::move(s));
}

ExpansionCertificate parse_certificate(std::string_view text) {
    const auto lines = textfmt::unseal(text);
    std::size_t pos = 0;
    auto next = [&](std::string_view key, std::size_t fields) {
        if (pos >= lines.size()) throw FormatError("certificate truncated before '" + std::string(key) + "'");
        auto parts = textfmt::split_ws(lines[pos]);
        if (parts.size() != fields + 1 || parts[0] != key) {
            throw FormatError("certificate line " + std::to_string(pos + 1) + ": expected '" + std::string(key) + "'");
        }
        ++pos;
        parts.erase(parts.begin());
        return parts;
    };
    ExpansionCertificate c;
    if (next("CERT", 1)[0] != "v1") throw FormatError("unsupported certificate version");
    c.tier = std::string(next("tier", 1)[0]);
    const auto comp = next("component", 3);
    c.component_id = textfmt::parse_uint(comp[0]);
    c.vertex_count = textfmt::parse_uint(comp[1]);
    c.edge_count = textfmt::parse_uint(comp[2]);
    const auto kind = next("kind", 1)[0];
    if (kind != "base" && kind != "fiber") throw FormatError("unknown certificate kind");
    c.kind = kind == "base" ? DerivativeKind::base : DerivativeKind::fiber;
    c.L = textfmt::parse_double(next("L", 1)[0]);
    c.phi.reserve(c.vertex_count);
    for (std::size_t k = 0; k < c.vertex_count; ++k) {
        const auto f = next("phi", 2);
        if (textfmt::parse_uint(f[0]) != k) throw FormatError("phi lines out of order");
        c.phi.push_back(textfmt::parse_double(f[1]));
    }
    const auto v = next("validated", 1)[0];
    if (v != "true" && v != "false") throw FormatError("bad validated flag");
    c.validated = v == "true";
    const auto st = next("stats", 3);
    c.stats = {textfmt::parse_double(st[0]), textfmt::parse_double(st[1]), textfmt::parse_double(st[2])};
    if (pos != lines.size()) throw FormatError("trailing content in certificate");
    return c;
}

}  // namespace skewcert
