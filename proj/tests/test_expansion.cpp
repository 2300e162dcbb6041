#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <gmpxx.h>

#include <cmath>
#include <functional>
#include <random>

#include "skewcert/expansion.hpp"
#include "skewcert/verifier.hpp"

using namespace skewcert;

namespace {

using Edges = std::vector<std::pair<VertexIndex, VertexIndex>>;

WeightedComponent wc_of(std::size_t n, Edges e, std::vector<double> w) {
    return make_weighted(Digraph::from_edges(n, std::move(e)), std::move(w));
}

// Smallest geometric-mean weight over all simple cycles, by enumeration;
// +inf when the graph is acyclic.
double min_cycle_geomean(const WeightedComponent& wc) {
    const std::size_t n = wc.vertex_count();
    double best = INFINITY;
    std::vector<VertexIndex> path;
    std::vector<bool> on(n, false);
    std::function<void(VertexIndex, VertexIndex, double)> dfs = [&](VertexIndex start, VertexIndex v, double logsum) {
        for (VertexIndex s : wc.edges.successors(v)) {
            if (s == start) {
                const double mean = (logsum + std::log(wc.weights[v])) / static_cast<double>(path.size());
                best = std::min(best, std::exp(mean));
            } else if (s > start && !on[s]) {
                on[s] = true;
                path.push_back(s);
                dfs(start, s, logsum + std::log(wc.weights[v]));
                path.pop_back();
                on[s] = false;
            }
        }
    };
    for (VertexIndex s = 0; s < n; ++s) {
        path = {s};
        on.assign(n, false);
        on[s] = true;
        dfs(s, s, 0);
    }
    return best;
}

struct RandomGraph {
    WeightedComponent wc;
    double L;
};

RandomGraph random_graph(std::mt19937_64& rng) {
    const std::size_t n = 1 + rng() % 8;
    const double p = std::uniform_real_distribution<double>(0.1, 0.6)(rng);
    Edges e;
    for (VertexIndex k = 0; k < n; ++k)
        for (VertexIndex j = 0; j < n; ++j)
            if (std::uniform_real_distribution<double>(0, 1)(rng) < p) e.emplace_back(k, j);
    std::vector<double> w(n);
    for (double& x : w) x = std::exp(std::uniform_real_distribution<double>(-1.5, 2)(rng));
    WeightedComponent wc = wc_of(n, std::move(e), std::move(w));
    const double g = min_cycle_geomean(wc);
    double L;
    if (std::isfinite(g) && g > 1.02 && rng() % 3 != 0) {
        L = g * std::exp(std::uniform_real_distribution<double>(-0.2, 0.2)(rng));
    } else {
        L = std::exp(std::uniform_real_distribution<double>(0.01, 1.0)(rng));
    }
    return {std::move(wc), std::max(L, 1.0001)};
}

bool exact_edge_ok(const WeightedComponent& wc, double L, const std::vector<double>& phi, VertexIndex k, VertexIndex j) {
    return mpq_class(phi[j]) * mpq_class(wc.weights[k]) >= mpq_class(L) * mpq_class(phi[k]);
}

}  // namespace

TEST_CASE("metric on a self-loop") {
    const WeightedComponent wc = wc_of(1, {{0, 0}}, {2});
    const MetricSolution s = solve_metric(wc, 1.5);
    REQUIRE(s.ok());
    CHECK(s.phi == std::vector<double>{1});
    CHECK(validate_certificate(wc, 1.5, s.phi));
}

TEST_CASE("metric on a solvable two-cycle") {
    const WeightedComponent wc = wc_of(2, {{0, 1}, {1, 0}}, {4, 0.5});
    const MetricSolution s = solve_metric(wc, 1.2);
    REQUIRE(s.ok());
    CHECK(validate_certificate(wc, 1.2, s.phi));
    CHECK(*std::max_element(s.phi.begin(), s.phi.end()) == 1);
    const std::vector<double> hand{1, 0.3};
    CHECK(validate_certificate(wc, 1.2, hand));
    CHECK_FALSE(validate_certificate(wc, 1.2, std::vector<double>{1, 1}));
    CHECK_FALSE(validate_certificate(wc, 1.2, std::vector<double>{0.5, 0.3}));
}

TEST_CASE("positive cycle on a weak self-loop") {
    const MetricSolution s = solve_metric(wc_of(1, {{0, 0}}, {1}), 1.1);
    REQUIRE_FALSE(s.ok());
    CHECK(s.failure->kind == MetricFailureKind::positive_cycle);
    CHECK(s.failure->witness == std::vector<VertexIndex>{0});
}

TEST_CASE("positive cycle witness is a real cycle with small mean") {
    const WeightedComponent wc = wc_of(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 3}}, {1.1, 1.2, 1.05, 5});
    const MetricSolution s = solve_metric(wc, 1.5);
    REQUIRE_FALSE(s.ok());
    const auto& c = s.failure->witness;
    REQUIRE(!c.empty());
    double logsum = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(wc.edges.has_edge(c[i], c[(i + 1) % c.size()]));
        logsum += std::log(wc.weights[c[i]]);
    }
    CHECK(std::exp(logsum / c.size()) < 1.5);
}

TEST_CASE("critical point on a cycle") {
    const WeightedComponent wc = wc_of(3, {{0, 1}, {1, 2}, {2, 0}}, {3, 0, 3});
    const MetricSolution s = solve_metric(wc, 1.1);
    REQUIRE_FALSE(s.ok());
    CHECK(s.failure->kind == MetricFailureKind::critical_point);
    CHECK(std::find(s.failure->witness.begin(), s.failure->witness.end(), 1u) != s.failure->witness.end());
    CHECK_THROWS_AS(max_feasible_L(wc), ZeroWeightError);
}

TEST_CASE("equality is infeasible") {
    CHECK_FALSE(solve_metric(wc_of(1, {{0, 0}}, {1.5}), 1.5).ok());
    CHECK_FALSE(solve_metric(wc_of(2, {{0, 1}, {1, 0}}, {4, 1}), 2).ok());
}

TEST_CASE("validate rejects bad phi and L") {
    const WeightedComponent wc = wc_of(1, {{0, 0}}, {2});
    CHECK_FALSE(validate_certificate(wc, 1.5, std::vector<double>{0}));
    CHECK_FALSE(validate_certificate(wc, 1.5, std::vector<double>{INFINITY}));
    CHECK_FALSE(validate_certificate(wc, 1.5, std::vector<double>{NAN}));
    CHECK_FALSE(validate_certificate(wc, 1.0, std::vector<double>{1}));
    CHECK_FALSE(validate_certificate(wc, 1.5, std::vector<double>{}));
    CHECK(find_violation(wc, 2.5, std::vector<double>{1}).has_value());
}

TEST_CASE("max_feasible_L examples") {
    CHECK(max_feasible_L(wc_of(1, {{0, 0}}, {2})) == doctest::Approx(2).epsilon(1e-12));
    CHECK(max_feasible_L(wc_of(2, {{0, 1}, {1, 0}}, {4, 0.5})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(max_feasible_L(wc_of(2, {{1, 1}, {0, 1}, {1, 0}}, {0.4, 3})) ==
          doctest::Approx(std::sqrt(1.2)).epsilon(1e-12));
    CHECK(std::isinf(max_feasible_L(wc_of(3, {{0, 1}, {1, 2}}, {1, 1, 1}))));
}

TEST_CASE("solver agrees with cycle enumeration on 200 random graphs") {
    std::mt19937_64 rng(31);
    int disagreements = 0, feasible = 0, infeasible = 0, excluded = 0;
    for (int i = 0; i < 200; ++i) {
        const RandomGraph rg = random_graph(rng);
        const double g = min_cycle_geomean(rg.wc);
        if (std::isfinite(g) && std::fabs(std::log(g) - std::log(rg.L)) < 1e-12) {
            ++excluded;
            continue;
        }
        const bool oracle = g > rg.L;
        const MetricSolution s = solve_metric(rg.wc, rg.L);
        if (s.ok() != oracle) ++disagreements;
        if (s.ok()) {
            ++feasible;
            CHECK(validate_certificate(rg.wc, rg.L, s.phi));
        } else {
            ++infeasible;
        }
        if (std::isfinite(g)) {
            CHECK(max_feasible_L(rg.wc) == doctest::Approx(g).epsilon(1e-9));
        }
    }
    CHECK(disagreements == 0);
    CHECK(feasible > 20);
    CHECK(infeasible > 20);
    CHECK(excluded < 5);
}

TEST_CASE("max_feasible_L brackets feasibility") {
    std::mt19937_64 rng(32);
    int tested = 0;
    for (int i = 0; i < 400; ++i) {
        const RandomGraph rg = random_graph(rng);
        const double M = max_feasible_L(rg.wc);
        if (!std::isfinite(M) || M <= 1 / 0.99) continue;
        ++tested;
        CHECK(solve_metric(rg.wc, 0.99 * M).ok());
        CHECK_FALSE(solve_metric(rg.wc, 1.01 * M).ok());
    }
    CHECK(tested >= 50);
}

TEST_CASE("verdict is invariant under rescaling phi") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.01, 100);
    for (int i = 0; i < 200; ++i) {
        const RandomGraph rg = random_graph(rng);
        MetricSolution s = solve_metric(rg.wc, rg.L);
        if (!s.ok()) s.phi.assign(rg.wc.vertex_count(), 1.0);
        const double before = validate_certificate(rg.wc, rg.L, s.phi);
        std::vector<double> scaled = s.phi;
        const double c = u(rng);
        for (double& x : scaled) x *= c;
        const double mx = *std::max_element(scaled.begin(), scaled.end());
        for (double& x : scaled) x /= mx;
        CHECK(validate_certificate(rg.wc, rg.L, scaled) == before);
    }
}

TEST_CASE("halving phi on a tight cycle breaks the certificate") {
    const WeightedComponent wc = wc_of(3, {{0, 1}, {1, 2}, {2, 0}}, {3, 0.7, 1.4});
    const double L = 0.99 * max_feasible_L(wc);
    const MetricSolution s = solve_metric(wc, L);
    REQUIRE(s.ok());
    REQUIRE(validate_certificate(wc, L, s.phi));
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> p = s.phi;
        p[k] *= 0.5;
        CHECK_FALSE(validate_certificate(wc, L, p));
    }
    std::vector<double> hand{1, 0.3};
    hand[0] *= 0.5;
    CHECK_FALSE(validate_certificate(wc_of(2, {{0, 1}, {1, 0}}, {4, 0.5}), 1.2, hand));
}

TEST_CASE("vertex weights on real models") {
    VerifyConfig cfg;
    cfg.base = {6, 6};
    cfg.fiber = {5, 5};
    const SkewMap m{-90, 0, 0.25, 2.25};
    const BuiltModels bm = build_models(m, cfg);
    const BaseSelection sel = select_base_components(bm.base);
    const WeightedComponent base = vertex_weights(bm.base, sel.jp, DerivativeKind::base);
    const Grid& zg = bm.base.provenance.zgrid;
    const double cell = 2 * zg.half_width / zg.side();
    for (VertexIndex k = 0; k < base.vertex_count(); ++k) {
        const BoxId b = bm.base.components[sel.jp].boxes[k];
        if (zg.cell_box(b.z).contains(Complex(10, 0))) {
            CHECK(base.weights[k] >= 20 - cell * std::sqrt(2.0) * 2);
            CHECK(base.weights[k] > 1);
        }
    }
    CHECK(base.zero_weight_vertices.empty());

    // Fiber map w^2: the ring component avoids 0, the attracting component holds it.
    VerifyConfig c2;
    c2.base = {5, 5};
    c2.fiber = {5, 5};
    const BuiltModels sq = build_models(SkewMap{2, 0, 0, 0}, c2);
    REQUIRE(sq.fiber.has_value());
    bool saw_zero = false, saw_ring = false;
    for (std::size_t i = 0; i < sq.fiber->components.size(); ++i) {
        const WeightedComponent w = vertex_weights(*sq.fiber, i, DerivativeKind::fiber);
        const Grid& wg = *sq.fiber->provenance.wgrid;
        bool holds_origin = false;
        for (const BoxId& b : sq.fiber->components[i].boxes) holds_origin = holds_origin || wg.cell_box(b.w).contains(Complex(0, 0));
        if (holds_origin) {
            saw_zero = true;
            CHECK(!w.zero_weight_vertices.empty());
            for (VertexIndex v : w.zero_weight_vertices) CHECK(w.weights[v] == 0);
        } else {
            saw_ring = true;
            CHECK(w.zero_weight_vertices.empty());
            CHECK(*std::min_element(w.weights.begin(), w.weights.end()) > 0);
        }
    }
    CHECK(saw_zero);
    CHECK(saw_ring);
}

TEST_CASE("validated certificates hold in exact arithmetic") {
    std::mt19937_64 rng(34);
    for (int i = 0; i < 100; ++i) {
        const RandomGraph rg = random_graph(rng);
        const MetricSolution s = solve_metric(rg.wc, rg.L);
        if (!s.ok() || !validate_certificate(rg.wc, rg.L, s.phi)) continue;
        for (VertexIndex k = 0; k < rg.wc.vertex_count(); ++k)
            for (VertexIndex j : rg.wc.edges.successors(k)) CHECK(exact_edge_ok(rg.wc, rg.L, s.phi, k, j));
    }
}

TEST_CASE("certificate round trip") {
    const WeightedComponent wc = wc_of(2, {{0, 1}, {1, 0}}, {4, 0.5});
    const MetricSolution s = solve_metric(wc, 1.2);
    const ExpansionCertificate cert = make_certificate(wc, "fiber-ap3", 1.2, s.phi);
    CHECK(cert.validated);
    CHECK(cert.stats.max == 1);
    CHECK(cert.stats.min == *std::min_element(s.phi.begin(), s.phi.end()));
    CHECK(cert.stats.avg == doctest::Approx((s.phi[0] + s.phi[1]) / 2));
    const std::string text = serialize_certificate(cert);
    CHECK(text.rfind("CERT v1\n", 0) == 0);
    CHECK(parse_certificate(text) == cert);
    std::string bad = text;
    bad[bad.find("validated") + 10] = 'x';
    CHECK_THROWS_AS(parse_certificate(bad), FormatError);
    const ExpansionCertificate weak = make_certificate(wc, "base", 1.2, {1, 1});
    CHECK_FALSE(weak.validated);
    CHECK(parse_certificate(serialize_certificate(weak)) == weak);
}
