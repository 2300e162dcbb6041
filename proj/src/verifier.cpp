#include "skewcert/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace skewcert {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string num(double x) { return fmt("%.17g", x); }

class WallClock {
public:
    explicit WallClock(double max_seconds) : start_(Clock::now()), max_(max_seconds) {}
    double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
    bool expired() const { return elapsed() > max_; }

private:
    Clock::time_point start_;
    double max_;
};

/// Stage failure that ends the refinement loop.
struct Stop {
    std::string reason;
};

class Builder {
public:
    Builder(const SkewMap& m, const VerifyConfig& cfg, const WallClock& clock) : m_(m), cfg_(cfg), clock_(clock) {}

    ChainModel build(BoxSystem sys) {
        if (sys.size() > cfg_.max_boxes) {
            throw Stop{"box cap exhausted: " + std::to_string(sys.size()) + " boxes exceed the cap of " +
                       std::to_string(cfg_.max_boxes)};
        }
        if (sys.empty()) throw Stop{"model became empty"};
        peak_ = std::max<std::uint64_t>(peak_, sys.size());
        ChainModel model = cyclic_core(build_transition_graph(m_, std::move(sys), {cfg_.delta, cfg_.threads}));
        check_clock();
        return model;
    }

    ChainModel refine_and_build(const ChainModel& model, SplitMode split) {
        if (model.components.empty()) throw Stop{"model has no recurrent boxes left to refine"};
        try {
            return build(refine(model, split, cfg_.max_boxes));
        } catch (const CapExceeded& e) {
            throw Stop{"box cap exhausted: refinement needs " + std::to_string(e.would_be()) +
                       " boxes, cap is " + std::to_string(e.cap())};
        }
    }

    void check_clock() const {
        if (clock_.expired()) throw Stop{"wall-clock cap of " + num(cfg_.max_seconds) + " s exhausted"};
    }

    std::uint64_t peak() const { return peak_; }

private:
    const SkewMap& m_;
    const VerifyConfig& cfg_;
    const WallClock& clock_;
    std::uint64_t peak_ = 0;
};

// An explicit L that fails on a positive cycle is retried at the auto value
// only when `last_chance` is set, so refinement gets to reach the requested L first.
TierOutcome certify(const WeightedComponent& wc, std::string tier, std::optional<double> requested, unsigned threads,
                    bool last_chance) {
    TierOutcome t;
    t.tier = std::move(tier);
    t.component_id = wc.component_id;
    t.vertex_count = wc.vertex_count();
    t.edge_count = wc.edge_count();
    if (!wc.zero_weight_vertices.empty()) {
        t.reason = "critical point: " + std::to_string(wc.zero_weight_vertices.size()) +
                   " boxes have a zero derivative bound";
        return t;
    }
    const double max_l = max_feasible_L(wc);
    t.max_L = max_l;
    if (!std::isfinite(max_l)) {
        t.reason = "component carries no cycle";
        return t;
    }
    double L = requested ? *requested : kAutoSafety * max_l;
    if (!(L > 1)) {
        t.reason = "no admissible L: auto L " + fmt("%.6g", L) + " from estimate " + fmt("%.6g", max_l);
        return t;
    }
    MetricSolution sol = solve_metric(wc, L);
    if (!sol.ok() && sol.failure->kind == MetricFailureKind::positive_cycle && requested && last_chance) {
        const double retry = kAutoSafety * max_l;
        if (retry > 1 && retry < L) {
            L = retry;
            sol = solve_metric(wc, L);
        }
    }
    if (!sol.ok()) {
        const auto& f = *sol.failure;
        t.reason = (f.kind == MetricFailureKind::positive_cycle ? "positive cycle of " : "critical cycle of ") +
                   std::to_string(f.witness.size()) + " boxes at L=" + num(L);
        return t;
    }
    ExpansionCertificate cert = make_certificate(wc, t.tier, L, std::move(sol.phi), threads);
    if (!cert.validated) {
        t.reason = "metric failed the rigorous edge check at L=" + num(L);
        return t;
    }
    t.certificate = std::move(cert);
    return t;
}

ConditionOutcome from_tiers(std::vector<TierOutcome> tiers) {
    ConditionOutcome c;
    c.tiers = std::move(tiers);
    c.status = ConditionStatus::validated;
    for (const auto& t : c.tiers) {
        if (!t.ok()) {
            c.status = ConditionStatus::failed;
            if (c.reason.empty()) c.reason = t.tier + ": " + t.reason;
        }
    }
    return c;
}

ConditionOutcome failed(std::string reason) {
    ConditionOutcome c;
    c.reason = std::move(reason);
    return c;
}

std::vector<CellId> cells_of(const ChainComponent& c) {
    std::vector<CellId> out;
    out.reserve(c.boxes.size());
    for (const BoxId& b : c.boxes) out.push_back(b.z);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Attempts condition 1 on a model at one level; returns true when it holds.
bool try_base_level(BaseResult& r, const VerifyConfig& cfg, bool last_chance) {
    r.selection.reset();
    r.max_L.reset();
    try {
        r.selection = select_base_components(r.model);
    } catch (const SelectionError& e) {
        r.condition = failed(std::string("separation: ") + e.what());
        return false;
    }
    const WeightedComponent wc = vertex_weights(r.model, r.selection->jp, DerivativeKind::base, cfg.threads);
    TierOutcome t = certify(wc, "base", cfg.L_base, cfg.threads, last_chance);
    r.max_L = t.max_L;
    r.condition = from_tiers({std::move(t)});
    return r.condition.holds();
}

void run_base_loop(BaseResult& r, Builder& b, const VerifyConfig& cfg) {
    try {
        for (;;) {
            if (r.level >= cfg.base.start && try_base_level(r, cfg, r.level >= cfg.base.max)) return;
            if (r.level >= cfg.base.max) {
                r.condition.reason = "not certified at base level " + std::to_string(r.level) + ": " + r.condition.reason;
                return;
            }
            r.model = b.refine_and_build(r.model, SplitMode::base_only);
            ++r.level;
        }
    } catch (const Stop& s) {
        if (r.level >= cfg.base.start && cfg.L_base && try_base_level(r, cfg, true)) return;
        r.condition = failed(s.reason + " at base level " + std::to_string(r.level));
    }
}

}  // namespace

void VerifyConfig::validate() const {
    auto check_range = [](const LevelRange& r, const char* what) {
        if (r.start < 0 || r.max > kMaxGridLevel || r.start > r.max) {
            throw std::invalid_argument(std::string(what) + " levels must satisfy 0 <= start <= max <= " +
                                        std::to_string(kMaxGridLevel));
        }
    };
    check_range(base, "base");
    check_range(fiber, "fiber");
    auto check_l = [](const std::optional<double>& l, const char* what) {
        if (l && !(*l > 1 && std::isfinite(*l))) throw std::invalid_argument(std::string(what) + " must exceed 1");
    };
    check_l(L_base, "L_base");
    check_l(L_fiber, "L_fiber");
    if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be non-negative");
    if (!(margin > 0) || !std::isfinite(margin)) throw std::invalid_argument("margin must be positive");
    if ((R1 && !(*R1 > 0 && std::isfinite(*R1))) || (R2 && !(*R2 > 0 && std::isfinite(*R2)))) {
        throw std::invalid_argument("domain bounds must be positive");
    }
    if (max_boxes == 0) throw std::invalid_argument("max_boxes must be positive");
    if (!(max_seconds > 0)) throw std::invalid_argument("max_seconds must be positive");
    if (coarse_level < 0 || coarse_level > kMaxGridLevel) throw std::invalid_argument("coarse level out of range");
}

EscapeRadii domain_radii(const SkewMap& m, const VerifyConfig& cfg) {
    EscapeRadii r = escape_radii(m, cfg.margin);
    if (cfg.R1) r.r1 = *cfg.R1;
    if (cfg.R2) r.r2 = *cfg.R2;
    return r;
}

BaseResult verify_base(const SkewMap& m, const VerifyConfig& cfg) {
    cfg.validate();
    const WallClock clock(cfg.max_seconds);
    Builder b(m, cfg, clock);
    BaseResult r;
    r.level = std::min(cfg.coarse_level, cfg.base.start);
    try {
        r.model = b.build(BoxSystem::base_full(Grid::make(domain_radii(m, cfg).r1, r.level)));
        run_base_loop(r, b, cfg);
    } catch (const Stop& s) {
        r.condition = failed(s.reason + " at base level " + std::to_string(r.level));
    }
    r.peak_boxes = b.peak();
    return r;
}

BaseResult verify_base_from(const ChainModel& model, const VerifyConfig& cfg) {
    cfg.validate();
    if (model.is_fibered()) throw std::invalid_argument("expected a base model");
    if (model.provenance.zgrid.level > cfg.base.max) {
        throw std::invalid_argument("model level " + std::to_string(model.provenance.zgrid.level) +
                                    " exceeds the maximum base level");
    }
    const WallClock clock(cfg.max_seconds);
    Builder b(model.provenance.map, cfg, clock);
    BaseResult r;
    r.model = model;
    r.level = model.provenance.zgrid.level;
    run_base_loop(r, b, cfg);
    r.peak_boxes = std::max<std::uint64_t>(b.peak(), model.box_count());
    return r;
}

FiberResult verify_fibers(const SkewMap& m, const BaseResult& base, const VerifyConfig& cfg) {
    cfg.validate();
    if (!base.condition.holds() || !base.selection) throw std::invalid_argument("verify_fibers: base stage did not hold");
    const WallClock clock(cfg.max_seconds);
    Builder b(m, cfg, clock);
    FiberResult r;
    const BaseSelection& sel = *base.selection;
    const int base_level = base.level;
    const std::vector<CellId> jp_cells = cells_of(base.model.components[sel.jp]);
    std::vector<std::vector<CellId>> ap_cells;
    for (std::size_t k : sel.ap) ap_cells.push_back(cells_of(base.model.components[k]));

    bool split_both = false;
    if (cfg.L_base && base.max_L) split_both = *base.max_L / *cfg.L_base - 1 < kPoorBaseMargin;

    std::vector<CellId> zcells;
    for (const auto& c : base.model.components) {
        const auto cells = cells_of(c);
        zcells.insert(zcells.end(), cells.begin(), cells.end());
    }
    std::sort(zcells.begin(), zcells.end());

    auto evaluate = [&](bool last_chance) {
        std::vector<TierOutcome> jp_tiers;
        {
            const FiberSelection fs = select_fiber_component(r.model, jp_cells, base_level);
            TierOutcome t;
            t.tier = "fiber-jp";
            if (!fs.component) {
                t.reason = "no recurrent fiber boxes over the J_p cells";
            } else if (fs.ambiguous) {
                t.component_id = *fs.component;
                t.reason = "selection ambiguity: two fiber components within 10% of each other's edge count";
            } else {
                t = certify(vertex_weights(r.model, *fs.component, DerivativeKind::fiber, cfg.threads), "fiber-jp",
                            cfg.L_fiber, cfg.threads, last_chance);
            }
            jp_tiers.push_back(std::move(t));
        }
        std::vector<TierOutcome> ap_tiers;
        for (std::size_t i = 0; i < sel.ap.size(); ++i) {
            const std::string tier = "fiber-ap" + std::to_string(sel.ap[i]);
            const FiberSelection fs = select_fiber_component(r.model, ap_cells[i], base_level);
            TierOutcome t;
            t.tier = tier;
            if (!fs.component) {
                t.reason = "no recurrent fiber boxes over the candidate's cells";
            } else if (fs.ambiguous) {
                t.component_id = *fs.component;
                t.reason = "selection ambiguity: two fiber components within 10% of each other's edge count";
            } else {
                t = certify(vertex_weights(r.model, *fs.component, DerivativeKind::fiber, cfg.threads), tier,
                            cfg.L_fiber, cfg.threads, last_chance);
            }
            ap_tiers.push_back(std::move(t));
        }
        r.jp = from_tiers(std::move(jp_tiers));
        if (sel.ap.empty()) {
            r.ap = ConditionOutcome{ConditionStatus::vacuous, {}, "A_p empty"};
        } else {
            r.ap = from_tiers(std::move(ap_tiers));
        }
        return r.jp.holds() && r.ap.holds();
    };

    int level = std::min(cfg.coarse_level, cfg.fiber.start);
    r.base_level = base_level;
    r.fiber_level = level;
    try {
        const Grid wg = Grid::make(domain_radii(m, cfg).r2, level);
        const std::uint64_t count = zcells.size() * wg.cell_count();
        if (count > cfg.max_boxes) {
            throw Stop{"box cap exhausted: " + std::to_string(count) + " boxes exceed the cap of " +
                       std::to_string(cfg.max_boxes)};
        }
        r.model = b.build(BoxSystem::fibered_full(base.model.provenance.zgrid, wg, zcells));
        for (;;) {
            if (r.fiber_level >= cfg.fiber.start && evaluate(r.fiber_level >= cfg.fiber.max)) break;
            if (r.fiber_level >= cfg.fiber.max) {
                const std::string at = "not certified at fiber level " + std::to_string(r.fiber_level) + ": ";
                if (!r.jp.holds()) r.jp.reason = at + r.jp.reason;
                if (!r.ap.holds()) r.ap.reason = at + r.ap.reason;
                break;
            }
            const bool both = split_both && r.model.provenance.zgrid.level < kMaxGridLevel;
            r.model = b.refine_and_build(r.model, both ? SplitMode::both : SplitMode::fiber_only);
            ++r.fiber_level;
        }
    } catch (const Stop& s) {
        if (r.fiber_level >= cfg.fiber.start && cfg.L_fiber && r.model.is_fibered() && evaluate(true)) {
            r.base_level = r.model.provenance.zgrid.level;
            r.peak_boxes = b.peak();
            return r;
        }
        const std::string why = s.reason + " after fiber level " + std::to_string(r.fiber_level);
        auto stop = [&](ConditionOutcome& c) {
            if (c.holds()) return;
            c.status = ConditionStatus::failed;
            c.reason = c.reason.empty() ? why : why + "; last attempt: " + c.reason;
        };
        stop(r.jp);
        if (sel.ap.empty()) {
            r.ap = ConditionOutcome{ConditionStatus::vacuous, {}, "A_p empty"};
        } else {
            stop(r.ap);
        }
    }
    if (r.model.provenance.wgrid) r.base_level = r.model.provenance.zgrid.level;
    r.peak_boxes = b.peak();
    return r;
}

namespace {

AxiomAReport assemble(const SkewMap& m, const VerifyConfig& cfg, BaseResult base, double base_seconds) {
    AxiomAReport rep;
    rep.map = m;
    rep.config = cfg;
    const EscapeRadii radii = domain_radii(m, cfg);
    rep.R1 = base.model.provenance.zgrid.half_width;
    rep.R2 = radii.r2;
    rep.condition1 = base.condition;
    rep.base_level = base.level;
    rep.peak_boxes = base.peak_boxes;
    rep.timings.push_back({"base", base_seconds});
    if (base.selection) rep.ap_candidates = base.selection->ap.size();
    if (base.condition.holds()) {
        const auto t0 = Clock::now();
        VerifyConfig rest = cfg;
        rest.max_seconds = std::max(cfg.max_seconds - base_seconds, 1e-3);
        FiberResult fib = verify_fibers(m, base, rest);
        rep.timings.push_back({"fiber", std::chrono::duration<double>(Clock::now() - t0).count()});
        rep.condition2 = std::move(fib.jp);
        rep.condition3 = std::move(fib.ap);
        rep.fiber_base_level = fib.base_level;
        rep.fiber_level = fib.fiber_level;
        rep.peak_boxes = std::max(rep.peak_boxes, fib.peak_boxes);
        if (fib.model.provenance.wgrid) rep.fiber_model = std::move(fib.model);
    } else {
        rep.condition2 = failed("not attempted: condition 1 does not hold");
        rep.condition3 = failed("not attempted: condition 1 does not hold");
    }
    rep.base_model = std::move(base.model);
    if (!rep.condition1.holds()) {
        rep.blocking = "condition1";
    } else if (!rep.condition2.holds()) {
        rep.blocking = "condition2";
    } else if (!rep.condition3.holds()) {
        rep.blocking = "condition3";
    }
    rep.verified = rep.blocking.empty();
    return rep;
}

}  // namespace

AxiomAReport verify_axiom_a(const SkewMap& m, const VerifyConfig& cfg) {
    const auto t0 = Clock::now();
    BaseResult base = verify_base(m, cfg);
    return assemble(m, cfg, std::move(base), std::chrono::duration<double>(Clock::now() - t0).count());
}

AxiomAReport verify_axiom_a_from(const ChainModel& base_model, const VerifyConfig& cfg) {
    const auto t0 = Clock::now();
    BaseResult base = verify_base_from(base_model, cfg);
    return assemble(base_model.provenance.map, cfg, std::move(base),
                    std::chrono::duration<double>(Clock::now() - t0).count());
}

BuiltModels build_models(const SkewMap& m, const VerifyConfig& cfg) {
    cfg.validate();
    const EscapeRadii radii = domain_radii(m, cfg);
    const BuildOptions opts{cfg.delta, cfg.threads};
    auto build = [&](BoxSystem sys) {
        if (sys.size() > cfg.max_boxes) throw CapExceeded(sys.size(), cfg.max_boxes);
        return cyclic_core(build_transition_graph(m, std::move(sys), opts));
    };
    BuiltModels out;
    out.base = build(BoxSystem::base_full(Grid::make(radii.r1, std::min(cfg.coarse_level, cfg.base.max))));
    while (out.base.provenance.zgrid.level < cfg.base.max && !out.base.components.empty()) {
        out.base = build(refine(out.base, SplitMode::base_only, cfg.max_boxes));
    }
    if (out.base.components.empty()) return out;

    std::vector<CellId> zcells;
    for (const auto& c : out.base.components) {
        for (const BoxId& b : c.boxes) zcells.push_back(b.z);
    }
    std::sort(zcells.begin(), zcells.end());
    const Grid wg = Grid::make(radii.r2, std::min(cfg.coarse_level, cfg.fiber.max));
    if (zcells.size() * wg.cell_count() > cfg.max_boxes) throw CapExceeded(zcells.size() * wg.cell_count(), cfg.max_boxes);
    ChainModel fiber = build(BoxSystem::fibered_full(out.base.provenance.zgrid, wg, zcells));
    while (fiber.provenance.wgrid->level < cfg.fiber.max && !fiber.components.empty()) {
        fiber = build(refine(fiber, SplitMode::fiber_only, cfg.max_boxes));
    }
    out.fiber = std::move(fiber);
    return out;
}

std::string certificate_file_name(const ExpansionCertificate& cert) { return "cert-" + cert.tier + ".txt"; }

namespace {

std::string complex_text(Complex z) { return num(z.real()) + (std::signbit(z.imag()) ? "" : "+") + num(z.imag()) + "i"; }

std::string status_text(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::validated: return "VALIDATED";
        case ConditionStatus::vacuous: return "VACUOUS";
        case ConditionStatus::failed: return "NOT_VALIDATED";
    }
    return "";
}

void append_condition(std::string& s, const char* name, const ConditionOutcome& c) {
    s += name;
    s += ' ';
    s += status_text(c.status);
    if (!c.reason.empty()) s += " (" + c.reason + ")";
    s += '\n';
    for (const TierOutcome& t : c.tiers) {
        s += "  tier " + t.tier + " component=" + std::to_string(t.component_id) + " V=" +
             std::to_string(t.vertex_count) + " E=" + std::to_string(t.edge_count);
        if (t.max_L) s += " max_L=" + num(*t.max_L);
        if (t.certificate) {
            const ExpansionCertificate& cert = *t.certificate;
            s += " L=" + num(cert.L) + " phi_min=" + num(cert.stats.min) + " phi_max=" + num(cert.stats.max) +
                 " phi_avg=" + num(cert.stats.avg) + " certificate=" + certificate_file_name(cert);
        } else {
            s += " failed: " + t.reason;
        }
        s += '\n';
    }
}

std::string optional_text(const std::optional<double>& v) { return v ? num(*v) : "auto"; }

}  // namespace

std::string format_report(const AxiomAReport& r) {
    const VerifyConfig& c = r.config;
    std::string s = "skewcert report v1\n";
    s += "map a=" + complex_text(r.map.a) + " b=" + complex_text(r.map.b) + " c=" + complex_text(r.map.c) +
         " e=" + complex_text(r.map.e) + '\n';
    s += "map-hex";
    for (Complex z : {r.map.a, r.map.b, r.map.c, r.map.e}) s += ' ' + textfmt::hex(z.real()) + ' ' + textfmt::hex(z.imag());
    s += '\n';
    s += "config zgrid=" + std::to_string(c.base.start) + ':' + std::to_string(c.base.max) + '\n';
    s += "config wgrid=" + std::to_string(c.fiber.start) + ':' + std::to_string(c.fiber.max) + '\n';
    s += "config L-base=" + optional_text(c.L_base) + '\n';
    s += "config L-fiber=" + optional_text(c.L_fiber) + '\n';
    s += "config delta=" + num(c.delta) + '\n';
    s += "config margin=" + num(c.margin) + '\n';
    s += "config bounds=" + (c.R1 || c.R2 ? optional_text(c.R1) + ',' + optional_text(c.R2) : std::string("auto")) + '\n';
    s += "config max-boxes=" + std::to_string(c.max_boxes) + '\n';
    s += "config max-seconds=" + num(c.max_seconds) + '\n';
    s += "config coarse-level=" + std::to_string(c.coarse_level) + '\n';
    s += "domain R1=" + num(r.R1) + " R2=" + num(r.R2) + '\n';
    s += "base level=" + std::to_string(r.base_level);
    if (r.base_model) s += " components=" + std::to_string(r.base_model->components.size());
    s += " ap_candidates=" + std::to_string(r.ap_candidates) + '\n';
    if (r.fiber_level) {
        s += "fiber zlevel=" + std::to_string(*r.fiber_base_level) + " wlevel=" + std::to_string(*r.fiber_level);
        if (r.fiber_model) s += " components=" + std::to_string(r.fiber_model->components.size());
        s += '\n';
    } else {
        s += "fiber not run\n";
    }
    append_condition(s, "condition1", r.condition1);
    append_condition(s, "condition2", r.condition2);
    append_condition(s, "condition3", r.condition3);
    s += "peak_boxes " + std::to_string(r.peak_boxes) + '\n';
    s += "blocking " + (r.blocking.empty() ? std::string("none") : r.blocking) + '\n';
    s += r.verified ? "VERDICT: AXIOM_A_VERIFIED\n" : "VERDICT: NOT_VERIFIED_AT_RESOLUTION\n";
    return s;
}

std::string format_timings(const AxiomAReport& r) {
    std::string s;
    double total = 0;
    for (const StageTiming& t : r.timings) {
        s += t.stage + ' ' + fmt("%.3f", t.seconds) + " s\n";
        total += t.seconds;
    }
    s += "total " + fmt("%.3f", total) + " s\n";
    return s;
}

}  // namespace skewcert
