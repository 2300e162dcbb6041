#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewcert/boxgraph.hpp"
#include "skewcert/expansion.hpp"

namespace skewcert {

struct LevelRange {
    int start = 0;
    int max = 0;

    friend bool operator==(const LevelRange&, const LevelRange&) = default;
};

struct VerifyConfig {
    LevelRange base{5, 10};
    LevelRange fiber{4, 8};
    std::optional<double> L_base;   // empty: auto, kAutoSafety * max_feasible_L
    std::optional<double> L_fiber;  // empty: auto
    double delta = 0;
    double margin = 0.1;
    std::optional<double> R1;  // overrides of the escape radii
    std::optional<double> R2;
    std::uint64_t max_boxes = std::uint64_t{1} << 24;
    double max_seconds = 3600;
    unsigned threads = 0;
    int coarse_level = 2;  // every build starts here and refines

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

inline constexpr double kAutoSafety = 0.95;
/// Base expansion margin below which fiber rounds also split the base.
inline constexpr double kPoorBaseMargin = 0.05;

enum class ConditionStatus { validated, vacuous, failed };

/// One certification attempt: a base component (tier "base") or the fiber
/// component selected over the J_p cells ("fiber-jp") or over A_p candidate k
/// ("fiber-ap<k>").
struct TierOutcome {
    std::string tier;
    std::size_t component_id = 0;
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::optional<double> max_L;
    std::optional<ExpansionCertificate> certificate;  // present only when validated
    std::string reason;                               // why it failed

    bool ok() const { return certificate.has_value(); }
};

/// One of the three Axiom A conditions.
struct ConditionOutcome {
    ConditionStatus status = ConditionStatus::failed;
    std::vector<TierOutcome> tiers;
    std::string reason;

    bool holds() const { return status != ConditionStatus::failed; }
};

struct BaseResult {
    ChainModel model;  // base model at the deepest level reached
    std::optional<BaseSelection> selection;
    std::optional<double> max_L;  // estimate on the J_p component
    ConditionOutcome condition;
    int level = 0;
    std::uint64_t peak_boxes = 0;
};

struct FiberResult {
    ChainModel model;  // fibered model at the deepest level reached
    ConditionOutcome jp;
    ConditionOutcome ap;
    int base_level = 0;
    int fiber_level = 0;
    std::uint64_t peak_boxes = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0;
};

struct AxiomAReport {
    SkewMap map;
    VerifyConfig config;
    double R1 = 0;
    double R2 = 0;
    ConditionOutcome condition1;
    ConditionOutcome condition2;
    ConditionOutcome condition3;
    bool verified = false;
    std::string blocking;  // first failing condition, empty when verified
    int base_level = 0;
    std::optional<int> fiber_base_level;
    std::optional<int> fiber_level;
    std::size_t ap_candidates = 0;
    std::uint64_t peak_boxes = 0;
    std::optional<ChainModel> base_model;
    std::optional<ChainModel> fiber_model;
    std::vector<StageTiming> timings;  // kept out of the report text
};

/// Escape radii with the config's overrides applied.
EscapeRadii domain_radii(const SkewMap& m, const VerifyConfig& cfg);

/// Base construction from the coarse level up to cfg.base.max, stopping at the
/// first level from cfg.base.start on where beta's component is isolated and
/// its expansion certificate validates.
BaseResult verify_base(const SkewMap& m, const VerifyConfig& cfg);

/// Fibered construction over every base component of `base`, refined until the
/// J_p tier and each A_p tier certify or cfg.fiber.max is reached.
/// Requires base.condition to hold.
FiberResult verify_fibers(const SkewMap& m, const BaseResult& base, const VerifyConfig& cfg);

/// Starting from a saved base model instead of building one. The model's
/// level must lie within cfg.base.
BaseResult verify_base_from(const ChainModel& model, const VerifyConfig& cfg);

AxiomAReport verify_axiom_a(const SkewMap& m, const VerifyConfig& cfg);
AxiomAReport verify_axiom_a_from(const ChainModel& base_model, const VerifyConfig& cfg);

struct BuiltModels {
    ChainModel base;                  // at cfg.base.max
    std::optional<ChainModel> fiber;  // at (cfg.base.max, cfg.fiber.max) over every base component
};

/// Models only, with no certification. The fibered model is omitted when the
/// base model is empty. Throws CapExceeded when the box cap would be exceeded.
BuiltModels build_models(const SkewMap& m, const VerifyConfig& cfg);

/// File name under which a certificate is written next to the report.
std::string certificate_file_name(const ExpansionCertificate& cert);

/// Deterministic report text ending in the verdict line
///   VERDICT: AXIOM_A_VERIFIED | NOT_VERIFIED_AT_RESOLUTION
std::string format_report(const AxiomAReport& report);
std::string format_timings(const AxiomAReport& report);

}  // namespace skewcert
