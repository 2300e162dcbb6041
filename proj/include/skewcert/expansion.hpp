#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skewcert/boxgraph.hpp"
#include "skewcert/text_format.hpp"

namespace skewcert {

/// A component with, per vertex k, a rounded-down lower bound m_k of the
/// relevant derivative modulus over box k. m_k = 0 marks a box meeting the
/// critical locus.
struct WeightedComponent {
    std::size_t component_id = 0;
    DerivativeKind kind = DerivativeKind::fiber;
    Digraph edges;
    std::vector<double> weights;
    std::vector<VertexIndex> zero_weight_vertices;

    std::size_t vertex_count() const { return weights.size(); }
    std::size_t edge_count() const { return edges.edge_count(); }
};

WeightedComponent vertex_weights(const ChainModel& model, std::size_t component, DerivativeKind kind,
                                 unsigned threads = 0);

/// Wraps an explicit graph and weights (tests and tools).
WeightedComponent make_weighted(Digraph edges, std::vector<double> weights, DerivativeKind kind = DerivativeKind::fiber);

enum class MetricFailureKind { critical_point, positive_cycle };

struct MetricFailure {
    MetricFailureKind kind;
    std::vector<VertexIndex> witness;  // a directed cycle, in edge order
};

struct MetricSolution {
    std::vector<double> phi;  // normalized so that max phi = 1
    std::optional<MetricFailure> failure;

    bool ok() const { return !failure.has_value(); }
};

/// Per-edge slack, in log units, demanded by the solver. A cycle whose
/// geometric-mean weight equals L is reported infeasible.
inline constexpr double kLogMargin = 1e-13;

/// Finds phi > 0 with phi_j m_k >= L phi_k on every edge (k, j).
///
/// Works in the log domain: x_j >= x_k + log L - log m_k is a system of
/// difference constraints, solved by queue-based longest-path relaxation from
/// a virtual source. The parent forest is scanned for cycles every |V|
/// relaxations; a cycle there is a positive cycle, returned as the witness.
/// Floating-point only: rigour comes from validate_certificate.
MetricSolution solve_metric(const WeightedComponent& wc, double L);

struct EdgeViolation {
    VertexIndex from;
    VertexIndex to;
};

/// First edge (k, j) failing down(phi_j * m_k) >= up(L * phi_k), if any.
std::optional<EdgeViolation> find_violation(const WeightedComponent& wc, double L, std::span<const double> phi,
                                            unsigned threads = 0);

/// The rigorous gate: every edge passes under directed rounding, and every
/// phi is finite and positive.
bool validate_certificate(const WeightedComponent& wc, double L, std::span<const double> phi, unsigned threads = 0);

/// Thrown by max_feasible_L when some weight is zero.
class ZeroWeightError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// exp(min over cycles of the mean of log m_k), by Howard policy iteration
/// on each nontrivial strongly connected piece. Returns +inf for an acyclic
/// graph. An estimate: any L below it is feasible in exact arithmetic.
double max_feasible_L(const WeightedComponent& wc);

struct PhiStats {
    double min = 0;
    double max = 0;
    double avg = 0;  // arithmetic mean over vertices

    friend bool operator==(const PhiStats&, const PhiStats&) = default;
};

PhiStats phi_stats(std::span<const double> phi);

struct ExpansionCertificate {
    std::string tier;  // base, fiber-jp, fiber-ap<k>
    std::size_t component_id = 0;
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    DerivativeKind kind = DerivativeKind::fiber;
    double L = 0;
    std::vector<double> phi;
    bool validated = false;
    PhiStats stats;

    friend bool operator==(const ExpansionCertificate&, const ExpansionCertificate&) = default;
};

/// Packages phi and runs validate_certificate on it.
ExpansionCertificate make_certificate(const WeightedComponent& wc, std::string tier, double L, std::vector<double> phi,
                                      unsigned threads = 0);

// Certificate format:
//   CERT v1
//   tier <tier>
//   component <id> <V> <E>
//   kind base|fiber
//   L <hex>
//   phi <k> <hex>            V lines
//   validated true|false
//   stats <min> <max> <avg>
//   crc32 <8 hex digits>
std::string serialize_certificate(const ExpansionCertificate& cert);
ExpansionCertificate parse_certificate(std::string_view text);

}  // namespace skewcert
