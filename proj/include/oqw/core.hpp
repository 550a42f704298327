// core.hpp - open quantum walk channel engine on arbitrary graphs.
//
// A walk is specified by transition operators B_i^j acting on the walker's
// internal space whenever it jumps from node i to node j. Starting from any
// state, one step leaves only the diagonal blocks rho_ii, so the engine only
// ever stores and evolves those blocks.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oqw {

using InternalOperator = Eigen::MatrixXcd;
using NodeId = std::size_t;

/// Malformed channel or state (inconsistent dimensions, unknown nodes).
class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The channel does not satisfy sum_j B_i^j' B_i^j = I.
class CompletenessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kCompletenessTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdFloor = -1e-10;
inline constexpr double kTraceTolerance = 1e-10;

struct NodeDefect {
    NodeId node;
    double defect;  // max-entry norm of sum_j B_i^j' B_i^j - I
};

struct ValidationReport {
    std::vector<NodeDefect> defects;  // only nodes above tolerance

    bool ok() const noexcept { return defects.empty(); }
    std::string describe() const;
};

/// Sparse family of transition operators keyed by (source, target).
/// Absent entries are the zero operator. Immutable after construction.
class OqwChannel {
public:
    using Key = std::pair<NodeId, NodeId>;

    /// Throws StructureError if an operator is not internal_dim x internal_dim
    /// or references a node outside [0, node_count).
    OqwChannel(std::size_t node_count, std::size_t internal_dim,
               std::map<Key, InternalOperator> transitions);

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t internal_dim() const noexcept { return internal_dim_; }
    const std::map<Key, InternalOperator>& transitions() const noexcept { return transitions_; }

    /// Completeness report, computed once at construction.
    const ValidationReport& report() const noexcept { return report_; }

private:
    std::size_t node_count_;
    std::size_t internal_dim_;
    std::map<Key, InternalOperator> transitions_;
    ValidationReport report_;
};

ValidationReport validate_channel(const OqwChannel& channel);

/// Block-diagonal walk state: node -> rho_ii. Missing nodes carry a zero block.
class BlockState {
public:
    BlockState() = default;
    explicit BlockState(std::map<NodeId, InternalOperator> blocks) : blocks_(std::move(blocks)) {}

    /// Walker at `node` with internal pure state `psi` (normalized here).
    static BlockState localized(NodeId node, const Eigen::VectorXcd& psi);

    const std::map<NodeId, InternalOperator>& blocks() const noexcept { return blocks_; }
    double total_trace() const;

private:
    std::map<NodeId, InternalOperator> blocks_;
};

/// Checks the state invariants (Hermitian, PSD, unit total trace) against
/// `channel`'s geometry; throws StructureError describing the first violation.
void check_state(const OqwChannel& channel, const BlockState& state);

/// One application of the walk: rho'_jj = sum_i B_i^j rho_ii B_i^j'.
/// Throws CompletenessError for channels failing validation and
/// StructureError for states referencing unknown nodes or wrong dimensions.
BlockState step(const OqwChannel& channel, const BlockState& state);

BlockState evolve(const OqwChannel& channel, BlockState state, std::size_t steps);

/// p_i = tr(rho_ii) for every node of the channel.
std::vector<double> position_marginal(const OqwChannel& channel, const BlockState& state);

/// Von Neumann entropy of the full block-diagonal state (nats).
double von_neumann_entropy(const BlockState& state);

}  // namespace oqw
