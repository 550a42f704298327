#include "oqw/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oqw {

std::string ValidationReport::describe() const {
    if (ok()) return "ok";
    std::ostringstream out;
    out << "completeness violated at " << defects.size() << " node(s):";
    for (const auto& d : defects) out << " [node " << d.node << ", defect " << d.defect << "]";
    return out.str();
}

OqwChannel::OqwChannel(std::size_t node_count, std::size_t internal_dim,
                       std::map<Key, InternalOperator> transitions)
    : node_count_(node_count), internal_dim_(internal_dim), transitions_(std::move(transitions)) {
    if (node_count_ == 0) throw StructureError("OqwChannel: node_count must be positive");
    if (internal_dim_ == 0) throw StructureError("OqwChannel: internal_dim must be positive");
    const auto dim = static_cast<Eigen::Index>(internal_dim_);
    for (const auto& [key, op] : transitions_) {
        if (key.first >= node_count_ || key.second >= node_count_) {
            std::ostringstream msg;
            msg << "OqwChannel: transition " << key.first << "->" << key.second
                << " references a node outside [0, " << node_count_ << ")";
            throw StructureError(msg.str());
        }
        if (op.rows() != dim || op.cols() != dim) {
            std::ostringstream msg;
            msg << "OqwChannel: transition " << key.first << "->" << key.second << " is "
                << op.rows() << "x" << op.cols() << ", expected " << dim << "x" << dim;
            throw StructureError(msg.str());
        }
    }
    report_ = validate_channel(*this);
}

ValidationReport validate_channel(const OqwChannel& channel) {
    const auto dim = static_cast<Eigen::Index>(channel.internal_dim());
    std::vector<InternalOperator> sums(channel.node_count(), InternalOperator::Zero(dim, dim));
    for (const auto& [key, op] : channel.transitions()) {
        sums[key.first].noalias() += op.adjoint() * op;
    }
    ValidationReport report;
    const InternalOperator id = InternalOperator::Identity(dim, dim);
    for (NodeId i = 0; i < sums.size(); ++i) {
        const double defect = (sums[i] - id).cwiseAbs().maxCoeff();
        if (!(defect <= kCompletenessTolerance)) report.defects.push_back({i, defect});
    }
    return report;
}

BlockState BlockState::localized(NodeId node, const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw StructureError("BlockState::localized: zero internal state");
    const Eigen::VectorXcd unit = psi / norm;
    return BlockState({{node, unit * unit.adjoint()}});
}

double BlockState::total_trace() const {
    double total = 0.0;
    for (const auto& [node, block] : blocks_) total += block.trace().real();
    return total;
}

void check_state(const OqwChannel& channel, const BlockState& state) {
    const auto dim = static_cast<Eigen::Index>(channel.internal_dim());
    for (const auto& [node, block] : state.blocks()) {
        std::ostringstream where;
        where << "block " << node << ": ";
        if (node >= channel.node_count()) throw StructureError(where.str() + "unknown node");
        if (block.rows() != dim || block.cols() != dim) {
            throw StructureError(where.str() + "internal dimension mismatch");
        }
        if ((block - block.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
            throw StructureError(where.str() + "not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<InternalOperator> solver(block, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < kPsdFloor) {
            throw StructureError(where.str() + "not positive semidefinite");
        }
    }
    if (std::abs(state.total_trace() - 1.0) > kTraceTolerance) {
        throw StructureError("state traces do not sum to 1");
    }
}

BlockState step(const OqwChannel& channel, const BlockState& state) {
    if (!channel.report().ok()) {
        throw CompletenessError("step: refusing unvalidated channel, " + channel.report().describe());
    }
    const auto dim = static_cast<Eigen::Index>(channel.internal_dim());
    for (const auto& [node, block] : state.blocks()) {
        if (node >= channel.node_count()) throw StructureError("step: state references unknown node");
        if (block.rows() != dim || block.cols() != dim) {
            throw StructureError("step: state block has wrong internal dimension");
        }
    }

    std::map<NodeId, InternalOperator> out;
    const auto& blocks = state.blocks();
    for (const auto& [key, op] : channel.transitions()) {
        const auto src = blocks.find(key.first);
        if (src == blocks.end()) continue;
        auto [it, inserted] = out.try_emplace(key.second, InternalOperator::Zero(dim, dim));
        it->second.noalias() += op * src->second * op.adjoint();
    }
    return BlockState(std::move(out));
}

BlockState evolve(const OqwChannel& channel, BlockState state, std::size_t steps) {
    for (std::size_t n = 0; n < steps; ++n) state = step(channel, state);
    return state;
}

std::vector<double> position_marginal(const OqwChannel& channel, const BlockState& state) {
    std::vector<double> p(channel.node_count(), 0.0);
    for (const auto& [node, block] : state.blocks()) {
        if (node >= p.size()) throw StructureError("position_marginal: unknown node");
        p[node] = block.trace().real();
    }
    return p;
}

double von_neumann_entropy(const BlockState& state) {
    double entropy = 0.0;
    for (const auto& [node, block] : state.blocks()) {
        const InternalOperator herm = 0.5 * (block + block.adjoint());
        Eigen::SelfAdjointEigenSolver<InternalOperator> solver(herm, Eigen::EigenvaluesOnly);
        for (const double lambda : solver.eigenvalues()) {
            if (lambda > 0.0) entropy -= lambda * std::log(lambda);
        }
    }
    return entropy;
}

}  // namespace oqw
