#include "oqw/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oqw {

namespace {

constexpr double kUnitaryTolerance = 1e-10;
constexpr double kNormalizationTolerance = 1e-12;

bool is_unitary(const Eigen::MatrixXcd& u) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    const auto id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff() <= kUnitaryTolerance;
}

}  // namespace

LinearWalkSpec::LinearWalkSpec(std::size_t node_count, double omega, double epsilon,
                               std::vector<Eigen::MatrixXcd> unitaries)
    : node_count_(node_count), omega_(omega), epsilon_(epsilon), unitaries_(std::move(unitaries)) {
    if (node_count_ < 2) throw std::invalid_argument("LinearWalkSpec: N must be at least 2");
    if (!(omega_ > 0.0 && omega_ < 1.0)) {
        throw std::invalid_argument("LinearWalkSpec: omega must lie in (0, 1)");
    }
    if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
        throw std::invalid_argument("LinearWalkSpec: epsilon must be positive");
    }
    if (!unitaries_.empty()) {
        if (unitaries_.size() != node_count_ - 1) {
            throw std::invalid_argument("LinearWalkSpec: expected N-1 unitaries, got " +
                                        std::to_string(unitaries_.size()));
        }
        const auto dim = unitaries_.front().rows();
        for (const auto& u : unitaries_) {
            if (u.rows() != dim || !is_unitary(u)) {
                throw std::invalid_argument("LinearWalkSpec: unitaries must be unitary and share one dimension");
            }
        }
    }
}

double LinearWalkSpec::log_ratio() const noexcept {
    // log(omega) - log1p(-omega) keeps precision for omega near 0 or 1.
    return std::log(omega_) - std::log1p(-omega_);
}

std::size_t LinearWalkSpec::internal_dim() const noexcept {
    return unitaries_.empty() ? 1 : static_cast<std::size_t>(unitaries_.front().rows());
}

LinearWalkSpec LinearWalkSpec::mirrored() const {
    return LinearWalkSpec(node_count_, 1.0 - omega_, epsilon_, unitaries_);
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Distribution: empty");
    double total = 0.0;
    for (const double p : probs_) {
        if (!(p >= 0.0)) throw std::invalid_argument("Distribution: negative or NaN entry");
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw std::invalid_argument("Distribution: entries sum to " + std::to_string(total));
    }
}

Distribution Distribution::localized(std::size_t node_count, std::size_t node) {
    if (node >= node_count) throw std::invalid_argument("Distribution::localized: node out of range");
    std::vector<double> p(node_count, 0.0);
    p[node] = 1.0;
    return Distribution(std::move(p));
}

OqwChannel build_channel(const LinearWalkSpec& spec) {
    const std::size_t n = spec.node_count();
    const auto dim = static_cast<Eigen::Index>(spec.internal_dim());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    const double right = std::sqrt(spec.omega());
    const double left = std::sqrt(spec.lambda());
    auto unitary = [&](std::size_t i) -> Eigen::MatrixXcd {
        return spec.unitaries().empty() ? id : spec.unitaries()[i];
    };

    std::map<OqwChannel::Key, InternalOperator> ops;
    ops[{0, 0}] = left * id;
    for (std::size_t i = 0; i + 1 < n; ++i) ops[{i, i + 1}] = right * unitary(i);
    for (std::size_t i = 1; i < n; ++i) ops[{i, i - 1}] = left * unitary(i - 1).adjoint();
    ops[{n - 1, n - 1}] = right * id;
    return OqwChannel(n, spec.internal_dim(), std::move(ops));
}

Eigen::MatrixXd transition_matrix(const LinearWalkSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.node_count());
    const double w = spec.omega();
    const double l = spec.lambda();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    t(0, 0) = l;
    for (Eigen::Index i = 0; i + 1 < n; ++i) t(i + 1, i) = w;
    for (Eigen::Index i = 1; i < n; ++i) t(i - 1, i) = l;
    t(n - 1, n - 1) = w;
    return t;
}

void markov_step(double omega, std::span<const double> current, std::span<double> next) {
    const std::size_t n = current.size();
    if (next.size() != n || n < 2) throw std::invalid_argument("markov_step: size mismatch");
    const double lambda = 1.0 - omega;
    next[0] = lambda * (current[0] + current[1]);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        next[j] = omega * current[j - 1] + lambda * current[j + 1];
    }
    next[n - 1] = omega * (current[n - 2] + current[n - 1]);
}

Distribution markov_evolve(const LinearWalkSpec& spec, const Distribution& p0, std::size_t steps) {
    if (p0.size() != spec.node_count()) throw std::invalid_argument("markov_evolve: length mismatch");
    std::vector<double> cur(p0.probs().begin(), p0.probs().end());
    std::vector<double> nxt(cur.size());
    for (std::size_t s = 0; s < steps; ++s) {
        markov_step(spec.omega(), cur, nxt);
        cur.swap(nxt);
    }
    // Normalization drifts by O(steps * eps); pull it back inside the 1e-12 contract.
    const double total = std::accumulate(cur.begin(), cur.end(), 0.0);
    for (double& p : cur) p /= total;
    return Distribution(std::move(cur));
}

std::vector<double> log_steady_state(const LinearWalkSpec& spec) {
    const std::size_t n = spec.node_count();
    if (spec.omega() == 0.5) return std::vector<double>(n, -std::log(static_cast<double>(n)));

    // log pi_m = m log a - log sum_k a^k. Shift by the largest exponent so the
    // geometric sum is evaluated as sum_k q^k with q = min(a, 1/a) < 1.
    const double log_a = spec.log_ratio();
    const double log_q = -std::abs(log_a);
    const double nd = static_cast<double>(n);
    // log sum_{k<N} q^k = log((1 - q^N) / (1 - q)) = log(-expm1(N log q)) - log(-expm1(log q))
    const double log_sum = std::log(-std::expm1(nd * log_q)) - std::log(-std::expm1(log_q));
    std::vector<double> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double md = static_cast<double>(m);
        // For a > 1 the dominant term is m = N-1; measure distance from it.
        const double k = log_a > 0.0 ? (nd - 1.0 - md) : md;
        out[m] = k * log_q - log_sum;
    }
    return out;
}

Distribution steady_state(const LinearWalkSpec& spec) {
    const auto logs = log_steady_state(spec);
    std::vector<double> p(logs.size());
    std::transform(logs.begin(), logs.end(), p.begin(), [](double l) { return std::exp(l); });
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= total;
    return Distribution(std::move(p));
}

double boundary_mass_bound(double omega) {
    if (!(omega > 0.5 && omega < 1.0)) {
        throw std::invalid_argument("boundary_mass_bound: requires 1/2 < omega < 1");
    }
    return 2.0 - 1.0 / omega;
}

Eigen::MatrixXcd internal_state_at_node(const LinearWalkSpec& spec, const Eigen::VectorXcd& psi,
                                        std::size_t node) {
    if (node >= spec.node_count()) throw std::invalid_argument("internal_state_at_node: node out of range");
    if (static_cast<std::size_t>(psi.size()) != spec.internal_dim()) {
        throw std::invalid_argument("internal_state_at_node: psi has wrong dimension");
    }
    if (std::abs(psi.norm() - 1.0) > kNormalizationTolerance) {
        throw std::invalid_argument("internal_state_at_node: psi is not normalized");
    }
    Eigen::VectorXcd v = psi;
    if (!spec.unitaries().empty()) {
        for (std::size_t i = 0; i < node; ++i) v = spec.unitaries()[i] * v;
    }
    return v * v.adjoint();
}

}  // namespace oqw
