// linear_model.hpp - the linear open quantum walk on nodes 0..N-1.
//
// From node i the walker hops right with probability omega (applying U_i)
// and left with probability lambda = 1 - omega (applying U_{i-1}^dagger);
// the two boundary nodes keep the blocked move as a self-loop. Position
// statistics follow a birth-death Markov chain whose steady state is the
// truncated geometric law pi_m ~ a^m with a = omega / lambda.

#pragma once

#include "oqw/core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace oqw {

class LinearWalkSpec {
public:
    /// Throws std::invalid_argument for N < 2, omega outside (0, 1),
    /// epsilon <= 0, or a unitary list that is not N-1 square unitaries of
    /// equal dimension. An empty list means identities (internal dim 1).
    LinearWalkSpec(std::size_t node_count, double omega, double epsilon = 1.0,
                   std::vector<Eigen::MatrixXcd> unitaries = {});

    std::size_t node_count() const noexcept { return node_count_; }
    double omega() const noexcept { return omega_; }
    double lambda() const noexcept { return 1.0 - omega_; }
    double epsilon() const noexcept { return epsilon_; }
    /// a = omega / lambda.
    double ratio() const noexcept { return omega_ / (1.0 - omega_); }
    double log_ratio() const noexcept;
    std::size_t internal_dim() const noexcept;
    const std::vector<Eigen::MatrixXcd>& unitaries() const noexcept { return unitaries_; }

    /// Same walk with omega -> 1 - omega.
    LinearWalkSpec mirrored() const;

private:
    std::size_t node_count_;
    double omega_;
    double epsilon_;
    std::vector<Eigen::MatrixXcd> unitaries_;
};

/// Probability vector over the nodes: nonnegative, summing to 1 within 1e-12.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);
    static Distribution localized(std::size_t node_count, std::size_t node);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

OqwChannel build_channel(const LinearWalkSpec& spec);

/// Dense column-stochastic matrix with T(j, i) = P(i -> j).
Eigen::MatrixXd transition_matrix(const LinearWalkSpec& spec);

/// One matrix-free step of the position chain, O(N). `next` is overwritten.
void markov_step(double omega, std::span<const double> current, std::span<double> next);

Distribution markov_evolve(const LinearWalkSpec& spec, const Distribution& p0, std::size_t steps);

/// Log-domain evaluation, finite for N up to 1e6 and omega in [1e-6, 1 - 1e-6].
Distribution steady_state(const LinearWalkSpec& spec);

/// log pi_m for every node; exact log-domain values, no underflow to -inf.
std::vector<double> log_steady_state(const LinearWalkSpec& spec);

/// eta = 2 - 1/omega, an N-independent lower bound on pi_{N-1}. Requires omega > 1/2.
double boundary_mass_bound(double omega);

/// Internal block predicted at node m for a walker started as |psi><psi| at
/// node 0: U_{m-1}...U_0 |psi><psi| U_0^dagger...U_{m-1}^dagger.
Eigen::MatrixXcd internal_state_at_node(const LinearWalkSpec& spec, const Eigen::VectorXcd& psi,
                                        std::size_t node);

}  // namespace oqw
