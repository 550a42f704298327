// thermalization.hpp - nonequilibrium behaviour of the linear walk.
//
// A walker released at node 0 with omega > 1/2 first spreads as a drifting
// Gaussian (velocity v = 2 omega - 1, dispersion D = 1/2) and then piles up
// against the last node, relaxing to the Boltzmann steady state. This module
// simulates exact trajectories, provides the analytic drift-regime forms,
// the thermalization window, the Gaussian + Boltzmann entropy approximation
// S_a(t), and the entropy-production bookkeeping.
//
// All analytic formulas here are the v > 0 forms; for omega < 1/2 apply them
// to the mirrored walk (omega -> 1 - omega, m -> N - 1 - m).

#pragma once

#include "oqw/linear_model.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oqw::thermalization {

struct GaussianProfile {
    double v;         // drift, nodes per step
    double D = 0.5;   // dispersion, nodes^2 per step

    static GaussianProfile from_omega(double omega);
    double mean(double t) const noexcept { return v * t; }
    double stddev(double t) const;
};

struct ThermalizationWindow {
    double t_start;
    double t_end;
    double t_therm;
};

/// Cutoff between the Gaussian and Boltzmann parts: N' = N - k * sigma_ss,
/// sigma_ss being the large-N steady-state spread in node units.
struct ApproxEntropyParams {
    double n_prime;
    double sigma_ss;
    double cutoff_sigmas;
};

/// Default k. k = 4 matches the target error metrics within tolerance for
/// most entries; k = 2 gives the narrower cutoff N - 2 sigma_ss.
inline constexpr double kDefaultCutoffSigmas = 4.0;

ApproxEntropyParams approx_entropy_params(const LinearWalkSpec& spec,
                                          double cutoff_sigmas = kDefaultCutoffSigmas);

struct TrajectoryOptions {
    /// Half-width (steps) of the centred difference used for T_est.
    std::size_t temperature_half_width = 5;
    /// Keep p^{(n)} for every step (N * (steps + 1) doubles).
    bool keep_distributions = false;
};

/// Per-step series, index n = 0..steps.
struct TrajectoryRecord {
    std::vector<double> entropy;            // S(n), nats
    std::vector<double> energy;             // <E>(n)
    std::vector<double> temperature;        // T_est(n); +inf where |dS| < 1e-12
    std::vector<double> entropy_generated;  // S_gen(n)
    std::vector<std::vector<double>> distributions;
    double equilibrium_temperature = 0.0;
    /// Set when T_eq diverges (omega = 1/2); S_gen then equals S.
    bool heat_term_dropped = false;

    std::size_t steps() const noexcept { return entropy.empty() ? 0 : entropy.size() - 1; }
};

double shannon_entropy(std::span<const double> p);

TrajectoryRecord simulate_trajectory(const LinearWalkSpec& spec, const Distribution& p0,
                                     std::size_t steps, const TrajectoryOptions& options = {});
/// Walker localized at node 0.
TrajectoryRecord simulate_trajectory(const LinearWalkSpec& spec, std::size_t steps,
                                     const TrajectoryOptions& options = {});

/// Centred-difference dE/dS with the window clipped at the series ends.
std::vector<double> finite_difference_temperature(std::span<const double> energy,
                                                  std::span<const double> entropy,
                                                  std::size_t half_width);

/// Normal density with mean v t and variance 2 D t. Throws for t <= 0.
double gaussian_probability(const GaussianProfile& profile, double x, double t);

/// Requires omega > 1/2; throws std::domain_error otherwise.
ThermalizationWindow thermalization_window(std::size_t node_count, double omega);

/// 1/2 log(2 pi e t), the entropy of the drifting Gaussian.
double entropy_gaussian_regime(double t);

/// Mass of the drifting Gaussian beyond N' at time t.
double tail_weight(const ApproxEntropyParams& params, const GaussianProfile& profile, double t);

/// P_a(x, t) = P_G + P_B, split at x = N'.
double approx_probability(const LinearWalkSpec& spec, const ApproxEntropyParams& params, double t,
                          double x);
double approx_probability(const LinearWalkSpec& spec, double t, double x);

struct ApproxEntropy {
    double total;      // S_a
    double gaussian;   // S_G
    double boltzmann;  // S_B
    double weight;     // w(t)
};

/// S_a(t) = S_G(t) + S_B(t). S_B is the exact sum over the tail nodes x > N'.
ApproxEntropy approx_entropy(const LinearWalkSpec& spec, const ApproxEntropyParams& params, double t);
ApproxEntropy approx_entropy(const LinearWalkSpec& spec, double t);

struct ErrorMetrics {
    double delta_max;
    double delta_rel_max;
    double mean_rel;
    double delta_log_n_max;
    double mean_log_n;
    std::size_t first_step;
    std::size_t last_step;
    ThermalizationWindow window;
};

/// Compares `approx(t)` with exact S(t) over integer t in [ceil(t_start), floor(t_end)].
ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy,
                           const std::function<double(double)>& approx);
ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy,
                           const ApproxEntropyParams& params);
ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy);

/// T(t) = 2 v epsilon t, valid for 0 < t < t_start; throws std::domain_error outside.
double noneq_temperature_analytic(const GaussianProfile& profile, double epsilon, double t,
                                  const ThermalizationWindow& window);

struct EntropyProduction {
    std::vector<double> series;
    bool heat_term_dropped = false;
};

/// S_gen(t) = S(t) - <E>(t) / T_eq. An infinite T_eq drops the heat term.
EntropyProduction entropy_production(std::span<const double> entropy, std::span<const double> energy,
                                     double equilibrium_temperature);
EntropyProduction entropy_production(const TrajectoryRecord& trajectory, double equilibrium_temperature);

struct DqcEstimates {
    double n_start;
    double n_steps;
    double n_end;
};

/// n_steps = N / (2 omega - 1) bracketed by the thermalization window.
DqcEstimates dqc_step_estimates(std::size_t node_count, double omega);

}  // namespace oqw::thermalization
