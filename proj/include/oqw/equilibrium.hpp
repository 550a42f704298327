// equilibrium.hpp - statistical mechanics of the thermalized linear walk.
//
// The steady state pi_m ~ a^m is read as a Boltzmann law over equally spaced
// levels E_m = m * epsilon (ground state at zero, k_B = 1), so that
// a = omega / (1 - omega) = exp(-beta * epsilon). Positive temperature means
// omega < 1/2; omega > 1/2 is a population inversion with T < 0.
//
// Divergences are reported through IEEE infinities rather than exceptions:
// T at omega = 1/2 is +inf, F at beta = 0 is -inf (the beta -> 0+ side), and
// the large-N asymptotes that blow up at beta = 0 return +/-inf there.

#pragma once

#include <cstddef>

namespace oqw::equilibrium {

double beta_from_omega(double omega, double epsilon);
double omega_from_beta(double beta, double epsilon);

/// T = -epsilon / log(omega / (1 - omega)); +inf at omega = 1/2.
double equilibrium_temperature(double omega, double epsilon);

/// (N, epsilon, beta) with omega kept consistent. beta * epsilon is the
/// authoritative coordinate; omega and lambda are derived without rounding
/// them through 1 - omega.
class EnsemblePoint {
public:
    static EnsemblePoint from_omega(std::size_t node_count, double omega, double epsilon = 1.0);
    static EnsemblePoint from_beta(std::size_t node_count, double beta, double epsilon = 1.0);

    std::size_t node_count() const noexcept { return node_count_; }
    double epsilon() const noexcept { return epsilon_; }
    double beta() const noexcept { return x_ / epsilon_; }
    /// beta * epsilon, dimensionless.
    double reduced_beta() const noexcept { return x_; }
    double omega() const noexcept { return omega_; }
    double lambda() const noexcept { return lambda_; }
    double temperature() const noexcept;

private:
    EnsemblePoint(std::size_t n, double epsilon, double x, double omega, double lambda);

    std::size_t node_count_;
    double epsilon_;
    double x_;
    double omega_;
    double lambda_;
};

struct ThermoPoint {
    double Z;
    double log_Z;
    double mean_E;
    double var_E;
    double S;
    double F;
    double C_V;
    double T;
};

double log_partition_function(const EnsemblePoint& p);
/// May overflow to +inf for large N with omega > 1/2; use log_partition_function there.
double partition_function(const EnsemblePoint& p);
double mean_energy(const EnsemblePoint& p);
double energy_variance(const EnsemblePoint& p);
double entropy(const EnsemblePoint& p);
/// dS/dbeta = beta * d<E>/dbeta = -beta * Var(E).
double entropy_derivative(const EnsemblePoint& p);
/// F = -log(Z) / beta; -inf at beta = 0.
double free_energy(const EnsemblePoint& p);
/// dF/dbeta = log(Z)/beta^2 + <E>/beta; +inf at beta = 0.
double free_energy_derivative(const EnsemblePoint& p);
double heat_capacity(const EnsemblePoint& p);
/// d<E>/domega at fixed N and epsilon, finite everywhere including omega = 1/2.
double energy_cost_domega(const EnsemblePoint& p);
/// E_g = (N - 1) epsilon.
double energy_gap(std::size_t node_count, double epsilon);

ThermoPoint thermo(const EnsemblePoint& p);

// N >> 1 and |beta| << 1 asymptotic forms, kept separate from the exact
// expressions so they can be compared against them.
namespace asymptotic {

/// sigma_E = epsilon / |2 sinh(beta epsilon / 2)|.
double sigma_E(const EnsemblePoint& p);
double entropy_derivative_large_n(const EnsemblePoint& p);
/// -1/beta - epsilon.
double entropy_derivative_small_beta(const EnsemblePoint& p);
double free_energy_derivative_large_n(const EnsemblePoint& p);
/// (1 - log(beta epsilon)) / beta^2, beta > 0 only (NaN otherwise).
double free_energy_derivative_small_beta(const EnsemblePoint& p);
double heat_capacity_large_n(const EnsemblePoint& p);
/// e^{beta epsilon} = (1 - omega) / omega.
double heat_capacity_small_beta(const EnsemblePoint& p);
/// epsilon / (1 - 2 omega)^2; +inf at omega = 1/2.
double energy_cost_domega_large_n(const EnsemblePoint& p);

}  // namespace asymptotic

}  // namespace oqw::equilibrium
