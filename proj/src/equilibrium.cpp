#include "oqw/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oqw::equilibrium {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this |N * beta * epsilon| the closed forms lose digits to cancellation
// between O(1/x) terms; the moment series of the uniform law takes over.
constexpr double kSeriesThreshold = 1e-1;

bool use_series(std::size_t n, double x) {
    return std::abs(static_cast<double>(n) * x) < kSeriesThreshold;
}

void require_omega(double omega) {
    if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("omega must lie in (0, 1)");
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
}

// e^y / (e^y - 1)^2 = 1 / (4 sinh^2(y/2)), even in y.
double bose_kernel(double y) {
    const double s = std::abs(y);
    if (s > 600.0) return std::exp(-s);
    const double sh = std::sinh(0.5 * s);
    return 0.25 / (sh * sh);
}

// Dimensionless pieces in x = beta * epsilon for levels 0..N-1.

double log_z_reduced(std::size_t n, double x) {
    const double nd = static_cast<double>(n);
    if (use_series(n, x)) {
        const double n2 = nd * nd;
        const double x2 = x * x;
        // Cumulants of the uniform law on 0..N-1: kappa_2k = B_2k (N^2k - 1) / 2k.
        return std::log(nd) - 0.5 * (nd - 1.0) * x + (n2 - 1.0) * x2 / 24.0 -
               (n2 * n2 - 1.0) * x2 * x2 / 2880.0 + (n2 * n2 * n2 - 1.0) * x2 * x2 * x2 / 181440.0;
    }
    if (x < 0.0) return -(nd - 1.0) * x + log_z_reduced(n, -x);
    return std::log(-std::expm1(-nd * x)) - std::log(-std::expm1(-x));
}

double mean_level(std::size_t n, double x) {
    const double nd = static_cast<double>(n);
    if (use_series(n, x)) {
        const double n2 = nd * nd;
        const double n4 = n2 * n2;
        const double x2 = x * x;
        return 0.5 * (nd - 1.0) - (n2 - 1.0) * x / 12.0 + (n4 - 1.0) * x * x2 / 720.0 -
               (n4 * n2 - 1.0) * x * x2 * x2 / 30240.0 + (n4 * n4 - 1.0) * x * x2 * x2 * x2 / 1209600.0;
    }
    if (x < 0.0) return (nd - 1.0) - mean_level(n, -x);
    const double em = std::expm1(nd * x);
    return 1.0 / std::expm1(x) - (std::isinf(em) ? 0.0 : nd / em);
}

double level_variance(std::size_t n, double x) {
    const double nd = static_cast<double>(n);
    const double n2 = nd * nd;
    if (use_series(n, x)) {
        const double n4 = n2 * n2;
        const double x2 = x * x;
        return (n2 - 1.0) / 12.0 - (n4 - 1.0) * x2 / 240.0 + (n4 * n2 - 1.0) * x2 * x2 / 6048.0 -
               (n4 * n4 - 1.0) * x2 * x2 * x2 / 172800.0;
    }
    return bose_kernel(x) - n2 * bose_kernel(nd * x);
}

}  // namespace

double beta_from_omega(double omega, double epsilon) {
    require_omega(omega);
    require_epsilon(epsilon);
    if (omega == 0.5) return 0.0;
    return -(std::log(omega) - std::log1p(-omega)) / epsilon;
}

double omega_from_beta(double beta, double epsilon) {
    require_epsilon(epsilon);
    return 1.0 / (1.0 + std::exp(beta * epsilon));
}

double equilibrium_temperature(double omega, double epsilon) {
    const double beta = beta_from_omega(omega, epsilon);
    if (beta == 0.0) return kInf;
    return 1.0 / beta;
}

EnsemblePoint::EnsemblePoint(std::size_t n, double epsilon, double x, double omega, double lambda)
    : node_count_(n), epsilon_(epsilon), x_(x), omega_(omega), lambda_(lambda) {
    if (n < 2) throw std::invalid_argument("EnsemblePoint: N must be at least 2");
}

EnsemblePoint EnsemblePoint::from_omega(std::size_t node_count, double omega, double epsilon) {
    const double beta = beta_from_omega(omega, epsilon);
    return EnsemblePoint(node_count, epsilon, beta * epsilon, omega, 1.0 - omega);
}

EnsemblePoint EnsemblePoint::from_beta(std::size_t node_count, double beta, double epsilon) {
    require_epsilon(epsilon);
    if (!std::isfinite(beta)) throw std::invalid_argument("EnsemblePoint: beta must be finite");
    const double x = beta * epsilon;
    return EnsemblePoint(node_count, epsilon, x, 1.0 / (1.0 + std::exp(x)), 1.0 / (1.0 + std::exp(-x)));
}

double EnsemblePoint::temperature() const noexcept {
    return x_ == 0.0 ? kInf : epsilon_ / x_;
}

double log_partition_function(const EnsemblePoint& p) {
    return log_z_reduced(p.node_count(), p.reduced_beta());
}

double partition_function(const EnsemblePoint& p) {
    if (p.reduced_beta() == 0.0) return static_cast<double>(p.node_count());
    return std::exp(log_partition_function(p));
}

double mean_energy(const EnsemblePoint& p) {
    return p.epsilon() * mean_level(p.node_count(), p.reduced_beta());
}

double energy_variance(const EnsemblePoint& p) {
    return p.epsilon() * p.epsilon() * level_variance(p.node_count(), p.reduced_beta());
}

double entropy(const EnsemblePoint& p) {
    // S is even in beta; evaluating at |x| avoids the large -(N-1)x shift in log Z.
    const double x = std::abs(p.reduced_beta());
    const double s = log_z_reduced(p.node_count(), x) + x * mean_level(p.node_count(), x);
    return s < 0.0 ? 0.0 : s;
}

double entropy_derivative(const EnsemblePoint& p) {
    return -p.beta() * energy_variance(p);
}

double free_energy(const EnsemblePoint& p) {
    if (p.reduced_beta() == 0.0) return -kInf;
    return -log_partition_function(p) / p.beta();
}

double free_energy_derivative(const EnsemblePoint& p) {
    if (p.reduced_beta() == 0.0) return kInf;
    // log Z / beta^2 + <E> / beta, regrouped as (log Z + beta <E>) / beta^2 = S / beta^2.
    const double b = p.beta();
    return entropy(p) / (b * b);
}

double heat_capacity(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    return x * x * level_variance(p.node_count(), x);
}

double energy_cost_domega(const EnsemblePoint& p) {
    const std::size_t n = p.node_count();
    const double x = p.reduced_beta();
    const double eps = p.epsilon();
    if (use_series(n, x)) {
        // d<E>/domega = d<E>/dbeta * dbeta/domega = Var(E) / (epsilon omega lambda).
        return energy_variance(p) / (eps * p.omega() * p.lambda());
    }
    const double nd = static_cast<double>(n);
    const double one_minus_two_omega = p.lambda() - p.omega();
    const double first = 1.0 / (one_minus_two_omega * one_minus_two_omega);
    // N^2 (lambda omega)^{N-1} / (lambda^N - omega^N)^2 = N^2 q^{N-1} / (c^2 (1 - q^N)^2)
    // with q = exp(-|x|) and c = lambda for x > 0, omega for x < 0.
    const double s = std::abs(x);
    const double c = x > 0.0 ? p.lambda() : p.omega();
    const double denom = -std::expm1(-nd * s);
    const double second = nd * nd * std::exp(-(nd - 1.0) * s) / (c * c * denom * denom);
    return eps * (first - second);
}

double energy_gap(std::size_t node_count, double epsilon) {
    require_epsilon(epsilon);
    if (node_count < 1) throw std::invalid_argument("energy_gap: N must be positive");
    return static_cast<double>(node_count - 1) * epsilon;
}

ThermoPoint thermo(const EnsemblePoint& p) {
    ThermoPoint t{};
    t.log_Z = log_partition_function(p);
    t.Z = partition_function(p);
    t.mean_E = mean_energy(p);
    t.var_E = energy_variance(p);
    t.S = entropy(p);
    t.F = free_energy(p);
    t.C_V = heat_capacity(p);
    t.T = p.temperature();
    return t;
}

namespace asymptotic {

double sigma_E(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    if (x == 0.0) return kInf;
    return p.epsilon() / std::abs(2.0 * std::sinh(0.5 * x));
}

double entropy_derivative_large_n(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    if (x == 0.0) return kInf;
    return -p.beta() * p.epsilon() * p.epsilon() * bose_kernel(x);
}

double entropy_derivative_small_beta(const EnsemblePoint& p) {
    if (p.reduced_beta() == 0.0) return kInf;
    return -1.0 / p.beta() - p.epsilon();
}

double free_energy_derivative_large_n(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    if (x == 0.0) return kInf;
    const double b = p.beta();
    return -std::log(std::abs(-std::expm1(-x))) / (b * b) + p.epsilon() / (b * std::expm1(x));
}

double free_energy_derivative_small_beta(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    if (x == 0.0) return kInf;
    if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double b = p.beta();
    return (1.0 - std::log(x)) / (b * b);
}

double heat_capacity_large_n(const EnsemblePoint& p) {
    const double x = p.reduced_beta();
    if (x == 0.0) return 1.0;
    return x * x * bose_kernel(x);
}

double heat_capacity_small_beta(const EnsemblePoint& p) {
    return std::exp(p.reduced_beta());
}

double energy_cost_domega_large_n(const EnsemblePoint& p) {
    const double d = p.lambda() - p.omega();
    if (d == 0.0) return kInf;
    return p.epsilon() / (d * d);
}

}  // namespace asymptotic

}  // namespace oqw::equilibrium
