#include "oqw/thermalization.hpp"

#include "oqw/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oqw::thermalization {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlatEntropy = 1e-12;

void require_drift(double omega) {
    if (!(omega > 0.5 && omega < 1.0)) {
        throw std::domain_error("thermalization formulas need 1/2 < omega < 1 (mirror omega < 1/2 first)");
    }
}

void require_positive_time(double t, const char* who) {
    if (!(t > 0.0)) throw std::domain_error(std::string(who) + ": t must be positive");
}

struct TailSums {
    double mass;     // sum_{x > N'} pi_x
    double entropy;  // -sum_{x > N'} pi_x log pi_x
};

TailSums tail_sums(const LinearWalkSpec& spec, double n_prime) {
    const auto logs = log_steady_state(spec);
    TailSums sums{0.0, 0.0};
    for (std::size_t x = 0; x < logs.size(); ++x) {
        if (static_cast<double>(x) <= n_prime) continue;
        const double p = std::exp(logs[x]);
        sums.mass += p;
        sums.entropy -= p * logs[x];
    }
    return sums;
}

// Entropy of the Gaussian restricted to x <= N':
//   (1 + log 2 pi t)(1 + erf z)/4 - u e^{-u^2/2t} / (2 sqrt(2 pi t)),
// u = N' - v t, z = u / sqrt(2t), for variance 2 D t = t. S_B is the exact
// entropy of w * pi over the tail nodes.
ApproxEntropy split_entropy(const GaussianProfile& profile, double n_prime, const TailSums& tail, double t) {
    const double var = 2.0 * profile.D * t;
    const double u = n_prime - profile.v * t;
    const double z = u / std::sqrt(2.0 * var);
    const double s_gauss = (1.0 + std::log(2.0 * std::numbers::pi * var)) * std::erfc(-z) / 4.0 -
                           u * std::exp(-u * u / (2.0 * var)) / (2.0 * std::sqrt(2.0 * std::numbers::pi * var));
    const double w = 0.5 * std::erfc(z);
    const double s_boltz = w > 0.0 ? -w * std::log(w) * tail.mass + w * tail.entropy : 0.0;
    return ApproxEntropy{s_gauss + s_boltz, s_gauss, s_boltz, w};
}

}  // namespace

GaussianProfile GaussianProfile::from_omega(double omega) {
    if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("GaussianProfile: omega must lie in (0, 1)");
    return GaussianProfile{2.0 * omega - 1.0};
}

double GaussianProfile::stddev(double t) const {
    return std::sqrt(2.0 * D * t);
}

ApproxEntropyParams approx_entropy_params(const LinearWalkSpec& spec, double cutoff_sigmas) {
    require_drift(spec.omega());
    if (!(cutoff_sigmas > 0.0)) throw std::invalid_argument("approx_entropy_params: cutoff must be positive");
    const auto unit = equilibrium::EnsemblePoint::from_omega(spec.node_count(), spec.omega(), 1.0);
    const double sigma = equilibrium::asymptotic::sigma_E(unit);
    const double n = static_cast<double>(spec.node_count());
    const double n_prime = n - cutoff_sigmas * sigma;
    if (!(n_prime > 0.0 && n_prime < n)) {
        throw std::domain_error("approx_entropy_params: cutoff N' falls outside (0, N)");
    }
    return ApproxEntropyParams{n_prime, sigma, cutoff_sigmas};
}

double shannon_entropy(std::span<const double> p) {
    double s = 0.0;
    for (const double x : p) {
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}

TrajectoryRecord simulate_trajectory(const LinearWalkSpec& spec, const Distribution& p0,
                                     std::size_t steps, const TrajectoryOptions& options) {
    const std::size_t n = spec.node_count();
    if (p0.size() != n) throw std::invalid_argument("simulate_trajectory: p0 has wrong length");

    TrajectoryRecord rec;
    rec.entropy.reserve(steps + 1);
    rec.energy.reserve(steps + 1);
    if (options.keep_distributions) rec.distributions.reserve(steps + 1);

    std::vector<double> cur(p0.probs().begin(), p0.probs().end());
    std::vector<double> nxt(n);
    const double eps = spec.epsilon();
    auto record = [&](const std::vector<double>& p) {
        double e = 0.0;
        for (std::size_t m = 0; m < n; ++m) e += p[m] * static_cast<double>(m);
        rec.entropy.push_back(shannon_entropy(p));
        rec.energy.push_back(eps * e);
        if (options.keep_distributions) rec.distributions.push_back(p);
    };

    record(cur);
    for (std::size_t s = 0; s < steps; ++s) {
        markov_step(spec.omega(), cur, nxt);
        cur.swap(nxt);
        record(cur);
    }

    rec.temperature = finite_difference_temperature(rec.energy, rec.entropy, options.temperature_half_width);
    rec.equilibrium_temperature = equilibrium::equilibrium_temperature(spec.omega(), eps);
    auto production = entropy_production(rec, rec.equilibrium_temperature);
    rec.entropy_generated = std::move(production.series);
    rec.heat_term_dropped = production.heat_term_dropped;
    return rec;
}

TrajectoryRecord simulate_trajectory(const LinearWalkSpec& spec, std::size_t steps,
                                     const TrajectoryOptions& options) {
    return simulate_trajectory(spec, Distribution::localized(spec.node_count(), 0), steps, options);
}

std::vector<double> finite_difference_temperature(std::span<const double> energy,
                                                  std::span<const double> entropy,
                                                  std::size_t half_width) {
    if (energy.size() != entropy.size()) {
        throw std::invalid_argument("finite_difference_temperature: series lengths differ");
    }
    if (half_width == 0) throw std::invalid_argument("finite_difference_temperature: half_width must be positive");
    const std::size_t len = energy.size();
    std::vector<double> out(len, kInf);
    if (len < 2) return out;
    for (std::size_t n = 0; n < len; ++n) {
        const std::size_t lo = n >= half_width ? n - half_width : 0;
        const std::size_t hi = std::min(len - 1, n + half_width);
        const double ds = entropy[hi] - entropy[lo];
        if (std::abs(ds) < kFlatEntropy) continue;
        out[n] = (energy[hi] - energy[lo]) / ds;
    }
    return out;
}

double gaussian_probability(const GaussianProfile& profile, double x, double t) {
    require_positive_time(t, "gaussian_probability");
    const double var = 2.0 * profile.D * t;
    const double d = x - profile.v * t;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

ThermalizationWindow thermalization_window(std::size_t node_count, double omega) {
    require_drift(omega);
    const double v = 2.0 * omega - 1.0;
    const double root = std::sqrt(1.0 + v * static_cast<double>(node_count));
    const double start = (root - 1.0) / v;
    const double end = (root + 1.0) / v;
    return ThermalizationWindow{start * start, end * end, 4.0 * root / (v * v)};
}

double entropy_gaussian_regime(double t) {
    require_positive_time(t, "entropy_gaussian_regime");
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * t);
}

double tail_weight(const ApproxEntropyParams& params, const GaussianProfile& profile, double t) {
    if (!(t > 0.0)) return 0.0;
    const double z = (params.n_prime - profile.v * t) / std::sqrt(4.0 * profile.D * t);
    return 0.5 * std::erfc(z);
}

double approx_probability(const LinearWalkSpec& spec, const ApproxEntropyParams& params, double t,
                          double x) {
    require_drift(spec.omega());
    require_positive_time(t, "approx_probability");
    const auto profile = GaussianProfile::from_omega(spec.omega());
    if (x <= params.n_prime) return gaussian_probability(profile, x, t);
    if (x > static_cast<double>(spec.node_count() - 1)) return 0.0;

    // pi at (possibly fractional) x from the geometric law, in log domain.
    const double log_a = spec.log_ratio();
    const double nd = static_cast<double>(spec.node_count());
    const double log_q = -std::abs(log_a);
    const double log_sum = std::log(-std::expm1(nd * log_q)) - std::log(-std::expm1(log_q));
    const double log_pi = (nd - 1.0 - x) * log_q - log_sum;  // log_a > 0 here
    return tail_weight(params, profile, t) * std::exp(log_pi);
}

double approx_probability(const LinearWalkSpec& spec, double t, double x) {
    return approx_probability(spec, approx_entropy_params(spec), t, x);
}

ApproxEntropy approx_entropy(const LinearWalkSpec& spec, const ApproxEntropyParams& params, double t) {
    require_drift(spec.omega());
    require_positive_time(t, "approx_entropy");
    return split_entropy(GaussianProfile::from_omega(spec.omega()), params.n_prime,
                         tail_sums(spec, params.n_prime), t);
}

ApproxEntropy approx_entropy(const LinearWalkSpec& spec, double t) {
    return approx_entropy(spec, approx_entropy_params(spec), t);
}

ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy,
                           const std::function<double(double)>& approx) {
    const auto window = thermalization_window(spec.node_count(), spec.omega());
    const auto first = static_cast<std::size_t>(std::ceil(window.t_start));
    const auto last = static_cast<std::size_t>(std::floor(window.t_end));
    if (last < first) throw std::domain_error("error_metrics: empty thermalization window");
    if (exact_entropy.size() <= last) {
        throw std::invalid_argument("error_metrics: trajectory must cover step " + std::to_string(last));
    }

    const double log_n = std::log(static_cast<double>(spec.node_count()));
    ErrorMetrics m{0.0, 0.0, 0.0, 0.0, 0.0, first, last, window};
    double sum_rel = 0.0;
    double sum_abs = 0.0;
    for (std::size_t t = first; t <= last; ++t) {
        const double exact = exact_entropy[t];
        const double delta = std::abs(approx(static_cast<double>(t)) - exact);
        const double rel = delta / exact;
        m.delta_max = std::max(m.delta_max, delta);
        m.delta_rel_max = std::max(m.delta_rel_max, rel);
        sum_rel += rel;
        sum_abs += delta;
    }
    const double count = static_cast<double>(last - first + 1);
    m.mean_rel = sum_rel / count;
    m.delta_log_n_max = m.delta_max / log_n;
    m.mean_log_n = sum_abs / count / log_n;
    return m;
}

ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy,
                           const ApproxEntropyParams& params) {
    // Tail sums are time independent; hoist them out of the per-step closure.
    const auto tail = tail_sums(spec, params.n_prime);
    const auto profile = GaussianProfile::from_omega(spec.omega());
    return error_metrics(spec, exact_entropy,
                         [&](double t) { return split_entropy(profile, params.n_prime, tail, t).total; });
}

ErrorMetrics error_metrics(const LinearWalkSpec& spec, std::span<const double> exact_entropy) {
    return error_metrics(spec, exact_entropy, approx_entropy_params(spec));
}

double noneq_temperature_analytic(const GaussianProfile& profile, double epsilon, double t,
                                  const ThermalizationWindow& window) {
    require_positive_time(t, "noneq_temperature_analytic");
    if (t >= window.t_start) {
        throw std::domain_error("noneq_temperature_analytic: t beyond the drift regime, use the trajectory estimate");
    }
    return 2.0 * profile.v * epsilon * t;
}

EntropyProduction entropy_production(std::span<const double> entropy, std::span<const double> energy,
                                     double equilibrium_temperature) {
    if (entropy.size() != energy.size()) throw std::invalid_argument("entropy_production: series lengths differ");
    EntropyProduction out;
    out.series.resize(entropy.size());
    out.heat_term_dropped = std::isinf(equilibrium_temperature);
    for (std::size_t n = 0; n < entropy.size(); ++n) {
        out.series[n] = out.heat_term_dropped ? entropy[n] : entropy[n] - energy[n] / equilibrium_temperature;
    }
    return out;
}

EntropyProduction entropy_production(const TrajectoryRecord& trajectory, double equilibrium_temperature) {
    return entropy_production(trajectory.entropy, trajectory.energy, equilibrium_temperature);
}

DqcEstimates dqc_step_estimates(std::size_t node_count, double omega) {
    const auto window = thermalization_window(node_count, omega);
    const double n_steps = static_cast<double>(node_count) / (2.0 * omega - 1.0);
    if (!(window.t_start <= n_steps && n_steps <= window.t_end)) {
        throw std::logic_error("dqc_step_estimates: n_steps escaped the thermalization window");
    }
    return DqcEstimates{window.t_start, n_steps, window.t_end};
}

}  // namespace oqw::thermalization
