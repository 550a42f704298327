#include "oqw/core.hpp"
#include "oqw/linear_model.hpp"
#include "oqw/thermalization.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace oqw;

namespace {

double l1(std::span<const double> a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b(static_cast<Eigen::Index>(i)));
    return s;
}

double l1(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

Eigen::VectorXd to_eigen(std::span<const double> p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = p[i];
    return v;
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(LinearWalkSpec(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(LinearWalkSpec(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LinearWalkSpec(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LinearWalkSpec(3, 0.4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LinearWalkSpec(3, 0.4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(LinearWalkSpec(3, 0.4, 1.0, {Eigen::MatrixXcd::Identity(2, 2)}), std::invalid_argument);
    Eigen::MatrixXcd not_unitary = Eigen::MatrixXcd::Identity(2, 2);
    not_unitary(0, 0) = 2.0;
    CHECK_THROWS_AS(LinearWalkSpec(3, 0.4, 1.0, {not_unitary, not_unitary}), std::invalid_argument);
    const LinearWalkSpec s(4, 2.0 / 3.0, 2.0);
    CHECK(s.lambda() == doctest::Approx(1.0 / 3.0));
    CHECK(s.ratio() == doctest::Approx(2.0));
    CHECK(s.log_ratio() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(s.internal_dim() == 1);
    CHECK(s.mirrored().omega() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("build_channel, N=2") {
    const auto ch = build_channel(LinearWalkSpec(2, 2.0 / 3.0));
    const auto& t = ch.transitions();
    REQUIRE(t.size() == 4);
    CHECK(t.at({0, 0})(0, 0).real() == doctest::Approx(std::sqrt(1.0 / 3.0)));
    CHECK(t.at({0, 1})(0, 0).real() == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(t.at({1, 0})(0, 0).real() == doctest::Approx(std::sqrt(1.0 / 3.0)));
    CHECK(t.at({1, 1})(0, 0).real() == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("build_channel, N=3 has no 1->1 edge and validates") {
    const auto ch = build_channel(LinearWalkSpec(3, 2.0 / 3.0));
    CHECK(ch.transitions().count({1, 1}) == 0);
    CHECK(ch.transitions().size() == 6);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        std::vector<Eigen::MatrixXcd> us;
        const std::size_t n = 2 + k;
        for (std::size_t i = 0; i + 1 < n; ++i) us.push_back(oracle::random_unitary(2, rng));
        CHECK(validate_channel(build_channel(LinearWalkSpec(n, 0.1 + 0.08 * k, 1.0, us))).ok());
    }
}

TEST_CASE("transition_matrix matches the walk rules") {
    const auto t = transition_matrix(LinearWalkSpec(3, 2.0 / 3.0));
    Eigen::MatrixXd expected(3, 3);
    expected << 1.0 / 3, 1.0 / 3, 0, 2.0 / 3, 0, 1.0 / 3, 0, 2.0 / 3, 2.0 / 3;
    CHECK((t - expected).cwiseAbs().maxCoeff() < 1e-16);
    CHECK((transition_matrix(LinearWalkSpec(2, 0.5)).array() == 0.5).all());
    for (const std::size_t n : {2u, 3u, 17u, 200u}) {
        for (const double w : {0.1, 0.37, 0.5, 0.9}) {
            const auto m = transition_matrix(LinearWalkSpec(n, w));
            CHECK((m.colwise().sum().array() == 1.0).all());
            CHECK((m - oracle::walk_matrix(n, w)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("markov_evolve examples") {
    const LinearWalkSpec spec(3, 2.0 / 3.0);
    const auto e0 = Distribution::localized(3, 0);
    const auto same = markov_evolve(spec, e0, 0);
    CHECK(l1(same.probs(), e0.probs()) == 0.0);
    const auto one = markov_evolve(spec, e0, 1);
    CHECK(one[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(one[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(one[2] == 0.0);
    const auto late = markov_evolve(spec, e0, 500);
    CHECK(l1(late.probs(), oracle::power_iteration(oracle::walk_matrix(3, 2.0 / 3.0), 5000)) < 1e-8);
    CHECK_THROWS_AS(markov_evolve(spec, Distribution::localized(4, 0), 3), std::invalid_argument);
}

TEST_CASE("markov_evolve equals repeated dense products") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 60);
        const double w = 0.02 + 0.96 * u(rng);
        std::vector<double> p(n);
        for (auto& x : p) x = u(rng);
        const double s = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& x : p) x /= s;
        const Distribution p0(p);
        Eigen::VectorXd ref = to_eigen(p0.probs());
        const auto t = oracle::walk_matrix(n, w);
        for (int k = 0; k < 300; ++k) ref = t * ref;
        const auto got = markov_evolve(LinearWalkSpec(n, w), p0, 300);
        CHECK((to_eigen(got.probs()) - ref).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(std::accumulate(got.probs().begin(), got.probs().end(), 0.0) - 1.0) <= 1e-12);
    }
}

TEST_CASE("Distribution invariants") {
    CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::localized(3, 3), std::invalid_argument);
    CHECK_NOTHROW(Distribution({0.25, 0.75}));
}

TEST_CASE("steady_state examples") {
    const auto uni = steady_state(LinearWalkSpec(30, 0.5));
    for (std::size_t m = 0; m < 30; ++m) CHECK(uni[m] == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
    const auto up = steady_state(LinearWalkSpec(3, 2.0 / 3.0));
    CHECK(up[0] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
    CHECK(up[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(up[2] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    const auto down = steady_state(LinearWalkSpec(3, 1.0 / 3.0));
    CHECK(down[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(down[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("steady_state equals the brute-force Boltzmann weights") {
    for (const std::size_t n : {2u, 3u, 10u, 100u}) {
        for (int k = 1; k <= 9; ++k) {
            const double w = 0.1 * k;
            const auto pi = steady_state(LinearWalkSpec(n, w));
            const auto ref = oracle::boltzmann(n, w);
            for (std::size_t m = 0; m < n; ++m) {
                CHECK(std::abs(pi[m] - static_cast<double>(ref.probs[m])) <=
                      1e-13 * std::max(1e-300, static_cast<double>(ref.probs[m])) + 1e-300);
            }
        }
    }
}

TEST_CASE("fixed point of T") {
    for (const std::size_t n : {2u, 7u, 50u, 500u}) {
        for (int k = 1; k <= 9; ++k) {
            const LinearWalkSpec spec(n, 0.1 * k);
            const auto pi = steady_state(spec);
            const Eigen::VectorXd p = to_eigen(pi.probs());
            CHECK((transition_matrix(spec) * p - p).lpNorm<1>() <= 1e-12);
        }
    }
}

TEST_CASE("mirror symmetry of the steady state") {
    for (const std::size_t n : {2u, 30u, 501u}) {
        for (int k = 1; k <= 19; ++k) {
            const double w = 0.05 * k;
            const auto a = steady_state(LinearWalkSpec(n, w));
            const auto b = steady_state(LinearWalkSpec(n, 1.0 - w));
            for (std::size_t m = 0; m < n; ++m) CHECK(std::abs(a[m] - b[n - 1 - m]) <= 1e-12);
        }
    }
    const auto a = steady_state(LinearWalkSpec(30, 2.0 / 3.0));
    for (std::size_t m = 1; m < 30; ++m) CHECK(a[m] > a[m - 1]);
}

TEST_CASE("log-domain robustness at extreme sizes") {
    const auto pi = steady_state(LinearWalkSpec(500, 2.0 / 3.0));
    double total = 0.0;
    for (const double p : pi.probs()) {
        CHECK(std::isfinite(p));
        total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-10);
    for (const double w : {1e-6, 0.5 - 1e-12, 0.5 + 1e-12, 1.0 - 1e-6}) {
        const auto big = steady_state(LinearWalkSpec(1000000, w));
        double s = 0.0;
        bool finite = true;
        for (const double p : big.probs()) {
            finite = finite && std::isfinite(p) && p >= 0.0;
            s += p;
        }
        CHECK(finite);
        CHECK(std::abs(s - 1.0) <= 1e-10);
    }
    const auto logs = log_steady_state(LinearWalkSpec(1000, 0.999));
    CHECK(std::isfinite(logs.front()));
    CHECK(logs.front() < -6000.0);
}

TEST_CASE("convergence from node 0 within 10 t_end") {
    for (const std::size_t n : {20u, 100u, 200u}) {
        for (const double w : {0.6, 2.0 / 3.0, 0.9, 0.25}) {
            const LinearWalkSpec spec(n, w);
            const auto win = thermalization::thermalization_window(n, w > 0.5 ? w : 1.0 - w);
            const auto steps = static_cast<std::size_t>(std::ceil(10.0 * win.t_end));
            const auto pi = steady_state(spec);
            std::vector<double> cur(n, 0.0), nxt(n);
            cur[0] = 1.0;
            double prev = l1(cur, pi.probs());
            bool monotone = true;
            for (std::size_t k = 0; k < steps; ++k) {
                markov_step(w, cur, nxt);
                cur.swap(nxt);
                const double d = l1(cur, pi.probs());
                monotone = monotone && d <= prev + 1e-14;
                prev = d;
            }
            CHECK(monotone);
            CHECK(prev <= 1e-6);
        }
    }
}

TEST_CASE("boundary_mass_bound") {
    CHECK(boundary_mass_bound(2.0 / 3.0) == doctest::Approx(0.5));
    CHECK(steady_state(LinearWalkSpec(3, 2.0 / 3.0))[2] >= 0.5);
    CHECK(boundary_mass_bound(0.9) == doctest::Approx(8.0 / 9.0));
    CHECK(steady_state(LinearWalkSpec(100, 0.9))[99] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(boundary_mass_bound(0.5 + 1e-12) < 1e-11);
    CHECK_THROWS_AS(boundary_mass_bound(0.5), std::invalid_argument);
    CHECK_THROWS_AS(boundary_mass_bound(0.3), std::invalid_argument);
    for (const double w : {0.55, 0.7, 0.95})
        for (const std::size_t n : {2u, 3u, 10u, 1000u})
            CHECK(steady_state(LinearWalkSpec(n, w))[n - 1] >= boundary_mass_bound(w) - 1e-15);
}

TEST_CASE("internal_state_at_node") {
    Eigen::VectorXcd psi(2);
    psi << 1.0, 0.0;
    const auto trivial = internal_state_at_node(LinearWalkSpec(4, 0.3), Eigen::VectorXcd::Ones(1), 2);
    CHECK(std::abs(trivial(0, 0) - 1.0) < 1e-15);

    Eigen::MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    const LinearWalkSpec spec(3, 0.5, 1.0, {x, Eigen::MatrixXcd::Identity(2, 2)});
    const auto rho = internal_state_at_node(spec, psi, 1);
    CHECK(std::abs(rho(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(rho(0, 0)) < 1e-15);
    CHECK_THROWS_AS(internal_state_at_node(spec, 2.0 * psi, 1), std::invalid_argument);
    CHECK_THROWS_AS(internal_state_at_node(spec, psi, 3), std::invalid_argument);
    CHECK_THROWS_AS(internal_state_at_node(spec, Eigen::VectorXcd::Ones(3) / std::sqrt(3.0), 0),
                    std::invalid_argument);
}

TEST_CASE("internal_state_at_node agrees with the engine over 200 steps") {
    std::mt19937_64 rng(42);
    const std::size_t n = 12;
    std::vector<Eigen::MatrixXcd> us;
    for (std::size_t i = 0; i + 1 < n; ++i) us.push_back(oracle::random_unitary(3, rng));
    const LinearWalkSpec spec(n, 0.55, 1.0, us);
    const auto ch = build_channel(spec);
    const auto psi = oracle::random_state(3, rng);
    auto s = BlockState::localized(0, psi);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        s = step(ch, s);
        for (const auto& [node, block] : s.blocks()) {
            const double tr = block.trace().real();
            if (tr < 1e-150) continue;
            const auto pred = internal_state_at_node(spec, psi, node);
            worst = std::max(worst, (block / tr - pred).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst <= 1e-10);
}
