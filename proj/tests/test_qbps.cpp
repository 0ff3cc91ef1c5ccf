#include <doctest.h>

#include <cmath>
#include <random>

#include "filmgp/error.hpp"
#include "filmgp/hyperopt.hpp"
#include "filmgp/qbps.hpp"

using namespace filmgp;
using doctest::Approx;

namespace {

double quad(std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0);
}

}  // namespace

TEST_CASE("search space reflection stays in bounds") {
    const SearchSpace s({{-1.0, 2.0}});
    CHECK(s.reflect(0, 0.5) == 0.5);
    CHECK(s.reflect(0, 2.5) == Approx(1.5));
    CHECK(s.reflect(0, -1.5) == Approx(-0.5));
    CHECK(s.reflect(0, 8.5) == Approx(1.5));  // 8.5 -> -4.5 -> 2.5 -> 1.5
    for (double x = -50.0; x < 50.0; x += 0.37) {
        const double r = s.reflect(0, x);
        CHECK((r >= -1.0 && r <= 2.0));
    }
    CHECK_THROWS_AS(SearchSpace({{1.0, 1.0}}), Error);
    CHECK_THROWS_AS(SearchSpace({}), Error);
}

TEST_CASE("config validation") {
    SwarmConfig c;
    c.particle_count = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SwarmConfig{};
    c.beta_end = 2.0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("degenerate step leaves a particle at gbest in place") {
    const SearchSpace s({{-5.0, 5.0}, {-5.0, 5.0}});
    std::mt19937_64 rng(1);
    SwarmState st = init_swarm(quad, s, 1, rng, std::vector<double>{0.3, 0.4});
    const auto before = st.positions[0];
    st = qbps_step(st, quad, 0.0, rng);
    CHECK(st.positions[0] == before);
}

TEST_CASE("steps never worsen bests and mbest is the mean of personal bests") {
    const SearchSpace s({{-5.0, 5.0}, {-5.0, 5.0}});
    std::mt19937_64 rng(9);
    SwarmState st = init_swarm(quad, s, 12, rng);
    for (int it = 0; it < 40; ++it) {
        const auto prev = st.personal_best_value;
        const double prev_g = st.global_best_value;
        st = qbps_step(st, quad, 0.8, rng);
        for (std::size_t i = 0; i < prev.size(); ++i) CHECK(st.personal_best_value[i] <= prev[i]);
        CHECK(st.global_best_value <= prev_g);
        for (std::size_t k = 0; k < 2; ++k) {
            double m = 0.0;
            for (const auto& p : st.personal_best) m += p[k];
            CHECK(st.mean_best[k] == Approx(m / 12.0));
        }
        for (const auto& p : st.positions) {
            CHECK((p[0] >= -5.0 && p[0] <= 5.0 && p[1] >= -5.0 && p[1] <= 5.0));
        }
    }
}

TEST_CASE("optimiser converges on a quadratic and is deterministic") {
    const SearchSpace s({{-5.0, 5.0}, {-5.0, 5.0}});
    SwarmConfig c;
    c.max_iterations = 200;
    c.restarts = 0;
    c.seed = 17;
    const auto r = optimize(quad, s, c);
    CHECK(std::abs(r.best[0] - 1.0) < 1e-4);
    CHECK(std::abs(r.best[1] + 2.0) < 1e-4);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
    const auto again = optimize(quad, s, c);
    CHECK(again.trace == r.trace);
    CHECK(again.best == r.best);
}

TEST_CASE("an optimal initial guess gives a constant trace") {
    const SearchSpace s({{-5.0, 5.0}, {-5.0, 5.0}});
    SwarmConfig c;
    c.max_iterations = 30;
    c.restarts = 1;
    const auto r = optimize(quad, s, c, std::vector<double>{1.0, -2.0});
    CHECK(r.best_value == 0.0);
    for (double v : r.trace) CHECK(v == 0.0);
}

TEST_CASE("non-finite objectives") {
    const SearchSpace s({{-1.0, 1.0}});
    SwarmConfig c;
    c.max_iterations = 10;
    c.restarts = 0;
    const Objective nan_everywhere = [](std::span<const double>) { return std::nan(""); };
    try {
        optimize(nan_everywhere, s, c);
        FAIL("expected no_feasible_point");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_feasible_point);
    }
    const Objective half = [](std::span<const double> x) {
        return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : x[0];
    };
    const auto r = optimize(half, s, c);
    CHECK(r.best_value < 0.05);
}

TEST_CASE("trace csv") {
    CHECK(trace_csv({3.0, 2.5}) == "iteration,best_nlml\n0,3\n1,2.5\n");
}

TEST_CASE("hyperparameter search never underperforms its start") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd x(30, 1);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
        x(i, 0) = 0.2 * i;
        y(i) = std::sin(x(i, 0)) + 0.1 * n01(rng);
    }
    const KernelSpec k0(KernelVariant::squared_exponential);
    HyperoptProblem p{.initial = k0,
                      .bounds = {{Hyper::signal_variance, -4, 4}, {Hyper::length_scale, -4, 3}}};
    p.initial_noise_variance = 0.05;
    SwarmConfig c;
    c.max_iterations = 40;
    c.restarts = 0;
    const auto tf = standardize(y);
    const auto r = optimize_hyperparameters(p, x, y, tf, c);
    const Eigen::VectorXd z = (y.array() - tf.offset) / tf.scale;
    CHECK(r.nlml <= standardized_nlml(k0, x, z, 0.05));
    CHECK(r.nlml == Approx(standardized_nlml(r.kernel, x, z, r.noise_variance)));
}
