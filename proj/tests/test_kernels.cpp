#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "filmgp/error.hpp"
#include "filmgp/kernels.hpp"

using namespace filmgp;
using doctest::Approx;

namespace {

double k1(const KernelSpec& k, double a, double b) {
    const double x[1] = {a};
    const double y[1] = {b};
    return kernel_eval(k, x, y);
}

}  // namespace

TEST_CASE("matern 3/2 scalar values") {
    CHECK(matern32(0.0, 2.5, 1.0) == Approx(2.5));
    // (1 + sqrt 3) exp(-sqrt 3), evaluated separately
    CHECK(matern32(1.0, 1.0, 1.0) == Approx(0.483357724596508).epsilon(1e-12));
    const KernelSpec m(KernelVariant::matern32);
    CHECK(k1(m, 0.3, 1.3) == Approx(0.483357724596508).epsilon(1e-12));
}

TEST_CASE("squared exponential and periodic") {
    KernelParams p;
    p.signal_variance = 2.0;
    p.length_scale = 0.5;
    const KernelSpec se(KernelVariant::squared_exponential, p);
    CHECK(k1(se, 0.0, 0.5) == Approx(2.0 * std::exp(-0.5)));

    p.period = 1.7;
    const KernelSpec per(KernelVariant::periodic, p);
    for (double x : {0.0, 0.4, 2.2}) {
        CHECK(std::abs(k1(per, x, x + 1.7) - k1(per, x, x)) < 1e-12);
        CHECK(std::abs(k1(per, x, x + 0.3) - k1(per, x + 1.7, x + 0.3)) < 1e-12);
    }
    const double s = std::sin(pi * 0.6 / 1.7);
    CHECK(k1(per, 0.1, 0.7) == Approx(2.0 * std::exp(-2.0 * s * s / 0.25)));
}

TEST_CASE("wendland function") {
    CHECK(wendland(0.0) == Approx(1.0));
    CHECK(wendland(pi) == 0.0);
    CHECK(wendland(4.0) == 0.0);
    // (1 + 4 t/pi)(1 - t/pi)^4 at t = pi/2
    CHECK(wendland(0.5 * pi) == Approx(3.0 * 0.0625));
    const KernelSpec w(KernelVariant::wendland_polar);
    CHECK(k1(w, 0.1, two_pi + 0.1) == Approx(1.0));
    CHECK(k1(w, 0.1, 0.1 + pi) == Approx(0.0));
}

TEST_CASE("anova polar kernels") {
    KernelParams p;
    p.outer_scale = 1.5;
    p.radial_weight = 0.7;
    p.angular_weight = 2.0;
    p.decay_scale = 0.4;
    p.length_scale = 0.3;
    const KernelSpec a(KernelVariant::anova2d_pol, p);
    const KernelSpec b(KernelVariant::anova2d_matern, p);
    const double x[2] = {0.2, 0.5};
    const double y[2] = {0.5, 1.0};
    const double rad_a = std::pow(1.0 + 0.2 * 0.5 / 0.16, 2) * std::exp(-(0.04 + 0.25) / 0.32);
    const double ang = wendland(0.5);
    CHECK(kernel_eval(a, x, y) == Approx(1.5 * (1 + 0.7 * rad_a) * (1 + 2.0 * ang)));
    CHECK(kernel_eval(b, x, y) ==
          Approx(1.5 * (1 + 0.7 * matern32(0.3, 1.0, 0.3)) * (1 + 2.0 * ang)));
    CHECK(a.variance_at(x) == Approx(kernel_eval(a, x, x)));
    CHECK(b.variance_at(x) == Approx(kernel_eval(b, x, x)));
    // radial part decays towards the bore
    CHECK(polynomial_decay(2.0, 2.0, 0.4, 2) < polynomial_decay(0.4, 0.4, 0.4, 2));
}

TEST_CASE("dimension and parameter validation") {
    const KernelSpec a(KernelVariant::anova2d_pol);
    const double x1[1] = {0.0};
    CHECK_THROWS_AS(kernel_eval(a, x1, x1), Error);
    KernelParams bad;
    bad.length_scale = -1.0;
    CHECK_THROWS_AS(KernelSpec(KernelVariant::squared_exponential, bad), Error);
}

TEST_CASE("log-space hyperparameter round trip") {
    const KernelSpec k(KernelVariant::periodic);
    const auto names = k.free_parameters();
    REQUIRE(names.size() == 3);
    const std::vector<double> logs{0.5, -1.0, std::log(6.0)};
    const auto k2 = k.with_log_values(logs);
    CHECK(k2.get(Hyper::length_scale) == Approx(std::exp(-1.0)));
    const auto back = k2.log_values();
    for (std::size_t i = 0; i < logs.size(); ++i) CHECK(back[i] == Approx(logs[i]));
}

TEST_CASE("gram matrices are symmetric positive semi-definite") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    std::uniform_real_distribution<double> rad(0.0, 1.0);
    for (auto v : {KernelVariant::squared_exponential, KernelVariant::matern32,
                   KernelVariant::periodic, KernelVariant::wendland_polar,
                   KernelVariant::anova2d_pol, KernelVariant::anova2d_matern}) {
        const KernelSpec k(v);
        Eigen::MatrixXd x(40, k.input_dim());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            x(i, 0) = k.input_dim() == 2 ? rad(rng) : ang(rng);
            if (k.input_dim() == 2) x(i, 1) = ang(rng);
        }
        const Eigen::MatrixXd g = gram(k, x);
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((g - gram(k, x, x)).cwiseAbs().maxCoeff() < 1e-14);
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues()(0);
        CHECK(min_eig >= -1e-8 * g.trace() / 40.0);
    }
}
