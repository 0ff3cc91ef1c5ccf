#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "filmgp/error.hpp"
#include "filmgp/validation.hpp"

using namespace filmgp;
using doctest::Approx;

namespace {

LocalisationDataset dataset(int n) {
    LocalisationDataset d{{}, 1e-4, 0.0};
    for (int i = 0; i < n; ++i) {
        const auto op = OperatingPoint::from_rpm(100.0 + 100.0 * i, 10000.0, 0.064);
        d.entries.push_back({short_bearing_equilibrium(BearingGeometry::standard(), op), 1.0, op});
    }
    normalize_labels(d.entries);
    return d;
}

SwarmConfig quick() {
    SwarmConfig c;
    c.particle_count = 10;
    c.max_iterations = 30;
    c.restarts = 0;
    return c;
}

GridSpec grid() {
    GridSpec g;
    g.n_rho = 20;
    g.n_theta = 30;
    g.clearance = 1e-4;
    return g;
}

}  // namespace

TEST_CASE("rmse in normalised coordinates") {
    const ShaftLocation a(0.3, 0.0, 1e-4), b(0.3, 0.5 * pi, 1e-4), o(0.0, 0.0, 1e-4),
        h(0.5, 0.0, 1e-4);
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(o, h) == Approx(0.5));
    CHECK(rmse(a, b) == Approx(0.42426406871193).epsilon(1e-12));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> e(0.0, 0.99), t(0.0, two_pi);
    for (int i = 0; i < 200; ++i) {
        const ShaftLocation p(e(rng), t(rng), 1e-4), q(e(rng), t(rng), 1e-4), r(e(rng), t(rng), 1e-4);
        CHECK(rmse(p, q) == Approx(rmse(q, p)));
        CHECK(rmse(p, r) <= rmse(p, q) + rmse(q, r) + 1e-15);
    }
}

TEST_CASE("three-fold protocol") {
    const auto d = dataset(3);
    const auto r = loocv(d, LocationModel::B, quick(), grid());
    REQUIRE(r.folds.size() == 3);
    double ll = 0.0, e = 0.0;
    for (const auto& f : r.folds) {
        REQUIRE(f.ok());
        ll += f.log_likelihood;
        e += f.rmse;
    }
    CHECK(r.mean_log_likelihood == Approx(ll / 3));
    CHECK(r.mean_rmse == Approx(e / 3));
    CHECK_THROWS_AS(loocv(dataset(2), LocationModel::A, quick(), grid()), Error);
}

TEST_CASE("per-fold likelihood matches an independent recomputation") {
    const auto d = dataset(4);
    const auto r = loocv(d, LocationModel::A, quick(), grid());
    const auto& f = r.folds[1];
    LocalisationDataset train{{}, d.clearance, 0.0};
    for (std::size_t k = 0; k < d.size(); ++k)
        if (k != 1) train.entries.push_back(d.entries[k]);
    SwarmConfig c = quick();
    c.seed = derive_seed(c.seed, fold_key(f.speed_rpm, f.load_n));
    const GPModel m = fit_location_gp(train, LocationModel::A, c);
    Eigen::MatrixXd at(1, 2);
    at << f.truth.rho(), f.truth.theta();
    const auto p = m.predict(at);
    const double s2 = m.transform().scale * m.transform().scale;
    const double v = p.variance(0) + m.training().noise_variance * s2;
    const double res = f.label - p.mean(0);
    CHECK(f.log_likelihood == Approx(-0.5 * std::log(two_pi * v) - res * res / (2 * v)));
}

TEST_CASE("loocv is permutation invariant") {
    auto d = dataset(5);
    const auto a = loocv(d, LocationModel::B, quick(), grid());
    std::reverse(d.entries.begin(), d.entries.end());
    std::swap(d.entries[1], d.entries[3]);
    const auto b = loocv(d, LocationModel::B, quick(), grid());
    CHECK(std::abs(a.mean_log_likelihood - b.mean_log_likelihood) < 1e-12);
    CHECK(std::abs(a.mean_rmse - b.mean_rmse) < 1e-12);
}

TEST_CASE("report export") {
    const auto r = loocv(dataset(3), LocationModel::A, quick(), grid());
    const auto j = cv_report_to_json(r);
    CHECK(j.at("model") == "A");
    CHECK(j.at("folds").size() == 3);
    const auto csv = cv_report_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.rfind("model,speed_rpm,load_N,", 0) == 0);
}
