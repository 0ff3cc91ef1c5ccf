#include <doctest.h>

#include <cmath>
#include <complex>

#include "filmgp/error.hpp"
#include "filmgp/ultrasound.hpp"

using namespace filmgp;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::io;
}

}  // namespace

TEST_CASE("forward reflection against a complex-arithmetic oracle") {
    const auto s = AcousticSetup::standard();
    const auto r = forward_reflection(s, 1e-6);
    // evaluated independently with Python's cmath
    CHECK(r.magnitude == Approx(0.593935086362665).epsilon(1e-12));
    CHECK(r.phase == Approx(0.934855000789049).epsilon(1e-12));
}

TEST_CASE("forward reflection limits") {
    const AcousticSetup s(870, 1500, two_pi * 10e6, 1.5e6, 4.6e7);
    const auto thin = forward_reflection(s, 1e-12);
    CHECK(thin.magnitude == Approx((4.6e7 - 1.5e6) / (4.6e7 + 1.5e6)).epsilon(1e-6));
    CHECK(thin.phase == Approx(0.0).epsilon(1e-4));
    CHECK(forward_reflection(s, 1e-2).magnitude == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("amplitude inversion") {
    const auto s = AcousticSetup::standard();
    const double r = forward_reflection(s, 0.5e-6).magnitude;
    CHECK(invert_amplitude(s, r) == Approx(0.5e-6).epsilon(1e-9));
    CHECK(code_of([&] { invert_amplitude(s, 0.99); }) == ErrorCode::out_of_range);
    const AcousticSetup mismatch(870, 1500, two_pi * 10e6, 1.5e6, 4.6e7);
    CHECK(code_of([&] { invert_amplitude(mismatch, 0.5); }) == ErrorCode::invalid_measurement);
}

TEST_CASE("phase inversion") {
    const auto s = AcousticSetup::standard();
    const double phi = forward_reflection(s, 0.5e-6).phase;
    CHECK(invert_phase(s, phi) == Approx(0.5e-6).epsilon(1e-9));
    CHECK(code_of([&] { invert_phase(s, 0.0); }) == ErrorCode::out_of_range);
    const auto band = valid_band(s, Method::phase);
    REQUIRE(band);
    const double h2 = 2e-6;
    CHECK((h2 >= band->first && h2 <= band->second));
    CHECK(invert_phase(s, forward_reflection(s, h2).phase) == Approx(h2).epsilon(1e-9));
}

TEST_CASE("phase inversion picks the thin branch for z2 > z1") {
    const AcousticSetup s(870, 1500, two_pi * 10e6, 1.5e6, 4.6e7);
    const auto band = valid_band(s, Method::phase);
    REQUIRE(band);
    const double h = std::sqrt(band->first * band->second);
    CHECK(invert_phase(s, forward_reflection(s, h).phase) == Approx(h).epsilon(1e-8));
}

TEST_CASE("resonant dip inversion") {
    const auto s = AcousticSetup::standard();
    CHECK(invert_resonant_dip(s, {{1, 7.5e6, 0.0}}) == Approx(100e-6));
    CHECK(invert_resonant_dip(s, {{1, 5e6, 1e3}, {2, 10e6, 1e3}}) == Approx(150e-6));
    CHECK(code_of([&] { invert_resonant_dip(s, {}); }) == ErrorCode::no_measurement);
    CHECK(code_of([&] { invert_resonant_dip(s, {{1, 5e6, 1.0}, {2, 15e6, 1.0}}); }) ==
          ErrorCode::inconsistent_dips);
    const auto dips = resonant_dips(s, 100e-6);
    REQUIRE(dips.size() == 2);  // 7.5 and 15 MHz inside the 3-17 MHz band
    CHECK(dips[1].frequency_hz == Approx(15e6));
}

TEST_CASE("default setup leaves no coverage gap") {
    const auto s = AcousticSetup::standard();
    CHECK(coverage_gaps(s, 0.1e-6, 500e-6).empty());
    const auto amp = valid_band(s, Method::amplitude);
    const auto dip = valid_band(s, Method::resonant_dip);
    REQUIRE(amp);
    REQUIRE(dip);
    CHECK(dip->first == Approx(1500.0 / (2 * 17e6)));
}

TEST_CASE("synthetic scan") {
    const auto g = BearingGeometry::standard();
    const auto s = AcousticSetup::standard();
    ScanSpec spec;
    spec.n_angles = 360;

    SUBCASE("concentric noiseless scan is uniform") {
        const auto obs = synthesize_scan(g, ShaftLocation(0.0, 0.0, g.clearance()), s, spec, 1);
        REQUIRE(!obs.empty());
        for (const auto& o : obs) CHECK(o.thickness == Approx(g.clearance()).epsilon(1e-9));
    }
    SUBCASE("noiseless scan follows the film model") {
        const ShaftLocation l(0.5, 0.8, g.clearance());
        const auto obs = synthesize_scan(g, l, s, spec, 1);
        for (const auto& o : obs) {
            CHECK(o.thickness == Approx(film_at_shaft_angle(g, l, o.shaft_angle)).epsilon(1e-8));
        }
    }
    SUBCASE("seeded noise is reproducible") {
        spec.noise = NoiseSpec::uniform(2e-6);
        const ShaftLocation l(0.5, 0.8, g.clearance());
        const auto a = synthesize_scan(g, l, s, spec, 7);
        const auto b = synthesize_scan(g, l, s, spec, 7);
        const auto c = synthesize_scan(g, l, s, spec, 8);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].thickness == b[i].thickness);
        CHECK((c.size() != a.size() || c[0].thickness != a[0].thickness));
    }
}

TEST_CASE("method names") {
    CHECK(method_from_string(to_string(Method::resonant_dip)) == Method::resonant_dip);
    CHECK_THROWS_AS(method_from_string("sonar"), Error);
}
