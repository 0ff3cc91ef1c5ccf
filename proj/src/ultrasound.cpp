#include "filmgp/ultrasound.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "filmgp/error.hpp"

namespace filmgp {

AcousticSetup::AcousticSetup(double density, double speed, double angular_frequency,
                             double z1, double z2)
    : lubricant_density(density),
      sound_speed(speed),
      wave_angular_frequency(angular_frequency),
      impedance_1(z1),
      impedance_2(z2) {
    require(density > 0.0 && speed > 0.0 && angular_frequency > 0.0 && z1 > 0.0 && z2 > 0.0,
            ErrorCode::invalid_argument, "acoustic parameters must be positive");
}

AcousticSetup AcousticSetup::standard() {
    return AcousticSetup(870.0, 1500.0, two_pi * 10e6, 4.6e7, 4.6e7);
}

double AcousticSetup::stiffness_factor() const {
    return wave_angular_frequency * impedance_1 * impedance_2 /
           (lubricant_density * sound_speed * sound_speed);
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::amplitude: return "amplitude";
        case Method::phase: return "phase";
        case Method::resonant_dip: return "resonant_dip";
    }
    return "unknown";
}

Method method_from_string(std::string_view s) {
    if (s == "amplitude") return Method::amplitude;
    if (s == "phase") return Method::phase;
    if (s == "resonant_dip") return Method::resonant_dip;
    fail(ErrorCode::data_format, "unknown measurement method '" + std::string(s) + "'");
}

double NoiseSpec::for_method(Method m) const {
    switch (m) {
        case Method::amplitude: return amplitude_std;
        case Method::phase: return phase_std;
        case Method::resonant_dip: return dip_std;
    }
    return 0.0;
}

namespace {

struct Impedances {
    double a;   // z2 - z1
    double b;   // z2 + z1
    double ab;  // z2^2 - z1^2
    double z1;
};

Impedances impedances(const AcousticSetup& s) {
    const double a = s.impedance_2 - s.impedance_1;
    const double b = s.impedance_2 + s.impedance_1;
    return {a, b, a * b, s.impedance_1};
}

// Layer term X at which |R| equals r.
double amplitude_layer_term(const Impedances& z, double r) {
    return std::sqrt((r * r * z.b * z.b - z.a * z.a) / (1.0 - r * r));
}

// Smallest positive X with arg R = phi, or NaN.
double phase_layer_term(const Impedances& z, double phi) {
    const double s = std::sin(phi);
    const double cs = std::cos(phi);
    const double disc = z.z1 * z.z1 * cs * cs - s * s * z.ab;
    if (disc < 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double root = std::sqrt(disc);
    const double q = z.z1 * cs + (cs < 0.0 ? -root : root);
    double best = std::numeric_limits<double>::infinity();
    const double r1 = q / s;
    if (std::isfinite(r1) && r1 > 0.0) best = std::min(best, r1);
    if (q != 0.0) {
        const double r2 = s * z.ab / q;
        if (std::isfinite(r2) && r2 > 0.0) best = std::min(best, r2);
    }
    return std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN();
}

// Thickness above which the phase relation folds back (only when z2 > z1).
double phase_branch_limit(const AcousticSetup& setup) {
    const Impedances z = impedances(setup);
    if (z.ab <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(z.ab) / setup.stiffness_factor();
}

using Interval = std::pair<double, double>;

std::vector<Interval> method_intervals(const AcousticSetup& setup, Method method,
                                       const ValidityLimits& limits, const DipBand& band) {
    std::vector<Interval> out;
    const double k = setup.stiffness_factor();
    const Impedances z = impedances(setup);
    switch (method) {
        case Method::amplitude: {
            const double floor = std::abs(z.a) / z.b;
            if (limits.max_reflection <= floor) break;
            const double hi = amplitude_layer_term(z, limits.max_reflection) / k;
            if (hi > limits.min_thickness) out.emplace_back(limits.min_thickness, hi);
            break;
        }
        case Method::phase: {
            const double branch = phase_branch_limit(setup);
            if (std::isinf(branch)) {
                const double x = phase_layer_term(z, limits.min_phase);
                if (std::isfinite(x) && x / k > limits.min_thickness) {
                    out.emplace_back(limits.min_thickness, x / k);
                }
            } else {
                // Rising branch only: phase climbs from 0 to its peak at the branch limit.
                const double x_peak = branch * k;
                const double phi_peak =
                    std::atan2(2.0 * z.z1 * x_peak, z.ab + x_peak * x_peak);
                if (phi_peak < limits.min_phase) break;
                const double lo = std::max(limits.min_thickness,
                                           phase_layer_term(z, limits.min_phase) / k);
                if (lo < branch) out.emplace_back(lo, branch);
            }
            break;
        }
        case Method::resonant_dip: {
            for (int m = 1; m <= band.max_order; ++m) {
                const double lo = m * setup.sound_speed / (2.0 * band.max_frequency_hz);
                const double hi = m * setup.sound_speed / (2.0 * band.min_frequency_hz);
                out.emplace_back(lo, hi);
            }
            break;
        }
    }
    return out;
}

std::vector<Interval> merge(std::vector<Interval> v) {
    std::sort(v.begin(), v.end());
    std::vector<Interval> merged;
    for (const auto& iv : v) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

// d|R|/dh and d(arg R)/dh at thickness h.
std::pair<double, double> reflection_slopes(const AcousticSetup& setup, double h) {
    const Impedances z = impedances(setup);
    const double k = setup.stiffness_factor();
    const double x = k * h;
    const double b2x2 = z.b * z.b + x * x;
    const double mag = std::sqrt((z.a * z.a + x * x) / b2x2);
    const double dmag = x * (z.b * z.b - z.a * z.a) / (b2x2 * b2x2 * mag);
    const double re = z.ab + x * x;
    const double im = 2.0 * z.z1 * x;
    const double dphase = 2.0 * z.z1 * (z.ab - x * x) / (re * re + im * im);
    return {dmag * k, dphase * k};
}

}  // namespace

ReflectionMeasurement forward_reflection(const AcousticSetup& setup, double h) {
    require(h > 0.0, ErrorCode::invalid_argument, "film thickness must be positive");
    const Impedances z = impedances(setup);
    const double x = setup.stiffness_factor() * h;
    const std::complex<double> r = std::complex<double>(z.a, x) / std::complex<double>(z.b, x);
    return {std::abs(r), std::arg(r), {}};
}

std::vector<ResonantDip> resonant_dips(const AcousticSetup& setup, double h,
                                       const DipBand& band) {
    require(h > 0.0, ErrorCode::invalid_argument, "film thickness must be positive");
    std::vector<ResonantDip> dips;
    for (int m = 1; m <= band.max_order; ++m) {
        const double f = m * setup.sound_speed / (2.0 * h);
        if (f >= band.min_frequency_hz && f <= band.max_frequency_hz) {
            dips.push_back({m, f, 0.0});
        }
    }
    return dips;
}

double invert_amplitude(const AcousticSetup& setup, double reflection_magnitude,
                        const ValidityLimits& limits) {
    const double r = reflection_magnitude;
    if (!std::isfinite(r) || r <= 0.0) {
        fail(ErrorCode::invalid_measurement, "reflection magnitude must be positive");
    }
    if (r >= limits.max_reflection) {
        fail(ErrorCode::out_of_range,
             "reflection coefficient too close to unity: film no longer stiffness dominated");
    }
    const Impedances z = impedances(setup);
    const double radicand = r * r * z.b * z.b - z.a * z.a;
    if (radicand <= 0.0) {
        fail(ErrorCode::invalid_measurement,
             "reflection magnitude below the zero-thickness floor");
    }
    return std::sqrt(radicand / (1.0 - r * r)) / setup.stiffness_factor();
}

double invert_phase(const AcousticSetup& setup, double phase, const ValidityLimits& limits) {
    if (!std::isfinite(phase) || phase >= pi) {
        fail(ErrorCode::invalid_measurement, "reflection phase outside (0, pi)");
    }
    if (phase < limits.min_phase) {
        fail(ErrorCode::out_of_range, "reflection phase too close to zero");
    }
    const double x = phase_layer_term(impedances(setup), phase);
    if (!std::isfinite(x)) {
        fail(ErrorCode::invalid_measurement, "phase relation has no positive root");
    }
    return x / setup.stiffness_factor();
}

double invert_resonant_dip(const AcousticSetup& setup, const std::vector<ResonantDip>& dips) {
    if (dips.empty()) {
        fail(ErrorCode::no_measurement, "no resonant dips supplied");
    }
    std::vector<double> est;
    std::vector<double> sd;
    est.reserve(dips.size());
    sd.reserve(dips.size());
    int last_order = 0;
    for (const auto& d : dips) {
        if (d.order <= last_order) {
            fail(ErrorCode::invalid_measurement, "dip orders must be positive and increasing");
        }
        if (!(d.frequency_hz > 0.0) || !(d.frequency_std_hz >= 0.0)) {
            fail(ErrorCode::invalid_measurement, "dip frequency must be positive");
        }
        last_order = d.order;
        const double h = d.order * setup.sound_speed / (2.0 * d.frequency_hz);
        const double rel = std::max(d.frequency_std_hz / d.frequency_hz, 1e-9);
        est.push_back(h);
        sd.push_back(h * rel);
    }
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double w = 1.0 / (sd[i] * sd[i]);
        wsum += w;
        acc += w * est[i];
    }
    const double mean = acc / wsum;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (std::abs(est[i] - mean) > 3.0 * sd[i]) {
            fail(ErrorCode::inconsistent_dips, "resonant dips disagree beyond 3 sigma");
        }
    }
    return mean;
}

std::optional<std::pair<double, double>> valid_band(const AcousticSetup& setup, Method method,
                                                    const ValidityLimits& limits,
                                                    const DipBand& band) {
    const auto iv = method_intervals(setup, method, limits, band);
    if (iv.empty()) {
        return std::nullopt;
    }
    double lo = iv.front().first;
    double hi = iv.front().second;
    for (const auto& [a, b] : iv) {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    return std::make_pair(lo, hi);
}

std::vector<std::pair<double, double>> coverage_gaps(const AcousticSetup& setup, double lo,
                                                     double hi, const ValidityLimits& limits,
                                                     const DipBand& band) {
    std::vector<Interval> all;
    for (Method m : {Method::amplitude, Method::phase, Method::resonant_dip}) {
        const auto iv = method_intervals(setup, m, limits, band);
        all.insert(all.end(), iv.begin(), iv.end());
    }
    std::vector<Interval> gaps;
    double cursor = lo;
    for (const auto& [a, b] : merge(std::move(all))) {
        if (b <= cursor) continue;
        if (a > cursor) gaps.emplace_back(cursor, std::min(a, hi));
        cursor = std::max(cursor, b);
        if (cursor >= hi) break;
    }
    if (cursor < hi) gaps.emplace_back(cursor, hi);
    return gaps;
}

std::vector<FilmObservation> synthesize_scan(const BearingGeometry& geom,
                                             const ShaftLocation& loc,
                                             const AcousticSetup& setup, const ScanSpec& spec,
                                             std::uint64_t seed) {
    require(spec.n_angles > 0, ErrorCode::invalid_argument, "scan needs at least one angle");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double branch = phase_branch_limit(setup);

    std::vector<FilmObservation> out;
    out.reserve(static_cast<std::size_t>(spec.n_angles) * spec.methods.size());
    for (int i = 0; i < spec.n_angles; ++i) {
        const double angle = two_pi * i / spec.n_angles;
        const double h = film_at_shaft_angle(geom, loc, angle);
        const ReflectionMeasurement clean = forward_reflection(setup, h);
        const auto [dmag, dphase] = reflection_slopes(setup, h);

        for (Method method : spec.methods) {
            const double sigma = spec.noise.for_method(method);
            try {
                double estimate = 0.0;
                switch (method) {
                    case Method::amplitude: {
                        double r = clean.magnitude;
                        if (sigma > 0.0) r += normal(rng) * sigma * std::abs(dmag);
                        estimate = invert_amplitude(setup, r, spec.limits);
                        break;
                    }
                    case Method::phase: {
                        if (h > branch) continue;
                        double phi = clean.phase;
                        if (sigma > 0.0) phi += normal(rng) * sigma * std::abs(dphase);
                        estimate = invert_phase(setup, phi, spec.limits);
                        break;
                    }
                    case Method::resonant_dip: {
                        auto dips = resonant_dips(setup, h, spec.band);
                        if (dips.empty()) continue;
                        if (sigma > 0.0) {
                            for (auto& d : dips) {
                                d.frequency_std_hz = d.frequency_hz * sigma / h;
                                d.frequency_hz += normal(rng) * d.frequency_std_hz;
                            }
                        }
                        estimate = invert_resonant_dip(setup, dips);
                        break;
                    }
                }
                out.push_back({angle, estimate, method, sigma});
            } catch (const Error&) {
                // Outside the method's valid band after noise: a dead zone.
            }
        }
    }
    return out;
}

}  // namespace filmgp
