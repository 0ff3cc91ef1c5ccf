#pragma once

// Spring-model acoustics for a thin lubricant layer and the three
// film-thickness inversions (amplitude, phase, resonant dip), plus the
// synthetic scan generator used in place of rig data.

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "filmgp/bearing.hpp"

namespace filmgp {

struct AcousticSetup {
    double lubricant_density;       // kg/m^3
    double sound_speed;             // m/s, in the lubricant
    double wave_angular_frequency;  // rad/s, spring-model evaluation frequency
    double impedance_1;             // sensor side, kg m^-2 s^-1
    double impedance_2;             // far side

    AcousticSetup(double density, double speed, double angular_frequency, double z1,
                  double z2);

    /// Mineral oil (870 kg/m^3, 1500 m/s) between steel faces at 10 MHz.
    static AcousticSetup standard();

    /// Layer stiffness term: X = omega h z1 z2 / (rho c^2) = h * this.
    double stiffness_factor() const;
};

/// Thresholds outside of which an inversion is rejected instead of evaluated.
struct ValidityLimits {
    double max_reflection = 0.98;  // |R| at or above this is not stiffness dominated
    double min_phase = 0.01;       // rad
    double min_thickness = 1e-8;   // m; thinner layers are not resolved
};

/// Usable spectral window for resonant-dip tracking.
struct DipBand {
    double min_frequency_hz = 3e6;
    double max_frequency_hz = 17e6;
    int max_order = 3;  // higher orders are lost in noise
};

struct ResonantDip {
    int order;
    double frequency_hz;
    double frequency_std_hz = 0.0;
};

struct ReflectionMeasurement {
    double magnitude;
    double phase;  // rad, in (0, pi)
    std::vector<ResonantDip> dips;
};

enum class Method { amplitude, phase, resonant_dip };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct FilmObservation {
    double shaft_angle;  // rad from TDC, [0, 2pi)
    double thickness;    // m
    Method method;
    double noise_std;    // m
};

/// Complex reflection coefficient of the spring layer, split into |R| and
/// arg R. Dips are left empty; see resonant_dips().
ReflectionMeasurement forward_reflection(const AcousticSetup& setup, double h);

/// Dip frequencies f_m = m c / (2 h) that fall inside `band`.
std::vector<ResonantDip> resonant_dips(const AcousticSetup& setup, double h,
                                       const DipBand& band = {});

double invert_amplitude(const AcousticSetup& setup, double reflection_magnitude,
                        const ValidityLimits& limits = {});

/// Solves the phase relation for h. When two positive roots exist
/// (z2 > z1) the smaller one is returned: it is the branch continuous with
/// h -> 0.
double invert_phase(const AcousticSetup& setup, double phase,
                    const ValidityLimits& limits = {});

/// Weighted mean of m c / (2 f_m). Dips with zero std get a 1e-9 relative
/// floor so exact inputs are still checked for consistency.
double invert_resonant_dip(const AcousticSetup& setup, const std::vector<ResonantDip>& dips);

/// Closed thickness interval [lo, hi] over which a method inverts
/// successfully with the given limits. Returns nullopt if empty.
std::optional<std::pair<double, double>> valid_band(const AcousticSetup& setup, Method method,
                                                    const ValidityLimits& limits = {},
                                                    const DipBand& band = {});

/// Sub-intervals of [lo, hi] that no method covers.
std::vector<std::pair<double, double>> coverage_gaps(const AcousticSetup& setup, double lo,
                                                     double hi,
                                                     const ValidityLimits& limits = {},
                                                     const DipBand& band = {});

/// Per-method measurement noise, expressed as the thickness-equivalent
/// standard deviation. The generator converts it to the measurement domain
/// with the local slope of the forward model.
struct NoiseSpec {
    double amplitude_std = 0.0;
    double phase_std = 0.0;
    double dip_std = 0.0;

    static NoiseSpec uniform(double std) { return {std, std, std}; }
    double for_method(Method m) const;
};

struct ScanSpec {
    int n_angles = 7200;
    std::vector<Method> methods{Method::amplitude, Method::phase, Method::resonant_dip};
    NoiseSpec noise{};
    ValidityLimits limits{};
    DipBand band{};
};

/// Simulates one revolution of film measurements. Observations are ordered
/// by angle, then method. Measurements that leave a method's valid band
/// after noise are dropped, which is what produces dead zones.
std::vector<FilmObservation> synthesize_scan(const BearingGeometry& geom,
                                             const ShaftLocation& loc,
                                             const AcousticSetup& setup, const ScanSpec& spec,
                                             std::uint64_t seed);

}  // namespace filmgp
