#pragma once

#include <cmath>
#include <numbers>

namespace filmgp {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    // fmod can hand back exactly two_pi after the shift for tiny negatives.
    return r >= two_pi ? 0.0 : r;
}

/// Geodesic distance on the unit circle, in [0, pi].
inline double angular_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), two_pi);
    return d > pi ? two_pi - d : d;
}

/// Signed difference a - b wrapped into (-pi, pi].
inline double signed_angle_diff(double a, double b) {
    double d = wrap_angle(a - b);
    return d > pi ? d - two_pi : d;
}

}  // namespace filmgp
