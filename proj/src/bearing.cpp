#include "filmgp/bearing.hpp"

#include <cmath>

#include "filmgp/error.hpp"

namespace filmgp {

BearingGeometry::BearingGeometry(double shaft_radius, double bore_radius, double length)
    : shaft_radius_(shaft_radius),
      bore_radius_(bore_radius),
      clearance_(bore_radius - shaft_radius),
      length_(length) {
    require(shaft_radius > 0.0 && bore_radius > 0.0 && length > 0.0,
            ErrorCode::invalid_argument, "bearing lengths must be positive");
    require(clearance_ > 0.0, ErrorCode::invalid_argument,
            "bore radius must exceed shaft radius");
}

BearingGeometry BearingGeometry::from_clearance(double shaft_radius, double clearance,
                                                double length) {
    require(clearance > 0.0, ErrorCode::invalid_argument, "clearance must be positive");
    BearingGeometry g(shaft_radius, shaft_radius + clearance, length);
    // Keep the requested clearance bit-exact rather than bore - shaft.
    g.clearance_ = clearance;
    return g;
}

BearingGeometry BearingGeometry::standard() {
    return from_clearance(0.050, 100e-6, 0.080);
}

ShaftLocation::ShaftLocation(double eccentricity_ratio, double theta, double clearance,
                             double load_angle)
    : eccentricity_(eccentricity_ratio),
      theta_(wrap_angle(theta)),
      clearance_(clearance),
      load_angle_(wrap_angle(load_angle)) {
    require(std::isfinite(eccentricity_ratio) && std::isfinite(theta),
            ErrorCode::invalid_argument, "shaft location must be finite");
    require(eccentricity_ratio >= 0.0 && eccentricity_ratio < 1.0,
            ErrorCode::invalid_argument, "eccentricity ratio must lie in [0, 1)");
    require(clearance > 0.0, ErrorCode::invalid_argument, "clearance must be positive");
}

ShaftLocation ShaftLocation::from_polar(double rho, double theta, double clearance,
                                        double load_angle) {
    require(clearance > 0.0, ErrorCode::invalid_argument, "clearance must be positive");
    return ShaftLocation(rho / clearance, theta, clearance, load_angle);
}

ShaftLocation ShaftLocation::from_attitude(double eccentricity_ratio, double attitude_angle,
                                           double clearance, double load_angle) {
    return ShaftLocation(eccentricity_ratio, load_angle + attitude_angle, clearance,
                         load_angle);
}

double ShaftLocation::x() const { return eccentricity_ * std::cos(theta_); }
double ShaftLocation::y() const { return eccentricity_ * std::sin(theta_); }

OperatingPoint::OperatingPoint(double speed_rad_s, double load_n, double viscosity_pa_s)
    : speed(speed_rad_s), load(load_n), viscosity(viscosity_pa_s) {
    require(speed > 0.0 && load > 0.0 && viscosity > 0.0, ErrorCode::invalid_argument,
            "speed, load and viscosity must be positive");
}

OperatingPoint OperatingPoint::from_rpm(double rpm, double load_n, double viscosity_pa_s) {
    return OperatingPoint(rpm_to_rad_s(rpm), load_n, viscosity_pa_s);
}

double OperatingPoint::rpm() const { return rad_s_to_rpm(speed); }

double film_thickness(const BearingGeometry& geom, const ShaftLocation& loc,
                      double theta_big) {
    return geom.clearance() * (1.0 + loc.eccentricity_ratio() * std::cos(theta_big));
}

double film_at_shaft_angle(const BearingGeometry& geom, const ShaftLocation& loc,
                           double shaft_angle) {
    return film_thickness(geom, loc, shaft_angle - loc.theta() - pi);
}

double eccentricity_from_hmin(const BearingGeometry& geom, double h_min) {
    if (!(h_min > 0.0)) {
        fail(ErrorCode::contact, "minimum film thickness must be positive");
    }
    if (h_min > geom.clearance()) {
        fail(ErrorCode::invalid_measurement, "minimum film thickness exceeds clearance");
    }
    return (geom.clearance() - h_min) / geom.clearance();
}

double sommerfeld(const BearingGeometry& geom, const OperatingPoint& op) {
    const double r = geom.shaft_radius();
    const double ratio = r / geom.clearance();
    return ratio * ratio * op.viscosity * op.speed * geom.length() * r / (2.0 * op.load);
}

double speed_load_ratio(const OperatingPoint& op, const OperatingPoint& reference) {
    return (op.speed / op.load) / (reference.speed / reference.load);
}

namespace {

// Dimensionless short-bearing load capacity.
double ocvirk_load_factor(double eps) {
    const double e2 = eps * eps;
    const double one_m = 1.0 - e2;
    return eps * std::sqrt(pi * pi * one_m + 16.0 * e2) / (one_m * one_m);
}

}  // namespace

ShaftLocation short_bearing_equilibrium(const BearingGeometry& geom, const OperatingPoint& op,
                                        double load_angle) {
    const double c = geom.clearance();
    const double l = geom.length();
    const double scale =
        op.viscosity * op.speed * geom.shaft_radius() * l * l * l / (4.0 * c * c);
    const double target = op.load / scale;

    // The load factor is strictly increasing on (0, 1).
    double lo = 0.0;
    double hi = 1.0 - 1e-12;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ocvirk_load_factor(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double eps = 0.5 * (lo + hi);
    const double attitude = std::atan2(pi * std::sqrt(1.0 - eps * eps), 4.0 * eps);
    return ShaftLocation::from_attitude(eps, attitude, c, load_angle);
}

}  // namespace filmgp
