#pragma once

// Journal-bearing geometry, the geometric film model and shaft-centre
// bookkeeping. Angles are radians, lengths metres.

#include "filmgp/angles.hpp"

namespace filmgp {

class BearingGeometry {
public:
    /// Throws Error(invalid_argument) unless every length is positive and
    /// the bore is larger than the shaft.
    BearingGeometry(double shaft_radius, double bore_radius, double length);

    static BearingGeometry from_clearance(double shaft_radius, double clearance,
                                          double length);

    /// R = 50 mm, L = 80 mm, c = 100 um.
    static BearingGeometry standard();

    double shaft_radius() const { return shaft_radius_; }
    double bore_radius() const { return bore_radius_; }
    double clearance() const { return clearance_; }
    double length() const { return length_; }

private:
    double shaft_radius_;
    double bore_radius_;
    double clearance_;
    double length_;
};

/// Position of the shaft centre relative to the bearing centre.
///
/// theta is measured counter-clockwise from top dead centre; the attitude
/// angle is measured counter-clockwise from the load line, which itself sits
/// at `load_angle` from TDC. The minimum film occurs at shaft angle theta.
class ShaftLocation {
public:
    ShaftLocation(double eccentricity_ratio, double theta, double clearance,
                  double load_angle = 0.0);

    static ShaftLocation from_polar(double rho, double theta, double clearance,
                                    double load_angle = 0.0);
    static ShaftLocation from_attitude(double eccentricity_ratio, double attitude_angle,
                                       double clearance, double load_angle = 0.0);

    double eccentricity_ratio() const { return eccentricity_; }
    double theta() const { return theta_; }
    double clearance() const { return clearance_; }
    double load_angle() const { return load_angle_; }
    double rho() const { return eccentricity_ * clearance_; }
    double attitude_angle() const { return wrap_angle(theta_ - load_angle_); }

    // Clearance-normalised Cartesian view.
    double x() const;
    double y() const;

private:
    double eccentricity_;
    double theta_;
    double clearance_;
    double load_angle_;
};

struct OperatingPoint {
    double speed;      // rad/s
    double load;       // N
    double viscosity;  // Pa s

    OperatingPoint(double speed_rad_s, double load_n, double viscosity_pa_s);

    static OperatingPoint from_rpm(double rpm, double load_n, double viscosity_pa_s);
    double rpm() const;
};

constexpr double rpm_to_rad_s(double rpm) { return rpm * two_pi / 60.0; }
constexpr double rad_s_to_rpm(double w) { return w * 60.0 / two_pi; }

/// h = c (1 + eps cos Theta), Theta measured about the shaft centre from the
/// point of maximum film.
double film_thickness(const BearingGeometry& geom, const ShaftLocation& loc,
                      double theta_big);

/// Film seen by a shaft-mounted sensor at angle `shaft_angle` from TDC.
double film_at_shaft_angle(const BearingGeometry& geom, const ShaftLocation& loc,
                           double shaft_angle);

/// eps = (c - h_min) / c. Throws invalid_measurement when h_min > c and
/// contact when h_min <= 0.
double eccentricity_from_hmin(const BearingGeometry& geom, double h_min);

/// S = (R/c)^2 mu omega L R / (2 W), with R the shaft radius.
double sommerfeld(const BearingGeometry& geom, const OperatingPoint& op);

/// (omega / W) / (omega_ref / W_ref). Viscosity is ignored.
double speed_load_ratio(const OperatingPoint& op, const OperatingPoint& reference);

/// Steady-state shaft position from the short-bearing (Ocvirk) solution.
/// Used as synthetic ground truth: eps solves the load balance and the
/// attitude angle is atan(pi sqrt(1 - eps^2) / (4 eps)).
ShaftLocation short_bearing_equilibrium(const BearingGeometry& geom, const OperatingPoint& op,
                                        double load_angle = 0.0);

}  // namespace filmgp
