#pragma once

// Covariance functions over shaft angles (1-D) and polar shaft-centre
// coordinates (rho, theta).

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "filmgp/angles.hpp"

namespace filmgp {

enum class KernelVariant {
    squared_exponential,
    matern32,
    periodic,
    wendland_polar,
    anova2d_pol,     // radial polynomial-decay x angular Wendland
    anova2d_matern,  // radial Matern 3/2 x angular Wendland
};

std::string_view to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(std::string_view s);

/// Hyperparameters that can be searched in log space.
enum class Hyper {
    signal_variance,  // sigma_f^2
    length_scale,     // l
    period,           // p
    outer_scale,      // s^2
    radial_weight,    // alpha_1^2
    angular_weight,   // alpha_2^2
    decay_scale,      // beta
};

std::string_view to_string(Hyper h);

struct KernelParams {
    double signal_variance = 1.0;
    double length_scale = 1.0;
    double period = two_pi;
    double outer_scale = 1.0;
    double radial_weight = 1.0;
    double angular_weight = 1.0;
    double decay_scale = 1.0;
    int degree = 2;             // polynomial degree of the radial decay kernel
    double wendland_tau = 4.0;  // held fixed
};

class KernelSpec {
public:
    /// Throws Error(invalid_argument) on non-positive hyperparameters,
    /// degree < 1 or tau < 4.
    KernelSpec(KernelVariant variant, KernelParams params = {});

    KernelVariant variant() const { return variant_; }
    const KernelParams& params() const { return params_; }

    /// 1 for the angle kernels, 2 for the ANOVA (rho, theta) kernels.
    int input_dim() const;

    /// Hyperparameters that the optimiser is allowed to move, in a fixed order.
    std::vector<Hyper> free_parameters() const;
    double get(Hyper h) const;
    KernelSpec with(Hyper h, double value) const;

    std::vector<double> log_values() const;
    KernelSpec with_log_values(std::span<const double> logs) const;

    double operator()(std::span<const double> x, std::span<const double> xp) const;

    /// k(x, x); constant for every variant except the radial decay kernel.
    double variance_at(std::span<const double> x) const;

private:
    KernelVariant variant_;
    KernelParams params_;
};

/// Compactly supported C^2 Wendland function on [0, pi]:
/// (1 + tau t/pi)(1 - t/pi)_+^tau.
double wendland(double t, double tau = 4.0);

/// Radial polynomial-decay kernel
/// (1 + rho rho' / beta^2)^d exp(-(rho^2 + rho'^2) / (2 beta^2)).
double polynomial_decay(double rho, double rho_p, double beta, int degree);

double matern32(double r, double variance, double length_scale);

/// Throws Error(invalid_argument) when the input dimensions differ from the
/// kernel's.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> xp);

/// Rows of `a` and `b` are points.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a);

}  // namespace filmgp
