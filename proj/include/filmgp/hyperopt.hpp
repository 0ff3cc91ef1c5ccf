#pragma once

// Maximum-likelihood GP hyperparameters via QBPS over log-space bounds.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "filmgp/gp.hpp"
#include "filmgp/qbps.hpp"

namespace filmgp {

struct HyperBound {
    Hyper hyper;
    double log_lower;
    double log_upper;
};

struct HyperoptProblem {
    KernelSpec initial;              // fixed values for anything not in `bounds`
    std::vector<HyperBound> bounds;  // searched hyperparameters
    double initial_noise_variance = 1e-2;
    // Noise variance is searched unless pinned. Standardised target units.
    std::optional<double> pinned_noise_variance{};
    double log_noise_lower = -18.0;
    double log_noise_upper = 1.0;
};

struct HyperoptResult {
    KernelSpec kernel;
    double noise_variance;
    double nlml;  // standardised units
    std::vector<double> trace;
    long evaluations;
};

/// Searches Theta = (log hyperparameters..., log noise variance). The
/// initial kernel and noise, clamped into bounds, seed particle 0, so the
/// result is never worse than the starting point.
HyperoptResult optimize_hyperparameters(const HyperoptProblem& problem, const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y,
                                        const TargetTransform& transform,
                                        const SwarmConfig& config);

/// Negative log marginal likelihood of standardised targets, +inf when the
/// kernel matrix cannot be factorised.
double standardized_nlml(const KernelSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& z, double noise_variance);

/// Mean/std standardisation; scale falls back to 1 for constant targets.
TargetTransform standardize(const Eigen::VectorXd& y);

}  // namespace filmgp
