#pragma once

// Exact Gaussian-process regression with a zero prior mean on standardised
// targets, a cached Cholesky factor and the log marginal likelihood.

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "filmgp/kernels.hpp"

namespace filmgp {

/// Affine map between original targets y and the standardised targets the
/// GP actually models: z = (y - offset) / scale.
struct TargetTransform {
    double offset = 0.0;
    double scale = 1.0;
};

struct TrainingSet {
    Eigen::MatrixXd inputs;   // N x dim
    Eigen::VectorXd targets;  // N, original units
    double noise_variance;    // in standardised target units

    /// Throws Error(invalid_argument) for N < 1, mismatched sizes, non-finite
    /// values or noise_variance <= 0.
    TrainingSet(Eigen::MatrixXd x, Eigen::VectorXd y, double noise_var);

    Eigen::Index size() const { return targets.size(); }
};

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;                  // latent f, excludes noise
    std::optional<Eigen::MatrixXd> covariance;
};

/// Escalating diagonal jitter: 1e-10 of the mean diagonal, x10 per attempt,
/// up to 1e-4. Returns the factor and the jitter actually used; throws
/// Error(ill_conditioned) when every attempt fails.
std::pair<Eigen::LLT<Eigen::MatrixXd>, double> robust_cholesky(const Eigen::MatrixXd& k,
                                                               bool try_without_jitter = true);

class GPModel {
public:
    GPModel(KernelSpec kernel, TrainingSet training, TargetTransform transform = {});

    const KernelSpec& kernel() const { return kernel_; }
    const TrainingSet& training() const { return training_; }
    const TargetTransform& transform() const { return transform_; }
    double jitter() const { return jitter_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    const Eigen::LLT<Eigen::MatrixXd>& factor() const { return llt_; }

    Prediction predict(const Eigen::MatrixXd& x_star, bool full_covariance = false) const;

    /// Posterior mean only; cheaper for dense scans.
    Eigen::VectorXd predict_mean(const Eigen::MatrixXd& x_star) const;

    /// In the units of the original targets.
    double log_marginal_likelihood() const;

    /// Predictive log density of held-out (x, y) pairs, summed: the
    /// "test-set" likelihood used to compare kernels.
    double test_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;

private:
    KernelSpec kernel_;
    TrainingSet training_;
    TargetTransform transform_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

GPModel fit(const KernelSpec& spec, const TrainingSet& training, TargetTransform transform = {});
Prediction predict(const GPModel& model, const Eigen::MatrixXd& x_star,
                   bool full_covariance = false);
double log_marginal_likelihood(const GPModel& model);

/// n_samples draws (columns) from N(0, K(X, X) + jitter).
Eigen::MatrixXd sample_prior(const KernelSpec& spec, const Eigen::MatrixXd& x, int n_samples,
                             std::uint64_t seed);

nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

/// Schema: {schema_version, kernel{variant, params}, noise_variance,
/// target_offset, target_scale, inputs[[...]], targets[...]}.
nlohmann::json model_to_json(const GPModel& model);
GPModel model_from_json(const nlohmann::json& j);

}  // namespace filmgp
