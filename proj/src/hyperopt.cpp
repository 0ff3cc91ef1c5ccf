#include "filmgp/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filmgp/error.hpp"

namespace filmgp {

namespace {

KernelSpec kernel_at(const HyperoptProblem& p, std::span<const double> theta) {
    KernelSpec k = p.initial;
    for (std::size_t i = 0; i < p.bounds.size(); ++i) {
        k = k.with(p.bounds[i].hyper, std::exp(theta[i]));
    }
    return k;
}

}  // namespace

double standardized_nlml(const KernelSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& z, double noise_variance) {
    Eigen::MatrixXd k = gram(spec, x);
    k.diagonal().array() += noise_variance;
    try {
        auto [llt, jitter] = robust_cholesky(k);
        const Eigen::VectorXd alpha = llt.solve(z);
        const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        return 0.5 * z.dot(alpha) + 0.5 * logdet +
               0.5 * static_cast<double>(z.size()) * std::log(two_pi);
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

TargetTransform standardize(const Eigen::VectorXd& y) {
    require(y.size() >= 1, ErrorCode::invalid_argument, "no targets to standardise");
    const double mean = y.mean();
    const double var =
        y.size() > 1 ? (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1) : 0.0;
    const double sd = std::sqrt(var);
    return {mean, sd > 0.0 && std::isfinite(sd) ? sd : 1.0};
}

HyperoptResult optimize_hyperparameters(const HyperoptProblem& problem, const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y,
                                        const TargetTransform& transform,
                                        const SwarmConfig& config) {
    require(x.rows() == y.size() && y.size() >= 1, ErrorCode::invalid_argument,
            "hyperparameter search needs matching inputs and targets");
    const Eigen::VectorXd z = (y.array() - transform.offset) / transform.scale;
    const bool search_noise = !problem.pinned_noise_variance.has_value();

    std::vector<Bounds> bounds;
    std::vector<double> guess;
    for (const auto& b : problem.bounds) {
        bounds.push_back({b.log_lower, b.log_upper});
        guess.push_back(std::clamp(std::log(problem.initial.get(b.hyper)), b.log_lower,
                                   b.log_upper));
    }
    if (search_noise) {
        bounds.push_back({problem.log_noise_lower, problem.log_noise_upper});
        guess.push_back(std::clamp(std::log(problem.initial_noise_variance),
                                   problem.log_noise_lower, problem.log_noise_upper));
    }

    const auto noise_of = [&](std::span<const double> theta) {
        return search_noise ? std::exp(theta[problem.bounds.size()])
                            : *problem.pinned_noise_variance;
    };

    if (bounds.empty()) {
        const double v = standardized_nlml(problem.initial, x, z, *problem.pinned_noise_variance);
        require(std::isfinite(v), ErrorCode::no_feasible_point, "fixed hyperparameters are infeasible");
        return {problem.initial, *problem.pinned_noise_variance, v, {v}, 1};
    }

    const Objective objective = [&](std::span<const double> theta) {
        return standardized_nlml(kernel_at(problem, theta), x, z, noise_of(theta));
    };
    const auto r = optimize(objective, SearchSpace(bounds), config, guess);
    return {kernel_at(problem, r.best), noise_of(r.best), r.best_value, r.trace, r.evaluations};
}

}  // namespace filmgp
