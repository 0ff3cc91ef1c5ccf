#include "filmgp/gp.hpp"

#include <cmath>
#include <random>

#include "filmgp/error.hpp"

namespace filmgp {

namespace {
constexpr double log_two_pi = 1.8378770664093454836;
}

TrainingSet::TrainingSet(Eigen::MatrixXd x, Eigen::VectorXd y, double noise_var)
    : inputs(std::move(x)), targets(std::move(y)), noise_variance(noise_var) {
    require(targets.size() >= 1, ErrorCode::invalid_argument, "training set is empty");
    require(inputs.rows() == targets.size(), ErrorCode::invalid_argument,
            "inputs and targets differ in length");
    require(inputs.allFinite() && targets.allFinite(), ErrorCode::invalid_argument,
            "training data must be finite");
    require(noise_variance > 0.0 && std::isfinite(noise_variance),
            ErrorCode::invalid_argument, "noise variance must be positive");
}

std::pair<Eigen::LLT<Eigen::MatrixXd>, double> robust_cholesky(const Eigen::MatrixXd& k,
                                                               bool try_without_jitter) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (try_without_jitter) {
        llt.compute(k);
        if (llt.info() == Eigen::Success) {
            return {std::move(llt), 0.0};
        }
    }
    const double mean_diag = k.diagonal().mean();
    for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
        const double jitter = rel * mean_diag;
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            return {std::move(llt), jitter};
        }
    }
    fail(ErrorCode::ill_conditioned, "kernel matrix is not positive definite after jitter");
}

GPModel::GPModel(KernelSpec kernel, TrainingSet training, TargetTransform transform)
    : kernel_(std::move(kernel)), training_(std::move(training)), transform_(transform) {
    require(transform_.scale > 0.0 && std::isfinite(transform_.offset),
            ErrorCode::invalid_argument, "target transform must have a positive scale");
    require(training_.inputs.cols() == kernel_.input_dim() ||
                kernel_.variant() == KernelVariant::squared_exponential ||
                kernel_.variant() == KernelVariant::matern32,
            ErrorCode::invalid_argument, "training inputs do not match the kernel dimension");
    Eigen::MatrixXd k = gram(kernel_, training_.inputs);
    k.diagonal().array() += training_.noise_variance;
    auto [llt, jitter] = robust_cholesky(k);
    llt_ = std::move(llt);
    jitter_ = jitter;
    const Eigen::VectorXd z =
        (training_.targets.array() - transform_.offset) / transform_.scale;
    alpha_ = llt_.solve(z);
}

Eigen::VectorXd GPModel::predict_mean(const Eigen::MatrixXd& x_star) const {
    const Eigen::MatrixXd ks = gram(kernel_, x_star, training_.inputs);
    return ((ks * alpha_).array() * transform_.scale + transform_.offset).matrix();
}

Prediction GPModel::predict(const Eigen::MatrixXd& x_star, bool full_covariance) const {
    const Eigen::MatrixXd ks = gram(kernel_, training_.inputs, x_star);  // N x M
    Prediction out;
    out.mean = ((ks.transpose() * alpha_).array() * transform_.scale + transform_.offset).matrix();

    const Eigen::MatrixXd v = llt_.matrixL().solve(ks);
    const double s2 = transform_.scale * transform_.scale;
    out.variance.resize(x_star.rows());
    const auto d = static_cast<std::size_t>(x_star.cols());
    for (Eigen::Index i = 0; i < x_star.rows(); ++i) {
        Eigen::VectorXd xi = x_star.row(i).transpose();
        const double prior = kernel_.variance_at(std::span<const double>(xi.data(), d));
        const double var = prior - v.col(i).squaredNorm();
        // Round-off can push a vanishing variance slightly negative.
        out.variance(i) = var > 0.0 ? var * s2 : 0.0;
    }
    if (full_covariance) {
        Eigen::MatrixXd cov = gram(kernel_, x_star) - v.transpose() * v;
        out.covariance = cov * s2;
    }
    return out;
}

double GPModel::log_marginal_likelihood() const {
    const Eigen::VectorXd z =
        (training_.targets.array() - transform_.offset) / transform_.scale;
    const auto n = static_cast<double>(z.size());
    const double half_log_det = llt_.matrixLLT().diagonal().array().log().sum();
    return -0.5 * z.dot(alpha_) - half_log_det - 0.5 * n * log_two_pi -
           n * std::log(transform_.scale);
}

double GPModel::test_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
    require(x.rows() == y.size(), ErrorCode::invalid_argument,
            "test inputs and targets differ in length");
    const Prediction p = predict(x);
    const double noise = training_.noise_variance * transform_.scale * transform_.scale;
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double var = p.variance(i) + noise;
        const double r = y(i) - p.mean(i);
        total += -0.5 * std::log(var) - r * r / (2.0 * var) - 0.5 * log_two_pi;
    }
    return total;
}

GPModel fit(const KernelSpec& spec, const TrainingSet& training, TargetTransform transform) {
    return GPModel(spec, training, transform);
}

Prediction predict(const GPModel& model, const Eigen::MatrixXd& x_star, bool full_covariance) {
    return model.predict(x_star, full_covariance);
}

double log_marginal_likelihood(const GPModel& model) { return model.log_marginal_likelihood(); }

Eigen::MatrixXd sample_prior(const KernelSpec& spec, const Eigen::MatrixXd& x, int n_samples,
                             std::uint64_t seed) {
    require(n_samples >= 0, ErrorCode::invalid_argument, "sample count must be non-negative");
    const Eigen::MatrixXd k = gram(spec, x);
    auto [llt, jitter] = robust_cholesky(k, /*try_without_jitter=*/false);
    (void)jitter;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(x.rows(), n_samples);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            z(i, j) = normal(rng);
        }
    }
    return llt.matrixL() * z;
}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
    const auto& p = spec.params();
    return {
        {"variant", std::string(to_string(spec.variant()))},
        {"params",
         {{"signal_variance", p.signal_variance},
          {"length_scale", p.length_scale},
          {"period", p.period},
          {"outer_scale", p.outer_scale},
          {"radial_weight", p.radial_weight},
          {"angular_weight", p.angular_weight},
          {"decay_scale", p.decay_scale},
          {"degree", p.degree},
          {"wendland_tau", p.wendland_tau}}},
    };
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    try {
        const auto variant = kernel_variant_from_string(j.at("variant").get<std::string>());
        KernelParams p;
        const auto& q = j.at("params");
        p.signal_variance = q.value("signal_variance", p.signal_variance);
        p.length_scale = q.value("length_scale", p.length_scale);
        p.period = q.value("period", p.period);
        p.outer_scale = q.value("outer_scale", p.outer_scale);
        p.radial_weight = q.value("radial_weight", p.radial_weight);
        p.angular_weight = q.value("angular_weight", p.angular_weight);
        p.decay_scale = q.value("decay_scale", p.decay_scale);
        p.degree = q.value("degree", p.degree);
        p.wendland_tau = q.value("wendland_tau", p.wendland_tau);
        return KernelSpec(variant, p);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::data_format, std::string("bad kernel JSON: ") + e.what());
    }
}

nlohmann::json model_to_json(const GPModel& model) {
    const auto& t = model.training();
    nlohmann::json inputs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.inputs.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < t.inputs.cols(); ++j) row.push_back(t.inputs(i, j));
        inputs.push_back(std::move(row));
    }
    nlohmann::json targets = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.targets.size(); ++i) targets.push_back(t.targets(i));
    return {
        {"schema_version", 1},
        {"kernel", kernel_to_json(model.kernel())},
        {"noise_variance", t.noise_variance},
        {"target_offset", model.transform().offset},
        {"target_scale", model.transform().scale},
        {"inputs", std::move(inputs)},
        {"targets", std::move(targets)},
    };
}

GPModel model_from_json(const nlohmann::json& j) {
    try {
        const KernelSpec kernel = kernel_from_json(j.at("kernel"));
        const auto& rows = j.at("inputs");
        const auto& ys = j.at("targets");
        const auto n = static_cast<Eigen::Index>(rows.size());
        const auto d = n > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
        Eigen::MatrixXd x(n, d);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < d; ++c) x(i, c) = rows.at(i).at(c).get<double>();
            y(i) = ys.at(i).get<double>();
        }
        TargetTransform tf{j.value("target_offset", 0.0), j.value("target_scale", 1.0)};
        return GPModel(kernel, TrainingSet(std::move(x), std::move(y),
                                           j.at("noise_variance").get<double>()),
                       tf);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::data_format, std::string("bad model JSON: ") + e.what());
    }
}

}  // namespace filmgp
