#include "filmgp/kernels.hpp"

#include <cmath>
#include <string>

#include "filmgp/error.hpp"

namespace filmgp {

std::string_view to_string(KernelVariant v) {
    switch (v) {
        case KernelVariant::squared_exponential: return "squared_exponential";
        case KernelVariant::matern32: return "matern32";
        case KernelVariant::periodic: return "periodic";
        case KernelVariant::wendland_polar: return "wendland_polar";
        case KernelVariant::anova2d_pol: return "anova2d_pol";
        case KernelVariant::anova2d_matern: return "anova2d_matern";
    }
    return "unknown";
}

KernelVariant kernel_variant_from_string(std::string_view s) {
    for (auto v : {KernelVariant::squared_exponential, KernelVariant::matern32,
                   KernelVariant::periodic, KernelVariant::wendland_polar,
                   KernelVariant::anova2d_pol, KernelVariant::anova2d_matern}) {
        if (to_string(v) == s) return v;
    }
    fail(ErrorCode::invalid_argument, "unknown kernel variant '" + std::string(s) + "'");
}

std::string_view to_string(Hyper h) {
    switch (h) {
        case Hyper::signal_variance: return "signal_variance";
        case Hyper::length_scale: return "length_scale";
        case Hyper::period: return "period";
        case Hyper::outer_scale: return "outer_scale";
        case Hyper::radial_weight: return "radial_weight";
        case Hyper::angular_weight: return "angular_weight";
        case Hyper::decay_scale: return "decay_scale";
    }
    return "unknown";
}

double wendland(double t, double tau) {
    const double x = t / pi;
    if (x >= 1.0) return 0.0;
    return (1.0 + tau * x) * std::pow(1.0 - x, tau);
}

double polynomial_decay(double rho, double rho_p, double beta, int degree) {
    const double b2 = beta * beta;
    return std::pow(1.0 + rho * rho_p / b2, degree) *
           std::exp(-(rho * rho + rho_p * rho_p) / (2.0 * b2));
}

double matern32(double r, double variance, double length_scale) {
    const double a = std::sqrt(3.0) * r / length_scale;
    return variance * (1.0 + a) * std::exp(-a);
}

KernelSpec::KernelSpec(KernelVariant variant, KernelParams params)
    : variant_(variant), params_(params) {
    const auto& p = params_;
    const bool positive = p.signal_variance > 0.0 && p.length_scale > 0.0 && p.period > 0.0 &&
                          p.outer_scale > 0.0 && p.radial_weight > 0.0 &&
                          p.angular_weight > 0.0 && p.decay_scale > 0.0;
    require(positive, ErrorCode::invalid_argument, "kernel hyperparameters must be positive");
    require(p.degree >= 1, ErrorCode::invalid_argument, "polynomial degree must be >= 1");
    require(p.wendland_tau >= 4.0, ErrorCode::invalid_argument, "Wendland tau must be >= 4");
}

int KernelSpec::input_dim() const {
    switch (variant_) {
        case KernelVariant::anova2d_pol:
        case KernelVariant::anova2d_matern:
            return 2;
        default:
            return 1;
    }
}

std::vector<Hyper> KernelSpec::free_parameters() const {
    switch (variant_) {
        case KernelVariant::squared_exponential:
        case KernelVariant::matern32:
            return {Hyper::signal_variance, Hyper::length_scale};
        case KernelVariant::periodic:
            return {Hyper::signal_variance, Hyper::length_scale, Hyper::period};
        case KernelVariant::wendland_polar:
            return {Hyper::signal_variance};
        case KernelVariant::anova2d_pol:
            return {Hyper::outer_scale, Hyper::radial_weight, Hyper::angular_weight,
                    Hyper::decay_scale};
        case KernelVariant::anova2d_matern:
            return {Hyper::outer_scale, Hyper::radial_weight, Hyper::angular_weight,
                    Hyper::length_scale};
    }
    return {};
}

double KernelSpec::get(Hyper h) const {
    switch (h) {
        case Hyper::signal_variance: return params_.signal_variance;
        case Hyper::length_scale: return params_.length_scale;
        case Hyper::period: return params_.period;
        case Hyper::outer_scale: return params_.outer_scale;
        case Hyper::radial_weight: return params_.radial_weight;
        case Hyper::angular_weight: return params_.angular_weight;
        case Hyper::decay_scale: return params_.decay_scale;
    }
    return 0.0;
}

KernelSpec KernelSpec::with(Hyper h, double value) const {
    KernelParams p = params_;
    switch (h) {
        case Hyper::signal_variance: p.signal_variance = value; break;
        case Hyper::length_scale: p.length_scale = value; break;
        case Hyper::period: p.period = value; break;
        case Hyper::outer_scale: p.outer_scale = value; break;
        case Hyper::radial_weight: p.radial_weight = value; break;
        case Hyper::angular_weight: p.angular_weight = value; break;
        case Hyper::decay_scale: p.decay_scale = value; break;
    }
    return KernelSpec(variant_, p);
}

std::vector<double> KernelSpec::log_values() const {
    std::vector<double> out;
    for (Hyper h : free_parameters()) out.push_back(std::log(get(h)));
    return out;
}

KernelSpec KernelSpec::with_log_values(std::span<const double> logs) const {
    const auto names = free_parameters();
    require(logs.size() == names.size(), ErrorCode::invalid_argument,
            "hyperparameter vector has the wrong length");
    KernelSpec out = *this;
    for (std::size_t i = 0; i < names.size(); ++i) {
        out = out.with(names[i], std::exp(logs[i]));
    }
    return out;
}

double KernelSpec::operator()(std::span<const double> x, std::span<const double> xp) const {
    const auto& p = params_;
    switch (variant_) {
        case KernelVariant::squared_exponential: {
            double r2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - xp[i]) * (x[i] - xp[i]);
            return p.signal_variance * std::exp(-r2 / (2.0 * p.length_scale * p.length_scale));
        }
        case KernelVariant::matern32: {
            double r2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - xp[i]) * (x[i] - xp[i]);
            return matern32(std::sqrt(r2), p.signal_variance, p.length_scale);
        }
        case KernelVariant::periodic: {
            const double s = std::sin(pi * std::abs(x[0] - xp[0]) / p.period);
            return p.signal_variance *
                   std::exp(-2.0 * s * s / (p.length_scale * p.length_scale));
        }
        case KernelVariant::wendland_polar:
            return p.signal_variance * wendland(angular_distance(x[0], xp[0]), p.wendland_tau);
        case KernelVariant::anova2d_pol:
        case KernelVariant::anova2d_matern: {
            const double radial =
                variant_ == KernelVariant::anova2d_pol
                    ? polynomial_decay(x[0], xp[0], p.decay_scale, p.degree)
                    : matern32(std::abs(x[0] - xp[0]), 1.0, p.length_scale);
            const double angular = wendland(angular_distance(x[1], xp[1]), p.wendland_tau);
            return p.outer_scale * (1.0 + p.radial_weight * radial) *
                   (1.0 + p.angular_weight * angular);
        }
    }
    return 0.0;
}

double KernelSpec::variance_at(std::span<const double> x) const {
    const auto& p = params_;
    switch (variant_) {
        case KernelVariant::anova2d_pol:
            return p.outer_scale *
                   (1.0 + p.radial_weight * polynomial_decay(x[0], x[0], p.decay_scale, p.degree)) *
                   (1.0 + p.angular_weight);
        case KernelVariant::anova2d_matern:
            return p.outer_scale * (1.0 + p.radial_weight) * (1.0 + p.angular_weight);
        default:
            return p.signal_variance;
    }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> xp) {
    const auto dim = static_cast<std::size_t>(spec.input_dim());
    if (x.size() != xp.size() || x.size() < dim ||
        (spec.variant() != KernelVariant::squared_exponential &&
         spec.variant() != KernelVariant::matern32 && x.size() != dim)) {
        fail(ErrorCode::invalid_argument, "input dimension does not match the kernel");
    }
    return spec(x, xp);
}

namespace {

// Row-major copies so each point is a contiguous span.
std::vector<double> rows_of(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    require(a.cols() == b.cols(), ErrorCode::invalid_argument,
            "gram inputs have different dimensions");
    const auto d = static_cast<std::size_t>(a.cols());
    if (a.rows() > 0 && b.rows() > 0) {
        const std::vector<double> probe(d, 0.0);
        kernel_eval(spec, probe, probe);  // dimension check only
    }
    const auto ra = rows_of(a);
    const auto rb = rows_of(b);
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        const std::span<const double> xj(rb.data() + j * d, d);
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            k(i, j) = spec(std::span<const double>(ra.data() + i * d, d), xj);
        }
    }
    return k;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a) {
    const auto d = static_cast<std::size_t>(a.cols());
    if (a.rows() > 0) {
        const std::vector<double> probe(d, 0.0);
        kernel_eval(spec, probe, probe);
    }
    const auto ra = rows_of(a);
    Eigen::MatrixXd k(a.rows(), a.rows());
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        const std::span<const double> xj(ra.data() + j * d, d);
        for (Eigen::Index i = j; i < a.rows(); ++i) {
            const double v = spec(std::span<const double>(ra.data() + i * d, d), xj);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

}  // namespace filmgp
