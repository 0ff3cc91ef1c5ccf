#include "filmgp/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "filmgp/error.hpp"

namespace filmgp {

double rmse(const ShaftLocation& predicted, const ShaftLocation& truth) {
    return std::hypot(predicted.x() - truth.x(), predicted.y() - truth.y());
}

std::uint64_t fold_key(double speed_rpm, double load_n) {
    const auto a = std::bit_cast<std::uint64_t>(speed_rpm);
    const auto b = std::bit_cast<std::uint64_t>(load_n);
    return derive_seed(a, b);
}

namespace {

auto sort_key(const DatasetEntry& e) {
    return std::make_tuple(e.op.speed, e.op.load, e.label, e.location.rho(), e.location.theta());
}

}  // namespace

CVReport loocv(const LocalisationDataset& data, LocationModel variant, const SwarmConfig& opt,
               const GridSpec& grid, bool include_noise) {
    data.validate();
    require(data.size() >= 3, ErrorCode::insufficient_data,
            "cross-validation needs at least 3 entries");

    std::vector<DatasetEntry> entries = data.entries;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });

    CVReport report{variant, {}, 0.0, 0.0, 0.0, 0};
    for (std::size_t f = 0; f < entries.size(); ++f) {
        const auto& held = entries[f];
        FoldResult fold{.speed_rpm = held.op.rpm(),
                        .load_n = held.op.load,
                        .label = held.label,
                        .truth = held.location,
                        .predicted = std::nullopt};
        try {
            LocalisationDataset train{{}, data.clearance, data.load_angle};
            for (std::size_t k = 0; k < entries.size(); ++k) {
                if (k != f) train.entries.push_back(entries[k]);
            }
            SwarmConfig fold_opt = opt;
            fold_opt.seed = derive_seed(opt.seed, fold_key(fold.speed_rpm, fold.load_n));
            const GPModel model = fit_location_gp(train, variant, fold_opt);

            Eigen::MatrixXd at(1, 2);
            at << held.location.rho(), held.location.theta();
            const Prediction pr = model.predict(at);
            const double s2 = model.transform().scale * model.transform().scale;
            const double v = std::max(
                pr.variance(0) + (include_noise ? model.training().noise_variance * s2 : 0.0),
                1e-12 * s2);
            const double r = held.label - pr.mean(0);
            fold.log_likelihood = -0.5 * std::log(v) - r * r / (2.0 * v) - 0.5 * std::log(two_pi);

            const LocateResult loc = locate(model, held.label, grid, include_noise, data.load_angle);
            fold.predicted = loc.location;
            fold.rmse = rmse(loc.location, held.location);
            fold.rmse_m = fold.rmse * data.clearance;
        } catch (const Error& e) {
            fold.error = e.what();
            ++report.failed;
        }
        report.folds.push_back(std::move(fold));
    }

    std::size_t ok = 0;
    for (const auto& f : report.folds) {
        if (!f.ok()) continue;
        ++ok;
        report.mean_log_likelihood += f.log_likelihood;
        report.mean_rmse += f.rmse;
        report.mean_rmse_m += f.rmse_m;
    }
    require(ok > 0, ErrorCode::insufficient_data, "every cross-validation fold failed");
    report.mean_log_likelihood /= static_cast<double>(ok);
    report.mean_rmse /= static_cast<double>(ok);
    report.mean_rmse_m /= static_cast<double>(ok);
    return report;
}

nlohmann::json cv_report_to_json(const CVReport& report) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : report.folds) {
        nlohmann::json j{{"speed_rpm", f.speed_rpm},
                         {"load_N", f.load_n},
                         {"y_ratio", f.label},
                         {"true_rho_m", f.truth.rho()},
                         {"true_theta_rad", f.truth.theta()},
                         {"ok", f.ok()}};
        if (f.ok()) {
            j["pred_rho_m"] = f.predicted->rho();
            j["pred_theta_rad"] = f.predicted->theta();
            j["log_likelihood"] = f.log_likelihood;
            j["rmse"] = f.rmse;
            j["rmse_m"] = f.rmse_m;
        } else {
            j["error"] = f.error;
        }
        folds.push_back(std::move(j));
    }
    return {{"model", std::string(to_string(report.model))},
            {"fold_count", report.folds.size()},
            {"failed_folds", report.failed},
            {"mean_log_likelihood", report.mean_log_likelihood},
            {"mean_rmse", report.mean_rmse},
            {"mean_rmse_m", report.mean_rmse_m},
            {"folds", std::move(folds)}};
}

std::string cv_report_csv(const CVReport& report) {
    std::string out =
        "model,speed_rpm,load_N,y_ratio,true_rho_m,true_theta_rad,pred_rho_m,pred_theta_rad,"
        "log_likelihood,rmse,rmse_m\n";
    char buf[512];
    for (const auto& f : report.folds) {
        if (!f.ok()) continue;
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      std::string(to_string(report.model)).c_str(), f.speed_rpm, f.load_n, f.label,
                      f.truth.rho(), f.truth.theta(), f.predicted->rho(), f.predicted->theta(),
                      f.log_likelihood, f.rmse, f.rmse_m);
        out += buf;
    }
    return out;
}

}  // namespace filmgp
