#pragma once

// Leave-one-out cross-validation of the localisation models.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "filmgp/locator.hpp"

namespace filmgp {

/// Distance between shaft centres in clearance-normalised Cartesian
/// coordinates.
double rmse(const ShaftLocation& predicted, const ShaftLocation& truth);

struct FoldResult {
    double speed_rpm;
    double load_n;
    double label;
    ShaftLocation truth;
    std::optional<ShaftLocation> predicted{};
    double log_likelihood = 0.0;  // held-out label at the held-out location
    double rmse = 0.0;            // normalised
    double rmse_m = 0.0;
    std::string error{};          // non-empty when the fold was skipped

    bool ok() const { return error.empty(); }
};

struct CVReport {
    LocationModel model;
    std::vector<FoldResult> folds;
    double mean_log_likelihood = 0.0;
    double mean_rmse = 0.0;
    double mean_rmse_m = 0.0;
    std::size_t failed = 0;
};

/// Folds follow a canonical (speed, load, label, location) order and each
/// fold's optimiser seed is keyed to its operating point, so the report does
/// not depend on dataset order. Throws Error(insufficient_data) for N < 3.
CVReport loocv(const LocalisationDataset& data, LocationModel variant, const SwarmConfig& opt,
               const GridSpec& grid, bool include_noise = true);

nlohmann::json cv_report_to_json(const CVReport& report);
/// One row per fold.
std::string cv_report_csv(const CVReport& report);

/// Seed key for a fold: a hash of its operating point.
std::uint64_t fold_key(double speed_rpm, double load_n);

}  // namespace filmgp
