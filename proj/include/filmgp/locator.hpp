#pragma once

// Two-stage shaft-centre inference: per-condition film GPs give one shaft
// location each; a 2-D polar GP over those locations, labelled by
// speed-load ratio, turns a new operating condition into a likelihood map.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "filmgp/bearing.hpp"
#include "filmgp/gp.hpp"
#include "filmgp/hyperopt.hpp"
#include "filmgp/qbps.hpp"
#include "filmgp/ultrasound.hpp"

namespace filmgp {

struct TrimWindow {
    double half_width = 0.1 * pi;
    double reference_angle = 0.0;

    void validate() const;
};

/// Keeps observations within the closed window around the reference.
/// Throws Error(insufficient_data) when nothing survives.
std::vector<FilmObservation> trim_observations(const std::vector<FilmObservation>& obs,
                                               const TrimWindow& window);

/// Angle of the minimum of a moving median over the angle-sorted data.
double estimate_min_reference(const std::vector<FilmObservation>& obs,
                              double smoothing_half_width = deg_to_rad(2.5));

struct FilmFitOptions {
    std::optional<double> pinned_noise_std;  // m; searched when absent
    int max_optimization_points = 100;       // angle bins used by the search
    double min_length_scale = 2e-3;          // rad, lower search bound
    // When set, targets are modelled as h / c - 1 (zero mean film deviation)
    // instead of being standardised on the trimmed data.
    std::optional<double> clearance;
};

/// Swarm budget for film fits: 20 particles, 80 iterations, one restart.
SwarmConfig film_swarm_defaults();

/// GP over angle -> thickness. The periodic period is searched within
/// [1.9 pi, 2.1 pi]. Throws Error(insufficient_data) for fewer than 3 points.
/// `trace`, if given, receives the optimiser's best-so-far NLML per iteration.
GPModel fit_film_gp(const std::vector<FilmObservation>& obs, const KernelSpec& kernel,
                    const SwarmConfig& opt, const FilmFitOptions& options = {},
                    std::vector<double>* trace = nullptr);

/// Posterior-mean minimum over the arc covered by the training angles,
/// converted to a shaft location. Throws Error(implausible_film) when the
/// minimum is not inside (0, c].
ShaftLocation extract_shaft_location(const GPModel& model, const BearingGeometry& geom,
                                     double load_angle = 0.0);

struct DatasetEntry {
    ShaftLocation location;
    double label;  // speed-load ratio relative to the dataset maximum
    OperatingPoint op;
};

struct LocalisationDataset {
    std::vector<DatasetEntry> entries;
    double clearance;
    double load_angle = 0.0;

    /// Throws Error(invalid_argument) for empty sets or non-positive labels.
    void validate() const;
    std::size_t size() const { return entries.size(); }
    /// Label a new operating condition would receive under this dataset's
    /// normalisation.
    double label_for(const OperatingPoint& op) const;
    Eigen::MatrixXd inputs() const;  // (rho m, theta rad) rows
    Eigen::VectorXd labels() const;
};

/// Rescales raw omega/W ratios so the largest is 1.
void normalize_labels(std::vector<DatasetEntry>& entries);

struct RunInput {
    OperatingPoint op;
    std::vector<FilmObservation> observations;
};

struct RunFailure {
    std::size_t index;
    std::string message;
};

struct BuildOptions {
    double trim_half_width = 0.1 * pi;
    double load_angle = 0.0;
    FilmFitOptions film{};
};

struct BuildResult {
    LocalisationDataset dataset;
    std::vector<RunFailure> failures;
};

/// Per run: reference -> trim -> film GP -> location -> label. Run i uses
/// seed derive_seed(opt.seed, i). Throws Error(insufficient_data) if every
/// run fails.
BuildResult build_dataset(const std::vector<RunInput>& runs, const BearingGeometry& geom,
                          const KernelSpec& kernel, const SwarmConfig& opt,
                          const BuildOptions& options = {});

enum class LocationModel { A, B };
std::string_view to_string(LocationModel m);
LocationModel location_model_from_string(std::string_view s);

/// Model A: radial polynomial decay; Model B: radial Matern 3/2. Both are
/// combined ANOVA-style with the angular Wendland kernel.
GPModel fit_location_gp(const LocalisationDataset& data, LocationModel variant,
                        const SwarmConfig& opt, std::vector<double>* trace = nullptr);

struct GridSpec {
    int n_rho = 60;
    int n_theta = 90;
    bool full_circle = false;
    double clearance = 1e-4;

    void validate() const;
    double rho(int i) const;
    double theta(int j) const;
    std::size_t node_count() const { return static_cast<std::size_t>(n_rho) * n_theta; }
    /// Nearest node indices (i_rho, j_theta).
    std::pair<int, int> nearest_node(double rho, double theta) const;
    /// Chebyshev distance in cells between the nodes nearest to two points.
    int cell_distance(double rho_a, double theta_a, double rho_b, double theta_b) const;
    /// Polar area represented by each node, summing to the grid area.
    double node_area(int i, int j) const;
};

struct LikelihoodMap {
    GridSpec grid;
    std::vector<double> values;  // row-major, rho outer
    std::size_t argmax;
    double query;

    double value(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_theta + j]; }
    int argmax_rho_index() const { return static_cast<int>(argmax / grid.n_theta); }
    int argmax_theta_index() const { return static_cast<int>(argmax % grid.n_theta); }
};

/// Gaussian log density of y_new under the posterior at every node. With
/// include_noise the variance is V[f*] + sigma_n^2, otherwise V[f*] alone.
LikelihoodMap likelihood_map(const GPModel& model, double y_new, const GridSpec& grid,
                             bool include_noise = true);

struct LocateResult {
    ShaftLocation location;
    double max_log_likelihood;
    double credible_area_fraction;  // area with log p >= max - 2
    LikelihoodMap map;
};

LocateResult locate(const GPModel& model, double y_new, const GridSpec& grid,
                    bool include_noise = true, double load_angle = 0.0);

/// Fraction of the grid area whose log-likelihood is within `drop` nats of
/// the maximum.
double credible_area_fraction(const LikelihoodMap& map, double drop = 2.0);

}  // namespace filmgp
