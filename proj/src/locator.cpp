#include "filmgp/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "filmgp/error.hpp"

namespace filmgp {

void TrimWindow::validate() const {
    require(half_width > 0.0 && half_width <= pi, ErrorCode::invalid_argument,
            "trim half-width must lie in (0, pi]");
    require(std::isfinite(reference_angle), ErrorCode::invalid_argument,
            "trim reference must be finite");
}

std::vector<FilmObservation> trim_observations(const std::vector<FilmObservation>& obs,
                                               const TrimWindow& window) {
    window.validate();
    std::vector<FilmObservation> out;
    for (const auto& o : obs) {
        // tiny slack so a point placed exactly on the edge survives rounding
        if (angular_distance(o.shaft_angle, window.reference_angle) <=
            window.half_width * (1.0 + 1e-12)) {
            out.push_back(o);
        }
    }
    require(!out.empty(), ErrorCode::insufficient_data, "no observations inside the trim window");
    return out;
}

double estimate_min_reference(const std::vector<FilmObservation>& obs,
                              double smoothing_half_width) {
    require(!obs.empty(), ErrorCode::insufficient_data, "no observations to search");
    std::vector<std::pair<double, double>> pts;  // (wrapped angle, h)
    pts.reserve(obs.size());
    for (const auto& o : obs) pts.emplace_back(wrap_angle(o.shaft_angle), o.thickness);
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t n = pts.size();
    const auto at = [&](std::size_t k) { return pts[k % n]; };
    const auto angle_at = [&](std::size_t k) {
        return pts[k % n].first + two_pi * static_cast<double>(k / n);
    };

    std::vector<double> window;
    std::vector<double> medians(n);
    // Window [lo, hi) over the doubled sequence, centred on element i + n.
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = n; i < 2 * n; ++i) {
        const double centre = angle_at(i);
        while (angle_at(lo) < centre - smoothing_half_width && lo < i) ++lo;
        if (hi < i) hi = i;
        while (hi < i + n && angle_at(hi) <= centre + smoothing_half_width) ++hi;
        // a window wider than the circle would double count
        const std::size_t first = std::max(lo, hi > n ? hi - n : 0);
        window.clear();
        for (std::size_t k = first; k < hi; ++k) window.push_back(at(k).second);
        const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
        std::nth_element(window.begin(), mid, window.end());
        double med = *mid;
        if (window.size() % 2 == 0) {
            med = 0.5 * (med + *std::max_element(window.begin(), mid));
        }
        medians[i - n] = med;
    }

    // The median is flat for about one window width around a smooth minimum, so
    // take the middle of the low band (5% of the range) that holds the first minimum.
    const auto [lo_it, hi_it] = std::minmax_element(medians.begin(), medians.end());
    const double tol = 0.05 * (*hi_it - *lo_it);
    const auto flat = [&](std::size_t k) { return medians[k % n] <= *lo_it + tol; };
    const std::size_t first_min = static_cast<std::size_t>(lo_it - medians.begin());
    if (tol == 0.0) return pts[first_min].first;
    std::size_t left = 0;
    while (left + 1 < n && flat(first_min + n - left - 1)) ++left;
    std::size_t right = 0;
    while (left + right + 1 < n && flat(first_min + right + 1)) ++right;
    const double a = angle_at(first_min + n - left);
    const double b = angle_at(first_min + n + right);
    return wrap_angle(0.5 * (a + b));
}

SwarmConfig film_swarm_defaults() {
    SwarmConfig c;
    c.particle_count = 20;
    c.max_iterations = 80;
    c.restarts = 1;
    c.stall_iterations = 20;
    return c;
}

namespace {

constexpr int extraction_grid = 3600;

// Angles rewritten as a contiguous arc around their circular mean.
std::vector<double> unwrap_arc(const std::vector<FilmObservation>& obs) {
    double s = 0.0;
    double c = 0.0;
    for (const auto& o : obs) {
        s += std::sin(o.shaft_angle);
        c += std::cos(o.shaft_angle);
    }
    const double centre = (s == 0.0 && c == 0.0) ? 0.0 : wrap_angle(std::atan2(s, c));
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto& o : obs) out.push_back(centre + signed_angle_diff(o.shaft_angle, centre));
    return out;
}

std::vector<HyperBound> film_bounds(const KernelSpec& kernel, double min_length) {
    std::vector<HyperBound> b;
    for (Hyper h : kernel.free_parameters()) {
        switch (h) {
            case Hyper::signal_variance: b.push_back({h, -6.0, 6.0}); break;
            case Hyper::length_scale: b.push_back({h, std::log(min_length), std::log(20.0)}); break;
            case Hyper::period: b.push_back({h, std::log(1.9 * pi), std::log(2.1 * pi)}); break;
            default: b.push_back({h, -6.0, 6.0}); break;
        }
    }
    return b;
}

double mean_at(const GPModel& model, double angle) {
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = angle;
    return model.predict_mean(x)(0);
}

}  // namespace

GPModel fit_film_gp(const std::vector<FilmObservation>& obs, const KernelSpec& kernel,
                    const SwarmConfig& opt, const FilmFitOptions& options,
                    std::vector<double>* trace) {
    require(obs.size() >= 3, ErrorCode::insufficient_data,
            "film fit needs at least 3 observations, got " + std::to_string(obs.size()));
    require(kernel.input_dim() == 1, ErrorCode::invalid_argument,
            "film fits need a one-dimensional kernel");
    require(options.max_optimization_points >= 3, ErrorCode::invalid_argument,
            "max_optimization_points must be at least 3");

    const std::vector<double> angles = unwrap_arc(obs);
    std::vector<std::size_t> order(obs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });

    const auto n = static_cast<Eigen::Index>(obs.size());
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = angles[order[static_cast<std::size_t>(i)]];
        y(i) = obs[order[static_cast<std::size_t>(i)]].thickness;
    }
    const TargetTransform tf =
        options.clearance ? TargetTransform{*options.clearance, *options.clearance} : standardize(y);

    // The search runs on means of consecutive angle bins; a bin of k points
    // carries noise sigma_n^2 / k, which is mapped back afterwards.
    const Eigen::Index m = std::min(n, static_cast<Eigen::Index>(options.max_optimization_points));
    const double per_bin = static_cast<double>(n) / static_cast<double>(m);
    Eigen::MatrixXd xs(m, 1);
    Eigen::VectorXd ys(m);
    for (Eigen::Index b = 0; b < m; ++b) {
        const Eigen::Index lo = b * n / m;
        const Eigen::Index hi = (b + 1) * n / m;
        xs(b, 0) = x.col(0).segment(lo, hi - lo).mean();
        ys(b) = y.segment(lo, hi - lo).mean();
    }

    HyperoptProblem problem{.initial = kernel, .bounds = film_bounds(kernel, options.min_length_scale)};
    problem.initial_noise_variance = 0.5 / per_bin;
    if (options.pinned_noise_std) {
        const double s = *options.pinned_noise_std / tf.scale;
        problem.pinned_noise_variance = std::max(s * s / per_bin, 1e-12);
    }
    const HyperoptResult hr = optimize_hyperparameters(problem, xs, ys, tf, opt);
    if (trace) *trace = hr.trace;
    return GPModel(hr.kernel, TrainingSet(std::move(x), std::move(y), hr.noise_variance * per_bin), tf);
}

ShaftLocation extract_shaft_location(const GPModel& model, const BearingGeometry& geom,
                                     double load_angle) {
    const auto& x = model.training().inputs;
    require(x.cols() == 1, ErrorCode::invalid_argument, "expected a film-thickness model");
    const double lo = x.col(0).minCoeff();
    const double hi = x.col(0).maxCoeff();

    Eigen::MatrixXd grid(extraction_grid, 1);
    const double step = hi > lo ? (hi - lo) / (extraction_grid - 1) : 0.0;
    for (int i = 0; i < extraction_grid; ++i) grid(i, 0) = lo + step * i;
    const Eigen::VectorXd mean = model.predict_mean(grid);
    Eigen::Index k = 0;
    mean.minCoeff(&k);

    double best_angle = grid(k, 0);
    double best = mean(k);
    if (step > 0.0) {
        // golden-section refinement inside the neighbouring cells
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = std::max(lo, best_angle - step);
        double b = std::min(hi, best_angle + step);
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        double fc = mean_at(model, c);
        double fd = mean_at(model, d);
        for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = mean_at(model, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = mean_at(model, d);
            }
        }
        const double t = 0.5 * (a + b);
        const double ft = mean_at(model, t);
        if (ft < best) {
            best = ft;
            best_angle = t;
        }
    }

    if (!(best > 0.0 && best <= geom.clearance())) {
        fail(ErrorCode::implausible_film,
             "posterior minimum film " + std::to_string(best) + " m is outside (0, c]");
    }
    const double eps = (geom.clearance() - best) / geom.clearance();
    return ShaftLocation(eps, wrap_angle(best_angle), geom.clearance(), load_angle);
}

void LocalisationDataset::validate() const {
    require(!entries.empty(), ErrorCode::insufficient_data, "localisation dataset is empty");
    require(clearance > 0.0, ErrorCode::invalid_argument, "clearance must be positive");
    for (const auto& e : entries) {
        require(e.label > 0.0 && std::isfinite(e.label), ErrorCode::invalid_argument,
                "dataset labels must be positive");
    }
}

double LocalisationDataset::label_for(const OperatingPoint& op) const {
    validate();
    const auto& e = entries.front();
    const double reference_ratio = (e.op.speed / e.op.load) / e.label;
    return (op.speed / op.load) / reference_ratio;
}

Eigen::MatrixXd LocalisationDataset::inputs() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(entries.size()), 2);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = entries[i].location.rho();
        x(static_cast<Eigen::Index>(i), 1) = entries[i].location.theta();
    }
    return x;
}

Eigen::VectorXd LocalisationDataset::labels() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) y(static_cast<Eigen::Index>(i)) = entries[i].label;
    return y;
}

void normalize_labels(std::vector<DatasetEntry>& entries) {
    double top = 0.0;
    for (const auto& e : entries) top = std::max(top, e.op.speed / e.op.load);
    for (auto& e : entries) e.label = (e.op.speed / e.op.load) / top;
}

BuildResult build_dataset(const std::vector<RunInput>& runs, const BearingGeometry& geom,
                          const KernelSpec& kernel, const SwarmConfig& opt,
                          const BuildOptions& options) {
    require(!runs.empty(), ErrorCode::insufficient_data, "no runs to build a dataset from");
    BuildResult out{{{}, geom.clearance(), options.load_angle}, {}};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        try {
            const auto& run = runs[i];
            const TrimWindow window{options.trim_half_width,
                                    estimate_min_reference(run.observations)};
            const auto trimmed = trim_observations(run.observations, window);
            SwarmConfig run_opt = opt;
            run_opt.seed = derive_seed(opt.seed, i);
            FilmFitOptions film = options.film;
            film.clearance = geom.clearance();
            const GPModel model = fit_film_gp(trimmed, kernel, run_opt, film);
            out.dataset.entries.push_back(
                {extract_shaft_location(model, geom, options.load_angle), 1.0, run.op});
        } catch (const Error& e) {
            out.failures.push_back({i, e.what()});
        }
    }
    require(!out.dataset.entries.empty(), ErrorCode::insufficient_data,
            "every run failed while building the dataset");
    normalize_labels(out.dataset.entries);
    return out;
}

std::string_view to_string(LocationModel m) { return m == LocationModel::A ? "A" : "B"; }

LocationModel location_model_from_string(std::string_view s) {
    if (s == "A" || s == "a") return LocationModel::A;
    if (s == "B" || s == "b") return LocationModel::B;
    fail(ErrorCode::invalid_argument, "unknown location model '" + std::string(s) + "'");
}

GPModel fit_location_gp(const LocalisationDataset& data, LocationModel variant,
                        const SwarmConfig& opt, std::vector<double>* trace) {
    data.validate();
    require(data.size() >= 2, ErrorCode::insufficient_data,
            "location GP needs at least 2 entries");
    const double c = data.clearance;
    KernelParams p;
    p.outer_scale = 1.0;
    p.radial_weight = 1.0;
    p.angular_weight = std::exp(1.0);
    p.decay_scale = 0.5 * c;
    p.length_scale = 0.5 * c;
    const bool a = variant == LocationModel::A;
    const KernelSpec init(a ? KernelVariant::anova2d_pol : KernelVariant::anova2d_matern, p);

    HyperoptProblem problem{.initial = init,
                            .bounds = {{Hyper::outer_scale, -6.0, 4.0},
                             {Hyper::radial_weight, -6.0, 6.0},
                             {Hyper::angular_weight, 0.0, 6.0},
                             {a ? Hyper::decay_scale : Hyper::length_scale, std::log(0.02 * c),
                              std::log(5.0 * c)}}};
    problem.initial_noise_variance = 1e-3;
    // Labels are exact but the locations carry film-fit error; below about 1% of
    // the largest label the model starts chasing that jitter.
    problem.log_noise_lower = std::log(1e-4);
    problem.log_noise_upper = 0.0;

    const Eigen::MatrixXd x = data.inputs();
    const Eigen::VectorXd y = data.labels();
    // scale only: a zero prior mean keeps far-field predictions at zero label
    const TargetTransform tf{0.0, y.cwiseAbs().maxCoeff()};
    const HyperoptResult hr = optimize_hyperparameters(problem, x, y, tf, opt);
    if (trace) *trace = hr.trace;
    return GPModel(hr.kernel, TrainingSet(x, y, hr.noise_variance), tf);
}

void GridSpec::validate() const {
    require(n_rho >= 2 && n_theta >= 2, ErrorCode::invalid_argument,
            "grid needs at least 2 nodes per axis");
    require(clearance > 0.0 && std::isfinite(clearance), ErrorCode::invalid_argument,
            "grid clearance must be positive");
}

double GridSpec::rho(int i) const { return clearance * i / (n_rho - 1); }

double GridSpec::theta(int j) const {
    return full_circle ? two_pi * j / n_theta : 0.5 * pi * j / (n_theta - 1);
}

std::pair<int, int> GridSpec::nearest_node(double r, double t) const {
    const int i = std::clamp(static_cast<int>(std::lround(r / clearance * (n_rho - 1))), 0,
                             n_rho - 1);
    const double w = wrap_angle(t);
    int j = 0;
    if (full_circle) {
        j = static_cast<int>(std::lround(w / two_pi * n_theta)) % n_theta;
    } else if (w <= 0.5 * pi) {
        j = static_cast<int>(std::lround(w / (0.5 * pi) * (n_theta - 1)));
    } else {
        j = angular_distance(w, 0.5 * pi) < angular_distance(w, 0.0) ? n_theta - 1 : 0;
    }
    return {i, j};
}

int GridSpec::cell_distance(double rho_a, double theta_a, double rho_b, double theta_b) const {
    const auto [ia, ja] = nearest_node(rho_a, theta_a);
    const auto [ib, jb] = nearest_node(rho_b, theta_b);
    int dj = std::abs(ja - jb);
    if (full_circle) dj = std::min(dj, n_theta - dj);
    return std::max(std::abs(ia - ib), dj);
}

double GridSpec::node_area(int i, int j) const {
    const double dr = clearance / (n_rho - 1);
    const double r_lo = std::max(0.0, rho(i) - 0.5 * dr);
    const double r_hi = std::min(clearance, rho(i) + 0.5 * dr);
    double dt = full_circle ? two_pi / n_theta : 0.5 * pi / (n_theta - 1);
    if (!full_circle && (j == 0 || j == n_theta - 1)) dt *= 0.5;
    return 0.5 * (r_hi * r_hi - r_lo * r_lo) * dt;
}

LikelihoodMap likelihood_map(const GPModel& model, double y_new, const GridSpec& grid,
                             bool include_noise) {
    grid.validate();
    require(std::isfinite(y_new) && y_new > 0.0, ErrorCode::invalid_argument,
            "queried speed-load ratio must be positive");
    require(model.kernel().input_dim() == 2, ErrorCode::invalid_argument,
            "likelihood maps need a location model");
    Eigen::MatrixXd nodes(static_cast<Eigen::Index>(grid.node_count()), 2);
    for (int i = 0; i < grid.n_rho; ++i) {
        for (int j = 0; j < grid.n_theta; ++j) {
            const Eigen::Index k = static_cast<Eigen::Index>(i) * grid.n_theta + j;
            nodes(k, 0) = grid.rho(i);
            nodes(k, 1) = grid.theta(j);
        }
    }
    const Prediction pr = model.predict(nodes);
    const double s2 = model.transform().scale * model.transform().scale;
    const double noise = include_noise ? model.training().noise_variance * s2 : 0.0;
    const double floor = 1e-12 * s2;

    LikelihoodMap map{grid, std::vector<double>(grid.node_count()), 0, y_new};
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double v = std::max(pr.variance(kk) + noise, floor);
        const double r = y_new - pr.mean(kk);
        map.values[k] = -0.5 * std::log(v) - r * r / (2.0 * v) - 0.5 * std::log(two_pi);
        if (map.values[k] > top) {
            top = map.values[k];
            map.argmax = k;
        }
    }
    return map;
}

double credible_area_fraction(const LikelihoodMap& map, double drop) {
    const double cut = map.values[map.argmax] - drop;
    double inside = 0.0;
    double total = 0.0;
    for (int i = 0; i < map.grid.n_rho; ++i) {
        for (int j = 0; j < map.grid.n_theta; ++j) {
            const double a = map.grid.node_area(i, j);
            total += a;
            if (map.value(i, j) >= cut) inside += a;
        }
    }
    return inside / total;
}

LocateResult locate(const GPModel& model, double y_new, const GridSpec& grid, bool include_noise,
                    double load_angle) {
    LikelihoodMap map = likelihood_map(model, y_new, grid, include_noise);
    const double rho = grid.rho(map.argmax_rho_index());
    const double eps = std::min(rho / grid.clearance, 1.0 - 1e-12);
    ShaftLocation loc(eps, grid.theta(map.argmax_theta_index()), grid.clearance, load_angle);
    const double best = map.values[map.argmax];
    const double frac = credible_area_fraction(map);
    return {loc, best, frac, std::move(map)};
}

}  // namespace filmgp
