#include "filmgp/qbps.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "filmgp/error.hpp"

namespace filmgp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double evaluate(const Objective& f, const std::vector<double>& x, long& counter) {
    ++counter;
    const double v = f(x);
    return std::isfinite(v) ? v : inf;
}

void refresh_global(SwarmState& s) {
    for (std::size_t i = 0; i < s.personal_best.size(); ++i) {
        if (s.personal_best_value[i] < s.global_best_value) {
            s.global_best_value = s.personal_best_value[i];
            s.global_best = s.personal_best[i];
        }
    }
}

void refresh_mean_best(SwarmState& s) {
    const std::size_t d = s.space.dimension();
    s.mean_best.assign(d, 0.0);
    for (const auto& p : s.personal_best) {
        for (std::size_t k = 0; k < d; ++k) s.mean_best[k] += p[k];
    }
    for (auto& m : s.mean_best) m /= static_cast<double>(s.personal_best.size());
}

}  // namespace

SearchSpace::SearchSpace(std::vector<Bounds> bounds) : bounds_(std::move(bounds)) {
    require(!bounds_.empty(), ErrorCode::invalid_argument, "search space is empty");
    for (const auto& b : bounds_) {
        require(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower < b.upper,
                ErrorCode::invalid_argument, "search bounds must be finite with lower < upper");
    }
}

std::vector<double> SearchSpace::midpoint() const {
    std::vector<double> m;
    for (const auto& b : bounds_) m.push_back(0.5 * (b.lower + b.upper));
    return m;
}

double SearchSpace::reflect(std::size_t dim, double x) const {
    const auto& b = bounds_[dim];
    if (x >= b.lower && x <= b.upper) return x;
    if (!std::isfinite(x)) return 0.5 * (b.lower + b.upper);
    const double w = b.upper - b.lower;
    double t = std::fmod(x - b.lower, 2.0 * w);
    if (t < 0.0) t += 2.0 * w;
    return b.lower + (t <= w ? t : 2.0 * w - t);
}

void SwarmConfig::validate() const {
    require(particle_count >= 2, ErrorCode::invalid_argument, "swarm needs at least 2 particles");
    require(max_iterations >= 1, ErrorCode::invalid_argument, "max_iterations must be positive");
    require(beta_start >= beta_end && beta_end > 0.0, ErrorCode::invalid_argument,
            "contraction-expansion schedule needs start >= end > 0");
    require(restarts >= 0, ErrorCode::invalid_argument, "restarts must be non-negative");
    require(tolerance >= 0.0 && stall_iterations >= 1, ErrorCode::invalid_argument,
            "stall detection settings are invalid");
}

SwarmState init_swarm(const Objective& objective, const SearchSpace& space, int particle_count,
                      std::mt19937_64& rng, const std::optional<std::vector<double>>& seed_position) {
    require(particle_count >= 1, ErrorCode::invalid_argument, "swarm needs particles");
    const std::size_t d = space.dimension();
    SwarmState s{space, {}, {}, {}, {}, inf, {}, 0};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < particle_count; ++i) {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = space[k].lower + unit(rng) * (space[k].upper - space[k].lower);
        }
        if (i == 0 && seed_position) {
            require(seed_position->size() == d, ErrorCode::invalid_argument,
                    "initial guess has the wrong dimension");
            for (std::size_t k = 0; k < d; ++k) x[k] = space.reflect(k, (*seed_position)[k]);
        }
        const double v = evaluate(objective, x, s.evaluations);
        s.positions.push_back(x);
        s.personal_best.push_back(x);
        s.personal_best_value.push_back(v);
    }
    s.global_best = s.personal_best.front();
    refresh_global(s);
    refresh_mean_best(s);
    return s;
}

SwarmState qbps_step(SwarmState s, const Objective& objective, double beta,
                     std::mt19937_64& rng) {
    const std::size_t d = s.space.dimension();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
        auto& x = s.positions[i];
        for (std::size_t k = 0; k < d; ++k) {
            const double phi = unit(rng);
            const double attractor =
                s.global_best[k] + phi * (s.personal_best[i][k] - s.global_best[k]);
            const double u = 1.0 - unit(rng);  // (0, 1]
            const double spread = beta * std::abs(s.mean_best[k] - x[k]) * std::log(1.0 / u);
            const double moved = unit(rng) < 0.5 ? attractor + spread : attractor - spread;
            x[k] = s.space.reflect(k, moved);
        }
    }
    // Evaluation barrier: all positions are fixed before any best is updated.
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
        const double v = evaluate(objective, s.positions[i], s.evaluations);
        if (v < s.personal_best_value[i]) {
            s.personal_best_value[i] = v;
            s.personal_best[i] = s.positions[i];
        }
    }
    refresh_global(s);
    refresh_mean_best(s);
    return s;
}

OptimizationResult optimize(const Objective& objective, const SearchSpace& space,
                            const SwarmConfig& config,
                            const std::optional<std::vector<double>>& initial_guess) {
    config.validate();
    OptimizationResult result{{}, inf, {}, 0};
    for (int run = 0; run <= config.restarts; ++run) {
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(run)));
        SwarmState s = init_swarm(objective, space, config.particle_count, rng,
                                  run == 0 ? initial_guess : std::nullopt);
        std::vector<double> history{s.global_best_value};
        const auto record = [&](const SwarmState& st) {
            if (st.global_best_value < result.best_value) {
                result.best_value = st.global_best_value;
                result.best = st.global_best;
            }
            result.trace.push_back(result.best_value);
        };
        record(s);
        for (int it = 1; it <= config.max_iterations; ++it) {
            const double frac = config.max_iterations > 1
                                    ? static_cast<double>(it - 1) / (config.max_iterations - 1)
                                    : 0.0;
            const double beta = config.beta_start + (config.beta_end - config.beta_start) * frac;
            s = qbps_step(std::move(s), objective, beta, rng);
            record(s);
            history.push_back(s.global_best_value);
            const auto n = static_cast<int>(history.size());
            if (n > config.stall_iterations && std::isfinite(s.global_best_value)) {
                const double before = history[static_cast<std::size_t>(n - 1 - config.stall_iterations)];
                if (before - s.global_best_value <=
                    config.tolerance * (1.0 + std::abs(s.global_best_value))) {
                    break;
                }
            }
        }
        result.evaluations += s.evaluations;
    }
    if (!std::isfinite(result.best_value)) {
        fail(ErrorCode::no_feasible_point, "objective was never finite inside the search space");
    }
    return result;
}

std::string trace_csv(const std::vector<double>& trace) {
    std::string out = "iteration,best_nlml\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
        out += buf;
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
    // splitmix64 over the pair
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (key + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace filmgp
