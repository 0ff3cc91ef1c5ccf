#pragma once

// Quantum-behaved particle swarm minimiser. Derivative free; used to
// maximise GP log marginal likelihoods in log-hyperparameter space.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace filmgp {

struct Bounds {
    double lower;
    double upper;
};

class SearchSpace {
public:
    /// Throws Error(invalid_argument) for empty, non-finite or inverted bounds.
    explicit SearchSpace(std::vector<Bounds> bounds);

    std::size_t dimension() const { return bounds_.size(); }
    const Bounds& operator[](std::size_t i) const { return bounds_[i]; }
    const std::vector<Bounds>& bounds() const { return bounds_; }

    std::vector<double> midpoint() const;

    /// Folds x back into [lower, upper] by mirror reflection at the walls.
    double reflect(std::size_t dim, double x) const;

private:
    std::vector<Bounds> bounds_;
};

struct SwarmConfig {
    int particle_count = 30;
    int max_iterations = 300;
    double beta_start = 1.0;  // contraction-expansion coefficient, annealed
    double beta_end = 0.5;    // linearly to this value
    std::uint64_t seed = 0;
    int restarts = 3;         // independent runs in addition to the first
    double tolerance = 1e-8;  // stall threshold on the best value
    int stall_iterations = 50;

    void validate() const;
};

using Objective = std::function<double(std::span<const double>)>;

struct SwarmState {
    SearchSpace space;
    std::vector<std::vector<double>> positions;
    std::vector<std::vector<double>> personal_best;
    std::vector<double> personal_best_value;
    std::vector<double> global_best;
    double global_best_value;
    std::vector<double> mean_best;  // centroid of personal bests
    long evaluations = 0;
};

/// Uniform initial swarm; `seed_position`, if given, replaces particle 0.
SwarmState init_swarm(const Objective& objective, const SearchSpace& space, int particle_count,
                      std::mt19937_64& rng,
                      const std::optional<std::vector<double>>& seed_position = std::nullopt);

/// One QPSO iteration. Each coordinate moves to
///   p +/- beta |mbest - x| ln(1/u),  p = phi pbest + (1 - phi) gbest,
/// and personal/global bests change only on strict improvement.
SwarmState qbps_step(SwarmState state, const Objective& objective, double beta,
                     std::mt19937_64& rng);

struct OptimizationResult {
    std::vector<double> best;
    double best_value;
    std::vector<double> trace;  // best-so-far after each iteration, all runs chained
    long evaluations;
};

/// Minimises `objective`. Non-finite values count as +infinity; throws
/// Error(no_feasible_point) if nothing finite was ever seen.
OptimizationResult optimize(const Objective& objective, const SearchSpace& space,
                            const SwarmConfig& config,
                            const std::optional<std::vector<double>>& initial_guess = std::nullopt);

/// "iteration,best_nlml" rows.
std::string trace_csv(const std::vector<double>& trace);

/// Deterministic 64-bit mixing of a master seed with a key.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key);

}  // namespace filmgp
