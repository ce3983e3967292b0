#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wolfcast/random.hpp"

namespace wolfcast::gwo {

using Objective = std::function<double(std::span<const double>)>;

struct SearchSpace {
    std::vector<double> lb;
    std::vector<double> ub;

    std::size_t dim() const { return lb.size(); }
    void validate() const;
};

struct GwoConfig {
    std::size_t pack_size = 30;
    std::size_t max_iter = 50;
    double epsilon = 1e-8;  // relative-improvement convergence threshold
    std::uint64_t seed = 0;

    void validate() const;
};

/**
 * Candidate positions plus the search state the update rule needs: current
 * fitnesses, the three leaders, the best-ever archive and the draw stream.
 *
 * Draw order is pinned: init consumes pack_size*dim uniforms (wolf-major,
 * dimension-minor); each step consumes, per wolf, per leader (alpha, beta,
 * delta), per dimension, the pair (r1, r2).
 */
struct WolfPack {
    std::vector<std::vector<double>> positions;
    std::vector<double> fitnesses;
    std::size_t alpha = 0, beta = 0, delta = 0;
    std::vector<double> best_position;
    double best_fitness = 0.0;
    bool evaluated = false;
    RandomSource rng{0};
};

struct GwoResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> history;  // best-so-far fitness after each iteration
};

// Benchmark objective: sum of squared components.
double sphere(std::span<const double> x);

// Positions drawn componentwise uniform in [lb, ub]; fitnesses unset until
// the first evaluate().
WolfPack init_pack(const SearchSpace& space, const GwoConfig& config);

// Evaluates all wolves (non-finite objective values become +infinity),
// re-derives the leaders and updates the best-ever archive.
void evaluate(WolfPack& pack, const Objective& objective);

/**
 * One update: a = 2*(1 - iter/max_iter); per wolf, each leader proposes a
 * candidate X_l - A*|C*X_l - X| with A = 2a*r1 - a and C = 2*r2 sampled per
 * dimension; the new position is the mean of the three candidates clamped
 * to the box. Fitnesses, leaders and the archive are refreshed afterwards.
 * Requires the pack to have been evaluated; iter must be in [0, max_iter].
 */
void step(WolfPack& pack, const Objective& objective, std::size_t iter, const GwoConfig& config,
          const SearchSpace& space);

/**
 * Full optimization: iterates step (iter = 1..max_iter, so the exploration
 * coefficient descends linearly from near 2 to exactly 0) until max_iter or
 * until the archive's relative improvement |f_new - f_old| / max(|f_old|,
 * epsilon) falls below epsilon. History holds the archive fitness after
 * each executed iteration.
 */
GwoResult run(const Objective& objective, const SearchSpace& space, const GwoConfig& config);

}  // namespace wolfcast::gwo
