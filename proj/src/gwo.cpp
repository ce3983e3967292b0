#include "wolfcast/gwo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wolfcast::gwo {

void SearchSpace::validate() const {
    if (lb.empty() || lb.size() != ub.size()) {
        throw std::invalid_argument("SearchSpace: lb/ub must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < lb.size(); ++i) {
        if (!(lb[i] <= ub[i])) {
            throw std::invalid_argument("SearchSpace: lb > ub at dimension " + std::to_string(i));
        }
    }
}

void GwoConfig::validate() const {
    if (pack_size < 3) throw std::invalid_argument("GwoConfig: pack_size must be >= 3");
    if (max_iter < 1) throw std::invalid_argument("GwoConfig: max_iter must be >= 1");
    if (epsilon <= 0.0) throw std::invalid_argument("GwoConfig: epsilon must be positive");
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

WolfPack init_pack(const SearchSpace& space, const GwoConfig& config) {
    space.validate();
    config.validate();
    WolfPack pack;
    pack.rng = RandomSource(config.seed);
    pack.positions.assign(config.pack_size, std::vector<double>(space.dim()));
    pack.fitnesses.assign(config.pack_size, std::numeric_limits<double>::infinity());
    for (auto& pos : pack.positions) {
        for (std::size_t d = 0; d < space.dim(); ++d) {
            pos[d] = space.lb[d] + (space.ub[d] - space.lb[d]) * pack.rng.uniform01();
        }
    }
    pack.best_fitness = std::numeric_limits<double>::infinity();
    return pack;
}

namespace {

void select_leaders(WolfPack& pack) {
    // Three lowest fitnesses, ties broken by lower index.
    std::size_t a = 0, b = 1, c = 2;
    auto better = [&](std::size_t i, std::size_t j) {
        return pack.fitnesses[i] < pack.fitnesses[j] ||
               (pack.fitnesses[i] == pack.fitnesses[j] && i < j);
    };
    if (better(b, a)) std::swap(a, b);
    if (better(c, b)) {
        std::swap(b, c);
        if (better(b, a)) std::swap(a, b);
    }
    for (std::size_t i = 3; i < pack.fitnesses.size(); ++i) {
        if (better(i, a)) {
            c = b;
            b = a;
            a = i;
        } else if (better(i, b)) {
            c = b;
            b = i;
        } else if (better(i, c)) {
            c = i;
        }
    }
    pack.alpha = a;
    pack.beta = b;
    pack.delta = c;
}

}  // namespace

void evaluate(WolfPack& pack, const Objective& objective) {
    for (std::size_t i = 0; i < pack.positions.size(); ++i) {
        double f = objective(pack.positions[i]);
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        pack.fitnesses[i] = f;
    }
    select_leaders(pack);
    const std::size_t a = pack.alpha;
    if (!pack.evaluated || pack.fitnesses[a] < pack.best_fitness) {
        pack.best_fitness = pack.fitnesses[a];
        pack.best_position = pack.positions[a];
    }
    pack.evaluated = true;
}

void step(WolfPack& pack, const Objective& objective, std::size_t iter, const GwoConfig& config,
          const SearchSpace& space) {
    if (!pack.evaluated) throw std::logic_error("gwo::step: pack not evaluated yet");
    if (iter > config.max_iter) throw std::invalid_argument("gwo::step: iter beyond max_iter");

    const double a = 2.0 * (1.0 - static_cast<double>(iter) / static_cast<double>(config.max_iter));
    const std::size_t dim = space.dim();
    const std::size_t leaders[3] = {pack.alpha, pack.beta, pack.delta};

    std::vector<std::vector<double>> next(pack.positions.size(), std::vector<double>(dim));
    for (std::size_t i = 0; i < pack.positions.size(); ++i) {
        const auto& x = pack.positions[i];
        auto& nx = next[i];
        std::fill(nx.begin(), nx.end(), 0.0);
        for (std::size_t l = 0; l < 3; ++l) {
            const auto& lead = pack.positions[leaders[l]];
            for (std::size_t d = 0; d < dim; ++d) {
                const double r1 = pack.rng.uniform01();
                const double r2 = pack.rng.uniform01();
                const double coef_a = 2.0 * a * r1 - a;
                const double coef_c = 2.0 * r2;
                const double dist = std::fabs(coef_c * lead[d] - x[d]);
                nx[d] += lead[d] - coef_a * dist;
            }
        }
        for (std::size_t d = 0; d < dim; ++d) {
            nx[d] = std::clamp(nx[d] / 3.0, space.lb[d], space.ub[d]);
        }
    }
    pack.positions = std::move(next);
    evaluate(pack, objective);
}

GwoResult run(const Objective& objective, const SearchSpace& space, const GwoConfig& config) {
    WolfPack pack = init_pack(space, config);
    evaluate(pack, objective);

    GwoResult result;
    result.history.reserve(config.max_iter);
    double prev_best = pack.best_fitness;
    for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
        step(pack, objective, iter, config, space);
        result.history.push_back(pack.best_fitness);
        if (iter >= 2) {
            const double denom = std::max(std::fabs(prev_best), config.epsilon);
            if (std::fabs(pack.best_fitness - prev_best) / denom < config.epsilon) break;
        }
        prev_best = pack.best_fitness;
    }
    result.best_position = pack.best_position;
    result.best_fitness = pack.best_fitness;
    return result;
}

}  // namespace wolfcast::gwo
