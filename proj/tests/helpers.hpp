#pragma once

// Shared between the unit tests and the acceptance runner.

#include <cmath>
#include <random>
#include <vector>

#include "scoring.hpp"

namespace testutil {

inline double rel_err(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / denom;
}

inline mkge::MultiEmbeddingTable random_table(std::size_t num_entities,
                                              std::size_t num_relations, std::size_t n_e,
                                              std::size_t n_r, std::size_t dim,
                                              std::uint64_t seed) {
    mkge::MultiEmbeddingTable table;
    table.num_entities = num_entities;
    table.num_relations = num_relations;
    table.n_e = n_e;
    table.n_r = n_r;
    table.dim = dim;
    table.entity_data.resize(num_entities * n_e * dim);
    table.relation_data.resize(num_relations * n_r * dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& x : table.entity_data) x = gauss(rng);
    for (double& x : table.relation_data) x = gauss(rng);
    return table;
}

// Central finite difference of f at the parameter behind slot.
template <typename F>
double central_diff(F&& f, double& slot, double step = 1e-5) {
    const double saved = slot;
    slot = saved + step;
    const double up = f();
    slot = saved - step;
    const double down = f();
    slot = saved;
    return (up - down) / (2.0 * step);
}

} // namespace testutil
