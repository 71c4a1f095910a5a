#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "weights.hpp"

namespace mkge {

// Per-item embedding storage, row-major [item][embedding][dimension].
// Arithmetic is 64-bit throughout; checkpoints narrow to 32-bit.
struct MultiEmbeddingTable {
    std::size_t num_entities = 0;
    std::size_t num_relations = 0;
    std::size_t n_e = 0;
    std::size_t n_r = 0;
    std::size_t dim = 0;
    std::vector<double> entity_data;
    std::vector<double> relation_data;

    std::span<double> entity_vec(std::size_t e, std::size_t i) {
        return {entity_data.data() + (e * n_e + i) * dim, dim};
    }
    std::span<const double> entity_vec(std::size_t e, std::size_t i) const {
        return {entity_data.data() + (e * n_e + i) * dim, dim};
    }
    std::span<double> relation_vec(std::size_t r, std::size_t k) {
        return {relation_data.data() + (r * n_r + k) * dim, dim};
    }
    std::span<const double> relation_vec(std::size_t r, std::size_t k) const {
        return {relation_data.data() + (r * n_r + k) * dim, dim};
    }

    // Contiguous concatenation e(1) || e(2) || ... of one item's vectors.
    std::span<double> entity_concat(std::size_t e) {
        return {entity_data.data() + e * n_e * dim, n_e * dim};
    }
    std::span<const double> entity_concat(std::size_t e) const {
        return {entity_data.data() + e * n_e * dim, n_e * dim};
    }
    std::span<double> relation_concat(std::size_t r) {
        return {relation_data.data() + r * n_r * dim, n_r * dim};
    }
    std::span<const double> relation_concat(std::size_t r) const {
        return {relation_data.data() + r * n_r * dim, n_r * dim};
    }
};

enum class WeightMode { fixed, learnable };

// Interaction weights over all (i, j, k) in [n_e] x [n_e] x [n_r], flattened
// in lexicographic (i, j, k) order so published 8-entry vectors for the
// two-embedding family paste in directly.
struct WeightVector {
    std::size_t n_e = 0;
    std::size_t n_r = 0;
    WeightMode mode = WeightMode::fixed;
    RestrictionKind restriction = RestrictionKind::none;
    std::vector<double> omega;
    std::vector<double> raw_params; // learnable mode only

    std::size_t size() const { return n_e * n_e * n_r; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * n_e + j) * n_r + k;
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return omega[index(i, j, k)];
    }

    /// Learnable mode: recompute omega from raw_params.
    void refresh() {
        if (mode == WeightMode::learnable) {
            omega = restrict_weights(raw_params, restriction);
        }
    }
};

struct ModelConfig {
    std::string preset = "distmult";
    std::size_t n_e = 0; // 0 takes the preset default
    std::size_t n_r = 0;
    std::size_t dim = 0;
    std::vector<double> custom_omega;                       // preset "custom"
    RestrictionKind restriction = RestrictionKind::none;    // preset "learnable"
    DirichletRegConfig dirichlet;                           // preset "learnable"
    double l1_lambda = 0.0;                                 // preset "learnable"
    std::uint64_t seed = 0;
};

struct Model {
    ModelConfig config;
    MultiEmbeddingTable table;
    WeightVector weights;
    std::uint64_t epoch = 0;
};

/// Names accepted by preset_weight_vector.
const std::vector<std::string>& fixed_preset_names();

/// Fixed interaction weights for a named preset: the two-embedding family
/// (distmult, complex, complex_equiv_1..3, cp, cph, cph_equiv, uniform) as
/// 8-entry vectors, quaternion as the 64-entry vector with 16 signed units.
WeightVector preset_weight_vector(const std::string& name);

/// Weight vector for a full config, covering custom and learnable presets.
/// Learnable raw parameters start as Gaussian noise (sigma 0.1) from seed.
WeightVector make_weight_vector(const ModelConfig& config);

/// Entries drawn i.i.d. from N(0, 1/dim), entity vectors then projected to
/// unit L2 norm. Deterministic given seed.
MultiEmbeddingTable init_embeddings(std::size_t num_entities, std::size_t num_relations,
                                    std::size_t n_e, std::size_t n_r, std::size_t dim,
                                    std::uint64_t seed);

/// Validates the config against preset-implied shapes and builds the model.
Model make_model(const ModelConfig& config, std::size_t num_entities,
                 std::size_t num_relations);

/// Weighted sum of trilinear products over all interaction terms; zero
/// weights are skipped.
double score_triple(const MultiEmbeddingTable& table, const WeightVector& w, const Triple& t);

enum class CorruptSide { head, tail };

/// Scores the triple against every entity substituted on one side. Writes
/// num_entities values into out. Matches per-triple scoring to floating
/// point reassociation.
void score_against_all(const MultiEmbeddingTable& table, const WeightVector& w,
                       const Triple& fixed, CorruptSide side, std::span<double> out);

std::vector<double> score_against_all(const MultiEmbeddingTable& table, const WeightVector& w,
                                      const Triple& fixed, CorruptSide side);

} // namespace mkge
