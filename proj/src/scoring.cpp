#include "scoring.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mkge {

namespace {

struct Term {
    std::size_t i, j, k;
    double weight;
};

WeightVector from_terms(std::size_t n_e, std::size_t n_r, std::initializer_list<Term> terms) {
    WeightVector w;
    w.n_e = n_e;
    w.n_r = n_r;
    w.mode = WeightMode::fixed;
    w.omega.assign(n_e * n_e * n_r, 0.0);
    for (const Term& t : terms) {
        w.omega[w.index(t.i - 1, t.j - 1, t.k - 1)] = t.weight;
    }
    return w;
}

} // namespace

const std::vector<std::string>& fixed_preset_names() {
    static const std::vector<std::string> names = {
        "distmult", "complex", "complex_equiv_1", "complex_equiv_2", "complex_equiv_3",
        "cp", "cph", "cph_equiv", "quaternion", "uniform",
    };
    return names;
}

WeightVector preset_weight_vector(const std::string& name) {
    if (name == "distmult") {
        return from_terms(2, 2, {{1, 1, 1, 1.0}});
    }
    if (name == "complex") {
        return from_terms(2, 2, {{1, 1, 1, 1.0}, {1, 2, 2, 1.0}, {2, 1, 2, -1.0}, {2, 2, 1, 1.0}});
    }
    if (name == "complex_equiv_1") {
        return from_terms(2, 2, {{1, 1, 1, 1.0}, {1, 2, 2, -1.0}, {2, 1, 2, 1.0}, {2, 2, 1, 1.0}});
    }
    if (name == "complex_equiv_2") {
        return from_terms(2, 2, {{1, 1, 2, 1.0}, {1, 2, 1, -1.0}, {2, 1, 1, 1.0}, {2, 2, 2, 1.0}});
    }
    if (name == "complex_equiv_3") {
        return from_terms(2, 2, {{1, 1, 2, 1.0}, {1, 2, 1, 1.0}, {2, 1, 1, -1.0}, {2, 2, 2, 1.0}});
    }
    if (name == "cp") {
        return from_terms(2, 2, {{1, 2, 1, 1.0}});
    }
    if (name == "cph") {
        return from_terms(2, 2, {{1, 2, 1, 1.0}, {2, 1, 2, 1.0}});
    }
    if (name == "cph_equiv") {
        return from_terms(2, 2, {{1, 2, 2, 1.0}, {2, 1, 1, 1.0}});
    }
    if (name == "quaternion") {
        // Signed units of the quaternion product Re(h * conj(t) * r) mapped
        // onto four embeddings per item.
        return from_terms(4, 4,
                          {{1, 1, 1, 1.0},  {2, 2, 1, 1.0},  {3, 3, 1, 1.0},  {4, 4, 1, 1.0},
                           {1, 2, 2, 1.0},  {2, 1, 2, -1.0}, {3, 4, 2, 1.0},  {4, 3, 2, -1.0},
                           {1, 3, 3, 1.0},  {2, 4, 3, -1.0}, {3, 1, 3, -1.0}, {4, 2, 3, 1.0},
                           {1, 4, 4, 1.0},  {2, 3, 4, 1.0},  {3, 2, 4, -1.0}, {4, 1, 4, -1.0}});
    }
    if (name == "uniform") {
        WeightVector w;
        w.n_e = 2;
        w.n_r = 2;
        w.mode = WeightMode::fixed;
        w.omega.assign(8, 1.0);
        return w;
    }
    std::ostringstream msg;
    msg << "unknown preset '" << name << "' (valid:";
    for (const std::string& n : fixed_preset_names()) msg << ' ' << n;
    msg << " custom learnable)";
    throw Error(ErrorCode::config, msg.str());
}

WeightVector make_weight_vector(const ModelConfig& config) {
    if (config.preset == "custom") {
        if (config.n_e == 0 || config.n_r == 0) {
            throw Error(ErrorCode::config, "custom preset requires explicit n_e and n_r");
        }
        WeightVector w;
        w.n_e = config.n_e;
        w.n_r = config.n_r;
        w.mode = WeightMode::fixed;
        if (config.custom_omega.size() != w.size()) {
            std::ostringstream msg;
            msg << "custom omega has " << config.custom_omega.size() << " entries, expected "
                << w.size() << " (n_e*n_e*n_r)";
            throw Error(ErrorCode::config, msg.str());
        }
        w.omega = config.custom_omega;
        return w;
    }
    if (config.preset == "learnable") {
        const std::size_t n_e = config.n_e == 0 ? 2 : config.n_e;
        const std::size_t n_r = config.n_r == 0 ? 2 : config.n_r;
        WeightVector w;
        w.n_e = n_e;
        w.n_r = n_r;
        w.mode = WeightMode::learnable;
        w.restriction = config.restriction;
        std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> noise(0.0, 0.1);
        w.raw_params.resize(w.size());
        for (double& p : w.raw_params) p = noise(rng);
        w.refresh();
        return w;
    }
    if (config.preset == "uniform" && config.n_e != 0 && config.n_r != 0) {
        // Uniform weights exist for every shape.
        WeightVector w;
        w.n_e = config.n_e;
        w.n_r = config.n_r;
        w.mode = WeightMode::fixed;
        w.omega.assign(w.size(), 1.0);
        return w;
    }
    return preset_weight_vector(config.preset);
}

MultiEmbeddingTable init_embeddings(std::size_t num_entities, std::size_t num_relations,
                                    std::size_t n_e, std::size_t n_r, std::size_t dim,
                                    std::uint64_t seed) {
    if (num_entities == 0 || num_relations == 0 || n_e == 0 || n_r == 0 || dim == 0) {
        throw Error(ErrorCode::config, "init_embeddings: all counts and dim must be positive");
    }
    MultiEmbeddingTable table;
    table.num_entities = num_entities;
    table.num_relations = num_relations;
    table.n_e = n_e;
    table.n_r = n_r;
    table.dim = dim;
    table.entity_data.resize(num_entities * n_e * dim);
    table.relation_data.resize(num_relations * n_r * dim);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
    for (double& x : table.entity_data) x = gauss(rng);
    for (double& x : table.relation_data) x = gauss(rng);

    for (std::size_t e = 0; e < num_entities; ++e) {
        for (std::size_t i = 0; i < n_e; ++i) {
            auto vec = table.entity_vec(e, i);
            double norm_sq = 0.0;
            for (double x : vec) norm_sq += x * x;
            if (norm_sq > 0.0) {
                const double inv = 1.0 / std::sqrt(norm_sq);
                for (double& x : vec) x *= inv;
            } else {
                vec[0] = 1.0;
            }
        }
    }
    return table;
}

namespace {

// Preset-implied embedding counts; 0 means any shape is acceptable.
void preset_shape(const std::string& preset, std::size_t& n_e, std::size_t& n_r) {
    if (preset == "quaternion") {
        n_e = n_r = 4;
    } else if (preset == "custom" || preset == "learnable" || preset == "uniform") {
        n_e = n_r = 0;
    } else {
        n_e = n_r = 2;
    }
}

} // namespace

Model make_model(const ModelConfig& config, std::size_t num_entities,
                 std::size_t num_relations) {
    if (config.dim == 0) {
        throw Error(ErrorCode::config, "embedding dimension must be positive");
    }
    std::size_t implied_ne = 0, implied_nr = 0;
    preset_shape(config.preset, implied_ne, implied_nr);

    ModelConfig cfg = config;
    if (cfg.n_e == 0) cfg.n_e = implied_ne == 0 ? 2 : implied_ne;
    if (cfg.n_r == 0) cfg.n_r = implied_nr == 0 ? 2 : implied_nr;
    if (implied_ne != 0 && (cfg.n_e != implied_ne || cfg.n_r != implied_nr)) {
        std::ostringstream msg;
        msg << "preset '" << cfg.preset << "' implies n_e = n_r = " << implied_ne
            << ", configured " << cfg.n_e << "/" << cfg.n_r;
        throw Error(ErrorCode::config, msg.str());
    }

    Model model;
    model.config = cfg;
    model.weights = make_weight_vector(cfg);
    model.table = init_embeddings(num_entities, num_relations, model.weights.n_e,
                                  model.weights.n_r, cfg.dim, cfg.seed);
    return model;
}

double score_triple(const MultiEmbeddingTable& table, const WeightVector& w, const Triple& t) {
    if (t.head >= table.num_entities || t.tail >= table.num_entities ||
        t.relation >= table.num_relations) {
        throw Error(ErrorCode::runtime, "score_triple: triple index out of range");
    }
    const std::size_t dim = table.dim;
    double score = 0.0;
    for (std::size_t i = 0; i < w.n_e; ++i) {
        for (std::size_t j = 0; j < w.n_e; ++j) {
            for (std::size_t k = 0; k < w.n_r; ++k) {
                const double weight = w.at(i, j, k);
                if (weight == 0.0) continue;
                const double* h = table.entity_data.data() + (t.head * w.n_e + i) * dim;
                const double* tt = table.entity_data.data() + (t.tail * w.n_e + j) * dim;
                const double* r = table.relation_data.data() + (t.relation * w.n_r + k) * dim;
                double dot = 0.0;
                for (std::size_t d = 0; d < dim; ++d) dot += h[d] * tt[d] * r[d];
                score += weight * dot;
            }
        }
    }
    return score;
}

void score_against_all(const MultiEmbeddingTable& table, const WeightVector& w,
                       const Triple& fixed, CorruptSide side, std::span<double> out) {
    if (out.size() != table.num_entities) {
        throw Error(ErrorCode::runtime, "score_against_all: output span size mismatch");
    }
    if (fixed.head >= table.num_entities || fixed.tail >= table.num_entities ||
        fixed.relation >= table.num_relations) {
        throw Error(ErrorCode::runtime, "score_against_all: triple index out of range");
    }
    const std::size_t dim = table.dim;
    const std::size_t n_e = w.n_e;

    // Fold the fixed side and relation into one coefficient vector per
    // candidate slot; every candidate score is then a single dot product
    // with its contiguous embedding block.
    std::vector<double> coeff(n_e * dim, 0.0);
    for (std::size_t i = 0; i < n_e; ++i) {
        for (std::size_t j = 0; j < n_e; ++j) {
            for (std::size_t k = 0; k < w.n_r; ++k) {
                const double weight = w.at(i, j, k);
                if (weight == 0.0) continue;
                const double* r = table.relation_data.data() + (fixed.relation * w.n_r + k) * dim;
                if (side == CorruptSide::head) {
                    const double* tt = table.entity_data.data() + (fixed.tail * n_e + j) * dim;
                    double* c = coeff.data() + i * dim;
                    for (std::size_t d = 0; d < dim; ++d) c[d] += weight * tt[d] * r[d];
                } else {
                    const double* h = table.entity_data.data() + (fixed.head * n_e + i) * dim;
                    double* c = coeff.data() + j * dim;
                    for (std::size_t d = 0; d < dim; ++d) c[d] += weight * h[d] * r[d];
                }
            }
        }
    }

    const std::size_t block = n_e * dim;
    for (std::size_t e = 0; e < table.num_entities; ++e) {
        const double* emb = table.entity_data.data() + e * block;
        double s = 0.0;
        for (std::size_t d = 0; d < block; ++d) s += coeff[d] * emb[d];
        out[e] = s;
    }
}

std::vector<double> score_against_all(const MultiEmbeddingTable& table, const WeightVector& w,
                                      const Triple& fixed, CorruptSide side) {
    std::vector<double> out(table.num_entities);
    score_against_all(table, w, fixed, side, out);
    return out;
}

} // namespace mkge
