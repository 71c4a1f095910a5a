#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace mkge {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void write_block_f32(std::ofstream& out, const std::vector<double>& data) {
    std::vector<unsigned char> buf(data.size() * 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const float f = static_cast<float>(data[i]);
        std::uint32_t bits = 0;
        std::memcpy(&bits, &f, 4);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap32(bits);
        }
        std::memcpy(buf.data() + i * 4, &bits, 4);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
}

void read_block_f32(std::ifstream& in, std::vector<double>& data, const std::string& path) {
    std::vector<unsigned char> buf(data.size() * 4);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw Error(ErrorCode::io, path + ": truncated embedding block");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, buf.data() + i * 4, 4);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap32(bits);
        }
        float f = 0.0f;
        std::memcpy(&f, &bits, 4);
        data[i] = static_cast<double>(f);
    }
}

} // namespace

void save_checkpoint(const Model& model, const std::string& prefix) {
    nlohmann::json meta;
    meta["format"] = "mkge-checkpoint";
    meta["version"] = 1;
    meta["n_e"] = model.table.n_e;
    meta["n_r"] = model.table.n_r;
    meta["dim"] = model.table.dim;
    meta["num_entities"] = model.table.num_entities;
    meta["num_relations"] = model.table.num_relations;
    meta["preset"] = model.config.preset;
    meta["mode"] = model.weights.mode == WeightMode::learnable ? "learnable" : "fixed";
    meta["omega"] = model.weights.omega;
    meta["restriction"] = restriction_name(model.weights.restriction);
    if (model.weights.mode == WeightMode::learnable) {
        meta["raw_params"] = model.weights.raw_params;
        meta["dirichlet_enabled"] = model.config.dirichlet.enabled;
        meta["dirichlet_alpha"] = model.config.dirichlet.alpha;
        meta["dirichlet_lambda"] = model.config.dirichlet.lambda_dir;
        meta["l1_lambda"] = model.config.l1_lambda;
    }
    meta["seed"] = model.config.seed;
    meta["epoch"] = model.epoch;

    std::ofstream json_out(prefix + ".json");
    if (!json_out) throw Error(ErrorCode::io, "cannot write " + prefix + ".json");
    json_out << meta.dump(2) << '\n';

    std::ofstream bin_out(prefix + ".bin", std::ios::binary);
    if (!bin_out) throw Error(ErrorCode::io, "cannot write " + prefix + ".bin");
    write_block_f32(bin_out, model.table.entity_data);
    write_block_f32(bin_out, model.table.relation_data);
    if (!bin_out) throw Error(ErrorCode::io, "write failed for " + prefix + ".bin");
}

Model load_checkpoint(const std::string& prefix) {
    std::ifstream json_in(prefix + ".json");
    if (!json_in) throw Error(ErrorCode::io, "cannot open " + prefix + ".json");
    nlohmann::json meta;
    try {
        json_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, prefix + ".json: " + e.what());
    }
    if (meta.value("format", "") != "mkge-checkpoint") {
        throw Error(ErrorCode::parse, prefix + ".json: not a checkpoint metadata file");
    }

    Model model;
    model.table.n_e = meta.at("n_e").get<std::size_t>();
    model.table.n_r = meta.at("n_r").get<std::size_t>();
    model.table.dim = meta.at("dim").get<std::size_t>();
    model.table.num_entities = meta.at("num_entities").get<std::size_t>();
    model.table.num_relations = meta.at("num_relations").get<std::size_t>();

    model.config.preset = meta.at("preset").get<std::string>();
    model.config.n_e = model.table.n_e;
    model.config.n_r = model.table.n_r;
    model.config.dim = model.table.dim;
    model.config.seed = meta.value("seed", std::uint64_t{0});
    model.epoch = meta.value("epoch", std::uint64_t{0});

    model.weights.n_e = model.table.n_e;
    model.weights.n_r = model.table.n_r;
    model.weights.omega = meta.at("omega").get<std::vector<double>>();
    if (model.weights.omega.size() != model.weights.size()) {
        throw Error(ErrorCode::parse, prefix + ".json: omega length does not match n_e/n_r");
    }
    model.weights.restriction =
        restriction_from_name(meta.value("restriction", std::string("none")));
    if (meta.value("mode", "fixed") == "learnable") {
        model.weights.mode = WeightMode::learnable;
        model.weights.raw_params = meta.at("raw_params").get<std::vector<double>>();
        model.config.restriction = model.weights.restriction;
        model.config.dirichlet.enabled = meta.value("dirichlet_enabled", false);
        model.config.dirichlet.alpha = meta.value("dirichlet_alpha", 1.0 / 16.0);
        model.config.dirichlet.lambda_dir = meta.value("dirichlet_lambda", 1e-2);
        model.config.l1_lambda = meta.value("l1_lambda", 0.0);
    } else {
        model.weights.mode = WeightMode::fixed;
        if (model.config.preset == "custom") model.config.custom_omega = model.weights.omega;
    }

    model.table.entity_data.resize(model.table.num_entities * model.table.n_e * model.table.dim);
    model.table.relation_data.resize(model.table.num_relations * model.table.n_r *
                                     model.table.dim);
    std::ifstream bin_in(prefix + ".bin", std::ios::binary);
    if (!bin_in) throw Error(ErrorCode::io, "cannot open " + prefix + ".bin");
    read_block_f32(bin_in, model.table.entity_data, prefix + ".bin");
    read_block_f32(bin_in, model.table.relation_data, prefix + ".bin");
    return model;
}

void write_embeddings_tsv(const Model& model, const Vocabulary& vocab,
                          const std::string& path) {
    if (vocab.num_entities() != model.table.num_entities ||
        vocab.num_relations() != model.table.num_relations) {
        throw Error(ErrorCode::config, "vocabulary does not match model item counts");
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out.precision(9);
    for (std::size_t e = 0; e < model.table.num_entities; ++e) {
        out << vocab.entity_names[e];
        for (double x : model.table.entity_concat(e)) out << '\t' << x;
        out << '\n';
    }
    for (std::size_t r = 0; r < model.table.num_relations; ++r) {
        out << vocab.relation_names[r];
        for (double x : model.table.relation_concat(r)) out << '\t' << x;
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

} // namespace mkge
