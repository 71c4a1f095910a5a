#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "checkpoint.hpp"
#include "dataset.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;

using mkge::Model;
using mkge::ModelConfig;
using mkge::Triple;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mkge_ckpt_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string prefix(const std::string& name) const { return (path / name).string(); }
};

Model sample_model(const std::string& preset, std::size_t dim, std::uint64_t seed) {
    ModelConfig cfg;
    cfg.preset = preset;
    cfg.dim = dim;
    cfg.seed = seed;
    return mkge::make_model(cfg, 5, 3);
}

} // namespace

TEST_CASE("checkpoints round-trip metadata and float32-narrowed embeddings") {
    TempDir dir;
    Model model = sample_model("complex", 4, 31);
    model.epoch = 17;
    mkge::save_checkpoint(model, dir.prefix("ck"));

    const Model loaded = mkge::load_checkpoint(dir.prefix("ck"));
    CHECK(loaded.config.preset == "complex");
    CHECK(loaded.table.n_e == 2);
    CHECK(loaded.table.n_r == 2);
    CHECK(loaded.table.dim == 4);
    CHECK(loaded.table.num_entities == 5);
    CHECK(loaded.table.num_relations == 3);
    CHECK(loaded.epoch == 17);
    CHECK(loaded.config.seed == 31);
    CHECK(loaded.weights.omega == model.weights.omega);

    REQUIRE(loaded.table.entity_data.size() == model.table.entity_data.size());
    for (std::size_t i = 0; i < model.table.entity_data.size(); ++i) {
        CHECK(loaded.table.entity_data[i] ==
              static_cast<double>(static_cast<float>(model.table.entity_data[i])));
    }
    REQUIRE(loaded.table.relation_data.size() == model.table.relation_data.size());
    for (std::size_t i = 0; i < model.table.relation_data.size(); ++i) {
        CHECK(loaded.table.relation_data[i] ==
              static_cast<double>(static_cast<float>(model.table.relation_data[i])));
    }
}

TEST_CASE("a reloaded model reproduces scores to float32 accuracy") {
    TempDir dir;
    for (const char* preset : {"distmult", "quaternion", "cph"}) {
        const Model model = sample_model(preset, 6, 32);
        mkge::save_checkpoint(model, dir.prefix(preset));
        const Model loaded = mkge::load_checkpoint(dir.prefix(preset));
        for (std::uint32_t h = 0; h < 5; ++h) {
            for (std::uint32_t r = 0; r < 3; ++r) {
                const Triple t{h, (h + 1) % 5, r};
                const double a = mkge::score_triple(model.table, model.weights, t);
                const double b = mkge::score_triple(loaded.table, loaded.weights, t);
                CHECK(testutil::rel_err(a, b) <= 1e-5);
            }
        }
    }
}

TEST_CASE("custom omega round-trips through a checkpoint") {
    TempDir dir;
    ModelConfig cfg;
    cfg.preset = "custom";
    cfg.n_e = 2;
    cfg.n_r = 1;
    cfg.dim = 3;
    cfg.custom_omega = {0.5, -1.25, 0.0, 2.0};
    const Model model = mkge::make_model(cfg, 4, 2);
    mkge::save_checkpoint(model, dir.prefix("cu"));
    const Model loaded = mkge::load_checkpoint(dir.prefix("cu"));
    CHECK(loaded.config.preset == "custom");
    CHECK(loaded.weights.omega == cfg.custom_omega);
    CHECK(loaded.config.custom_omega == cfg.custom_omega);
    CHECK(loaded.table.n_e == 2);
    CHECK(loaded.table.n_r == 1);
}

TEST_CASE("learnable checkpoints restore raw parameters and regularizer config") {
    TempDir dir;
    ModelConfig cfg;
    cfg.preset = "learnable";
    cfg.n_e = 2;
    cfg.n_r = 2;
    cfg.dim = 3;
    cfg.restriction = mkge::RestrictionKind::softmax;
    cfg.dirichlet.enabled = true;
    cfg.dirichlet.alpha = 0.25;
    cfg.dirichlet.lambda_dir = 5e-3;
    cfg.l1_lambda = 1e-4;
    cfg.seed = 33;
    Model model = mkge::make_model(cfg, 5, 3);
    model.weights.raw_params[2] = 1.75; // make the state visibly non-default
    model.weights.refresh();
    mkge::save_checkpoint(model, dir.prefix("lr"));

    const Model loaded = mkge::load_checkpoint(dir.prefix("lr"));
    CHECK(loaded.weights.mode == mkge::WeightMode::learnable);
    CHECK(loaded.weights.restriction == mkge::RestrictionKind::softmax);
    CHECK(loaded.weights.raw_params == model.weights.raw_params);
    CHECK(loaded.weights.omega ==
          mkge::restrict_weights(model.weights.raw_params, mkge::RestrictionKind::softmax));
    CHECK(loaded.config.dirichlet.enabled);
    CHECK(loaded.config.dirichlet.alpha == 0.25);
    CHECK(loaded.config.dirichlet.lambda_dir == 5e-3);
    CHECK(loaded.config.l1_lambda == 1e-4);
}

TEST_CASE("embedding export lists every item with the right arity") {
    TempDir dir;
    const Model model = sample_model("complex", 2, 34);
    mkge::Vocabulary vocab;
    for (const char* e : {"aa", "bb", "cc", "dd", "ee"}) vocab.intern_entity(e);
    for (const char* r : {"r1", "r2", "r3"}) vocab.intern_relation(r);

    const std::string path = dir.prefix("emb.tsv");
    mkge::write_embeddings_tsv(model, vocab, path);

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string name;
        fields >> name;
        std::size_t values = 0;
        double v;
        while (fields >> v) ++values;
        CHECK(values == 4); // n * dim = 2 * 2 for both entities and relations here
        if (lines == 0) CHECK(name == "aa");
        if (lines == 5) CHECK(name == "r1");
        ++lines;
    }
    CHECK(lines == 8);
}

TEST_CASE("exported embeddings reproduce scores when read back") {
    TempDir dir;
    const Model model = sample_model("complex", 3, 35);
    mkge::Vocabulary vocab;
    for (int i = 0; i < 5; ++i) vocab.intern_entity("e" + std::to_string(i));
    for (int i = 0; i < 3; ++i) vocab.intern_relation("r" + std::to_string(i));
    const std::string path = dir.prefix("emb.tsv");
    mkge::write_embeddings_tsv(model, vocab, path);

    Model copy = sample_model("complex", 3, 99); // different init, then overwritten
    std::ifstream in(path);
    std::string line;
    std::size_t row = 0;
    const std::size_t width = copy.table.n_e * copy.table.dim;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string name;
        fields >> name;
        std::vector<double> values;
        double v;
        while (fields >> v) values.push_back(v);
        if (row < 5) {
            std::copy(values.begin(), values.end(),
                      copy.table.entity_data.begin() + row * width);
        } else {
            std::copy(values.begin(), values.end(),
                      copy.table.relation_data.begin() + (row - 5) * width);
        }
        ++row;
    }
    for (std::uint32_t h = 0; h < 5; ++h) {
        const Triple t{h, (h + 2) % 5, h % 3};
        CHECK(testutil::rel_err(mkge::score_triple(model.table, model.weights, t),
                                mkge::score_triple(copy.table, copy.weights, t)) <= 1e-5);
    }
}

TEST_CASE("export refuses a vocabulary of the wrong size") {
    TempDir dir;
    const Model model = sample_model("complex", 2, 36);
    mkge::Vocabulary vocab;
    vocab.intern_entity("only_one");
    vocab.intern_relation("r");
    CHECK_THROWS_AS(mkge::write_embeddings_tsv(model, vocab, dir.prefix("bad.tsv")),
                    mkge::Error);
}

TEST_CASE("loading a missing checkpoint reports an io error") {
    TempDir dir;
    try {
        mkge::load_checkpoint(dir.prefix("absent"));
        FAIL("expected io error");
    } catch (const mkge::Error& e) {
        CHECK(e.code() == mkge::ErrorCode::io);
    }
}

TEST_CASE("loading rejects malformed metadata") {
    TempDir dir;
    {
        std::ofstream json(dir.prefix("bad") + ".json");
        json << "{ not json";
        std::ofstream bin(dir.prefix("bad") + ".bin");
    }
    CHECK_THROWS_AS(mkge::load_checkpoint(dir.prefix("bad")), mkge::Error);

    {
        std::ofstream json(dir.prefix("marker") + ".json");
        json << R"({"format":"something-else","version":1})";
        std::ofstream bin(dir.prefix("marker") + ".bin");
    }
    CHECK_THROWS_AS(mkge::load_checkpoint(dir.prefix("marker")), mkge::Error);
}

TEST_CASE("loading rejects a truncated embedding block") {
    TempDir dir;
    const Model model = sample_model("distmult", 4, 37);
    mkge::save_checkpoint(model, dir.prefix("tr"));

    const std::string bin_path = dir.prefix("tr") + ".bin";
    const auto full_size = fs::file_size(bin_path);
    fs::resize_file(bin_path, full_size / 2);
    try {
        mkge::load_checkpoint(dir.prefix("tr"));
        FAIL("expected io error");
    } catch (const mkge::Error& e) {
        CHECK(e.code() == mkge::ErrorCode::io);
    }
}
