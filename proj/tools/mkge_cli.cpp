// Command-line front end; talks to the library through the C API only.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mkge/mkge.h"

namespace {

struct DatasetGuard {
    mkge_dataset* handle = nullptr;
    ~DatasetGuard() { mkge_dataset_close(handle); }
};

struct ModelGuard {
    mkge_model* handle = nullptr;
    ~ModelGuard() { mkge_model_free(handle); }
};

[[noreturn]] void die() {
    std::fprintf(stderr, "error: %s\n", mkge_last_error());
    std::exit(1);
}

void check(int status) {
    if (status != MKGE_OK) die();
}

struct ModelFlags {
    std::string preset = "distmult";
    std::uint64_t n_e = 0;
    std::uint64_t n_r = 0;
    std::uint64_t dim = 0;
    std::vector<double> omega;
    std::string restriction = "none";
    bool dirichlet = false;
    double dirichlet_alpha = 1.0 / 16.0;
    double dirichlet_lambda = 1e-2;
    double l1_lambda = 0.0;
    std::uint64_t seed = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    auto* preset = cmd->add_option(
        "--preset", flags.preset,
        "Weight preset: distmult, complex, complex_equiv_1..3, cp, cph, cph_equiv, "
        "quaternion, uniform");
    cmd->add_option("--weights", flags.preset,
                    "Weight mode overriding --preset: custom (requires --omega) or learnable")
        ->check(CLI::IsMember({"custom", "learnable"}))
        ->excludes(preset);
    cmd->add_option("--dim", flags.dim, "Embedding dimension")->required();
    cmd->add_option("--ne", flags.n_e, "Entity embeddings per entity (0 = preset default)");
    cmd->add_option("--nr", flags.n_r, "Relation embeddings per relation (0 = preset default)");
    cmd->add_option("--omega", flags.omega,
                    "Interaction weights for --weights custom, comma-separated in "
                    "lexicographic (i,j,k) order")
        ->delimiter(',');
    cmd->add_option("--restriction", flags.restriction,
                    "Range restriction for learnable weights")
        ->check(CLI::IsMember({"none", "tanh", "sigmoid", "softmax"}));
    cmd->add_flag("--dirichlet", flags.dirichlet,
                  "Enable the Dirichlet sparsity regularizer on learnable weights");
    cmd->add_option("--dirichlet-alpha", flags.dirichlet_alpha, "Dirichlet sparseness alpha");
    cmd->add_option("--dirichlet-lambda", flags.dirichlet_lambda, "Dirichlet strength");
    cmd->add_option("--l1-lambda", flags.l1_lambda,
                    "Optional L1 penalty on learnable weights");
    cmd->add_option("--seed", flags.seed, "Random seed");
}

mkge_model_config to_config(const ModelFlags& flags) {
    mkge_model_config config{};
    config.preset = flags.preset.c_str();
    config.n_e = flags.n_e;
    config.n_r = flags.n_r;
    config.dim = flags.dim;
    config.omega = flags.omega.empty() ? nullptr : flags.omega.data();
    config.omega_len = flags.omega.size();
    config.restriction = flags.restriction.c_str();
    config.dirichlet_enabled = flags.dirichlet ? 1 : 0;
    config.dirichlet_alpha = flags.dirichlet_alpha;
    config.dirichlet_lambda = flags.dirichlet_lambda;
    config.l1_lambda = flags.l1_lambda;
    config.seed = flags.seed;
    return config;
}

void print_eval(const mkge_eval_result& result) {
    std::printf("mrr\t%.9g\n", result.mrr);
    std::printf("hits1\t%.9g\n", result.hits1);
    std::printf("hits3\t%.9g\n", result.hits3);
    std::printf("hits10\t%.9g\n", result.hits10);
    std::printf("num_records\t%" PRIu64 "\n", result.num_records);
}

void write_eval_files(const mkge_eval_result& result, const std::string& prefix) {
    const std::string tsv_path = prefix + ".tsv";
    std::FILE* tsv = std::fopen(tsv_path.c_str(), "w");
    if (!tsv) {
        std::fprintf(stderr, "error: cannot write %s\n", tsv_path.c_str());
        std::exit(1);
    }
    std::fprintf(tsv, "mrr\thits1\thits3\thits10\tnum_records\n");
    std::fprintf(tsv, "%.9g\t%.9g\t%.9g\t%.9g\t%" PRIu64 "\n", result.mrr, result.hits1,
                 result.hits3, result.hits10, result.num_records);
    std::fclose(tsv);

    const std::string kv_path = prefix + ".kv";
    std::FILE* kv = std::fopen(kv_path.c_str(), "w");
    if (!kv) {
        std::fprintf(stderr, "error: cannot write %s\n", kv_path.c_str());
        std::exit(1);
    }
    std::fprintf(kv, "mrr\t%.9g\n", result.mrr);
    std::fprintf(kv, "hits1\t%.9g\n", result.hits1);
    std::fprintf(kv, "hits3\t%.9g\n", result.hits3);
    std::fprintf(kv, "hits10\t%.9g\n", result.hits10);
    std::fprintf(kv, "num_records\t%" PRIu64 "\n", result.num_records);
    std::fclose(kv);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-embedding knowledge graph link prediction"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Parse triple files into a dataset bundle")->configurable();
    std::string train_path, valid_path, test_path, columns = "hrt", out_dir;
    prepare->add_option("--train", train_path, "Training triples file")->required();
    prepare->add_option("--valid", valid_path, "Validation triples file");
    prepare->add_option("--test", test_path, "Test triples file");
    prepare->add_option("--columns", columns, "Column order of the input files")
        ->check(CLI::IsMember({"hrt", "htr"}));
    prepare->add_option("--out", out_dir, "Output bundle directory")->required();

    // train
    auto* train = app.add_subcommand("train", "Train a model on a prepared dataset")->configurable();
    std::string train_data, train_out;
    ModelFlags model_flags;
    double lr = 1e-3, l2 = 1e-3;
    std::uint64_t batch_size = 4096, negatives = 1, epochs = 0, eval_every = 50,
                  patience = 100;
    std::string loss_form = "softplus";
    train->add_option("--data", train_data, "Prepared dataset directory")->required();
    train->add_option("--out", train_out, "Output directory for checkpoints and log")
        ->required();
    add_model_flags(train, model_flags);
    train->add_option("--lr", lr, "Adam learning rate");
    train->add_option("--batch-size", batch_size, "Positives per minibatch");
    train->add_option("--l2", l2, "L2 regularization strength");
    train->add_option("--negatives", negatives, "Negative samples per positive");
    train->add_option("--epochs", epochs, "Maximum training epochs")->required();
    train->add_option("--eval-every", eval_every, "Validation check interval in epochs");
    train->add_option("--patience", patience, "Early-stopping patience in epochs");
    train->add_option("--loss", loss_form, "Loss form")
        ->check(CLI::IsMember({"softplus", "cross_entropy"}));

    // eval
    auto* eval = app.add_subcommand("eval", "Filtered link-prediction metrics on a split")->configurable();
    std::string eval_data, eval_model, eval_split = "test", eval_out, dump_ranks;
    eval->add_option("--data", eval_data, "Prepared dataset directory")->required();
    eval->add_option("--model", eval_model, "Checkpoint prefix")->required();
    eval->add_option("--split", eval_split, "Split to evaluate")
        ->check(CLI::IsMember({"train", "valid", "test"}));
    eval->add_option("--out", eval_out, "Report file prefix (writes .tsv and .kv)");
    eval->add_option("--dump-ranks", dump_ranks, "Write one line per rank record");

    // score
    auto* score = app.add_subcommand("score", "Score one triple given by names")->configurable();
    std::string score_data, score_model, head, relation, tail;
    score->add_option("--data", score_data, "Prepared dataset directory")->required();
    score->add_option("--model", score_model, "Checkpoint prefix")->required();
    score->add_option("--head", head, "Head entity name")->required();
    score->add_option("--relation", relation, "Relation name")->required();
    score->add_option("--tail", tail, "Tail entity name")->required();

    // export
    auto* export_cmd = app.add_subcommand("export", "Write concatenated embedding vectors")->configurable();
    std::string export_data, export_model, export_out;
    export_cmd->add_option("--data", export_data, "Prepared dataset directory")->required();
    export_cmd->add_option("--model", export_model, "Checkpoint prefix")->required();
    export_cmd->add_option("--out", export_out, "Output TSV path")->required();

    // inspect-weights
    auto* inspect = app.add_subcommand("inspect-weights", "Print the interaction weights")->configurable();
    std::string inspect_model;
    inspect->add_option("--model", inspect_model, "Checkpoint prefix")->required();

    CLI11_PARSE(app, argc, argv);

    if (*prepare) {
        check(mkge_dataset_prepare(train_path.c_str(), valid_path.c_str(), test_path.c_str(),
                                   columns.c_str(), out_dir.c_str()));
        DatasetGuard dataset;
        check(mkge_dataset_open(out_dir.c_str(), &dataset.handle));
        uint64_t entities = 0, relations = 0, n_train = 0, n_valid = 0, n_test = 0;
        check(mkge_dataset_stats(dataset.handle, &entities, &relations, &n_train, &n_valid,
                                 &n_test));
        std::printf("entities\t%" PRIu64 "\n", entities);
        std::printf("relations\t%" PRIu64 "\n", relations);
        std::printf("train\t%" PRIu64 "\n", n_train);
        std::printf("valid\t%" PRIu64 "\n", n_valid);
        std::printf("test\t%" PRIu64 "\n", n_test);
        uint64_t warnings = 0;
        check(mkge_dataset_warning_count(dataset.handle, &warnings));
        for (uint64_t i = 0; i < warnings; ++i) {
            const char* message = nullptr;
            check(mkge_dataset_warning(dataset.handle, i, &message));
            std::fprintf(stderr, "warning: %s\n", message);
        }
        return 0;
    }

    if (*train) {
        DatasetGuard dataset;
        check(mkge_dataset_open(train_data.c_str(), &dataset.handle));
        const mkge_model_config model_config = to_config(model_flags);
        ModelGuard model;
        check(mkge_model_create(dataset.handle, &model_config, &model.handle));

        mkge_train_config config;
        mkge_train_config_default(&config);
        config.learning_rate = lr;
        config.batch_size = batch_size;
        config.l2_lambda = l2;
        config.negatives_per_positive = negatives;
        config.max_epochs = epochs;
        config.eval_every = eval_every;
        config.patience_epochs = patience;
        config.loss_form = loss_form.c_str();
        config.seed = model_flags.seed;

        std::error_code ec;
        std::filesystem::create_directories(train_out, ec);
        const std::string log_path = train_out + "/train_log.tsv";
        const std::string final_prefix = train_out + "/final";
        const std::string best_prefix = train_out + "/best";
        double best_mrr = 0.0;
        uint64_t best_epoch = 0;
        check(mkge_train(model.handle, dataset.handle, &config, log_path.c_str(),
                         final_prefix.c_str(), &best_mrr, &best_epoch));
        check(mkge_model_save(model.handle, best_prefix.c_str()));
        if (std::isnan(best_mrr)) {
            std::printf("best_valid_mrr\tnone (no validation split)\n");
        } else {
            std::printf("best_valid_mrr\t%.9g\n", best_mrr);
            std::printf("best_epoch\t%" PRIu64 "\n", best_epoch);
        }
        return 0;
    }

    if (*eval) {
        DatasetGuard dataset;
        check(mkge_dataset_open(eval_data.c_str(), &dataset.handle));
        ModelGuard model;
        check(mkge_model_open(eval_model.c_str(), &model.handle));
        mkge_eval_result result{};
        check(mkge_evaluate(model.handle, dataset.handle, eval_split.c_str(),
                            dump_ranks.empty() ? nullptr : dump_ranks.c_str(), &result));
        print_eval(result);
        if (!eval_out.empty()) write_eval_files(result, eval_out);
        return 0;
    }

    if (*score) {
        DatasetGuard dataset;
        check(mkge_dataset_open(score_data.c_str(), &dataset.handle));
        ModelGuard model;
        check(mkge_model_open(score_model.c_str(), &model.handle));
        double value = 0.0;
        check(mkge_score(model.handle, dataset.handle, head.c_str(), relation.c_str(),
                         tail.c_str(), &value));
        std::printf("%.17g\n", value);
        return 0;
    }

    if (*export_cmd) {
        DatasetGuard dataset;
        check(mkge_dataset_open(export_data.c_str(), &dataset.handle));
        ModelGuard model;
        check(mkge_model_open(export_model.c_str(), &model.handle));
        check(mkge_export(model.handle, dataset.handle, export_out.c_str()));
        return 0;
    }

    if (*inspect) {
        ModelGuard model;
        check(mkge_model_open(inspect_model.c_str(), &model.handle));
        uint64_t n_e = 0, n_r = 0, dim = 0, epoch = 0;
        check(mkge_model_info(model.handle, &n_e, &n_r, &dim, nullptr, nullptr, &epoch));
        const char* preset = nullptr;
        const char* restriction = nullptr;
        check(mkge_model_preset(model.handle, &preset));
        check(mkge_model_restriction(model.handle, &restriction));
        uint64_t len = 0;
        check(mkge_model_omega_len(model.handle, &len));
        std::vector<double> omega(len);
        check(mkge_model_omega(model.handle, omega.data(), len));

        std::printf("preset\t%s\n", preset);
        std::printf("restriction\t%s\n", restriction);
        std::printf("n_e\t%" PRIu64 "\n", n_e);
        std::printf("n_r\t%" PRIu64 "\n", n_r);
        std::printf("dim\t%" PRIu64 "\n", dim);
        std::printf("epoch\t%" PRIu64 "\n", epoch);
        for (uint64_t idx = 0; idx < len; ++idx) {
            const uint64_t i = idx / (n_e * n_r);
            const uint64_t j = (idx / n_r) % n_e;
            const uint64_t k = idx % n_r;
            std::printf("omega[%" PRIu64 "][%" PRIu64 "][%" PRIu64 "]\t%.17g\n", i, j, k,
                        omega[idx]);
        }
        return 0;
    }

    return 1;
}
