#include "mkge/mkge.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "checkpoint.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "evaluator.hpp"
#include "scoring.hpp"
#include "trainer.hpp"

struct mkge_dataset {
    mkge::KgDataset data;
};

struct mkge_model {
    mkge::Model model;
};

namespace {

thread_local std::string g_last_error;

int status_of(mkge::ErrorCode code) {
    switch (code) {
        case mkge::ErrorCode::io: return MKGE_ERR_IO;
        case mkge::ErrorCode::parse: return MKGE_ERR_PARSE;
        case mkge::ErrorCode::config: return MKGE_ERR_CONFIG;
        default: return MKGE_ERR_RUNTIME;
    }
}

int fail(int status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MKGE_OK;
    } catch (const mkge::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(MKGE_ERR_RUNTIME, e.what());
    }
}

int require(const void* ptr, const char* what) {
    if (ptr != nullptr) return MKGE_OK;
    return fail(MKGE_ERR_CONFIG, std::string(what) + " must not be null");
}

void check_counts_match(const mkge::Model& model, const mkge::KgDataset& data) {
    if (model.table.num_entities != data.vocab.num_entities() ||
        model.table.num_relations != data.vocab.num_relations()) {
        throw mkge::Error(mkge::ErrorCode::config,
                          "model holds " + std::to_string(model.table.num_entities) +
                              " entities / " + std::to_string(model.table.num_relations) +
                              " relations but dataset has " +
                              std::to_string(data.vocab.num_entities()) + " / " +
                              std::to_string(data.vocab.num_relations()));
    }
}

} // namespace

extern "C" {

const char* mkge_last_error(void) { return g_last_error.c_str(); }

int mkge_dataset_prepare(const char* train_path, const char* valid_path,
                         const char* test_path, const char* columns, const char* out_dir) {
    if (int s = require(train_path, "train_path")) return s;
    if (int s = require(out_dir, "out_dir")) return s;
    return guarded([&] {
        const mkge::ColumnOrder order =
            mkge::column_order_from_name(columns && *columns ? columns : "hrt");
        const auto train = mkge::parse_triples(train_path, order);
        if (train.empty()) {
            throw mkge::Error(mkge::ErrorCode::config,
                              std::string("no training triples in ") + train_path);
        }
        std::vector<mkge::RawTriple> valid, test;
        if (valid_path && *valid_path) valid = mkge::parse_triples(valid_path, order);
        if (test_path && *test_path) test = mkge::parse_triples(test_path, order);
        const mkge::KgDataset data = mkge::build_dataset(train, valid, test);
        mkge::save_dataset(data, out_dir);
    });
}

int mkge_dataset_open(const char* dir, mkge_dataset** out) {
    if (int s = require(dir, "dir")) return s;
    if (int s = require(out, "out")) return s;
    *out = nullptr;
    return guarded([&] { *out = new mkge_dataset{mkge::load_dataset(dir)}; });
}

void mkge_dataset_close(mkge_dataset* dataset) { delete dataset; }

int mkge_dataset_stats(const mkge_dataset* dataset, uint64_t* num_entities,
                       uint64_t* num_relations, uint64_t* num_train, uint64_t* num_valid,
                       uint64_t* num_test) {
    if (int s = require(dataset, "dataset")) return s;
    if (num_entities) *num_entities = dataset->data.vocab.num_entities();
    if (num_relations) *num_relations = dataset->data.vocab.num_relations();
    if (num_train) *num_train = dataset->data.train.size();
    if (num_valid) *num_valid = dataset->data.valid.size();
    if (num_test) *num_test = dataset->data.test.size();
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_dataset_warning_count(const mkge_dataset* dataset, uint64_t* count) {
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(count, "count")) return s;
    *count = dataset->data.warnings.size();
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_dataset_warning(const mkge_dataset* dataset, uint64_t index, const char** out) {
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(out, "out")) return s;
    if (index >= dataset->data.warnings.size()) {
        return fail(MKGE_ERR_CONFIG, "warning index out of range");
    }
    *out = dataset->data.warnings[index].c_str();
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_model_create(const mkge_dataset* dataset, const mkge_model_config* config,
                      mkge_model** out) {
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(config, "config")) return s;
    if (int s = require(out, "out")) return s;
    *out = nullptr;
    return guarded([&] {
        mkge::ModelConfig cfg;
        cfg.preset = config->preset ? config->preset : "distmult";
        cfg.n_e = config->n_e;
        cfg.n_r = config->n_r;
        cfg.dim = config->dim;
        if (config->omega && config->omega_len > 0) {
            cfg.custom_omega.assign(config->omega, config->omega + config->omega_len);
        }
        cfg.restriction = mkge::restriction_from_name(
            config->restriction && *config->restriction ? config->restriction : "none");
        cfg.dirichlet.enabled = config->dirichlet_enabled != 0;
        if (config->dirichlet_alpha != 0.0) cfg.dirichlet.alpha = config->dirichlet_alpha;
        if (config->dirichlet_lambda != 0.0) cfg.dirichlet.lambda_dir = config->dirichlet_lambda;
        cfg.l1_lambda = config->l1_lambda;
        cfg.seed = config->seed;
        *out = new mkge_model{mkge::make_model(cfg, dataset->data.vocab.num_entities(),
                                               dataset->data.vocab.num_relations())};
    });
}

void mkge_model_free(mkge_model* model) { delete model; }

int mkge_model_save(const mkge_model* model, const char* prefix) {
    if (int s = require(model, "model")) return s;
    if (int s = require(prefix, "prefix")) return s;
    return guarded([&] { mkge::save_checkpoint(model->model, prefix); });
}

int mkge_model_open(const char* prefix, mkge_model** out) {
    if (int s = require(prefix, "prefix")) return s;
    if (int s = require(out, "out")) return s;
    *out = nullptr;
    return guarded([&] { *out = new mkge_model{mkge::load_checkpoint(prefix)}; });
}

int mkge_model_info(const mkge_model* model, uint64_t* n_e, uint64_t* n_r, uint64_t* dim,
                    uint64_t* num_entities, uint64_t* num_relations, uint64_t* epoch) {
    if (int s = require(model, "model")) return s;
    if (n_e) *n_e = model->model.table.n_e;
    if (n_r) *n_r = model->model.table.n_r;
    if (dim) *dim = model->model.table.dim;
    if (num_entities) *num_entities = model->model.table.num_entities;
    if (num_relations) *num_relations = model->model.table.num_relations;
    if (epoch) *epoch = model->model.epoch;
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_model_preset(const mkge_model* model, const char** out) {
    if (int s = require(model, "model")) return s;
    if (int s = require(out, "out")) return s;
    *out = model->model.config.preset.c_str();
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_model_restriction(const mkge_model* model, const char** out) {
    if (int s = require(model, "model")) return s;
    if (int s = require(out, "out")) return s;
    *out = mkge::restriction_name(model->model.weights.restriction);
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_model_omega_len(const mkge_model* model, uint64_t* out) {
    if (int s = require(model, "model")) return s;
    if (int s = require(out, "out")) return s;
    *out = model->model.weights.omega.size();
    g_last_error.clear();
    return MKGE_OK;
}

int mkge_model_omega(const mkge_model* model, double* out, uint64_t len) {
    if (int s = require(model, "model")) return s;
    if (int s = require(out, "out")) return s;
    if (len != model->model.weights.omega.size()) {
        return fail(MKGE_ERR_CONFIG,
                    "omega buffer holds " + std::to_string(len) + " values, model has " +
                        std::to_string(model->model.weights.omega.size()));
    }
    for (uint64_t i = 0; i < len; ++i) out[i] = model->model.weights.omega[i];
    g_last_error.clear();
    return MKGE_OK;
}

void mkge_train_config_default(mkge_train_config* config) {
    if (!config) return;
    config->learning_rate = 1e-3;
    config->batch_size = 4096;
    config->l2_lambda = 1e-3;
    config->negatives_per_positive = 1;
    config->max_epochs = 0;
    config->eval_every = 50;
    config->patience_epochs = 100;
    config->loss_form = "softplus";
    config->seed = 0;
}

int mkge_train(mkge_model* model, const mkge_dataset* dataset,
               const mkge_train_config* config, const char* log_path,
               const char* final_prefix, double* best_valid_mrr, uint64_t* best_epoch) {
    if (int s = require(model, "model")) return s;
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(config, "config")) return s;
    return guarded([&] {
        check_counts_match(model->model, dataset->data);
        mkge::TrainConfig cfg;
        cfg.learning_rate = config->learning_rate;
        cfg.batch_size = config->batch_size;
        cfg.l2_lambda = config->l2_lambda;
        cfg.negatives_per_positive = config->negatives_per_positive;
        cfg.max_epochs = config->max_epochs;
        cfg.eval_every = config->eval_every;
        cfg.patience_epochs = config->patience_epochs;
        cfg.loss_form = mkge::loss_form_from_name(
            config->loss_form && *config->loss_form ? config->loss_form : "softplus");
        cfg.seed = config->seed;

        mkge::TrainResult result = mkge::train(dataset->data, std::move(model->model), cfg);
        if (log_path && *log_path) mkge::write_train_log(result.log, log_path);
        if (final_prefix && *final_prefix) mkge::save_checkpoint(result.final, final_prefix);
        if (best_valid_mrr) {
            *best_valid_mrr =
                result.has_best_mrr ? result.best_valid_mrr : std::nan("");
        }
        if (best_epoch) *best_epoch = result.best_epoch;
        model->model = std::move(result.best);
    });
}

int mkge_evaluate(const mkge_model* model, const mkge_dataset* dataset, const char* split,
                  const char* ranks_path, mkge_eval_result* out) {
    if (int s = require(model, "model")) return s;
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(split, "split")) return s;
    if (int s = require(out, "out")) return s;
    return guarded([&] {
        const mkge::EvalReport report =
            mkge::evaluate(model->model, dataset->data, mkge::split_from_name(split));
        if (ranks_path && *ranks_path) {
            mkge::write_rank_dump(report, dataset->data.vocab, ranks_path);
        }
        out->mrr = report.mrr;
        out->hits1 = report.hits1;
        out->hits3 = report.hits3;
        out->hits10 = report.hits10;
        out->num_records = report.num_records();
    });
}

int mkge_score(const mkge_model* model, const mkge_dataset* dataset, const char* head,
               const char* relation, const char* tail, double* out) {
    if (int s = require(model, "model")) return s;
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(head, "head")) return s;
    if (int s = require(relation, "relation")) return s;
    if (int s = require(tail, "tail")) return s;
    if (int s = require(out, "out")) return s;
    return guarded([&] {
        check_counts_match(model->model, dataset->data);
        const std::int64_t h = dataset->data.vocab.find_entity(head);
        const std::int64_t t = dataset->data.vocab.find_entity(tail);
        const std::int64_t r = dataset->data.vocab.find_relation(relation);
        if (h < 0) throw mkge::Error(mkge::ErrorCode::config,
                                     std::string("unknown entity '") + head + "'");
        if (t < 0) throw mkge::Error(mkge::ErrorCode::config,
                                     std::string("unknown entity '") + tail + "'");
        if (r < 0) throw mkge::Error(mkge::ErrorCode::config,
                                     std::string("unknown relation '") + relation + "'");
        mkge::Triple triple;
        triple.head = static_cast<std::uint32_t>(h);
        triple.tail = static_cast<std::uint32_t>(t);
        triple.relation = static_cast<std::uint32_t>(r);
        *out = mkge::score_triple(model->model.table, model->model.weights, triple);
    });
}

int mkge_export(const mkge_model* model, const mkge_dataset* dataset, const char* out_path) {
    if (int s = require(model, "model")) return s;
    if (int s = require(dataset, "dataset")) return s;
    if (int s = require(out_path, "out_path")) return s;
    return guarded(
        [&] { mkge::write_embeddings_tsv(model->model, dataset->data.vocab, out_path); });
}

} // extern "C"
