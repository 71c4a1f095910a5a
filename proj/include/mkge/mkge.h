#ifndef MKGE_H
#define MKGE_H

/* C interface to the multi-embedding knowledge graph library. All fallible
 * calls return a status code; MKGE_OK is 0. On failure, mkge_last_error()
 * holds a message for the calling thread until its next mkge_* call. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MKGE_OK 0
#define MKGE_ERR_IO 1
#define MKGE_ERR_PARSE 2
#define MKGE_ERR_CONFIG 3
#define MKGE_ERR_RUNTIME 4

typedef struct mkge_dataset mkge_dataset;
typedef struct mkge_model mkge_model;

/* Message for the most recent failure on this thread; "" after success. */
const char* mkge_last_error(void);

/* ---- datasets ------------------------------------------------------- */

/* Parses tab-separated triple files (columns "hrt" or "htr"), builds the
 * vocabulary and filter index, and writes the encoded bundle into out_dir.
 * valid_path and test_path may be NULL or "" for absent splits. */
int mkge_dataset_prepare(const char* train_path, const char* valid_path,
                         const char* test_path, const char* columns,
                         const char* out_dir);

int mkge_dataset_open(const char* dir, mkge_dataset** out);
void mkge_dataset_close(mkge_dataset* dataset);

/* Any output pointer may be NULL. */
int mkge_dataset_stats(const mkge_dataset* dataset, uint64_t* num_entities,
                       uint64_t* num_relations, uint64_t* num_train,
                       uint64_t* num_valid, uint64_t* num_test);

int mkge_dataset_warning_count(const mkge_dataset* dataset, uint64_t* count);
/* The returned string lives as long as the dataset handle. */
int mkge_dataset_warning(const mkge_dataset* dataset, uint64_t index, const char** out);

/* ---- models --------------------------------------------------------- */

typedef struct mkge_model_config {
    /* distmult, complex, complex_equiv_1..3, cp, cph, cph_equiv, quaternion,
     * uniform, custom, or learnable. */
    const char* preset;
    uint64_t n_e; /* 0 = preset default */
    uint64_t n_r; /* 0 = preset default */
    uint64_t dim;
    const double* omega; /* custom preset: n_e*n_e*n_r values */
    uint64_t omega_len;
    const char* restriction; /* learnable preset: none|tanh|sigmoid|softmax; NULL = none */
    int dirichlet_enabled;
    double dirichlet_alpha;
    double dirichlet_lambda;
    double l1_lambda;
    uint64_t seed;
} mkge_model_config;

int mkge_model_create(const mkge_dataset* dataset, const mkge_model_config* config,
                      mkge_model** out);
void mkge_model_free(mkge_model* model);

/* Writes prefix.json and prefix.bin. */
int mkge_model_save(const mkge_model* model, const char* prefix);
int mkge_model_open(const char* prefix, mkge_model** out);

/* Any output pointer may be NULL. */
int mkge_model_info(const mkge_model* model, uint64_t* n_e, uint64_t* n_r, uint64_t* dim,
                    uint64_t* num_entities, uint64_t* num_relations, uint64_t* epoch);
/* Returned strings stay valid until the model is next modified or freed. */
int mkge_model_preset(const mkge_model* model, const char** out);
int mkge_model_restriction(const mkge_model* model, const char** out);
int mkge_model_omega_len(const mkge_model* model, uint64_t* out);
/* Copies exactly len values; len must equal the omega length. */
int mkge_model_omega(const mkge_model* model, double* out, uint64_t len);

/* ---- training ------------------------------------------------------- */

typedef struct mkge_train_config {
    double learning_rate;
    uint64_t batch_size;
    double l2_lambda;
    uint64_t negatives_per_positive;
    uint64_t max_epochs;
    uint64_t eval_every;      /* validation MRR checked every this many epochs */
    uint64_t patience_epochs; /* stop after this many epochs without improvement */
    const char* loss_form;    /* softplus | cross_entropy; NULL = softplus */
    uint64_t seed;
} mkge_train_config;

/* Fills a config with the library defaults (lr 1e-3, batch 4096, l2 1e-3,
 * 1 negative, eval every 50, patience 100, softplus). */
void mkge_train_config_default(mkge_train_config* config);

/* Trains in place; on success the model holds the checkpoint with the best
 * validation MRR. Optional outputs: a tab-separated log at log_path, the
 * final-epoch checkpoint saved under final_prefix, the best validation MRR
 * (NaN when the dataset has no validation split) and its epoch. */
int mkge_train(mkge_model* model, const mkge_dataset* dataset,
               const mkge_train_config* config, const char* log_path,
               const char* final_prefix, double* best_valid_mrr, uint64_t* best_epoch);

/* ---- evaluation and scoring ----------------------------------------- */

typedef struct mkge_eval_result {
    double mrr;
    double hits1;
    double hits3;
    double hits10;
    uint64_t num_records;
} mkge_eval_result;

/* Filtered link-prediction metrics over a split ("train", "valid", "test").
 * ranks_path, when non-NULL, receives one line per rank record. */
int mkge_evaluate(const mkge_model* model, const mkge_dataset* dataset, const char* split,
                  const char* ranks_path, mkge_eval_result* out);

/* Score of one triple given by names. */
int mkge_score(const mkge_model* model, const mkge_dataset* dataset, const char* head,
               const char* relation, const char* tail, double* out);

/* Writes per-item concatenated embedding vectors as tab-separated text. */
int mkge_export(const mkge_model* model, const mkge_dataset* dataset, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* MKGE_H */
