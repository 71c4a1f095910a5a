#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset.hpp"
#include "scoring.hpp"

namespace mkge {

enum class LossForm { cross_entropy, softplus };

LossForm loss_form_from_name(const std::string& name);
const char* loss_form_name(LossForm form);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 4096;
    double l2_lambda = 1e-3;
    std::size_t negatives_per_positive = 1;
    std::size_t max_epochs = 0;
    std::size_t eval_every = 50;
    std::size_t patience_epochs = 100;
    LossForm loss_form = LossForm::softplus;
    std::uint64_t seed = 0;
};

struct LabeledTriple {
    Triple triple;
    int label = 1; // +1 positive, -1 negative
};

/// Replaces the head or tail (fair coin) by a uniform draw over all other
/// entities; the relation is kept.
Triple sample_negative(const Triple& t, std::size_t num_entities, std::mt19937_64& rng);

/// softplus: log(1 + exp(-label*score)). cross_entropy: -log sigmoid(score)
/// for label +1, -log(1 - sigmoid(score)) for label -1. Algebraically equal;
/// both overflow-free for |score| up to 700.
double loss_value(double score, int label, LossForm form);

/// d loss / d score. Equals -label * sigmoid(-label*score) in both forms.
double loss_dscore(double score, int label, LossForm form);

// Sparse per-row gradient buffer. Rows are zero-filled on first touch and
// listed in first-touch order; acquiring a new row may invalidate previously
// returned spans.
class GradAccumulator {
public:
    void reset(std::size_t width) {
        width_ = width;
        slots_.clear();
        rows_.clear();
        data_.clear();
    }
    std::span<double> row(std::uint32_t index) {
        auto [it, inserted] = slots_.try_emplace(index, rows_.size());
        if (inserted) {
            rows_.push_back(index);
            data_.resize(data_.size() + width_, 0.0);
        }
        return {data_.data() + it->second * width_, width_};
    }
    const std::vector<std::uint32_t>& touched() const { return rows_; }
    std::span<const double> slot(std::size_t s) const {
        return {data_.data() + s * width_, width_};
    }
    // nullptr when the row was never touched.
    const double* find(std::uint32_t index) const {
        auto it = slots_.find(index);
        return it == slots_.end() ? nullptr : data_.data() + it->second * width_;
    }
    std::size_t width() const { return width_; }

private:
    std::size_t width_ = 0;
    std::unordered_map<std::uint32_t, std::size_t> slots_;
    std::vector<std::uint32_t> rows_;
    std::vector<double> data_;
};

// Total loss over one batch and its gradients w.r.t. every touched parameter.
// The loss includes the per-triple L2 terms and, in learnable mode, the batch
// regularizers on omega; omega gradients are in post-restriction space.
struct BatchGradients {
    GradAccumulator entity;   // row key: entity index, width n_e * dim
    GradAccumulator relation; // row key: relation index, width n_r * dim
    std::vector<double> omega; // learnable mode only, length n_e * n_e * n_r
    double loss = 0.0;
    std::size_t num_terms = 0;
};

/// Loss per labeled triple: loss_value(S, y) + (l2/(n_e*D))*(|h|^2 + |t|^2)
/// + (l2/(n_r*D))*|r|^2, each norm over the item's concatenated vectors. A
/// self-loop (h == t) accumulates both role terms. In learnable mode the
/// Dirichlet and L1 regularizers on omega are added once for the whole batch.
BatchGradients grad_batch(const MultiEmbeddingTable& table, const WeightVector& w,
                          std::span<const LabeledTriple> batch, LossForm form,
                          double l2_lambda, const DirichletRegConfig& dirichlet,
                          double l1_lambda);

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamParams hyper;
    std::uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

AdamState make_adam_state(std::size_t size, AdamParams hyper = {});

/// Bias-corrected update of params[i] using moment slices m, v at the given
/// step count. Spans must share one length.
void adam_update_slice(std::span<double> params, std::span<const double> grads,
                       std::span<double> m, std::span<double> v, std::uint64_t step,
                       const AdamParams& hyper, double lr);

/// Dense Adam step over a full parameter vector; increments state.step.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr);

/// Rescales every entity vector to unit L2 norm; a zero vector becomes the
/// first basis vector. Relations are untouched.
void project_unit_norm(MultiEmbeddingTable& table);

/// Unit-norm projection of a single length-dim vector.
void project_unit_norm_vec(std::span<double> vec);

/// One epoch's minibatches: positives in shuffled order, each followed by
/// negatives_per_positive sampled negatives. Deterministic in (config.seed,
/// epoch); epochs are numbered from 1.
std::vector<std::vector<LabeledTriple>> make_epoch_batches(const std::vector<Triple>& train,
                                                           std::size_t num_entities,
                                                           const TrainConfig& config,
                                                           std::size_t epoch);

struct TrainLogRow {
    std::uint64_t epoch = 0;
    double mean_loss = 0.0;
    double valid_mrr = 0.0;
    bool has_mrr = false;
};

struct TrainResult {
    Model best;  // checkpoint with the highest validation MRR (final when never evaluated)
    Model final; // state after the last completed epoch
    double best_valid_mrr = 0.0;
    bool has_best_mrr = false;
    std::uint64_t best_epoch = 0;
    std::vector<TrainLogRow> log;
};

/// Shuffled minibatch epochs: per batch compute gradients, Adam-update each
/// touched row (one step count per batch), project touched entity vectors,
/// and in learnable mode refresh omega from raw parameters. Validation
/// filtered MRR is computed at every eval_every-th epoch and at the final
/// epoch when the validation split is nonempty; training stops early once
/// patience_epochs pass without improvement. Deterministic given config.seed.
TrainResult train(const KgDataset& dataset, Model model, const TrainConfig& config);

/// Tab-separated rows: epoch, mean train loss, validation MRR ("-" on epochs
/// without an evaluation).
void write_train_log(const std::vector<TrainLogRow>& log, const std::string& path);

} // namespace mkge
