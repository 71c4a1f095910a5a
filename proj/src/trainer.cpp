#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "evaluator.hpp"

namespace mkge {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1) + c;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

} // namespace

LossForm loss_form_from_name(const std::string& name) {
    if (name == "cross_entropy") return LossForm::cross_entropy;
    if (name == "softplus") return LossForm::softplus;
    throw Error(ErrorCode::config,
                "unknown loss form '" + name + "' (valid: cross_entropy, softplus)");
}

const char* loss_form_name(LossForm form) {
    return form == LossForm::cross_entropy ? "cross_entropy" : "softplus";
}

Triple sample_negative(const Triple& t, std::size_t num_entities, std::mt19937_64& rng) {
    if (num_entities < 2) {
        throw Error(ErrorCode::runtime, "negative sampling needs at least 2 entities");
    }
    const bool corrupt_head = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    const std::uint32_t original = corrupt_head ? t.head : t.tail;
    std::uint32_t drawn = std::uniform_int_distribution<std::uint32_t>(
        0, static_cast<std::uint32_t>(num_entities - 2))(rng);
    if (drawn >= original) ++drawn; // uniform over all entities except the original
    Triple out = t;
    if (corrupt_head) out.head = drawn; else out.tail = drawn;
    return out;
}

double loss_value(double score, int label, LossForm form) {
    if (form == LossForm::softplus) {
        const double x = -static_cast<double>(label) * score;
        if (x > 0.0) return x + std::log1p(std::exp(-x));
        return std::log1p(std::exp(x));
    }
    // Negative log-likelihood of the sigmoid, branch per label.
    if (label > 0) {
        if (score >= 0.0) return std::log1p(std::exp(-score));
        return -score + std::log1p(std::exp(score));
    }
    if (score <= 0.0) return std::log1p(std::exp(score));
    return score + std::log1p(std::exp(-score));
}

double loss_dscore(double score, int label, LossForm form) {
    if (form == LossForm::softplus) {
        const double y = static_cast<double>(label);
        return -y * stable_sigmoid(-y * score);
    }
    if (label > 0) return stable_sigmoid(score) - 1.0;
    return stable_sigmoid(score);
}

BatchGradients grad_batch(const MultiEmbeddingTable& table, const WeightVector& w,
                          std::span<const LabeledTriple> batch, LossForm form,
                          double l2_lambda, const DirichletRegConfig& dirichlet,
                          double l1_lambda) {
    if (batch.empty()) throw Error(ErrorCode::runtime, "grad_batch: empty batch");

    const std::size_t dim = table.dim;
    const bool learnable = w.mode == WeightMode::learnable;
    const double ent_coeff = l2_lambda / static_cast<double>(table.n_e * dim);
    const double rel_coeff = l2_lambda / static_cast<double>(table.n_r * dim);

    BatchGradients out;
    out.entity.reset(table.n_e * dim);
    out.relation.reset(table.n_r * dim);
    if (learnable) out.omega.assign(w.size(), 0.0);
    out.num_terms = batch.size();

    std::vector<double> trilinear(w.size());
    for (const LabeledTriple& lt : batch) {
        const Triple& t = lt.triple;
        double score = 0.0;
        for (std::size_t i = 0; i < w.n_e; ++i) {
            for (std::size_t j = 0; j < w.n_e; ++j) {
                for (std::size_t k = 0; k < w.n_r; ++k) {
                    const std::size_t idx = w.index(i, j, k);
                    const double weight = w.omega[idx];
                    if (!learnable && weight == 0.0) continue;
                    auto h = table.entity_vec(t.head, i);
                    auto tt = table.entity_vec(t.tail, j);
                    auto r = table.relation_vec(t.relation, k);
                    double tri = 0.0;
                    for (std::size_t d = 0; d < dim; ++d) tri += h[d] * tt[d] * r[d];
                    trilinear[idx] = tri;
                    score += weight * tri;
                }
            }
        }

        const double g = loss_dscore(score, lt.label, form);
        out.loss += loss_value(score, lt.label, form);

        out.entity.row(t.head);
        out.entity.row(t.tail);
        out.relation.row(t.relation);
        auto gh = out.entity.row(t.head);
        auto gt = out.entity.row(t.tail); // aliases gh for self-loops; += keeps both roles
        auto gr = out.relation.row(t.relation);

        for (std::size_t i = 0; i < w.n_e; ++i) {
            for (std::size_t j = 0; j < w.n_e; ++j) {
                for (std::size_t k = 0; k < w.n_r; ++k) {
                    const std::size_t idx = w.index(i, j, k);
                    const double weight = w.omega[idx];
                    if (!learnable && weight == 0.0) continue;
                    if (learnable) out.omega[idx] += g * trilinear[idx];
                    const double c = g * weight;
                    if (c == 0.0) continue;
                    auto h = table.entity_vec(t.head, i);
                    auto tt = table.entity_vec(t.tail, j);
                    auto r = table.relation_vec(t.relation, k);
                    for (std::size_t d = 0; d < dim; ++d) {
                        gh[i * dim + d] += c * tt[d] * r[d];
                        gt[j * dim + d] += c * h[d] * r[d];
                        gr[k * dim + d] += c * h[d] * tt[d];
                    }
                }
            }
        }

        if (l2_lambda != 0.0) {
            auto hc = table.entity_concat(t.head);
            auto tc = table.entity_concat(t.tail);
            auto rc = table.relation_concat(t.relation);
            for (std::size_t x = 0; x < hc.size(); ++x) {
                out.loss += ent_coeff * hc[x] * hc[x];
                gh[x] += 2.0 * ent_coeff * hc[x];
            }
            for (std::size_t x = 0; x < tc.size(); ++x) {
                out.loss += ent_coeff * tc[x] * tc[x];
                gt[x] += 2.0 * ent_coeff * tc[x];
            }
            for (std::size_t x = 0; x < rc.size(); ++x) {
                out.loss += rel_coeff * rc[x] * rc[x];
                gr[x] += 2.0 * rel_coeff * rc[x];
            }
        }
    }

    if (learnable) {
        out.loss += dirichlet_reg(w.omega, dirichlet, out.omega);
        out.loss += l1_reg(w.omega, l1_lambda, out.omega);
    }
    return out;
}

AdamState make_adam_state(std::size_t size, AdamParams hyper) {
    AdamState state;
    state.hyper = hyper;
    state.m.assign(size, 0.0);
    state.v.assign(size, 0.0);
    return state;
}

void adam_update_slice(std::span<double> params, std::span<const double> grads,
                       std::span<double> m, std::span<double> v, std::uint64_t step,
                       const AdamParams& hyper, double lr) {
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
        v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw Error(ErrorCode::runtime, "adam_step: shape mismatch");
    }
    ++state.step;
    adam_update_slice(params, grads, state.m, state.v, state.step, state.hyper, lr);
}

void project_unit_norm_vec(std::span<double> vec) {
    double norm_sq = 0.0;
    for (double x : vec) norm_sq += x * x;
    if (norm_sq == 0.0) {
        if (!vec.empty()) vec[0] = 1.0;
        return;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : vec) x *= inv;
}

void project_unit_norm(MultiEmbeddingTable& table) {
    for (std::size_t e = 0; e < table.num_entities; ++e) {
        for (std::size_t i = 0; i < table.n_e; ++i) {
            project_unit_norm_vec(table.entity_vec(e, i));
        }
    }
}

std::vector<std::vector<LabeledTriple>> make_epoch_batches(const std::vector<Triple>& train,
                                                           std::size_t num_entities,
                                                           const TrainConfig& config,
                                                           std::size_t epoch) {
    if (config.batch_size == 0) throw Error(ErrorCode::config, "batch_size must be positive");
    std::vector<std::uint32_t> order(train.size());
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 shuffle_rng(mix_seed(config.seed, epoch, 0xA5));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::mt19937_64 neg_rng(mix_seed(config.seed, epoch, 0x5A));

    std::vector<std::vector<LabeledTriple>> batches;
    batches.reserve((order.size() + config.batch_size - 1) / config.batch_size);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t end = std::min(start + config.batch_size, order.size());
        std::vector<LabeledTriple> batch;
        batch.reserve((end - start) * (1 + config.negatives_per_positive));
        for (std::size_t pos = start; pos < end; ++pos) {
            const Triple& t = train[order[pos]];
            batch.push_back({t, 1});
            for (std::size_t n = 0; n < config.negatives_per_positive; ++n) {
                batch.push_back({sample_negative(t, num_entities, neg_rng), -1});
            }
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

TrainResult train(const KgDataset& dataset, Model model, const TrainConfig& config) {
    if (config.batch_size == 0) throw Error(ErrorCode::config, "batch_size must be positive");
    if (!(config.learning_rate > 0.0)) {
        throw Error(ErrorCode::config, "learning_rate must be positive");
    }

    TrainResult result;
    if (config.max_epochs == 0) {
        result.best = model;
        result.final = std::move(model);
        return result;
    }
    if (dataset.train.empty()) {
        throw Error(ErrorCode::config, "training split is empty");
    }

    const std::size_t ent_width = model.table.n_e * model.table.dim;
    const std::size_t rel_width = model.table.n_r * model.table.dim;
    AdamState ent_state = make_adam_state(model.table.entity_data.size());
    AdamState rel_state = make_adam_state(model.table.relation_data.size());
    AdamState omega_state;
    const bool learnable = model.weights.mode == WeightMode::learnable;
    if (learnable) omega_state = make_adam_state(model.weights.raw_params.size());

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const std::vector<std::vector<LabeledTriple>> batches =
            make_epoch_batches(dataset.train, model.table.num_entities, config, epoch);

        double loss_sum = 0.0;
        std::size_t term_count = 0;
        for (std::size_t batch_index = 0; batch_index < batches.size(); ++batch_index) {
            const std::vector<LabeledTriple>& batch = batches[batch_index];

            BatchGradients grads =
                grad_batch(model.table, model.weights, batch, config.loss_form,
                           config.l2_lambda, model.config.dirichlet, model.config.l1_lambda);
            if (!std::isfinite(grads.loss)) {
                throw Error(ErrorCode::runtime,
                            "non-finite training loss at epoch " + std::to_string(epoch) +
                                ", batch " + std::to_string(batch_index));
            }
            loss_sum += grads.loss;
            term_count += grads.num_terms;

            ++ent_state.step;
            for (std::size_t s = 0; s < grads.entity.touched().size(); ++s) {
                const std::uint32_t e = grads.entity.touched()[s];
                const std::size_t off = e * ent_width;
                adam_update_slice(model.table.entity_concat(e), grads.entity.slot(s),
                                  {ent_state.m.data() + off, ent_width},
                                  {ent_state.v.data() + off, ent_width}, ent_state.step,
                                  ent_state.hyper, config.learning_rate);
            }
            ++rel_state.step;
            for (std::size_t s = 0; s < grads.relation.touched().size(); ++s) {
                const std::uint32_t r = grads.relation.touched()[s];
                const std::size_t off = r * rel_width;
                adam_update_slice(model.table.relation_concat(r), grads.relation.slot(s),
                                  {rel_state.m.data() + off, rel_width},
                                  {rel_state.v.data() + off, rel_width}, rel_state.step,
                                  rel_state.hyper, config.learning_rate);
            }
            if (learnable) {
                const std::vector<double> raw_grad = restriction_backward(
                    model.weights.omega, grads.omega, model.weights.restriction);
                adam_step(model.weights.raw_params, raw_grad, omega_state,
                          config.learning_rate);
            }

            for (std::uint32_t e : grads.entity.touched()) {
                for (std::size_t i = 0; i < model.table.n_e; ++i) {
                    project_unit_norm_vec(model.table.entity_vec(e, i));
                }
            }
            if (learnable) model.weights.refresh();
        }

        model.epoch = epoch;
        TrainLogRow row;
        row.epoch = epoch;
        row.mean_loss = term_count == 0 ? 0.0 : loss_sum / static_cast<double>(term_count);

        const bool do_eval = !dataset.valid.empty() && config.eval_every > 0 &&
                             (epoch % config.eval_every == 0 || epoch == config.max_epochs);
        if (do_eval) {
            const EvalReport report = evaluate(model, dataset, Split::valid);
            row.valid_mrr = report.mrr;
            row.has_mrr = true;
            if (!result.has_best_mrr || report.mrr > result.best_valid_mrr) {
                result.best_valid_mrr = report.mrr;
                result.has_best_mrr = true;
                result.best_epoch = epoch;
                result.best = model;
            }
        }
        result.log.push_back(row);
        if (do_eval && epoch > result.best_epoch &&
            epoch - result.best_epoch >= config.patience_epochs) {
            break;
        }
    }

    result.final = std::move(model);
    if (!result.has_best_mrr) {
        result.best = result.final;
        result.best_epoch = result.final.epoch;
    }
    return result;
}

void write_train_log(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out.precision(9);
    for (const TrainLogRow& row : log) {
        out << row.epoch << '\t' << row.mean_loss << '\t';
        if (row.has_mrr) out << row.valid_mrr;
        else out << '-';
        out << '\n';
    }
}

} // namespace mkge
