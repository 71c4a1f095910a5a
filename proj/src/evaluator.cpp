#include "evaluator.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace mkge {

namespace {

std::size_t worker_count(std::size_t num_items) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("MKGE_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0') n = std::min<std::size_t>(n, std::max(1ul, cap));
    }
    return std::max<std::size_t>(1, std::min(n, num_items));
}

} // namespace

double filtered_rank(const MultiEmbeddingTable& table, const WeightVector& w,
                     const KgDataset& dataset, const Triple& t, CorruptSide side,
                     std::span<double> scratch) {
    score_against_all(table, w, t, side, scratch);
    const std::uint32_t true_entity = side == CorruptSide::head ? t.head : t.tail;
    const double true_score = scratch[true_entity];

    std::size_t above = 0;
    std::size_t tied = 0;
    Triple candidate = t;
    for (std::uint32_t e = 0; e < table.num_entities; ++e) {
        if (e == true_entity) continue;
        if (side == CorruptSide::head) candidate.head = e; else candidate.tail = e;
        if (dataset.contains(candidate)) continue;
        if (scratch[e] > true_score) ++above;
        else if (scratch[e] == true_score) ++tied;
    }
    return 1.0 + static_cast<double>(above) + static_cast<double>(tied) * 0.5;
}

EvalReport evaluate(const Model& model, const KgDataset& dataset, Split split) {
    const std::vector<Triple>& triples = dataset.split(split);
    if (triples.empty()) {
        throw Error(ErrorCode::config,
                    std::string("cannot evaluate empty split ") + split_name(split));
    }
    if (model.table.num_entities != dataset.vocab.num_entities() ||
        model.table.num_relations != dataset.vocab.num_relations()) {
        throw Error(ErrorCode::config,
                    "model holds " + std::to_string(model.table.num_entities) + " entities / " +
                        std::to_string(model.table.num_relations) + " relations but dataset has " +
                        std::to_string(dataset.vocab.num_entities()) + " / " +
                        std::to_string(dataset.vocab.num_relations()));
    }

    EvalReport report;
    report.records.resize(triples.size() * 2);

    const std::size_t workers = worker_count(triples.size());
    auto run = [&](std::size_t worker) {
        std::vector<double> scratch(model.table.num_entities);
        for (std::size_t i = worker; i < triples.size(); i += workers) {
            const Triple& t = triples[i];
            const double head_rank =
                filtered_rank(model.table, model.weights, dataset, t, CorruptSide::head, scratch);
            const double tail_rank =
                filtered_rank(model.table, model.weights, dataset, t, CorruptSide::tail, scratch);
            report.records[2 * i] = RankRecord{t, CorruptSide::head, head_rank};
            report.records[2 * i + 1] = RankRecord{t, CorruptSide::tail, tail_rank};
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (std::thread& th : pool) th.join();
    }

    double reciprocal_sum = 0.0;
    std::size_t h1 = 0, h3 = 0, h10 = 0;
    for (const RankRecord& rec : report.records) {
        reciprocal_sum += 1.0 / rec.rank;
        if (rec.rank <= 1.0) ++h1;
        if (rec.rank <= 3.0) ++h3;
        if (rec.rank <= 10.0) ++h10;
    }
    const double n = static_cast<double>(report.records.size());
    report.mrr = reciprocal_sum / n;
    report.hits1 = static_cast<double>(h1) / n;
    report.hits3 = static_cast<double>(h3) / n;
    report.hits10 = static_cast<double>(h10) / n;
    return report;
}

void write_report_tsv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out.precision(9);
    out << "mrr\thits1\thits3\thits10\tnum_records\n";
    out << report.mrr << '\t' << report.hits1 << '\t' << report.hits3 << '\t' << report.hits10
        << '\t' << report.num_records() << '\n';
}

void write_report_kv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out.precision(9);
    out << "mrr\t" << report.mrr << '\n';
    out << "hits1\t" << report.hits1 << '\n';
    out << "hits3\t" << report.hits3 << '\n';
    out << "hits10\t" << report.hits10 << '\n';
    out << "num_records\t" << report.num_records() << '\n';
}

void write_rank_dump(const EvalReport& report, const Vocabulary& vocab,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out.precision(9);
    for (const RankRecord& rec : report.records) {
        out << vocab.entity_names[rec.triple.head] << '\t'
            << vocab.entity_names[rec.triple.tail] << '\t'
            << vocab.relation_names[rec.triple.relation] << '\t'
            << (rec.side == CorruptSide::head ? "head" : "tail") << '\t' << rec.rank << '\n';
    }
}

} // namespace mkge
