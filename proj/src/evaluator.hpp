#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "scoring.hpp"

namespace mkge {

struct RankRecord {
    Triple triple;
    CorruptSide side = CorruptSide::head;
    double rank = 0.0;
};

struct EvalReport {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    std::vector<RankRecord> records;

    std::size_t num_records() const { return records.size(); }
};

/// Filtered rank of the true entity when the given side of t is replaced by
/// every entity. Candidates forming a known-valid triple (train, valid, or
/// test) are excluded, except t itself. Ties with the true score take the
/// mid-rank: 1 + #above + #tied/2. scratch must hold num_entities values.
double filtered_rank(const MultiEmbeddingTable& table, const WeightVector& w,
                     const KgDataset& dataset, const Triple& t, CorruptSide side,
                     std::span<double> scratch);

/// Two rank records per triple (head then tail corruption), aggregated into
/// MRR and Hits@{1,3,10}. Deterministic: records follow split order and
/// metrics are reduced in that order regardless of worker count. MKGE_THREADS
/// caps the number of worker threads (default: hardware concurrency).
EvalReport evaluate(const Model& model, const KgDataset& dataset, Split split);

/// Metrics as one tab-separated header line plus one value line.
void write_report_tsv(const EvalReport& report, const std::string& path);

/// Machine-readable "key<TAB>value" lines: mrr, hits1, hits3, hits10,
/// num_records.
void write_report_kv(const EvalReport& report, const std::string& path);

/// One line per record: head, tail, relation (names), corrupted side, rank.
void write_rank_dump(const EvalReport& report, const Vocabulary& vocab,
                     const std::string& path);

} // namespace mkge
