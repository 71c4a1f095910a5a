#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "error.hpp"

namespace mkge {

// Column layout of triple files: head/relation/tail or head/tail/relation.
enum class ColumnOrder { hrt, htr };

ColumnOrder column_order_from_name(const std::string& name);

struct RawTriple {
    std::string head;
    std::string relation;
    std::string tail;
};

struct Triple {
    std::uint32_t head = 0;
    std::uint32_t tail = 0;
    std::uint32_t relation = 0;

    bool operator==(const Triple&) const = default;
};

enum class Split { train, valid, test };

Split split_from_name(const std::string& name);
const char* split_name(Split split);

// Dense 0-based name <-> index maps, stable across save/load.
struct Vocabulary {
    std::vector<std::string> entity_names;
    std::vector<std::string> relation_names;
    std::unordered_map<std::string, std::uint32_t> entity_index;
    std::unordered_map<std::string, std::uint32_t> relation_index;

    std::uint32_t intern_entity(const std::string& name);
    std::uint32_t intern_relation(const std::string& name);

    // -1 when absent.
    std::int64_t find_entity(const std::string& name) const;
    std::int64_t find_relation(const std::string& name) const;

    std::size_t num_entities() const { return entity_names.size(); }
    std::size_t num_relations() const { return relation_names.size(); }
};

struct KgDataset {
    Vocabulary vocab;
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;
    // Exact membership over train + valid + test, keyed on packed indices.
    std::unordered_set<std::uint64_t> filter_index;
    std::vector<std::string> warnings;

    static std::uint64_t pack(const Triple& t) {
        return (static_cast<std::uint64_t>(t.head) << 40) |
               (static_cast<std::uint64_t>(t.tail) << 16) |
               static_cast<std::uint64_t>(t.relation);
    }

    bool contains(const Triple& t) const {
        return filter_index.find(pack(t)) != filter_index.end();
    }

    const std::vector<Triple>& split(Split s) const {
        switch (s) {
            case Split::train: return train;
            case Split::valid: return valid;
            default: return test;
        }
    }
};

/// Reads one triple per line, exactly two tab separators, reordered to
/// (head, relation, tail). Empty lines are skipped.
std::vector<RawTriple> parse_triples(const std::string& path, ColumnOrder order);

/// Builds the vocabulary (first-appearance order, train scanned first),
/// encodes all splits, and fills the filter index. Names first seen in
/// valid/test are admitted with a warning.
KgDataset build_dataset(const std::vector<RawTriple>& train,
                        const std::vector<RawTriple>& valid,
                        const std::vector<RawTriple>& test);

/// Persists vocabulary files (one name per line, line number = index) and
/// encoded splits into dir, creating it if needed.
void save_dataset(const KgDataset& dataset, const std::string& dir);

KgDataset load_dataset(const std::string& dir);

} // namespace mkge
