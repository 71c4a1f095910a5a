#include "dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace mkge {

namespace {

// Packed keys reserve 24 bits per entity and 16 per relation.
constexpr std::size_t kMaxEntities = 1u << 24;
constexpr std::size_t kMaxRelations = 1u << 16;

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open " + path + " for reading");
    }
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    }
    return out;
}

} // namespace

ColumnOrder column_order_from_name(const std::string& name) {
    if (name == "hrt") return ColumnOrder::hrt;
    if (name == "htr") return ColumnOrder::htr;
    throw Error(ErrorCode::config, "unknown column order '" + name + "' (valid: hrt, htr)");
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "valid") return Split::valid;
    if (name == "test") return Split::test;
    throw Error(ErrorCode::config, "unknown split '" + name + "' (valid: train, valid, test)");
}

const char* split_name(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        default: return "test";
    }
}

std::uint32_t Vocabulary::intern_entity(const std::string& name) {
    auto it = entity_index.find(name);
    if (it != entity_index.end()) return it->second;
    auto id = static_cast<std::uint32_t>(entity_names.size());
    entity_names.push_back(name);
    entity_index.emplace(name, id);
    return id;
}

std::uint32_t Vocabulary::intern_relation(const std::string& name) {
    auto it = relation_index.find(name);
    if (it != relation_index.end()) return it->second;
    auto id = static_cast<std::uint32_t>(relation_names.size());
    relation_names.push_back(name);
    relation_index.emplace(name, id);
    return id;
}

std::int64_t Vocabulary::find_entity(const std::string& name) const {
    auto it = entity_index.find(name);
    return it == entity_index.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::int64_t Vocabulary::find_relation(const std::string& name) const {
    auto it = relation_index.find(name);
    return it == relation_index.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<RawTriple> parse_triples(const std::string& path, ColumnOrder order) {
    std::ifstream in = open_for_read(path);
    std::vector<RawTriple> triples;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string fields[3];
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            std::string field = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
            if (count < 3) fields[count] = std::move(field);
            ++count;
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (count != 3) {
            std::ostringstream msg;
            msg << path << ": expected 3 fields, got " << count << " at line " << line_number;
            throw Error(ErrorCode::parse, msg.str());
        }
        if (order == ColumnOrder::hrt) {
            triples.push_back(RawTriple{fields[0], fields[1], fields[2]});
        } else {
            triples.push_back(RawTriple{fields[0], fields[2], fields[1]});
        }
    }
    return triples;
}

KgDataset build_dataset(const std::vector<RawTriple>& train,
                        const std::vector<RawTriple>& valid,
                        const std::vector<RawTriple>& test) {
    KgDataset ds;

    auto encode = [&ds](const std::vector<RawTriple>& raw, std::vector<Triple>& out) {
        out.reserve(raw.size());
        for (const RawTriple& rt : raw) {
            Triple t;
            t.head = ds.vocab.intern_entity(rt.head);
            t.tail = ds.vocab.intern_entity(rt.tail);
            t.relation = ds.vocab.intern_relation(rt.relation);
            out.push_back(t);
        }
    };

    encode(train, ds.train);
    const std::size_t entities_after_train = ds.vocab.num_entities();
    const std::size_t relations_after_train = ds.vocab.num_relations();
    encode(valid, ds.valid);
    encode(test, ds.test);

    if (ds.vocab.num_entities() > entities_after_train ||
        ds.vocab.num_relations() > relations_after_train) {
        std::ostringstream msg;
        msg << "vocabulary grew beyond the training split ("
            << ds.vocab.num_entities() - entities_after_train << " entities, "
            << ds.vocab.num_relations() - relations_after_train
            << " relations first seen in valid/test); their embeddings will be untrained";
        ds.warnings.push_back(msg.str());
    }

    if (ds.vocab.num_entities() > kMaxEntities) {
        throw Error(ErrorCode::config, "too many entities for the packed filter index");
    }
    if (ds.vocab.num_relations() > kMaxRelations) {
        throw Error(ErrorCode::config, "too many relations for the packed filter index");
    }

    for (const auto* split : {&ds.train, &ds.valid, &ds.test}) {
        for (const Triple& t : *split) ds.filter_index.insert(KgDataset::pack(t));
    }
    return ds;
}

namespace {

void write_names(const std::string& path, const std::vector<std::string>& names) {
    std::ofstream out = open_for_write(path);
    for (const std::string& name : names) out << name << '\n';
}

std::vector<std::string> read_names(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        names.push_back(line);
    }
    return names;
}

void write_split(const std::string& path, const std::vector<Triple>& triples) {
    std::ofstream out = open_for_write(path);
    for (const Triple& t : triples) {
        out << t.head << '\t' << t.tail << '\t' << t.relation << '\n';
    }
}

std::vector<Triple> read_split(const std::string& path, std::size_t num_entities,
                               std::size_t num_relations) {
    std::ifstream in = open_for_read(path);
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint64_t h = 0, t = 0, r = 0;
        if (!(ss >> h >> t >> r) || h >= num_entities || t >= num_entities || r >= num_relations) {
            std::ostringstream msg;
            msg << path << ": bad encoded triple at line " << line_number;
            throw Error(ErrorCode::parse, msg.str());
        }
        triples.push_back(Triple{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(t),
                                 static_cast<std::uint32_t>(r)});
    }
    return triples;
}

} // namespace

void save_dataset(const KgDataset& dataset, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_names(dir + "/entities.txt", dataset.vocab.entity_names);
    write_names(dir + "/relations.txt", dataset.vocab.relation_names);
    write_split(dir + "/train.txt", dataset.train);
    write_split(dir + "/valid.txt", dataset.valid);
    write_split(dir + "/test.txt", dataset.test);
    if (!dataset.warnings.empty()) write_names(dir + "/warnings.txt", dataset.warnings);
}

KgDataset load_dataset(const std::string& dir) {
    KgDataset ds;
    ds.vocab.entity_names = read_names(dir + "/entities.txt");
    ds.vocab.relation_names = read_names(dir + "/relations.txt");
    for (std::uint32_t i = 0; i < ds.vocab.entity_names.size(); ++i) {
        ds.vocab.entity_index.emplace(ds.vocab.entity_names[i], i);
    }
    for (std::uint32_t i = 0; i < ds.vocab.relation_names.size(); ++i) {
        ds.vocab.relation_index.emplace(ds.vocab.relation_names[i], i);
    }
    const std::size_t ne = ds.vocab.num_entities();
    const std::size_t nr = ds.vocab.num_relations();
    ds.train = read_split(dir + "/train.txt", ne, nr);
    ds.valid = read_split(dir + "/valid.txt", ne, nr);
    ds.test = read_split(dir + "/test.txt", ne, nr);
    for (const auto* split : {&ds.train, &ds.valid, &ds.test}) {
        for (const Triple& t : *split) ds.filter_index.insert(KgDataset::pack(t));
    }
    if (std::filesystem::exists(dir + "/warnings.txt")) {
        ds.warnings = read_names(dir + "/warnings.txt");
    }
    return ds;
}

} // namespace mkge
