#pragma once

#include <string>

#include "scoring.hpp"

namespace mkge {

/// Writes prefix.json (metadata) and prefix.bin (32-bit little-endian reals,
/// entity block then relation block, row-major [item][embedding][dim]).
void save_checkpoint(const Model& model, const std::string& prefix);

Model load_checkpoint(const std::string& prefix);

/// Tab-separated text, one item per line: name then the n*dim concatenated
/// values. Entity block first, then relations.
void write_embeddings_tsv(const Model& model, const Vocabulary& vocab,
                          const std::string& path);

} // namespace mkge
