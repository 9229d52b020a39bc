#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sentdist/types.hpp"

namespace sentdist {

// Deterministic synthetic corpus: two sentiment lexicons with Gaussian
// per-document occupancy, filler vocabulary, light cross-class noise, and
// tweet-style surface clutter (mentions, tags, punctuation, mixed case).
// Linearly separable enough for a near-perfect validation accuracy at the
// default hyperparameters.
struct SyntheticSpec {
    std::size_t count = 20000;       // polar documents (half positive)
    std::size_t neutral_count = 0;   // extra label-2 rows, CSV output only
    std::uint64_t seed = 2009;
};

std::vector<Document> make_synthetic_documents(const SyntheticSpec& spec);

// Six quoted comma-separated fields per row, label first, text last.
// Neutral rows are interleaved deterministically.
void write_synthetic_csv(const std::filesystem::path& path, const SyntheticSpec& spec);

}  // namespace sentdist
