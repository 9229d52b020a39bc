#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentdist/types.hpp"

namespace sentdist {

// Column layout and label mapping for a labeled-tweet CSV. Defaults match
// the classic six-field layout: label first, text last.
struct CsvSchema {
    std::size_t label_column = 0;
    std::size_t text_column = 5;
    char delimiter = ',';
    std::string negative_value = "0";
    std::string positive_value = "4";
    std::string neutral_value = "2";
    // "utf8-lossy" replaces invalid UTF-8 bytes with spaces; "latin1" keeps
    // bytes as-is (they cannot survive tokenization anyway).
    std::string encoding = "utf8-lossy";
};

struct IngestCounts {
    std::uint64_t retained = 0;
    std::uint64_t dropped_neutral = 0;
    std::uint64_t malformed = 0;
};

// Streaming CSV reader with quote-aware record splitting (quoted fields may
// contain the delimiter, doubled quotes and newlines). Rows that cannot be
// parsed, have too few fields or carry an unknown label are counted as
// malformed and skipped; neutral rows are counted and skipped.
class CsvReader {
public:
    CsvReader(const std::filesystem::path& path, CsvSchema schema);

    // Next retained document, or nullopt at end of input.
    std::optional<Document> next();

    const IngestCounts& counts() const { return counts_; }

private:
    bool read_record(std::vector<std::string>& fields, bool& malformed);

    std::ifstream in_;
    CsvSchema schema_;
    IngestCounts counts_;
    std::uint64_t next_id_ = 0;
};

// Reads the whole file through CsvReader.
std::vector<Document> read_csv(const std::filesystem::path& path, const CsvSchema& schema,
                               IngestCounts* counts = nullptr);

// Lowercases ASCII letters, maps every byte outside [a-z0-9] to a space and
// splits on whitespace runs. Idempotent over its own output.
TokenList preprocess(std::string_view raw_text);

struct EmbedderConfig {
    std::size_t dimension = 256;
    std::vector<int> ngram_orders = {1, 2};
    std::uint64_t hash_seed = 42;

    void validate() const;
};

// Seeded signed feature hashing over word n-grams, L2-normalized. An empty
// token list maps to the zero vector; otherwise the result has unit norm.
EmbeddingVector embed(const TokenList& tokens, const EmbedderConfig& cfg);

// Embedding file format: header "dim=<d>", then one "label,v1,...,vd" line
// per example, decimal text.
void write_embeddings(const std::filesystem::path& path, std::span<const LabeledExample> examples);
std::vector<LabeledExample> load_embeddings(const std::filesystem::path& path,
                                            std::size_t expected_dim);

}  // namespace sentdist
