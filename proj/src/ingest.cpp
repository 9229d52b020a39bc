#include "sentdist/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "sentdist/text.hpp"

namespace sentdist {

namespace {

// Replaces bytes that are not part of a valid UTF-8 sequence with spaces.
// Keeps valid multi-byte sequences untouched.
void scrub_invalid_utf8(std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xe0) == 0xc0 && c >= 0xc2) len = 2;
        else if ((c & 0xf0) == 0xe0) len = 3;
        else if ((c & 0xf8) == 0xf0 && c <= 0xf4) len = 4;
        else {
            s[i++] = ' ';
            continue;
        }
        if (i + len > s.size()) {
            s[i++] = ' ';
            continue;
        }
        bool ok = true;
        for (std::size_t j = 1; j < len; ++j) {
            if ((static_cast<unsigned char>(s[i + j]) & 0xc0) != 0x80) ok = false;
        }
        if (!ok) {
            s[i++] = ' ';
            continue;
        }
        i += len;
    }
}

}  // namespace

CsvReader::CsvReader(const std::filesystem::path& path, CsvSchema schema)
    : in_(path, std::ios::binary), schema_(std::move(schema)) {
    if (!in_) throw IoError("cannot open input file: " + path.string());
}

// Reads one CSV record. Fields may be quoted; quoted fields can contain the
// delimiter, doubled quotes and newlines. Returns false at end of input.
// An unterminated quote marks the record malformed.
bool CsvReader::read_record(std::vector<std::string>& fields, bool& malformed) {
    fields.clear();
    malformed = false;
    int ci = in_.get();
    if (ci == std::char_traits<char>::eof()) return false;

    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    while (true) {
        if (ci == std::char_traits<char>::eof()) {
            if (in_quotes) malformed = true;
            fields.push_back(std::move(field));
            return true;
        }
        char c = static_cast<char>(ci);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty() && !quoted_field) {
            in_quotes = true;
            quoted_field = true;
        } else if (c == schema_.delimiter) {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
        ci = in_.get();
    }
}

std::optional<Document> CsvReader::next() {
    std::vector<std::string> fields;
    bool malformed = false;
    while (read_record(fields, malformed)) {
        if (malformed) {
            ++counts_.malformed;
            continue;
        }
        // A lone empty field is a blank line, not a data row.
        if (fields.size() == 1 && fields[0].empty()) continue;
        std::size_t needed = std::max(schema_.label_column, schema_.text_column) + 1;
        if (fields.size() < needed) {
            ++counts_.malformed;
            continue;
        }
        const std::string& label = fields[schema_.label_column];
        Sentiment sentiment;
        if (label == schema_.negative_value) {
            sentiment = Sentiment::Negative;
        } else if (label == schema_.positive_value) {
            sentiment = Sentiment::Positive;
        } else if (label == schema_.neutral_value) {
            ++counts_.dropped_neutral;
            continue;
        } else {
            ++counts_.malformed;
            continue;
        }
        Document doc;
        doc.id = next_id_++;
        doc.label = sentiment;
        doc.raw_text = std::move(fields[schema_.text_column]);
        if (schema_.encoding == "utf8-lossy") scrub_invalid_utf8(doc.raw_text);
        ++counts_.retained;
        return doc;
    }
    return std::nullopt;
}

std::vector<Document> read_csv(const std::filesystem::path& path, const CsvSchema& schema,
                               IngestCounts* counts) {
    CsvReader reader(path, schema);
    std::vector<Document> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    if (counts) *counts = reader.counts();
    return docs;
}

TokenList preprocess(std::string_view raw_text) {
    TokenList out;
    std::string cur;
    for (char raw : raw_text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

void EmbedderConfig::validate() const {
    if (dimension < 1) throw ConfigError("embedder.dimension must be >= 1");
    if (ngram_orders.empty()) throw ConfigError("embedder.ngram_orders must not be empty");
    std::unordered_set<int> seen;
    for (int n : ngram_orders) {
        if (n < 1) throw ConfigError("embedder.ngram_orders entries must be >= 1");
        if (!seen.insert(n).second) throw ConfigError("embedder.ngram_orders entries must be unique");
    }
}

namespace {

inline std::uint64_t avalanche64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded FNV-1a over the n-gram tokens with a separator byte, then an
// avalanche finalizer so that index and sign bits are independent of input
// structure. Tokens are [a-z0-9]+ after preprocessing, so the separator
// cannot collide with token content.
inline std::uint64_t hash_ngram(std::uint64_t seed, const TokenList& tokens, std::size_t begin,
                                std::size_t order) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
    for (std::size_t t = 0; t < order; ++t) {
        const std::string& tok = tokens[begin + t];
        for (unsigned char c : tok) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    }
    return avalanche64(h);
}

}  // namespace

EmbeddingVector embed(const TokenList& tokens, const EmbedderConfig& cfg) {
    cfg.validate();
    EmbeddingVector v(cfg.dimension, 0.0);
    if (tokens.empty()) return v;
    for (int order : cfg.ngram_orders) {
        std::size_t n = static_cast<std::size_t>(order);
        if (tokens.size() < n) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::uint64_t h = hash_ngram(cfg.hash_seed, tokens, i, n);
            std::size_t idx = static_cast<std::size_t>((h >> 1) % cfg.dimension);
            v[idx] += (h & 1) ? 1.0 : -1.0;
        }
    }
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

void write_embeddings(const std::filesystem::path& path, std::span<const LabeledExample> examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open embeddings file for writing: " + path.string());
    std::size_t dim = examples.empty() ? 0 : examples[0].features.size();
    out << "dim=" << dim << '\n';
    for (const LabeledExample& ex : examples) {
        require(ex.features.size() == dim, "write_embeddings: inconsistent dimensions");
        out << ex.label;
        for (double x : ex.features) out << ',' << format_double(x);
        out << '\n';
    }
    if (!out.flush()) throw IoError("failed writing embeddings file: " + path.string());
}

std::vector<LabeledExample> load_embeddings(const std::filesystem::path& path,
                                            std::size_t expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embeddings file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("embeddings file is empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("dim=", 0) != 0) {
        throw DataError("embeddings file missing dim= header: " + path.string());
    }
    std::uint64_t dim = 0;
    if (!parse_u64(std::string_view(line).substr(4), dim) || dim < 1) {
        throw DataError("embeddings file has invalid dim= header: " + path.string());
    }
    if (dim != expected_dim) {
        throw DataError("embedding dimension mismatch at record 0: file has dim=" +
                        std::to_string(dim) + ", expected dim=" + std::to_string(expected_dim));
    }

    std::vector<LabeledExample> examples;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        LabeledExample ex;
        ex.features.reserve(dim);
        std::string_view rest(line);
        std::size_t field = 0;
        while (true) {
            std::size_t comma = rest.find(',');
            std::string_view piece = rest.substr(0, comma);
            if (field == 0) {
                std::int64_t label = 0;
                if (!parse_i64(piece, label) || (label != 0 && label != 1)) {
                    throw DataError("bad label at record " + std::to_string(record));
                }
                ex.label = static_cast<int>(label);
            } else {
                double value = 0.0;
                if (!parse_double(piece, value)) {
                    throw DataError("bad value at record " + std::to_string(record));
                }
                ex.features.push_back(value);
            }
            ++field;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (ex.features.size() != dim) {
            throw DataError("embedding dimension mismatch at record " + std::to_string(record) +
                            ": got " + std::to_string(ex.features.size()) + " values, expected " +
                            std::to_string(dim));
        }
        examples.push_back(std::move(ex));
        ++record;
    }
    return examples;
}

}  // namespace sentdist
