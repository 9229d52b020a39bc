#pragma once

// Locale-independent numeric text and byte hashing. All file formats and
// fingerprints go through these so output bytes never depend on the host
// locale or printf implementation.

#include <cstdint>
#include <string>
#include <string_view>

namespace sentdist {

// Shortest decimal text that round-trips the double (std::to_chars).
std::string format_double(double value);

// Fixed-point with the given number of fractional digits, for tables.
std::string format_fixed(double value, int precision);

// Strict full-string parses; return false on trailing garbage or range error.
bool parse_double(std::string_view text, double& out);
bool parse_u64(std::string_view text, std::uint64_t& out);
bool parse_i64(std::string_view text, std::int64_t& out);

std::uint64_t fnv1a_64(std::string_view bytes, std::uint64_t seed_basis = 0xcbf29ce484222325ULL);

// 16 lowercase hex chars of fnv1a_64(bytes).
std::string hex_digest(std::string_view bytes);

}  // namespace sentdist
