#include "sentdist/text.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace sentdist {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int precision) {
    if (!std::isfinite(value)) return format_double(value);
    char buf[96];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
    if (res.ec != std::errc()) return format_double(value);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_u64(std::string_view text, std::uint64_t& out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_i64(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::uint64_t fnv1a_64(std::string_view bytes, std::uint64_t seed_basis) {
    std::uint64_t h = seed_basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_digest(std::string_view bytes) {
    static const char* kHex = "0123456789abcdef";
    std::uint64_t h = fnv1a_64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace sentdist
