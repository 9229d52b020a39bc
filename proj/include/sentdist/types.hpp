#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sentdist {

enum class Sentiment : int { Negative = 0, Positive = 1 };

// One raw corpus row after label mapping. raw_text is the untouched text field.
struct Document {
    std::uint64_t id = 0;
    Sentiment label = Sentiment::Negative;
    std::string raw_text;
};

using TokenList = std::vector<std::string>;

// Fixed-length dense feature vector. Unit L2 norm unless all-zero.
using EmbeddingVector = std::vector<double>;

struct LabeledExample {
    EmbeddingVector features;
    int label = 0;  // 0 = negative, 1 = positive
};

// Bad input data or unusable external file content.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config file or override rejected. line is 1-based, 0 when not file-based.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string msg, int line = 0)
        : std::runtime_error(std::move(msg)), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// A caller broke a documented precondition or an internal invariant failed.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw ContractViolation(what);
}

}  // namespace sentdist
