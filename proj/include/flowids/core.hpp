#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowids {

enum class Category : std::uint8_t { normal, dos, probe, u2r, r2l, unknown };

/// Name used in files and reports ("Normal", "DoS", ...).
std::string_view category_name(Category c);

/// Inverse of category_name, case-insensitive. Throws std::invalid_argument.
Category parse_category(std::string_view name);

inline bool is_attack(Category c) { return c != Category::normal; }

/// Output of a single binary layer. `positive` is the layer's target class.
enum class Vote : std::int8_t { negative = -1, positive = 1 };

inline double to_target(Vote v) { return static_cast<double>(static_cast<std::int8_t>(v)); }

/// Malformed input data; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Invalid hyperparameters or inconsistent inputs to a training routine.
class ConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model file is corrupt, truncated, or of an unsupported version.
class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic 64-bit generator (splitmix64 seeding, xoshiro256** stream).
/// Used instead of <random> distributions so that models are bit-identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

private:
    std::uint64_t s_[4];
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Whole-string parse; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view s);

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for a named sub-stream of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace flowids
