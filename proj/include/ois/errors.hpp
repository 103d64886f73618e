#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ois {

/// Base class for all library-specific errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration (bad flag, bad JSON field, ...).
/// `field()` names the offending field as a dotted path when known.
class config_error : public error {
public:
    explicit config_error(const std::string& message, std::string field = {})
        : error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical routine failed to converge or produced an unusable result.
class numerical_error : public error {
public:
    using error::error;
};

/// Two constellation levels were quantized to the same grid point.
class collision_error : public error {
public:
    collision_error(int index_a, int index_b, std::uint64_t grid_value)
        : error("quantization collision: levels " + std::to_string(index_a) +
                " and " + std::to_string(index_b) +
                " both map to grid point " + std::to_string(grid_value) +
                " (increase extra bits)"),
          index_a_(index_a), index_b_(index_b), grid_value_(grid_value) {}

    int index_a() const noexcept { return index_a_; }
    int index_b() const noexcept { return index_b_; }
    std::uint64_t grid_value() const noexcept { return grid_value_; }

private:
    int index_a_;
    int index_b_;
    std::uint64_t grid_value_;
};

/// Malformed input file. `line()` is the 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& message, long line)
        : error("line " + std::to_string(line) + ": " + message), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace ois
