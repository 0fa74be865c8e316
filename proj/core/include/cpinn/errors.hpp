#pragma once

#include <stdexcept>
#include <string>

namespace cpinn {

// Bad configuration values or invalid command usage. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed, missing, or inconsistent data artifacts (datasets, checkpoints,
// sensor series). CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Shape/arity mismatches between networks and their inputs or files.
// CLI exit code 3.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values encountered during evaluation or training; carries the
// stage that produced them. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(stage) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace cpinn
