#pragma once

#include <stdexcept>
#include <string>

namespace sfde {

/// Argument outside the mathematical domain of an operation (e.g. H >= 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Structurally invalid input: mismatched grid sizes, empty samples, M < 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The statistics cannot be inverted (nonpositive denominator, all modes rejected).
class InversionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration text is malformed or fails validation.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace sfde
