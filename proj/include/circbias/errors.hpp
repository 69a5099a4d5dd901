#pragma once

/**
 * @file errors.hpp
 * @brief Exception types shared by every circbias module.
 *
 * Two families: input/validation problems (InvalidArgument) and numerical
 * failures that carry diagnostics (NumericalError). The CLI maps them to
 * exit codes 1 and 2 respectively.
 */

#include <stdexcept>
#include <string>

namespace circbias {

/// Rejected input: violated precondition, malformed file, unsupported value.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its stated accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::string diagnostics = {})
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

} // namespace circbias
