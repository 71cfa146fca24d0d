#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gapestim {

// Error categories drive CLI exit codes: input/validation problems exit 3,
// runtime/environment problems exit 1.
enum class ErrorCategory { validation, runtime };

class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorCategory category, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)), category_(category) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string kind_;
    ErrorCategory category_;
};

struct InvalidParameterError : Error {
    explicit InvalidParameterError(const std::string& msg)
        : Error("InvalidParameter", ErrorCategory::validation, msg) {}
};

struct NotSymmetricError : Error {
    explicit NotSymmetricError(const std::string& msg)
        : Error("NotSymmetric", ErrorCategory::validation, msg) {}
};

struct NoConvergenceError : Error {
    explicit NoConvergenceError(const std::string& msg)
        : Error("NoConvergence", ErrorCategory::runtime, msg) {}
};

struct NotStochasticError : Error {
    explicit NotStochasticError(const std::string& msg)
        : Error("NotStochastic", ErrorCategory::validation, msg) {}
};

struct ReducibleError : Error {
    explicit ReducibleError(const std::string& msg)
        : Error("Reducible", ErrorCategory::validation, msg) {}
};

struct TooShortError : Error {
    explicit TooShortError(const std::string& msg)
        : Error("TooShort", ErrorCategory::validation, msg) {}
};

struct DegenerateDataError : Error {
    explicit DegenerateDataError(const std::string& msg)
        : Error("DegenerateData", ErrorCategory::validation, msg) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& msg)
        : Error("FormatError", ErrorCategory::validation, msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg)
        : Error("ValidationError", ErrorCategory::validation, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg)
        : Error("IoError", ErrorCategory::runtime, msg) {}
};

} // namespace gapestim
