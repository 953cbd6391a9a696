#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crashbench {

// Error classes surface as distinct CLI exit codes.
enum class ErrorCategory {
    Config = 2,
    Parse = 3,
    DataGap = 4,
    Io = 5,
    InvalidInput = 6,
};

std::string_view to_string(ErrorCategory c);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorCategory::Parse, what) {}
};

struct DataGapError : Error {
    explicit DataGapError(const std::string& what) : Error(ErrorCategory::DataGap, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

// Precondition violations on public operations (out-of-range coordinates,
// non-positive exposure, successes > trials, ...).
struct InvalidInput : Error {
    explicit InvalidInput(const std::string& what) : Error(ErrorCategory::InvalidInput, what) {}
};

} // namespace crashbench
