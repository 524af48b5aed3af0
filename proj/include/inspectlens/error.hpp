#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace inspectlens {

enum class ErrorKind {
    UndefinedMetric,
    EmptyInput,
    MissingCounts,
    OutOfDomain,
    InsufficientRows,
    ArityMismatch,
    RankDeficient,
    ShapeMismatch,
    UnsolvableParameter,
    EmptyGrid,
    InvalidRequest,
    ParseError,
    ValidationError,
    FixtureCorrupt,
    IoError,
    SchemaVersionMismatch,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::UndefinedMetric: return "UndefinedMetric";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::MissingCounts: return "MissingCounts";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::InsufficientRows: return "InsufficientRows";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::UnsolvableParameter: return "UnsolvableParameter";
        case ErrorKind::EmptyGrid: return "EmptyGrid";
        case ErrorKind::InvalidRequest: return "InvalidRequest";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::FixtureCorrupt: return "FixtureCorrupt";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    }
    return "Unknown";
}

/// Base of every exception thrown by the library. The kind is the
/// machine-readable class surfaced by the CLI exit codes and the service.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InsufficientRowsError : public Error {
public:
    InsufficientRowsError(std::size_t required, std::size_t provided, const std::string& what)
        : Error(ErrorKind::InsufficientRows,
                what + ": requires at least " + std::to_string(required) + " rows, got " +
                    std::to_string(provided)),
          required_(required),
          provided_(provided) {}

    std::size_t required() const noexcept { return required_; }
    std::size_t provided() const noexcept { return provided_; }

private:
    std::size_t required_;
    std::size_t provided_;
};

class RankDeficientError : public Error {
public:
    RankDeficientError(std::size_t rank, std::size_t columns, std::string offending_column)
        : Error(ErrorKind::RankDeficient,
                "design matrix is rank deficient: rank " + std::to_string(rank) + " of " +
                    std::to_string(columns) + " columns; column '" + offending_column +
                    "' is linearly dependent on the others"),
          rank_(rank),
          offending_column_(std::move(offending_column)) {}

    std::size_t rank() const noexcept { return rank_; }
    const std::string& offending_column() const noexcept { return offending_column_; }

private:
    std::size_t rank_;
    std::string offending_column_;
};

/// One invariant breach found while loading a file. Row is 1-based and
/// counts the header line for CSV input; 0 means "not row-addressable".
struct Violation {
    std::size_t row = 0;
    std::string field;
    std::string message;
};

inline std::string describe(const Violation& v) {
    std::string out;
    if (v.row != 0) out += "row " + std::to_string(v.row) + ": ";
    if (!v.field.empty()) out += v.field + ": ";
    return out + v.message;
}

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(ErrorKind::ValidationError, summarize(violations)),
          violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& violations) {
        std::string out = std::to_string(violations.size()) + " validation error(s)";
        for (const auto& v : violations) out += "; " + describe(v);
        return out;
    }

    std::vector<Violation> violations_;
};

}  // namespace inspectlens
