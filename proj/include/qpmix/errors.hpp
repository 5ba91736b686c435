#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpmix {

// Exit-code category. Values are the CLI's process exit codes.
enum class ErrorKind : int { Config = 1, Data = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Graph sampling.
class InfeasibleDegreeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class RetryExhaustedError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Parameter outside its admissible range (e.g. mean correlation).
class RangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, double max_violation)
        : NumericalError(what), max_violation_(max_violation) {}
    double max_violation() const noexcept { return max_violation_; }

private:
    double max_violation_;
};

// A conditional-independence test cannot be carried out for this conditioning
// set (singular statistics, empty cells, non-positive shape parameters).
class InfeasibleTestError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMatrixError : public InfeasibleTestError {
public:
    SingularMatrixError(const std::string& matrix, const std::string& context)
        : InfeasibleTestError("singular matrix " + matrix + (context.empty() ? "" : " (" + context + ")")),
          matrix_(matrix) {}
    const std::string& matrix() const noexcept { return matrix_; }

private:
    std::string matrix_;
};

class SampleSizeError : public InfeasibleTestError {
public:
    using InfeasibleTestError::InfeasibleTestError;
};

class EmptyCellError : public InfeasibleTestError {
public:
    using InfeasibleTestError::InfeasibleTestError;
};

class DiscretePairError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NoFeasibleSubsetError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionMismatchError : public DataError {
public:
    using DataError::DataError;
};

class EmptyTruthError : public DataError {
public:
    using DataError::DataError;
};

class EmptyTableError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public DataError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace qpmix
