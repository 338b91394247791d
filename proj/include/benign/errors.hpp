#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace benign {

/// Process exit codes shared by every CLI subcommand.
enum class ExitCode : int {
    ok = 0,
    check_failed = 1,
    config_error = 2,
    io_error = 3,
    numeric_error = 4,
};

/// Root of the error hierarchy. Each subclass carries the exit code the CLI
/// maps it to.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, ExitCode code)
        : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what)
        : Error("invalid argument: " + what, ExitCode::config_error) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what)
        : Error("config error: " + what, ExitCode::config_error) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what)
        : Error("io error: " + what, ExitCode::io_error) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what)
        : Error("numeric error: " + what, ExitCode::numeric_error) {}
};

/// A sample produced a NaN or infinity; `index` names the offending sample.
class NonFiniteValue : public NumericError {
public:
    NonFiniteValue(const std::string& where, std::size_t index)
        : NumericError(where + ": non-finite value at sample " + std::to_string(index)),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A series did not reach its tolerance within the iteration cap.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double partial_sum, std::size_t terms)
        : NumericError(what + " (partial sum " + std::to_string(partial_sum) + " after " +
                       std::to_string(terms) + " terms)"),
          partial_sum_(partial_sum),
          terms_(terms) {}
    double partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    std::size_t terms_;
};

class UnsupportedOrder : public Error {
public:
    explicit UnsupportedOrder(const std::string& what)
        : Error("unsupported order: " + what, ExitCode::config_error) {}
};

/// Training loss blew past the divergence guard.
class DivergenceError : public NumericError {
public:
    DivergenceError(std::size_t iteration, double risk)
        : NumericError("training diverged at iteration " + std::to_string(iteration) +
                       " (empirical risk " + std::to_string(risk) + ")"),
          iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("parse error at line " + std::to_string(line) + ": " + what,
                ExitCode::config_error),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what)
        : Error("format error: " + what, ExitCode::config_error) {}
};

}  // namespace benign
