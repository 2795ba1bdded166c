#pragma once

#include <stdexcept>
#include <string>

namespace stablekernel {

/// Process exit codes used by the command line driver.
enum class ExitCode : int { pass = 0, check_failed = 1, config_error = 2, convergence_failure = 3 };

class Error : public std::runtime_error {
public:
    Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }
    virtual const char* kind() const noexcept { return "error"; }

private:
    ExitCode code_;
};

/// Invalid configuration or unresolved discretisation.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, ExitCode::config_error) {}
    const char* kind() const noexcept override { return "config_error"; }
};

/// Argument outside the range where the measured inequality is stated.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what, ExitCode::config_error) {}
    const char* kind() const noexcept override { return "domain_error"; }
};

/// Kernel or drift producing values inconsistent with the declared model.
class ModelViolation : public Error {
public:
    explicit ModelViolation(const std::string& what) : Error(what, ExitCode::check_failed) {}
    const char* kind() const noexcept override { return "model_violation"; }
};

/// Quadrature that could not reach its error budget.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what, ExitCode::check_failed), achieved_(achieved) {}
    double achieved_error() const noexcept { return achieved_; }
    const char* kind() const noexcept override { return "quadrature_error"; }

private:
    double achieved_;
};

/// Series that did not contract within its term budget.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what, ExitCode::convergence_failure) {}
    const char* kind() const noexcept override { return "convergence_failure"; }
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what, ExitCode::config_error) {}
    const char* kind() const noexcept override { return "io_error"; }
};

}  // namespace stablekernel
