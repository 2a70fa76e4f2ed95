#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace warpgeo {

// Base of every error raised by the library. Each error carries a short kind
// tag and a list of named numeric fields so front ends can serialize the
// payload without knowing the concrete type.
class Error : public std::runtime_error {
public:
    using Field = std::pair<std::string, double>;

    Error(std::string kind, const std::string& message, std::vector<Field> fields = {})
        : std::runtime_error(message), kind_(std::move(kind)), fields_(std::move(fields)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::vector<Field>& fields() const noexcept { return fields_; }

    // Validation-type errors map to CLI exit code 2, numerical ones to 3.
    virtual bool is_validation() const noexcept { return false; }

private:
    std::string kind_;
    std::vector<Field> fields_;
};

// Malformed input: dimension mismatch, non-orthonormal basis, grid mismatch...
class InputError : public Error {
public:
    explicit InputError(const std::string& message, std::vector<Field> fields = {})
        : Error("input", message, std::move(fields)) {}
    bool is_validation() const noexcept override { return true; }
};

// Warp parameter r outside the admissible range (k1, inf).
class ParameterError : public Error {
public:
    ParameterError(const std::string& message, double r, double k1)
        : Error("parameter", message, {{"r", r}, {"k1", k1}}) {}
    bool is_validation() const noexcept override { return true; }
};

// Malformed or incomplete task configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
    bool is_validation() const noexcept override { return true; }
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message, std::vector<Field> fields = {})
        : Error("numerical", message, std::move(fields)) {}
};

// A curve left the chart domain. `parameter` is the last accepted parameter.
class DomainError : public Error {
public:
    DomainError(const std::string& message, double parameter)
        : Error("domain", message, {{"exit_parameter", parameter}}), parameter_(parameter) {}
    double exit_parameter() const noexcept { return parameter_; }

private:
    double parameter_;
};

// Initial data violates the compatibility condition between the two factors.
class ConstructionError : public Error {
public:
    ConstructionError(const std::string& message, double defect)
        : Error("construction", message, {{"defect", defect}}), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class ShootingError : public Error {
public:
    ShootingError(const std::string& message, double best_residual, int iterations)
        : Error("shooting", message,
                {{"best_residual", best_residual}, {"iterations", static_cast<double>(iterations)}}),
          best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

// No bracket for beta(r) = beta0 on the scanned r range.
class ConnectionError : public Error {
public:
    ConnectionError(const std::string& message, double r_lo, double r_hi, double beta_min,
                    double beta_max, double target)
        : Error("connection", message,
                {{"r_lo", r_lo}, {"r_hi", r_hi}, {"beta_min", beta_min}, {"beta_max", beta_max},
                 {"target_beta", target}}) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message, std::vector<Field> fields = {})
        : Error("precondition", message, std::move(fields)) {}
};

}  // namespace warpgeo
