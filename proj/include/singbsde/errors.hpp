#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace singbsde {

// Invalid configuration value. `field()` names the offending key.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class RegressionError : public std::runtime_error {
public:
    RegressionError(std::size_t time_index, const std::string& message)
        : std::runtime_error(message), time_index_(time_index) {}

    [[nodiscard]] std::size_t time_index() const noexcept { return time_index_; }

private:
    std::size_t time_index_;
};

// Picard iteration failed to settle, or the exponential term overflowed.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& message, std::vector<double> residuals)
        : std::runtime_error(message), residuals_(std::move(residuals)) {}

    [[nodiscard]] const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace singbsde
