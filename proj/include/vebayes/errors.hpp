#pragma once

#include <stdexcept>
#include <string>

namespace vebayes {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative method failed to reach its tolerance within the iteration cap.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: inconsistent counts, improper posteriors, malformed files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ImproperPosteriorError : public ValidationError {
public:
    ImproperPosteriorError(int arm, const std::string& what)
        : ValidationError(what), arm_(arm) {}
    int arm() const noexcept { return arm_; }

private:
    int arm_;
};

class InsufficientSamplesError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace vebayes
