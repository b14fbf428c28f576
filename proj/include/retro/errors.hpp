#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace retro {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed files, invalid parameters, broken invariants
/// on supplied data. The CLI maps these to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numeric precondition or postcondition failed on otherwise valid input.
/// The CLI maps these to exit code 2.
class NumericError : public Error {
public:
    using Error::Error;
};

class NonHermitianInput : public InputError {
public:
    NonHermitianInput(double residual, double tolerance);
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class DimensionMismatch : public InputError {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& what);
};

class InvalidParameter : public InputError {
public:
    using InputError::InputError;
};

/// One broken invariant, with the measured residual and the tolerance it exceeded.
struct Violation {
    std::string invariant;
    std::string subject;
    double residual = 0.0;
    double tolerance = 0.0;

    std::string describe() const;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    void add(std::string invariant, std::string subject, double residual, double tolerance);
    std::string describe() const;
};

class ValidationError : public InputError {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// A pole function was requested on an operator with an eigenvalue below the
/// admissible floor (rank-deficient source, coinciding UD states).
class SingularOperator : public NumericError {
public:
    SingularOperator(double min_eigenvalue, double floor);
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Conditioning on a detector outcome whose probability is at or below the floor.
class ZeroProbabilityOutcome : public NumericError {
public:
    ZeroProbabilityOutcome(std::size_t outcome, double probability);
    std::size_t outcome() const noexcept { return outcome_; }
    double probability() const noexcept { return probability_; }

private:
    std::size_t outcome_;
    double probability_;
};

class NumericIntegrityError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace retro
