#include "retro/errors.hpp"

#include <sstream>

namespace retro {

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

NonHermitianInput::NonHermitianInput(double residual, double tolerance)
    : InputError("matrix is not Hermitian: residual " + sci(residual) + " exceeds " + sci(tolerance)),
      residual_(residual) {}

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual,
                                     const std::string& what)
    : InputError("dimension mismatch in " + what + ": expected " + std::to_string(expected) +
                 ", got " + std::to_string(actual)) {}

std::string Violation::describe() const {
    std::ostringstream os;
    os << subject << ": " << invariant << " (residual " << sci(residual) << ", tolerance "
       << sci(tolerance) << ")";
    return os.str();
}

void ValidationReport::add(std::string invariant, std::string subject, double residual,
                           double tolerance) {
    violations.push_back({std::move(invariant), std::move(subject), residual, tolerance});
}

std::string ValidationReport::describe() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.describe();
    }
    return out;
}

ValidationError::ValidationError(ValidationReport report)
    : InputError("validation failed: " + report.describe()), report_(std::move(report)) {}

SingularOperator::SingularOperator(double min_eigenvalue, double floor)
    : NumericError("singular operator: minimum eigenvalue " + sci(min_eigenvalue) +
                   " is below " + sci(floor)),
      min_eigenvalue_(min_eigenvalue) {}

ZeroProbabilityOutcome::ZeroProbabilityOutcome(std::size_t outcome, double probability)
    : NumericError("outcome " + std::to_string(outcome) + " has probability " + sci(probability) +
                   "; cannot condition on it"),
      outcome_(outcome),
      probability_(probability) {}

}  // namespace retro
