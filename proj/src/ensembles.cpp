#include "retro/ensembles.hpp"

#include <cmath>
#include <string>

namespace retro {

using linalg::Complex;
using linalg::HermitianOperator;
using linalg::Matrix;

namespace {

std::string indexed(const char* name, std::size_t i) {
    return std::string(name) + "[" + std::to_string(i) + "]";
}

/// Hermiticity and PSD checks shared by states and POVM elements. Returns
/// false when the matrix is too broken to examine further.
bool check_positive_operator(const Matrix& m, const std::string& subject, ValidationReport& report) {
    if (!m.is_finite()) {
        report.add("entries are finite", subject, INFINITY, 0.0);
        return false;
    }
    const double herm = linalg::hermiticity_residual(m);
    const double herm_tol = linalg::kHermitianTol * std::max(1.0, linalg::max_abs(m));
    if (herm > herm_tol) {
        report.add("Hermitian", subject, herm, herm_tol);
        return false;
    }
    const double lo = linalg::min_eigenvalue(HermitianOperator(m));
    if (lo < -kStateTol) report.add("positive semidefinite", subject, -lo, kStateTol);
    return true;
}

void check_density(const Matrix& m, const std::string& subject, ValidationReport& report) {
    if (!check_positive_operator(m, subject, report)) return;
    const double tr = std::abs(m.trace() - Complex(1.0));
    if (tr > kStateTol) report.add("unit trace", subject, tr, kStateTol);
}

HermitianOperator checked_density(const Matrix& m) {
    ValidationReport report;
    check_density(m, "density operator", report);
    if (!report.ok()) throw ValidationError(std::move(report));
    return HermitianOperator(m);
}

}  // namespace

PureState::PureState(linalg::Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    ValidationReport report;
    if (amplitudes_.empty()) {
        report.add("dimension at least 1", "pure state", 0.0, 0.0);
        throw ValidationError(std::move(report));
    }
    const double n = linalg::norm(amplitudes_);
    if (!std::isfinite(n)) {
        report.add("amplitudes are finite", "pure state", INFINITY, 0.0);
    } else if (std::abs(n - 1.0) > kStateTol) {
        report.add("unit norm", "pure state", std::abs(n - 1.0), kStateTol);
    }
    if (!report.ok()) throw ValidationError(std::move(report));
}

PureState PureState::normalized(linalg::Vector amplitudes) {
    const double n = linalg::norm(amplitudes);
    if (!(n > 1e-300) || !std::isfinite(n)) throw InvalidParameter("cannot normalize a zero vector");
    return PureState(linalg::scaled(amplitudes, 1.0 / n));
}

DensityOperator PureState::density() const { return DensityOperator(projector()); }

DensityOperator::DensityOperator(const HermitianOperator& op) : op_(checked_density(op.matrix())) {}

DensityOperator::DensityOperator(const Matrix& m) : op_(checked_density(m)) {}

double DensityOperator::purity() const { return (matrix() * matrix()).trace().real(); }

ValidationReport validate_ensemble(std::span<const Matrix> states, std::span<const double> priors) {
    ValidationReport report;
    if (states.empty()) report.add("at least one state", "states", 0.0, 0.0);
    if (states.size() != priors.size())
        report.add("one prior per state", "priors",
                   std::abs(static_cast<double>(states.size()) - static_cast<double>(priors.size())),
                   0.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != states.front().dim()) {
            report.add("common dimension", indexed("states", i),
                       std::abs(static_cast<double>(states[i].dim()) -
                                static_cast<double>(states.front().dim())),
                       0.0);
            continue;
        }
        check_density(states[i], indexed("states", i), report);
    }
    double sum = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        if (!std::isfinite(priors[i])) {
            report.add("prior is finite", indexed("priors", i), INFINITY, 0.0);
            finite = false;
            continue;
        }
        if (priors[i] < 0.0) report.add("prior is non-negative", indexed("priors", i), -priors[i], 0.0);
        sum += priors[i];
    }
    if (finite && !priors.empty() && std::abs(sum - 1.0) > kPriorSumTol)
        report.add("sum(eta) = 1", "priors", std::abs(sum - 1.0), kPriorSumTol);
    return report;
}

ValidationReport validate_povm(std::span<const Matrix> elements) {
    ValidationReport report;
    if (elements.empty()) {
        report.add("at least one element", "elements", 0.0, 0.0);
        return report;
    }
    const std::size_t dim = elements.front().dim();
    bool comparable = true;
    for (std::size_t j = 0; j < elements.size(); ++j) {
        if (elements[j].dim() != dim) {
            report.add("common dimension", indexed("elements", j),
                       std::abs(static_cast<double>(elements[j].dim()) - static_cast<double>(dim)), 0.0);
            comparable = false;
            continue;
        }
        comparable = check_positive_operator(elements[j], indexed("elements", j), report) && comparable;
    }
    if (comparable) {
        Matrix sum(dim);
        for (const auto& e : elements) sum += e;
        const double residual = linalg::max_abs_diff(sum, Matrix::identity(dim));
        if (residual > kStateTol) report.add("sum of elements = identity", "elements", residual, kStateTol);
    }
    return report;
}

namespace {

std::vector<Matrix> matrices_of(const std::vector<DensityOperator>& states) {
    std::vector<Matrix> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.matrix());
    return out;
}

std::vector<Matrix> matrices_of(const std::vector<HermitianOperator>& ops) {
    std::vector<Matrix> out;
    out.reserve(ops.size());
    for (const auto& op : ops) out.push_back(op.matrix());
    return out;
}

}  // namespace

Ensemble::Ensemble(std::vector<DensityOperator> states, std::vector<double> priors)
    : states_(std::move(states)), priors_(std::move(priors)) {
    const auto mats = matrices_of(states_);
    ValidationReport report = validate_ensemble(mats, priors_);
    if (!report.ok()) throw ValidationError(std::move(report));
}

Ensemble Ensemble::from_pure(const std::vector<PureState>& states, std::vector<double> priors) {
    std::vector<DensityOperator> dens;
    dens.reserve(states.size());
    for (const auto& s : states) dens.push_back(s.density());
    return Ensemble(std::move(dens), std::move(priors));
}

Povm::Povm(std::vector<HermitianOperator> elements) : elements_(std::move(elements)) {
    const auto mats = matrices_of(elements_);
    ValidationReport report = validate_povm(mats);
    if (!report.ok()) throw ValidationError(std::move(report));
}

Povm Povm::from_matrices(const std::vector<Matrix>& elements) {
    ValidationReport report = validate_povm(elements);
    if (!report.ok()) throw ValidationError(std::move(report));
    std::vector<HermitianOperator> ops;
    ops.reserve(elements.size());
    for (const auto& m : elements) ops.emplace_back(m);
    return Povm(std::move(ops));
}

ValidationReport validate(const Ensemble& e) {
    const auto mats = matrices_of(e.states());
    return validate_ensemble(mats, e.priors());
}

ValidationReport validate(const Povm& p) {
    const auto mats = matrices_of(p.elements());
    return validate_povm(mats);
}

SourceFunction::SourceFunction(DensityOperator omega_) : omega(std::move(omega_)), unbiased(false) {
    const std::size_t d = omega.dim();
    const Matrix mixed = Matrix::identity(d) * Complex(1.0 / static_cast<double>(d));
    unbiased = linalg::max_abs_diff(omega.matrix(), mixed) <= kStateTol;
}

SourceFunction source_from_ensemble(const Ensemble& e) {
    Matrix omega(e.dim());
    for (std::size_t i = 0; i < e.size(); ++i) omega += e.states()[i].matrix() * Complex(e.priors()[i]);
    return SourceFunction(DensityOperator(omega));
}

}  // namespace retro
