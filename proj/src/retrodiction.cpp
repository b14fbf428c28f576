#include "retro/retrodiction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace retro {

using linalg::Complex;
using linalg::HermitianOperator;
using linalg::Matrix;

namespace {

constexpr double kOutcomeSumTol = 1e-10;

void require_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) throw DimensionMismatch(expected, actual, what);
}

void require_index(std::size_t index, std::size_t size, const char* what) {
    if (index >= size)
        throw InvalidParameter(std::string(what) + " index " + std::to_string(index) +
                               " out of range (size " + std::to_string(size) + ")");
}

}  // namespace

double clamp_probability(double p, const char* what) {
    if (!std::isfinite(p) || p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack)
        throw NumericIntegrityError(std::string(what) + " = " + std::to_string(p) +
                                    " lies outside [0, 1]");
    return std::clamp(p, 0.0, 1.0);
}

OutcomeDistribution::OutcomeDistribution(std::vector<double> values) : mu(std::move(values)) {
    double sum = 0.0;
    for (double m : mu) {
        if (!std::isfinite(m) || m < -kProbabilitySlack)
            throw NumericIntegrityError("outcome probability " + std::to_string(m) + " is negative");
        sum += m;
    }
    if (std::abs(sum - 1.0) > kOutcomeSumTol)
        throw NumericIntegrityError("outcome probabilities sum to " + std::to_string(sum));
}

double predictive_prob(const HermitianOperator& effect, const DensityOperator& state) {
    require_dim(effect.dim(), state.dim(), "predictive probability");
    return clamp_probability(linalg::trace_product(effect.matrix(), state.matrix()).real(),
                             "Tr(Pi rho)");
}

OutcomeDistribution outcome_probs(const Povm& povm, const SourceFunction& omega) {
    require_dim(povm.dim(), omega.dim(), "outcome probabilities");
    std::vector<double> mu;
    mu.reserve(povm.size());
    for (const auto& effect : povm.elements()) mu.push_back(predictive_prob(effect, omega.omega));
    return OutcomeDistribution(std::move(mu));
}

double retrodictive_prob_bayes(const Ensemble& e, const Povm& povm, std::size_t i, std::size_t j,
                               double mu_floor) {
    require_dim(e.dim(), povm.dim(), "retrodictive probability");
    require_index(i, e.size(), "state");
    require_index(j, povm.size(), "outcome");
    double mu_j = 0.0;
    double joint = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double term = e.priors()[k] * predictive_prob(povm[j], e.states()[k]);
        mu_j += term;
        if (k == i) joint = term;
    }
    if (mu_j <= mu_floor) throw ZeroProbabilityOutcome(j, mu_j);
    return clamp_probability(joint / mu_j, "P(a_i|b_j)");
}

Povm RetroDual::retro_povm() const { return Povm(retro_effects); }

IdentityResiduals RetroDual::residuals() const {
    const std::size_t d = omega.dim();
    Matrix sum_effects(d);
    for (const auto& p : retro_effects) sum_effects += p.matrix();

    double trace = 0.0;
    Matrix mixture(d);
    for (std::size_t j = 0; j < retro_states.size(); ++j) {
        if (!retro_states[j]) continue;
        trace = std::max(trace, std::abs(retro_states[j]->matrix().trace() - Complex(1.0)));
        mixture += retro_states[j]->matrix() * Complex(mu[j]);
    }
    return {linalg::max_abs_diff(sum_effects, Matrix::identity(d)), trace,
            linalg::max_abs_diff(mixture, omega.omega.matrix())};
}

RetroDual retro_transform(const Ensemble& e, const Povm& povm, const TransformOptions& opts) {
    require_dim(e.dim(), povm.dim(), "retrodictive transform");
    SourceFunction omega = source_from_ensemble(e);
    const HermitianOperator inv_sqrt = linalg::inverse_sqrt(omega.omega.op(), opts.min_eig, opts.poles);
    const HermitianOperator root = linalg::sqrt_psd(omega.omega.op());
    OutcomeDistribution mu = outcome_probs(povm, omega);

    std::vector<HermitianOperator> effects;
    effects.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const Matrix weighted = e.states()[i].matrix() * Complex(e.priors()[i]);
        effects.emplace_back(inv_sqrt.matrix() * weighted * inv_sqrt.matrix());
    }

    std::vector<std::optional<DensityOperator>> states;
    states.reserve(povm.size());
    for (std::size_t j = 0; j < povm.size(); ++j) {
        if (mu[j] <= opts.mu_floor) {
            states.emplace_back(std::nullopt);
            continue;
        }
        const Matrix conj = root.matrix() * povm[j].matrix() * root.matrix() * Complex(1.0 / mu[j]);
        try {
            states.emplace_back(DensityOperator(conj));
        } catch (const ValidationError& err) {
            throw NumericIntegrityError("retrodictive state " + std::to_string(j) +
                                        " is not a density operator: " + err.report().describe());
        }
    }

    RetroDual dual{std::move(effects), std::move(states), std::move(mu), std::move(omega), opts.poles};
    const IdentityResiduals r = dual.residuals();
    const bool strict = opts.poles == linalg::PoleHandling::strict;
    if ((strict && r.completeness > kIdentityTol) || r.trace > kIdentityTol || r.source > kIdentityTol)
        throw NumericIntegrityError("retrodictive identities violated: completeness " +
                                    std::to_string(r.completeness) + ", trace " +
                                    std::to_string(r.trace) + ", source " + std::to_string(r.source));
    return dual;
}

double retrodictive_prob_symmetric(const RetroDual& dual, std::size_t i, std::size_t j) {
    require_index(i, dual.retro_effects.size(), "state");
    require_index(j, dual.retro_states.size(), "outcome");
    if (!dual.retro_states[j]) throw ZeroProbabilityOutcome(j, dual.mu[j]);
    return clamp_probability(
        linalg::trace_product(dual.retro_effects[i].matrix(), dual.retro_states[j]->matrix()).real(),
        "Tr(Pi^ret rho^ret)");
}

}  // namespace retro
