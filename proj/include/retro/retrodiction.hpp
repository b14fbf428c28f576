#pragma once

// Predictive and retrodictive probabilities, and the source-dependent transform
//
//   Pi_i^ret  = Omega^{-1/2} eta_i rho_i Omega^{-1/2}
//   rho_j^ret = sqrt(Omega) Pi_j sqrt(Omega) / mu_j,   mu_j = Tr(Pi_j Omega)
//
// under which Tr(Pi_i^ret rho_j^ret) is the Bayesian conditional P(a_i | b_j)
// for any source, biased or not. Pi^ret inherits the ensemble's indices and
// rho^ret the POVM's.

#include <cstddef>
#include <optional>
#include <vector>

#include "retro/ensembles.hpp"
#include "retro/linalg.hpp"

namespace retro {

inline constexpr double kMuFloor = 1e-12;
inline constexpr double kProbabilitySlack = 1e-12;
inline constexpr double kIdentityTol = 1e-10;

/// Clamps p into [0, 1] if it lies within kProbabilitySlack of the interval;
/// throws NumericIntegrityError otherwise.
double clamp_probability(double p, const char* what);

struct OutcomeDistribution {
    std::vector<double> mu;

    /// Validates mu_j >= -1e-12 and sum = 1 within 1e-10.
    explicit OutcomeDistribution(std::vector<double> mu);
    std::size_t size() const noexcept { return mu.size(); }
    double operator[](std::size_t j) const { return mu.at(j); }
};

/// Tr(Pi_j rho_i)
double predictive_prob(const linalg::HermitianOperator& effect, const DensityOperator& state);

/// mu_j = Tr(Pi_j Omega)
OutcomeDistribution outcome_probs(const Povm& povm, const SourceFunction& omega);

/// eta_i Tr(Pi_j rho_i) / sum_k eta_k Tr(Pi_j rho_k)
double retrodictive_prob_bayes(const Ensemble& e, const Povm& povm, std::size_t i, std::size_t j,
                               double mu_floor = kMuFloor);

struct TransformOptions {
    linalg::PoleHandling poles = linalg::PoleHandling::strict;
    double min_eig = linalg::kDefaultMinEig;
    double mu_floor = kMuFloor;
};

struct IdentityResiduals {
    double completeness;  // max|sum_i Pi_i^ret - I|
    double trace;         // max_j |Tr rho_j^ret - 1| over defined j
    double source;        // max|sum_j mu_j rho_j^ret - Omega|
};

struct RetroDual {
    std::vector<linalg::HermitianOperator> retro_effects;       // Pi_i^ret, ensemble-indexed
    std::vector<std::optional<DensityOperator>> retro_states;  // rho_j^ret, empty if mu_j <= floor
    OutcomeDistribution mu;
    SourceFunction omega;
    linalg::PoleHandling poles;

    /// The retrodictive detectors as a validated POVM. In support-restricted mode
    /// they only resolve the projector onto supp(Omega) and this throws.
    Povm retro_povm() const;
    IdentityResiduals residuals() const;
};

/// In strict mode the identities are verified at kIdentityTol before returning
/// (NumericIntegrityError otherwise). Support-restricted mode skips the
/// completeness identity, which cannot hold off the support.
RetroDual retro_transform(const Ensemble& e, const Povm& povm, const TransformOptions& opts = {});

/// Tr(Pi_i^ret rho_j^ret); ZeroProbabilityOutcome if rho_j^ret is undefined.
double retrodictive_prob_symmetric(const RetroDual& dual, std::size_t i, std::size_t j);

}  // namespace retro
