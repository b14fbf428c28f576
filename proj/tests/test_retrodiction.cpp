#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "retro/random.hpp"
#include "retro/retrodiction.hpp"
#include "retro/ud.hpp"

using namespace retro;
using linalg::Complex;
using linalg::Matrix;

namespace {

linalg::HermitianOperator herm(const Matrix& m) { return linalg::HermitianOperator(m); }

const Matrix kP0 = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
const Matrix kP1 = Matrix::from_rows({{0.0, 0.0}, {0.0, 1.0}});

Ensemble orthogonal_pair() {
    return Ensemble::from_pure({PureState({1.0, 0.0}), PureState({0.0, 1.0})}, {0.5, 0.5});
}

/// Random pairs with an invertible source and no vanishing outcome.
struct Pair {
    Ensemble e;
    Povm p;
};
std::vector<Pair> corpus(std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Pair> out;
    while (out.size() < count) {
        const std::size_t dim = 2 + out.size() % 3;
        Ensemble e = random::ensemble(dim, 1 + rng() % 5, rng);
        Povm p = random::povm(dim, 2 + rng() % 4, rng);
        const SourceFunction omega = source_from_ensemble(e);
        if (linalg::min_eigenvalue(omega.omega.op()) < 1e-6) continue;
        const auto mu = outcome_probs(p, omega).mu;
        if (*std::min_element(mu.begin(), mu.end()) <= 1e-9) continue;
        out.push_back({std::move(e), std::move(p)});
    }
    return out;
}

}  // namespace

TEST_CASE("predictive probabilities") {
    const DensityOperator zero(kP0);
    const DensityOperator mixed(Matrix::identity(2) * Complex(0.5));
    CHECK(predictive_prob(herm(kP0), zero) == 1.0);
    CHECK(predictive_prob(herm(kP0), mixed) == 0.5);

    const auto inst = ud::UdInstance::from_overlap(0.5, 0.5);
    const auto povm = ud::optimal_predictive_povm(inst).povm;
    const auto [psi1, psi2] = ud::ud_states(inst);
    CHECK(std::abs(predictive_prob(povm[0], psi2.density())) < 1e-15);
    CHECK(std::abs(predictive_prob(povm[1], psi1.density())) < 1e-15);
}

TEST_CASE("outcome probabilities") {
    SplitMix64 rng(3);
    const Ensemble e = random::ensemble(2, 3, rng);
    const SourceFunction omega = source_from_ensemble(e);
    const DensityOperator rho = random::density(2, 1, rng);
    const Matrix pi = rho.matrix();
    const auto mu = outcome_probs(Povm::from_matrices({pi, Matrix::identity(2) - pi}), omega);
    const double expected = linalg::trace_product(pi, omega.omega.matrix()).real();
    CHECK(mu[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(mu[1] == doctest::Approx(1 - expected).epsilon(1e-14));

    const auto unbiased = outcome_probs(Povm::from_matrices({kP0, kP1}), source_from_ensemble(orthogonal_pair()));
    CHECK(unbiased[0] == 0.5);
    CHECK(unbiased[1] == 0.5);

    // Optimal UD POVM at eta = (1/2, 1/2), s = 1/2: mu = (1/4, 1/4, 1/2).
    const auto inst = ud::UdInstance::from_overlap(0.5, 0.5);
    const auto ud_mu = outcome_probs(ud::optimal_predictive_povm(inst).povm, source_from_ensemble(ud::ud_ensemble(inst)));
    CHECK(std::abs(ud_mu[0] - 0.25) < 1e-12);
    CHECK(std::abs(ud_mu[1] - 0.25) < 1e-12);
    CHECK(std::abs(ud_mu[2] - 0.5) < 1e-12);
}

TEST_CASE("probability clamping") {
    CHECK(clamp_probability(-5e-13, "p") == 0.0);
    CHECK(clamp_probability(1.0 + 5e-13, "p") == 1.0);
    CHECK(clamp_probability(0.25, "p") == 0.25);
    CHECK_THROWS_AS(clamp_probability(-1e-9, "p"), NumericIntegrityError);
    CHECK_THROWS_AS(clamp_probability(1.0 + 1e-9, "p"), NumericIntegrityError);
    CHECK_THROWS_AS(OutcomeDistribution({0.5, 0.4}), NumericIntegrityError);
}

TEST_CASE("Bayes retrodiction") {
    const Povm basis = Povm::from_matrices({kP0, kP1});
    CHECK(retrodictive_prob_bayes(orthogonal_pair(), basis, 0, 0) == 1.0);
    CHECK(retrodictive_prob_bayes(orthogonal_pair(), basis, 1, 0) == 0.0);

    SUBCASE("unbiased source reduces to the unbiased construction") {
        SplitMix64 rng(11);
        const Matrix u = random::unitary(3, rng);
        std::vector<PureState> states;
        for (std::size_t c = 0; c < 3; ++c) states.push_back(PureState::normalized(u.column(c)));
        const Ensemble e = Ensemble::from_pure(states, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        const Povm p = random::povm(3, 4, rng);
        for (std::size_t j = 0; j < p.size(); ++j)
            for (std::size_t i = 0; i < 3; ++i) {
                // Tr(D eta_i rho_i Pi_j / Tr Pi_j) with D eta_i = 1
                const double unbiased =
                    linalg::trace_product(e.states()[i].matrix(), p[j].matrix()).real() / p[j].trace();
                CHECK(std::abs(retrodictive_prob_bayes(e, p, i, j) - unbiased) < 1e-12);
            }
    }
}

TEST_CASE("symmetric Born rule equals Bayes on random instances") {
    double worst = 0.0;
    for (const auto& c : corpus(500, 101)) {
        const RetroDual dual = retro_transform(c.e, c.p);
        for (std::size_t i = 0; i < c.e.size(); ++i)
            for (std::size_t j = 0; j < c.p.size(); ++j)
                worst = std::max(worst, std::abs(retrodictive_prob_symmetric(dual, i, j) -
                                                 retrodictive_prob_bayes(c.e, c.p, i, j)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("transform identities on random instances") {
    double completeness = 0, trace = 0, source = 0;
    for (const auto& c : corpus(300, 202)) {
        const RetroDual dual = retro_transform(c.e, c.p);
        const IdentityResiduals r = dual.residuals();
        completeness = std::max(completeness, r.completeness);
        trace = std::max(trace, r.trace);
        source = std::max(source, r.source);
        CHECK(dual.retro_effects.size() == c.e.size());
        CHECK(dual.retro_states.size() == c.p.size());
    }
    CHECK(completeness < 1e-10);
    CHECK(trace < 1e-10);
    CHECK(source < 1e-10);
}

TEST_CASE("D = 4 biased source is recovered from the retrodictive states") {
    SplitMix64 rng(404);
    const Ensemble e = random::ensemble(4, 5, rng);
    const Povm p = random::povm(4, 6, rng);
    const RetroDual dual = retro_transform(e, p);
    CHECK_FALSE(dual.omega.unbiased);
    Matrix sum(4);
    for (std::size_t j = 0; j < p.size(); ++j) sum += dual.retro_states[j]->matrix() * Complex(dual.mu[j]);
    CHECK(linalg::max_abs_diff(sum, dual.omega.omega.matrix()) < 1e-10);
}

TEST_CASE("unbiased reduction") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dim = 2 + trial % 3;
        const Matrix u = random::unitary(dim, rng);
        std::vector<PureState> states;
        for (std::size_t c = 0; c < dim; ++c) states.push_back(PureState::normalized(u.column(c)));
        const Ensemble e = Ensemble::from_pure(states, std::vector<double>(dim, 1.0 / dim));
        const Povm p = random::povm(dim, 3, rng);
        const RetroDual dual = retro_transform(e, p);
        CHECK(dual.omega.unbiased);
        for (std::size_t i = 0; i < dim; ++i)
            CHECK(linalg::max_abs_diff(dual.retro_effects[i].matrix(),
                                       e.states()[i].matrix() * Complex(dim * e.priors()[i])) < 1e-10);
        for (std::size_t j = 0; j < p.size(); ++j)
            CHECK(linalg::max_abs_diff(dual.retro_states[j]->matrix(), p[j].matrix() * Complex(1.0 / p[j].trace())) <
                  1e-10);
    }
}

TEST_CASE("double dual returns the original problem") {
    for (const auto& c : corpus(100, 303)) {
        const RetroDual dual = retro_transform(c.e, c.p);
        std::vector<DensityOperator> states;
        for (const auto& r : dual.retro_states) states.push_back(*r);
        const Ensemble back_ensemble(states, dual.mu.mu);
        const RetroDual back = retro_transform(back_ensemble, dual.retro_povm());

        CHECK(linalg::max_abs_diff(back.omega.omega.matrix(), dual.omega.omega.matrix()) < 1e-10);
        for (std::size_t j = 0; j < c.p.size(); ++j)
            CHECK(linalg::max_abs_diff(back.retro_effects[j].matrix(), c.p[j].matrix()) < 1e-9);
        for (std::size_t i = 0; i < c.e.size(); ++i) {
            CHECK(std::abs(back.mu[i] - c.e.priors()[i]) < 1e-10);
            if (c.e.priors()[i] > 1e-6)
                CHECK(linalg::max_abs_diff(back.retro_states[i]->matrix(), c.e.states()[i].matrix()) < 1e-8);
        }
    }
}

TEST_CASE("UD dual exclusion structure") {
    const auto inst = ud::UdInstance::from_overlap(0.6, 0.5);
    const RetroDual dual = retro_transform(ud::ud_ensemble(inst), ud::optimal_predictive_povm(inst).povm);
    CHECK(std::abs(retrodictive_prob_symmetric(dual, 0, 1)) < 1e-12);
    CHECK(std::abs(retrodictive_prob_symmetric(dual, 1, 0)) < 1e-12);
    CHECK(std::abs(retrodictive_prob_symmetric(dual, 0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(retrodictive_prob_symmetric(dual, 1, 1) - 1.0) < 1e-12);
}

TEST_CASE("zero-probability outcomes and singular sources") {
    const Povm trivial = Povm::from_matrices({Matrix::identity(2), Matrix(2)});
    SplitMix64 rng(8);
    const Ensemble e = random::ensemble(2, 3, rng);
    const RetroDual dual = retro_transform(e, trivial);
    CHECK(dual.retro_states[0].has_value());
    CHECK_FALSE(dual.retro_states[1].has_value());
    CHECK_THROWS_AS(retrodictive_prob_symmetric(dual, 0, 1), ZeroProbabilityOutcome);
    CHECK_THROWS_AS(retrodictive_prob_bayes(e, trivial, 0, 1), ZeroProbabilityOutcome);

    const Ensemble rank_one = Ensemble::from_pure({PureState({1.0, 0.0, 0.0}), PureState({0.0, 1.0, 0.0})}, {0.5, 0.5});
    const Povm id3 = Povm::from_matrices({Matrix::identity(3)});
    CHECK_THROWS_AS(retro_transform(rank_one, id3), SingularOperator);

    SUBCASE("support-restricted mode resolves only the support") {
        TransformOptions opts;
        opts.poles = linalg::PoleHandling::support_restricted;
        const RetroDual restricted = retro_transform(rank_one, id3, opts);
        Matrix sum(3);
        for (const auto& p : restricted.retro_effects) sum += p.matrix();
        CHECK(linalg::max_abs_diff(sum, Matrix::diagonal(std::vector<double>{1.0, 1.0, 0.0})) < 1e-12);
        CHECK_THROWS_AS(restricted.retro_povm(), ValidationError);
        CHECK(restricted.residuals().source < 1e-12);
    }
}

TEST_CASE("dimension mismatch between ensemble and POVM") {
    const Povm three = Povm::from_matrices({Matrix::identity(3)});
    CHECK_THROWS_AS(retro_transform(orthogonal_pair(), three), DimensionMismatch);
}
