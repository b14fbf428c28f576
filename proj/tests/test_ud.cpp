#include <doctest.h>

#include <cmath>
#include <numbers>

#include "retro/retrodiction.hpp"
#include "retro/ud.hpp"

using namespace retro;
using namespace retro::ud;
using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

namespace {

constexpr double kPi = std::numbers::pi;

Vector add(const Vector& a, const Vector& b) {
    Vector out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

double projector_gap(const Vector& a, const Vector& b) {
    return linalg::max_abs_diff(linalg::outer(a, a), linalg::outer(b, b));
}

/// 20 x 20 grid over eta1 in (0, 1) and alpha in (0, pi/4].
template <typename F>
void for_each_instance(F f) {
    for (int a = 0; a < 20; ++a)
        for (int b = 0; b < 20; ++b) f(UdInstance::from_alpha(0.02 + 0.96 * a / 19.0, 0.01 + (kPi / 4 - 0.01) * b / 19.0));
}

}  // namespace

TEST_CASE("instances") {
    const auto inst = UdInstance::from_alpha(0.7, kPi / 6);
    CHECK(inst.eta2() == doctest::Approx(0.3));
    CHECK(inst.overlap() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inst.theta() == doctest::Approx(kPi / 3).epsilon(1e-15));
    CHECK(UdInstance::from_overlap(0.5, 0.5).alpha() == doctest::Approx(kPi / 6).epsilon(1e-15));
    CHECK(UdInstance::from_overlap(0.5, 0.3).overlap() == 0.3);

    CHECK_THROWS_AS(UdInstance::from_alpha(0.5, 0.0), SingularOperator);
    CHECK_THROWS_AS(UdInstance::from_overlap(0.5, 1.0), SingularOperator);
    CHECK_THROWS_AS(UdInstance::from_alpha(0.0, 0.3), InvalidParameter);
    CHECK_THROWS_AS(UdInstance::from_alpha(1.0, 0.3), InvalidParameter);
    CHECK_THROWS_AS(UdInstance::from_alpha(0.5, -0.1), InvalidParameter);
    CHECK_THROWS_AS(UdInstance::from_alpha(0.5, 1.0), InvalidParameter);
    CHECK_THROWS_AS(UdInstance::from_overlap(0.5, -0.1), InvalidParameter);
}

TEST_CASE("UD states") {
    const auto [plus, minus] = ud_states(UdInstance::from_alpha(0.5, kPi / 4));
    const double r = 1 / std::sqrt(2.0);
    CHECK(linalg::max_abs_diff(plus.amplitudes(), Vector{r, r}) < 1e-15);
    CHECK(linalg::max_abs_diff(minus.amplitudes(), Vector{r, -r}) < 1e-15);
    CHECK(std::abs(linalg::inner(plus.amplitudes(), minus.amplitudes())) < 1e-15);

    const auto inst = UdInstance::from_alpha(0.5, kPi / 8);
    const auto [psi1, psi2] = ud_states(inst);
    CHECK(std::abs(linalg::inner(psi1.amplitudes(), psi2.amplitudes()) - std::sqrt(2.0) / 2) < 1e-15);

    const auto [perp1, perp2] = ud_orthogonal_states(inst);
    CHECK(std::abs(linalg::inner(perp1.amplitudes(), psi1.amplitudes())) < 1e-15);
    CHECK(std::abs(linalg::inner(perp2.amplitudes(), psi2.amplitudes())) < 1e-15);
}

TEST_CASE("closed-form eigen-decomposition of the source") {
    SUBCASE("equal priors, orthogonal states") {
        const OmegaClosedForm cf = omega_closed_form(UdInstance::from_alpha(0.5, kPi / 4));
        CHECK(cf.w1 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(cf.w2 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(cf.angle == 0.0);
    }
    SUBCASE("equal priors force a zero angle") {
        for (double alpha : {0.05, 0.3, 0.6, 0.78}) CHECK(omega_closed_form(UdInstance::from_alpha(0.5, alpha)).angle == 0.0);
    }
    SUBCASE("eta = (0.7, 0.3), alpha = pi/6") {
        // Frozen from an independent 30-digit evaluation.
        const OmegaClosedForm cf = omega_closed_form(UdInstance::from_alpha(0.7, kPi / 6));
        CHECK(std::abs(cf.w1 - 0.8041381265149109844) < 1e-15);
        CHECK(std::abs(cf.w2 - 0.1958618734850890155) < 1e-15);
        CHECK(std::abs(cf.angle - 0.30294555941962316039) < 1e-15);

        const linalg::Spectrum s = linalg::hermitian_eig(omega_matrix(UdInstance::from_alpha(0.7, kPi / 6)).op());
        CHECK(std::abs(cf.w1 - s.eigenvalues[1]) < 1e-10);
        CHECK(std::abs(cf.w2 - s.eigenvalues[0]) < 1e-10);
        CHECK(projector_gap(cf.omega1(), s.eigenvector(1)) < 1e-10);
        CHECK(projector_gap(cf.omega2(), s.eigenvector(0)) < 1e-10);
    }
    SUBCASE("nearly coinciding states are singular") {
        CHECK_THROWS_AS(omega_closed_form(UdInstance::from_alpha(0.5, 1e-9)), SingularOperator);
        CHECK_THROWS_AS(retro_basis(UdInstance::from_overlap(0.5, 1 - 1e-15)), SingularOperator);
    }
}

TEST_CASE("retrodictive basis") {
    const auto balanced = retro_basis(UdInstance::from_alpha(0.5, 0.4));
    const double r = 1 / std::sqrt(2.0);
    CHECK(projector_gap(balanced.phi1.amplitudes(), {r, r}) < 1e-12);
    CHECK(projector_gap(balanced.phi2.amplitudes(), {r, -r}) < 1e-12);

    double ortho = 0, closed = 0;
    for_each_instance([&](const UdInstance& inst) {
        const RetroBasis b = retro_basis(inst);
        const RetroBasis c = retro_basis_closed_form(inst);
        const Matrix u = b.unitary();
        ortho = std::max(ortho, linalg::max_abs_diff(u.adjoint() * u, Matrix::identity(2)));
        closed = std::max(closed, std::max(linalg::max_abs_diff(b.phi1.amplitudes(), c.phi1.amplitudes()),
                                           linalg::max_abs_diff(b.phi2.amplitudes(), c.phi2.amplitudes())));
    });
    CHECK(ortho < 1e-9);
    CHECK(closed < 1e-10);
}

TEST_CASE("retrodictive basis is orthonormal over the extended grid") {
    double worst = 0;
    for (int a = 0; a < 30; ++a)
        for (int b = 0; b < 30; ++b) {
            const double eta_max = 0.5 + 0.49 * (a + 0.5) / 30;
            const double alpha = 0.01 + (kPi / 4 - 0.01) * (b + 0.5) / 30;
            for (double eta1 : {eta_max, 1 - eta_max}) {
                const Matrix u = retro_basis(UdInstance::from_alpha(eta1, alpha)).unitary();
                worst = std::max(worst, linalg::max_abs_diff(u.adjoint() * u, Matrix::identity(2)));
            }
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("source in the retrodictive basis") {
    CHECK(linalg::max_abs_diff(omega_in_retro_basis(UdInstance::from_overlap(0.5, 0.0)).matrix(),
                               Matrix::identity(2) * Complex(0.5)) < 1e-15);
    const auto inst = UdInstance::from_overlap(0.6, 0.5);
    const Matrix expected = Matrix::from_rows({{0.6, 0.24494897427831780982}, {0.24494897427831780982, 0.4}});
    CHECK(linalg::max_abs_diff(omega_in_retro_basis(inst).matrix(), expected) < 1e-15);
    CHECK(linalg::max_abs_diff(matrix_in_basis(omega_matrix(inst).matrix(), retro_basis(inst)), expected) < 1e-12);
}

TEST_CASE("optimal dual: spot values") {
    SUBCASE("eta = (1/2, 1/2), s = 1/2") {
        const DualOptimum d = optimal_dual(UdInstance::from_overlap(0.5, 0.5));
        CHECK(d.regime == Regime::interior);
        CHECK(std::abs(d.p_success - 0.5) < 1e-12);
        CHECK(std::abs(d.mu1 - 0.25) < 1e-12);
        CHECK(std::abs(d.mu2 - 0.25) < 1e-12);
    }
    SUBCASE("eta_max = 0.9, s^2 = 1/2 is clamped") {
        for (double eta1 : {0.9, 0.1}) {
            const DualOptimum d = optimal_dual(UdInstance::from_overlap(eta1, std::sqrt(0.5)));
            CHECK(d.regime == Regime::clamped);
            CHECK(std::abs(d.p_success - 0.45) < 1e-12);
            CHECK(std::min(d.mu1, d.mu2) == 0.0);
        }
    }
    SUBCASE("eta = (0.7, 0.3), s = 0.4") {
        const auto inst = UdInstance::from_overlap(0.7, 0.4);
        const DualOptimum d = optimal_dual(inst);
        // 1 - 0.8 sqrt(0.21), 30-digit evaluation.
        CHECK(std::abs(d.p_success - 0.63339394440353279947) < 1e-15);
        CHECK(std::abs(brute_force_dual(inst, 1e-4).p_success - d.p_success) <= 2e-4);
    }
}

TEST_CASE("optimal dual invariants across the grid") {
    double det = 0, bridge = 0, phi0 = 0, gap = 0;
    for_each_instance([&](const UdInstance& inst) {
        const DualOptimum d = optimal_dual(inst);
        const Matrix f = d.failure_in_retro_basis.matrix();
        det = std::max(det, std::abs((f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0)).real()));
        CHECK(linalg::is_psd(d.failure_in_retro_basis, 1e-10));
        CHECK(d.mu1 <= inst.eta1() + 1e-15);
        CHECK(d.mu2 <= inst.eta2() + 1e-15);

        // Predictive and retrodictive weights agree outcome by outcome.
        const PredictiveUdPovm pred = optimal_predictive_povm(inst);
        const auto [psi1, psi2] = ud_states(inst);
        const double p1 = inst.eta1() * predictive_prob(pred.povm[0], psi1.density());
        const double p2 = inst.eta2() * predictive_prob(pred.povm[1], psi2.density());
        const Matrix omega = omega_matrix(inst).matrix();
        bridge = std::max({bridge, std::abs(p1 - d.mu1), std::abs(p2 - d.mu2),
                           std::abs(linalg::trace_product(pred.povm[0].matrix(), omega).real() - d.mu1),
                           std::abs(linalg::trace_product(pred.povm[1].matrix(), omega).real() - d.mu2)});

        const RetroBasis b = retro_basis(inst);
        if (!d.rho0_ret) {
            CHECK(d.mu0 <= kMuFloor);
        } else if (d.regime == Regime::interior) {
            const Vector sum = linalg::scaled(add(b.phi1.amplitudes(), b.phi2.amplitudes()), 1 / std::sqrt(2.0));
            phi0 = std::max(phi0, linalg::max_abs_diff(d.rho0_ret->matrix(), linalg::outer(sum, sum)));
        } else {
            // Off the interior the failure state leans towards the likely state:
            // (sqrt(eta_1) s, sqrt(eta_2)) in retrodictive coordinates when eta_1 dominates.
            const double s = inst.overlap();
            const bool first = inst.eta1() >= inst.eta2();
            const double a = first ? std::sqrt(inst.eta1()) * s : std::sqrt(inst.eta1());
            const double c = first ? std::sqrt(inst.eta2()) : std::sqrt(inst.eta2()) * s;
            const Vector v = linalg::scaled(
                add(linalg::scaled(b.phi1.amplitudes(), a), linalg::scaled(b.phi2.amplitudes(), c)), 1 / std::hypot(a, c));
            gap = std::max(gap, linalg::max_abs_diff(d.rho0_ret->matrix(), linalg::outer(v, v)));
        }
    });
    CHECK(det < 1e-10);
    CHECK(bridge < 1e-10);
    CHECK(phi0 < 1e-10);
    CHECK(gap < 1e-10);
}

TEST_CASE("the failure remainder is PSD with a null direction at the optimum") {
    const DualOptimum d = optimal_dual(UdInstance::from_alpha(0.7, kPi / 6));
    CHECK(linalg::is_psd(d.failure_operator, 1e-10));
    CHECK(std::abs(linalg::min_eigenvalue(d.failure_operator)) < 1e-12);
}

TEST_CASE("regimes and branch continuity") {
    CHECK(classify(0.9, std::sqrt(0.5)) == Regime::clamped);
    CHECK(classify(0.6, 0.5) == Regime::interior);
    CHECK(std::string(to_string(Regime::clamped)) == "clamped");
    for (int k = 0; k <= 50; ++k) {
        const double s = 0.01 + 0.98 * k / 50;
        const double boundary = 1 / (1 + s * s);
        CHECK(std::abs(success_interior(boundary, s) - success_clamped(boundary, s)) < 1e-9);
        CHECK(classify(boundary, s) == Regime::clamped);
    }
}

TEST_CASE("brute-force grid oracle") {
    CHECK(std::abs(brute_force_dual(UdInstance::from_overlap(0.5, 0.5), 1e-4).p_success - 0.5) <= 2e-4);
    CHECK(std::abs(brute_force_dual(UdInstance::from_overlap(0.9, std::sqrt(0.5)), 1e-4).p_success - 0.45) <= 2e-4);
    // Orthogonal states: every prior is reachable, and a dyadic step lands on 1 exactly.
    CHECK(brute_force_dual(UdInstance::from_overlap(0.5, 0.0), 1.0 / 1024).p_success == 1.0);
    CHECK(std::abs(brute_force_dual(UdInstance::from_overlap(0.5, 0.0), 1e-4).p_success - 1.0) < 1e-12);

    const auto inst = UdInstance::from_overlap(0.65, 0.3);
    const GridOptimum one = brute_force_dual(inst, 1e-4, 1);
    for (unsigned workers : {2u, 3u, 8u}) {
        const GridOptimum many = brute_force_dual(inst, 1e-4, workers);
        CHECK(many.mu1 == one.mu1);
        CHECK(many.mu2 == one.mu2);
    }
    CHECK_THROWS_AS(brute_force_dual(inst, 0.0), InvalidParameter);

    double worst = 0;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            const auto i = UdInstance::from_overlap(0.5 + 0.49 * a / 7, 0.02 + 0.95 * b / 7);
            worst = std::max(worst, std::abs(brute_force_dual(i, 1e-4, 0).p_success - optimal_dual(i).p_success));
        }
    CHECK(worst <= 2e-4);
}

TEST_CASE("optimal predictive POVM") {
    SUBCASE("equal priors, s = 1/2") {
        const auto inst = UdInstance::from_overlap(0.5, 0.5);
        CHECK(std::abs(predictive_success(inst, optimal_predictive_povm(inst).povm) - 0.5) < 1e-12);
    }
    SUBCASE("clamped: only the likely state is ever identified") {
        const auto inst = UdInstance::from_overlap(0.9, std::sqrt(0.5));
        const PredictiveUdPovm p = optimal_predictive_povm(inst);
        CHECK(p.c2 == 0.0);
        CHECK(linalg::max_abs(p.povm[1].matrix()) == 0.0);
        CHECK(p.c1 > 0.0);
    }
    SUBCASE("unambiguous on every instance") {
        double worst = 0;
        for_each_instance([&](const UdInstance& inst) {
            const PredictiveUdPovm p = optimal_predictive_povm(inst);
            const auto [psi1, psi2] = ud_states(inst);
            worst = std::max({worst, predictive_prob(p.povm[0], psi2.density()),
                              predictive_prob(p.povm[1], psi1.density())});
        });
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("retrodictive detectors of the UD ensemble are the basis projectors") {
    for_each_instance([](const UdInstance& inst) {
        const RetroDual dual = retro_transform(ud_ensemble(inst), optimal_predictive_povm(inst).povm);
        const RetroBasis b = retro_basis_closed_form(inst);
        CHECK(linalg::max_abs_diff(dual.retro_effects[0].matrix(), b.phi1.projector()) < 1e-10);
        CHECK(linalg::max_abs_diff(dual.retro_effects[1].matrix(), b.phi2.projector()) < 1e-10);
    });
}

TEST_CASE("purity and identification") {
    const CheckList spot = verify_purity_identification(UdInstance::from_alpha(0.5, kPi / 8), 1e-10);
    CHECK_FALSE(spot.empty());
    CHECK(spot.all_passed());

    for_each_instance([](const UdInstance& inst) {
        const CheckList c = verify_purity_identification(inst, 1e-9);
        CHECK(c.all_passed());
    });

    // Orthogonal states at equal priors: the retrodictive states are the projective elements.
    const auto inst = UdInstance::from_overlap(0.5, 0.0);
    const PredictiveUdPovm p = optimal_predictive_povm(inst);
    const RetroDual dual = retro_transform(ud_ensemble(inst), p.povm);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(linalg::max_abs_diff(dual.retro_states[j]->matrix(), p.povm[j].matrix()) < 1e-12);
    CHECK_FALSE(dual.retro_states[2].has_value());
}
