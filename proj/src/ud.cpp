#include "retro/ud.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "retro/retrodiction.hpp"

namespace retro::ud {

using linalg::Complex;
using linalg::HermitianOperator;
using linalg::Matrix;
using linalg::Vector;

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kInvariantTol = 1e-10;
constexpr double kSumTol = 1e-12;
constexpr double kFeasibilitySlack = 1e-12;

double sq(double x) { return x * x; }

void require_invariant(bool ok, const std::string& what, double value) {
    if (!ok) throw NumericIntegrityError(what + " (measured " + std::to_string(value) + ")");
}

}  // namespace

UdInstance::UdInstance(double eta1, double alpha)
    : eta1_(eta1), eta2_(1.0 - eta1), alpha_(alpha), overlap_(std::cos(2.0 * alpha)) {}

UdInstance UdInstance::from_alpha(double eta1, double alpha) {
    if (!std::isfinite(eta1) || !(eta1 > 0.0) || !(eta1 < 1.0))
        throw InvalidParameter("eta1 must lie in (0, 1), got " + std::to_string(eta1));
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > kQuarterPi + 1e-15)
        throw InvalidParameter("alpha must lie in (0, pi/4], got " + std::to_string(alpha));
    if (alpha == 0.0) throw SingularOperator(0.0, kSingularFloor);
    return UdInstance(eta1, std::min(alpha, kQuarterPi));
}

UdInstance UdInstance::from_overlap(double eta1, double overlap) {
    if (!std::isfinite(overlap) || overlap < 0.0 || overlap > 1.0)
        throw InvalidParameter("overlap must lie in [0, 1), got " + std::to_string(overlap));
    UdInstance inst = from_alpha(eta1, 0.5 * std::acos(overlap));
    inst.overlap_ = overlap;
    return inst;
}

double UdInstance::theta() const { return std::acos(overlap_); }

std::pair<PureState, PureState> ud_states(const UdInstance& inst) {
    const double c = std::cos(inst.alpha()), s = std::sin(inst.alpha());
    return {PureState(Vector{c, s}), PureState(Vector{c, -s})};
}

std::pair<PureState, PureState> ud_orthogonal_states(const UdInstance& inst) {
    const double c = std::cos(inst.alpha()), s = std::sin(inst.alpha());
    return {PureState(Vector{s, -c}), PureState(Vector{s, c})};
}

Ensemble ud_ensemble(const UdInstance& inst) {
    auto [psi1, psi2] = ud_states(inst);
    return Ensemble::from_pure({psi1, psi2}, {inst.eta1(), inst.eta2()});
}

DensityOperator omega_matrix(const UdInstance& inst) {
    return source_from_ensemble(ud_ensemble(inst)).omega;
}

Vector OmegaClosedForm::omega1() const { return {std::cos(angle), std::sin(angle)}; }
Vector OmegaClosedForm::omega2() const { return {-std::sin(angle), std::cos(angle)}; }

OmegaClosedForm omega_closed_form(const UdInstance& inst) {
    const double sin2a = std::sin(2.0 * inst.alpha());
    const double det = inst.eta1() * inst.eta2() * sq(sin2a);
    const double w1 = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * det)));
    // Product form for the small root avoids cancellation.
    const double w2 = det / w1;
    if (w2 < kSingularFloor) throw SingularOperator(w2, kSingularFloor);
    const double angle =
        0.5 * std::atan2((inst.eta1() - inst.eta2()) * sin2a, std::cos(2.0 * inst.alpha()));
    return {w1, w2, angle};
}

Matrix RetroBasis::unitary() const {
    const auto& a = phi1.amplitudes();
    const auto& b = phi2.amplitudes();
    return Matrix::from_rows({{a[0], b[0]}, {a[1], b[1]}});
}

RetroBasis retro_basis(const UdInstance& inst) {
    const DensityOperator omega = omega_matrix(inst);
    const HermitianOperator inv_root = linalg::inverse_sqrt(omega.op(), kSingularFloor);
    auto [psi1, psi2] = ud_states(inst);
    return {PureState(inv_root.matrix() * linalg::scaled(psi1.amplitudes(), std::sqrt(inst.eta1()))),
            PureState(inv_root.matrix() * linalg::scaled(psi2.amplitudes(), std::sqrt(inst.eta2())))};
}

RetroBasis retro_basis_closed_form(const UdInstance& inst) {
    const OmegaClosedForm cf = omega_closed_form(inst);
    const double a = inst.alpha(), w = cf.angle;
    const Vector o1 = cf.omega1(), o2 = cf.omega2();
    auto combine = [&](double eta, double c1, double c2) {
        Vector v(2);
        for (std::size_t k = 0; k < 2; ++k) v[k] = std::sqrt(eta) * (c1 * o1[k] + c2 * o2[k]);
        return PureState(std::move(v));
    };
    return {combine(inst.eta1(), std::cos(a - w) / std::sqrt(cf.w1), std::sin(a - w) / std::sqrt(cf.w2)),
            combine(inst.eta2(), std::cos(a + w) / std::sqrt(cf.w1), -std::sin(a + w) / std::sqrt(cf.w2))};
}

HermitianOperator omega_in_retro_basis(const UdInstance& inst) {
    const double off = std::sqrt(inst.eta1() * inst.eta2()) * inst.overlap();
    return HermitianOperator(Matrix::from_rows({{inst.eta1(), off}, {off, inst.eta2()}}));
}

Matrix matrix_in_basis(const Matrix& m, const RetroBasis& basis) {
    const Matrix u = basis.unitary();
    return u.adjoint() * m * u;
}

const char* to_string(Regime r) { return r == Regime::interior ? "interior" : "clamped"; }

Regime classify(double eta_max, double overlap) {
    return eta_max >= 1.0 / (1.0 + sq(overlap)) ? Regime::clamped : Regime::interior;
}

double success_interior(double eta1, double overlap) {
    return 1.0 - 2.0 * std::sqrt(eta1 * (1.0 - eta1)) * overlap;
}

double success_clamped(double eta_max, double overlap) { return eta_max * (1.0 - sq(overlap)); }

Matrix constraint_remainder(const UdInstance& inst, double mu1, double mu2) {
    const double off = std::sqrt(inst.eta1() * inst.eta2()) * inst.overlap();
    return Matrix::from_rows({{inst.eta1() - mu1, off}, {off, inst.eta2() - mu2}});
}

DualOptimum optimal_dual(const UdInstance& inst) {
    omega_closed_form(inst);  // singularity guard
    const double eta1 = inst.eta1(), eta2 = inst.eta2(), s = inst.overlap();
    const Regime regime = classify(inst.eta_max(), s);

    double mu1 = 0.0, mu2 = 0.0, p_success = 0.0;
    if (regime == Regime::interior) {
        const double shared = std::sqrt(eta1 * eta2) * s;
        mu1 = std::max(0.0, eta1 - shared);
        mu2 = std::max(0.0, eta2 - shared);
        p_success = success_interior(eta1, s);
    } else {
        // The less likely state's weight is pinned at zero; the other sits on det = 0.
        (eta1 >= eta2 ? mu1 : mu2) = inst.eta_max() * (1.0 - sq(s));
        p_success = success_clamped(inst.eta_max(), s);
    }

    const Matrix remainder = constraint_remainder(inst, mu1, mu2);
    const double mu0 = remainder.trace().real();
    const RetroBasis basis = retro_basis(inst);
    const Matrix u = basis.unitary();
    HermitianOperator failure(u * remainder * u.adjoint());
    std::optional<DensityOperator> rho0;
    if (mu0 > kMuFloor) rho0.emplace(failure.matrix() * Complex(1.0 / mu0));

    const double total = mu0 + mu1 + mu2;
    require_invariant(std::abs(total - 1.0) <= kSumTol, "mu0 + mu1 + mu2 != 1", total);
    require_invariant(std::abs(p_success - (mu1 + mu2)) <= kSumTol, "P_s != mu1 + mu2", p_success);
    require_invariant(mu1 <= eta1 + kSumTol && mu2 <= eta2 + kSumTol, "mu_i exceeds eta_i",
                      std::max(mu1 - eta1, mu2 - eta2));

    Matrix decomposition = failure.matrix();
    decomposition += basis.phi1.projector() * Complex(mu1);
    decomposition += basis.phi2.projector() * Complex(mu2);
    const double eq15 = linalg::max_abs_diff(decomposition, omega_matrix(inst).matrix());
    require_invariant(eq15 <= kInvariantTol, "mu1 P1 + mu2 P2 + mu0 rho0 != Omega", eq15);

    const double det =
        (remainder(0, 0) * remainder(1, 1) - remainder(0, 1) * remainder(1, 0)).real();
    require_invariant(std::abs(det) <= kInvariantTol, "det(mu0 rho0) != 0", det);
    const double lo = linalg::min_eigenvalue(failure);
    require_invariant(lo >= -kInvariantTol, "mu0 rho0 is not PSD", lo);

    return {mu1, mu2, mu0, failure, HermitianOperator(remainder), std::move(rho0), p_success, regime};
}

namespace {

struct ChunkBest {
    double value = -1.0;
    std::size_t k = 0;
    std::size_t l = 0;
};

}  // namespace

GridOptimum brute_force_dual(const UdInstance& inst, double grid_step, unsigned workers) {
    if (!std::isfinite(grid_step) || !(grid_step > 0.0))
        throw InvalidParameter("grid step must be positive");
    const double eta1 = inst.eta1(), eta2 = inst.eta2();
    const double off = std::sqrt(eta1 * eta2) * inst.overlap();
    const auto n1 = static_cast<std::size_t>(std::floor(eta1 / grid_step + 1e-9));
    const auto n2 = static_cast<std::size_t>(std::floor(eta2 / grid_step + 1e-9));

    // Positivity of [[eta1 - mu1, off], [off, eta2 - mu2]] via its diagonal and determinant.
    auto feasible = [&](double mu1, double mu2) {
        const double a = eta1 - mu1, d = eta2 - mu2;
        return a >= -kFeasibilitySlack && d >= -kFeasibilitySlack &&
               a * d - off * off >= -kFeasibilitySlack;
    };

    auto scan = [&](std::size_t k_begin, std::size_t k_end) {
        ChunkBest best;
        for (std::size_t k = k_begin; k < k_end; ++k) {
            const double mu1 = static_cast<double>(k) * grid_step;
            if (!feasible(mu1, 0.0)) continue;
            // Feasibility is monotone in mu2: bisect for the largest feasible index.
            std::size_t lo = 0, hi = n2;
            if (feasible(mu1, static_cast<double>(hi) * grid_step)) lo = hi;
            while (hi - lo > 1) {
                const std::size_t mid = lo + (hi - lo) / 2;
                if (feasible(mu1, static_cast<double>(mid) * grid_step)) lo = mid;
                else hi = mid;
            }
            const double value = mu1 + static_cast<double>(lo) * grid_step;
            if (value > best.value) best = {value, k, lo};
        }
        return best;
    };

    const std::size_t total = n1 + 1;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    std::vector<ChunkBest> partial(workers);
    if (workers == 1) {
        partial[0] = scan(0, total);
    } else {
        std::vector<std::thread> threads;
        const std::size_t per = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(total, w * per), end = std::min(total, begin + per);
            threads.emplace_back([&, w, begin, end] { partial[w] = scan(begin, end); });
        }
        for (auto& t : threads) t.join();
    }

    ChunkBest best;
    for (const auto& p : partial)
        if (p.value > best.value) best = p;
    if (best.value < 0.0) return {0.0, 0.0, 0.0};
    const double mu1 = static_cast<double>(best.k) * grid_step;
    const double mu2 = static_cast<double>(best.l) * grid_step;
    return {mu1, mu2, mu1 + mu2};
}

double predictive_success(const UdInstance& inst, const Povm& povm) {
    if (povm.size() != 3) throw InvalidParameter("UD POVM must have three elements (Pi_1, Pi_2, Pi_0)");
    auto [psi1, psi2] = ud_states(inst);
    return inst.eta1() * linalg::trace_product(povm[0].matrix(), psi1.projector()).real() +
           inst.eta2() * linalg::trace_product(povm[1].matrix(), psi2.projector()).real();
}

PredictiveUdPovm optimal_predictive_povm(const UdInstance& inst) {
    const DualOptimum dual = optimal_dual(inst);
    auto [psi1, psi2] = ud_states(inst);
    auto [perp1, perp2] = ud_orthogonal_states(inst);
    // |<psi_i|psi_j^perp>|^2 = sin^2(2 alpha) for i != j
    const double q = std::norm(linalg::inner(psi1.amplitudes(), perp2.amplitudes()));

    auto weight = [&](double mu, double eta) {
        const double c = mu / (eta * q);
        if (c < -kSumTol || c > 1.0 + kSumTol)
            throw NumericIntegrityError("detector weight " + std::to_string(c) + " outside [0, 1]");
        return std::clamp(c, 0.0, 1.0);
    };
    const double c1 = weight(dual.mu1, inst.eta1());
    const double c2 = weight(dual.mu2, inst.eta2());

    const Matrix pi1 = perp2.projector() * Complex(c1);
    const Matrix pi2 = perp1.projector() * Complex(c2);
    const Matrix pi0 = Matrix::identity(2) - pi1 - pi2;
    PredictiveUdPovm out{Povm::from_matrices({pi1, pi2, pi0}), c1, c2};

    const double ps = predictive_success(inst, out.povm);
    require_invariant(std::abs(ps - dual.p_success) <= kInvariantTol,
                      "predictive success differs from the dual optimum", ps - dual.p_success);
    return out;
}

CheckList verify_purity_identification(const UdInstance& inst, double tol) {
    const PredictiveUdPovm pred = optimal_predictive_povm(inst);
    const RetroDual dual = retro_transform(ud_ensemble(inst), pred.povm);
    const RetroBasis basis = retro_basis(inst);
    const HermitianOperator root = linalg::sqrt_psd(omega_matrix(inst).op());
    auto [perp1, perp2] = ud_orthogonal_states(inst);

    struct Outcome {
        double c;
        const PureState* phi;
        const PureState* perp;  // the state Pi_j is built on
        std::size_t other;
    };
    const Outcome outcomes[] = {{pred.c1, &basis.phi1, &perp2, 1}, {pred.c2, &basis.phi2, &perp1, 0}};

    CheckList checks;
    for (std::size_t j = 0; j < 2; ++j) {
        const Outcome& o = outcomes[j];
        if (!(o.c > 0.0) || !dual.retro_states[j]) continue;
        const DensityOperator& rho = *dual.retro_states[j];
        const std::string tag = std::to_string(j + 1);
        checks.add_at_most("|Tr((rho_" + tag + "^ret)^2) - 1|", std::abs(rho.purity() - 1.0), tol);
        checks.add_at_most("|rho_" + tag + "^ret - |phi_" + tag + "><phi_" + tag + "||",
                           linalg::max_abs_diff(rho.matrix(), o.phi->projector()), tol);
        const PureState lifted = PureState::normalized(root.matrix() * o.perp->amplitudes());
        checks.add_at_most("|rho_" + tag + "^ret - P[sqrt(Omega) psi_perp]|",
                           linalg::max_abs_diff(rho.matrix(), lifted.projector()), tol);
        checks.add_at_most("Tr(Pi_" + std::to_string(o.other + 1) + "^ret rho_" + tag + "^ret)",
                           retrodictive_prob_symmetric(dual, o.other, j), tol);
    }
    return checks;
}

}  // namespace retro::ud
