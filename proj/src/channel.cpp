#include "retro/channel.hpp"

#include <cmath>

namespace retro::channel {

using linalg::Complex;
using linalg::Matrix;
using linalg::Subsystem;
using linalg::Vector;

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kRemainderTol = 1e-10;

Vector weighted_pair(double eta1, const Vector& a1, const Vector& b1, double eta2, const Vector& a2,
                     const Vector& b2) {
    Vector first = linalg::kron(a1, b1);
    const Vector second = linalg::kron(a2, b2);
    for (std::size_t k = 0; k < first.size(); ++k)
        first[k] = std::sqrt(eta1) * first[k] + std::sqrt(eta2) * second[k];
    return first;
}

}  // namespace

TwoQubitState::TwoQubitState(const Vector& amplitudes) : amplitudes_(amplitudes) {
    if (amplitudes_.size() != 4) throw DimensionMismatch(4, amplitudes_.size(), "two-qubit state");
    const double n = linalg::norm(amplitudes_);
    if (!(std::abs(n - 1.0) <= kNormTol)) {
        ValidationReport report;
        report.add("unit norm", "two-qubit state", std::abs(n - 1.0), kNormTol);
        throw ValidationError(std::move(report));
    }
}

DensityOperator TwoQubitState::reduced(Subsystem traced) const {
    return DensityOperator(linalg::partial_trace(density(), 2, 2, traced));
}

Matrix swap_operator() {
    Matrix s(4);
    s(0, 0) = 1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 3) = 1.0;
    return s;
}

double swap_residual(const TwoQubitState& state) {
    const Vector swapped = swap_operator() * state.amplitudes();
    Vector diff(4);
    for (std::size_t k = 0; k < 4; ++k) diff[k] = swapped[k] - state.amplitudes()[k];
    return linalg::norm(diff);
}

double projector_distance(const TwoQubitState& a, const TwoQubitState& b) {
    return linalg::max_abs_diff(a.density(), b.density());
}

TwoQubitState entangled_state(const ud::UdInstance& inst) {
    auto [psi1, psi2] = ud::ud_states(inst);
    return TwoQubitState(weighted_pair(inst.eta1(), {1.0, 0.0}, psi1.amplitudes(), inst.eta2(),
                                       {0.0, 1.0}, psi2.amplitudes()));
}

TwoQubitState symmetric_state(const ud::UdInstance& inst) {
    auto [psi1, psi2] = ud::ud_states(inst);
    const ud::RetroBasis basis = ud::retro_basis(inst);
    return TwoQubitState(weighted_pair(inst.eta1(), basis.phi1.amplitudes(), psi1.amplitudes(),
                                       inst.eta2(), basis.phi2.amplitudes(), psi2.amplitudes()));
}

TwoQubitState swapped_symmetric_state(const ud::UdInstance& inst) {
    auto [psi1, psi2] = ud::ud_states(inst);
    const ud::RetroBasis basis = ud::retro_basis(inst);
    return TwoQubitState(weighted_pair(inst.eta1(), psi1.amplitudes(), basis.phi1.amplitudes(),
                                       inst.eta2(), psi2.amplitudes(), basis.phi2.amplitudes()));
}

Matrix sqrt_omega_in_retro_basis(const ud::UdInstance& inst) {
    const linalg::HermitianOperator root = linalg::sqrt_psd(ud::omega_matrix(inst).op());
    return ud::matrix_in_basis(root.matrix(), ud::retro_basis(inst));
}

NoSignalingReport::NoSignalingReport(DensityOperator a, DensityOperator a_tilde, DensityOperator b,
                                     double remainder_min)
    : rho_a(std::move(a)),
      rho_a_tilde(std::move(a_tilde)),
      rho_b(std::move(b)),
      max_residual(linalg::max_abs_diff(rho_a.matrix(), rho_a_tilde.matrix())),
      remainder_min_eigenvalue(remainder_min),
      remainder_psd(remainder_min >= -kRemainderTol) {}

NoSignalingReport no_signaling_check(const ud::UdInstance& inst, double mu1, double mu2) {
    const TwoQubitState sym = symmetric_state(inst);
    const ud::RetroBasis basis = ud::retro_basis(inst);
    const Matrix u = basis.unitary();
    const Matrix remainder = u * ud::constraint_remainder(inst, mu1, mu2) * u.adjoint();

    Matrix tilde = remainder;
    tilde += basis.phi1.projector() * Complex(mu1);
    tilde += basis.phi2.projector() * Complex(mu2);
    return NoSignalingReport(sym.reduced(Subsystem::b), DensityOperator(tilde),
                             sym.reduced(Subsystem::a),
                             linalg::min_eigenvalue(linalg::HermitianOperator(remainder)));
}

NoSignalingReport no_signaling_check(const ud::UdInstance& inst) {
    const ud::DualOptimum opt = ud::optimal_dual(inst);
    const TwoQubitState sym = symmetric_state(inst);
    const ud::RetroBasis basis = ud::retro_basis(inst);

    Matrix tilde = opt.failure_operator.matrix();
    tilde += basis.phi1.projector() * Complex(opt.mu1);
    tilde += basis.phi2.projector() * Complex(opt.mu2);
    return NoSignalingReport(sym.reduced(Subsystem::b), DensityOperator(tilde),
                             sym.reduced(Subsystem::a),
                             linalg::min_eigenvalue(opt.failure_operator));
}

}  // namespace retro::channel
