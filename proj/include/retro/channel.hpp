#pragma once

// The entangled two-qubit channel behind UD state preparation, its symmetric
// form in the retrodictive basis, and the no-signaling check.
//
// Tensor order is a-then-b: amplitudes index |0_a 0_b>, |0_a 1_b>, |1_a 0_b>, |1_a 1_b>.

#include <array>

#include "retro/ensembles.hpp"
#include "retro/linalg.hpp"
#include "retro/ud.hpp"

namespace retro::channel {

class TwoQubitState {
public:
    /// Rejects norms off by more than 1e-10.
    explicit TwoQubitState(const linalg::Vector& amplitudes);

    const linalg::Vector& amplitudes() const noexcept { return amplitudes_; }
    linalg::Matrix density() const { return linalg::outer(amplitudes_, amplitudes_); }
    /// Reduced density operator after tracing out `traced`.
    DensityOperator reduced(linalg::Subsystem traced) const;

private:
    linalg::Vector amplitudes_;
};

/// The 4x4 permutation exchanging the two qubits.
linalg::Matrix swap_operator();
/// || SWAP |psi> - |psi> ||
double swap_residual(const TwoQubitState& state);
/// max |P_a - P_b| over the rank-one projectors; insensitive to global phase.
double projector_distance(const TwoQubitState& a, const TwoQubitState& b);

/// sqrt(eta_1)|0>_a psi_1 + sqrt(eta_2)|1>_a psi_2
TwoQubitState entangled_state(const ud::UdInstance& inst);
/// sqrt(eta_1) phi_1 (x) psi_1 + sqrt(eta_2) phi_2 (x) psi_2
TwoQubitState symmetric_state(const ud::UdInstance& inst);
/// sqrt(eta_1) psi_1 (x) phi_1 + sqrt(eta_2) psi_2 (x) phi_2
TwoQubitState swapped_symmetric_state(const ud::UdInstance& inst);

/// <phi_i| sqrt(Omega) |phi_j>
linalg::Matrix sqrt_omega_in_retro_basis(const ud::UdInstance& inst);

struct NoSignalingReport {
    DensityOperator rho_a;        // Tr_b of the symmetric state
    DensityOperator rho_a_tilde;  // mu_1 P_phi1 + mu_2 P_phi2 + mu_0 rho_0
    DensityOperator rho_b;        // Tr_a of the symmetric state
    double max_residual;          // max|rho_a - rho_a_tilde|
    double remainder_min_eigenvalue;
    bool remainder_psd;           // mu_0 rho_0 >= 0 within 1e-10, i.e. (mu_1, mu_2) feasible

    NoSignalingReport(DensityOperator rho_a, DensityOperator rho_a_tilde, DensityOperator rho_b,
                      double remainder_min_eigenvalue);
};

/// Uses the optimal dual decomposition.
NoSignalingReport no_signaling_check(const ud::UdInstance& inst);
/// Uses an arbitrary (mu_1, mu_2); rho_0 is whatever remainder the constraint
/// leaves, and remainder_psd reports whether that decomposition is physical.
NoSignalingReport no_signaling_check(const ud::UdInstance& inst, double mu1, double mu2);

}  // namespace retro::channel
