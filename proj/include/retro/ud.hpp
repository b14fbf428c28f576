#pragma once

// Two-pure-state unambiguous discrimination and its retrodictive dual.
//
// Instances are parametrized by the state half-angle alpha:
//   psi_{1,2} = cos(alpha)|0> +/- sin(alpha)|1>,   s = <psi_1|psi_2> = cos(2 alpha).
// The overlap angle theta with cos(theta) = s is available as a derived
// accessor; nothing in this module is parametrized by it.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>

#include "retro/check.hpp"
#include "retro/ensembles.hpp"
#include "retro/linalg.hpp"

namespace retro::ud {

/// Smallest admissible eigenvalue of Omega before the instance is treated as singular.
inline constexpr double kSingularFloor = 1e-10;

class UdInstance {
public:
    /// alpha in (0, pi/4], eta1 in (0, 1). alpha == 0 (coinciding states)
    /// throws SingularOperator; other out-of-range values throw InvalidParameter.
    static UdInstance from_alpha(double eta1, double alpha);
    /// overlap s in [0, 1); converted with alpha = arccos(s) / 2.
    static UdInstance from_overlap(double eta1, double overlap);

    double alpha() const noexcept { return alpha_; }
    double eta1() const noexcept { return eta1_; }
    double eta2() const noexcept { return eta2_; }
    double eta_max() const noexcept { return std::max(eta1_, eta2_); }
    double eta_min() const noexcept { return std::min(eta1_, eta2_); }
    double overlap() const noexcept { return overlap_; }
    /// Overlap angle: cos(theta) = s.
    double theta() const;

private:
    UdInstance(double eta1, double alpha);

    double eta1_;
    double eta2_;
    double alpha_;
    double overlap_;
};

std::pair<PureState, PureState> ud_states(const UdInstance& inst);
/// States orthogonal to psi_1 and psi_2 respectively.
std::pair<PureState, PureState> ud_orthogonal_states(const UdInstance& inst);
Ensemble ud_ensemble(const UdInstance& inst);
/// Omega = eta_1 |psi_1><psi_1| + eta_2 |psi_2><psi_2| in the computational basis.
DensityOperator omega_matrix(const UdInstance& inst);

struct OmegaClosedForm {
    double w1;     // larger eigenvalue
    double w2;     // smaller eigenvalue
    double angle;  // omega: |omega_1> = cos(omega)|0> + sin(omega)|1> carries w1

    linalg::Vector omega1() const;
    linalg::Vector omega2() const;
};

/// w_{1,2} = (1 +/- sqrt(1 - 4 eta1 eta2 sin^2(2 alpha))) / 2,
/// tan(2 omega) = (eta1 - eta2) tan(2 alpha) with 2 omega in [-pi/2, pi/2].
/// SingularOperator if w2 < kSingularFloor.
OmegaClosedForm omega_closed_form(const UdInstance& inst);

struct RetroBasis {
    PureState phi1;
    PureState phi2;

    /// Columns phi1, phi2: maps |0>, |1> onto the retrodictive basis.
    linalg::Matrix unitary() const;
};

/// phi_i = Omega^{-1/2} sqrt(eta_i) psi_i, computed numerically.
RetroBasis retro_basis(const UdInstance& inst);
/// The same vectors assembled from the eigen-decomposition closed form.
RetroBasis retro_basis_closed_form(const UdInstance& inst);

/// [[eta1, sqrt(eta1 eta2) s], [sqrt(eta1 eta2) s, eta2]]
linalg::HermitianOperator omega_in_retro_basis(const UdInstance& inst);
/// <b_i|M|b_j> for the basis vectors in `basis`.
linalg::Matrix matrix_in_basis(const linalg::Matrix& m, const RetroBasis& basis);

enum class Regime { interior, clamped };
const char* to_string(Regime r);

/// eta_max >= 1 / (1 + s^2)
Regime classify(double eta_max, double overlap);
/// 1 - 2 sqrt(eta1 eta2) s
double success_interior(double eta1, double overlap);
/// eta_max (1 - s^2)
double success_clamped(double eta_max, double overlap);

struct DualOptimum {
    double mu1;
    double mu2;
    double mu0;
    /// mu_0 rho_0^ret in the computational basis (the constraint remainder).
    linalg::HermitianOperator failure_operator;
    /// mu_0 rho_0^ret in retrodictive-basis coordinates.
    linalg::HermitianOperator failure_in_retro_basis;
    /// rho_0^ret; empty when mu_0 is below the outcome floor (orthogonal states).
    std::optional<DensityOperator> rho0_ret;
    double p_success;
    Regime regime;
};

/// Closed-form optimum of mu_1 + mu_2 subject to mu_0 rho_0^ret >= 0. Every
/// DualOptimum invariant is verified before returning (NumericIntegrityError otherwise).
DualOptimum optimal_dual(const UdInstance& inst);

/// The constraint remainder mu_0 rho_0^ret = Omega - mu_1 P_phi1 - mu_2 P_phi2,
/// in retrodictive-basis coordinates, for arbitrary (mu_1, mu_2).
linalg::Matrix constraint_remainder(const UdInstance& inst, double mu1, double mu2);

struct GridOptimum {
    double mu1;
    double mu2;
    double p_success;
};

/// Grid search over mu_1 in step multiples; for each, the largest feasible grid
/// mu_2 is found by bisection on the 2x2 positivity test of the remainder.
/// Independent of the closed form. Result does not depend on `workers`.
GridOptimum brute_force_dual(const UdInstance& inst, double grid_step, unsigned workers = 1);

struct PredictiveUdPovm {
    Povm povm;  // (Pi_1, Pi_2, Pi_0)
    double c1;
    double c2;
};

/// Pi_1 = c_1 |psi_2^perp><psi_2^perp|, Pi_2 = c_2 |psi_1^perp><psi_1^perp|, with
/// c_i set so eta_i <psi_i|Pi_i|psi_i> equals mu_i of the dual optimum.
PredictiveUdPovm optimal_predictive_povm(const UdInstance& inst);

/// eta_1 <psi_1|Pi_1|psi_1> + eta_2 <psi_2|Pi_2|psi_2>
double predictive_success(const UdInstance& inst, const Povm& povm);

/// Purity of rho_j^ret from the optimal predictive POVM and its identification
/// with |phi_j^ret><phi_j^ret| (and with sqrt(Omega)|psi^perp> normalized).
/// Outcomes with c_j = 0 are skipped.
CheckList verify_purity_identification(const UdInstance& inst, double tol = 1e-10);

}  // namespace retro::ud
