#pragma once

// The acceptance criteria as runnable suites. `retrodictor verify` and the
// acceptance test binary both call these.

#include <string>
#include <vector>

#include "retro/check.hpp"
#include "retro/ensembles.hpp"

namespace retro::acceptance {

struct CriterionResult {
    std::string id;     // "AC1" .. "AC9"
    std::string title;
    CheckList checks;
    std::vector<std::string> notes;
    double seconds = 0.0;

    bool passed() const { return !checks.empty() && checks.all_passed(); }
};

struct Case {
    Ensemble ensemble;
    Povm povm;
};

/// Seeded random (ensemble, POVM) pairs, D cycling over {2, 3, 4}, keeping only
/// those with min eig(Omega) >= 1e-3 and every mu_j >= 1e-3.
std::vector<Case> random_corpus(std::size_t count, std::uint64_t seed);

/// Evenly spaced 25 x 25 grid over eta_max in [0.5, 0.98], s in [0.02, 0.95].
struct GridPoint {
    double eta_max;
    double overlap;
};
std::vector<GridPoint> ud_grid();

CriterionResult ac1_symmetric_born();
CriterionResult ac2_transform_identities();
CriterionResult ac3_unbiased_reduction();
CriterionResult ac4_ud_success();
CriterionResult ac5_retro_basis();
CriterionResult ac6_purity_identification();
CriterionResult ac7_channel();
CriterionResult ac8_monte_carlo();
CriterionResult ac9_failure_modes();

/// "retrodiction" (AC1-3), "ud" (AC4-6), "channel" (AC7), "sim" (AC8),
/// "failure" (AC9), "all".
const std::vector<std::string>& suite_names();
/// InvalidParameter for an unknown name.
std::vector<CriterionResult> run_suite(const std::string& name);

}  // namespace retro::acceptance
