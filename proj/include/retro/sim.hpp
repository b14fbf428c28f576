#pragma once

// Seeded Monte Carlo of the prepare-and-measure channel: draw a state index
// from the priors, then an outcome from the Born probabilities of that state.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "retro/ensembles.hpp"

namespace retro::sim {

/// Trials per shard. Shard k draws from SplitMix64(seed ^ k), so counts depend
/// only on (inputs, n, seed), never on how shards are spread over workers.
inline constexpr std::uint64_t kShardSize = std::uint64_t{1} << 16;

struct SampleCounts {
    std::uint64_t n_total = 0;
    std::vector<std::vector<std::uint64_t>> counts;  // [prepared i][outcome j]
    std::uint64_t seed = 0;
    std::string rng_algorithm;

    std::uint64_t prepared(std::size_t i) const;
    std::uint64_t observed(std::size_t j) const;
    std::uint64_t sum() const;
};

/// Born probabilities Tr(Pi_j rho_i) accumulated in long double, clamped into
/// [0, 1] and cumulated so each row ends at exactly 1.
std::vector<std::vector<long double>> outcome_cdfs(const Ensemble& e, const Povm& povm);

/// `workers` == 0 uses the hardware concurrency.
SampleCounts sample(const Ensemble& e, const Povm& povm, std::uint64_t n, std::uint64_t seed,
                    unsigned workers = 1);

enum class Quantity {
    forward,   // P(b_j | a_i)
    backward,  // P(a_i | b_j)
    marginal,  // mu_j; i is unused
};
const char* to_string(Quantity q);

struct EmpiricalEntry {
    Quantity quantity;
    std::size_t i;
    std::size_t j;
    std::uint64_t trials;  // size of the conditioning sample
    double empirical;
    double analytic;
    double deviation;
    double bound;  // 3 sigma binomial
    bool flagged;
};

struct EmpiricalReport {
    std::vector<EmpiricalEntry> entries;
    /// Backward analytic values come from Tr(Pi_i^ret rho_j^ret) when the
    /// source is invertible, otherwise from Bayes' rule.
    bool backward_from_symmetric = false;

    std::size_t flagged() const;
};

EmpiricalReport empirical_report(const SampleCounts& counts, const Ensemble& e, const Povm& povm);

}  // namespace retro::sim
