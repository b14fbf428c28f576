#pragma once

// Seeded generators of random states, ensembles and POVMs for property tests
// and the verification suites. Deterministic for a given generator state.

#include <cstddef>

#include "retro/ensembles.hpp"
#include "retro/rng.hpp"

namespace retro::random {

double standard_normal(SplitMix64& rng);
/// Square matrix of i.i.d. standard complex Gaussians, optionally truncated to
/// `rank` nonzero columns.
linalg::Matrix ginibre(std::size_t dim, std::size_t rank, SplitMix64& rng);
/// Random Hermitian matrix with Gaussian entries.
linalg::HermitianOperator hermitian(std::size_t dim, SplitMix64& rng);

PureState pure_state(std::size_t dim, SplitMix64& rng);
/// G G^dagger / Tr(G G^dagger) with G of the given rank (1 gives a pure state).
DensityOperator density(std::size_t dim, std::size_t rank, SplitMix64& rng);
/// Priors from a flat Dirichlet, states of random rank.
Ensemble ensemble(std::size_t dim, std::size_t count, SplitMix64& rng);
/// S^{-1/2} A_k S^{-1/2} with random PSD A_k and S = sum_k A_k.
Povm povm(std::size_t dim, std::size_t outcomes, SplitMix64& rng);
/// Columns of the eigenbasis of a random Hermitian matrix.
linalg::Matrix unitary(std::size_t dim, SplitMix64& rng);

}  // namespace retro::random
