#include "retro/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace retro::random {

using linalg::Complex;
using linalg::HermitianOperator;
using linalg::Matrix;

double standard_normal(SplitMix64& rng) {
    // Box-Muller; 1 - u keeps the logarithm finite.
    const double u = 1.0 - rng.uniform();
    const double v = rng.uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Matrix ginibre(std::size_t dim, std::size_t rank, SplitMix64& rng) {
    Matrix g(dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < rank && c < dim; ++c) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            g(r, c) = Complex(re, im);
        }
    return g;
}

HermitianOperator hermitian(std::size_t dim, SplitMix64& rng) {
    const Matrix g = ginibre(dim, dim, rng);
    return HermitianOperator((g + g.adjoint()) * Complex(0.5));
}

PureState pure_state(std::size_t dim, SplitMix64& rng) {
    linalg::Vector v(dim);
    for (auto& z : v) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        z = Complex(re, im);
    }
    return PureState::normalized(std::move(v));
}

DensityOperator density(std::size_t dim, std::size_t rank, SplitMix64& rng) {
    const Matrix g = ginibre(dim, rank, rng);
    const Matrix m = g * g.adjoint();
    return DensityOperator(m * Complex(1.0 / m.trace().real()));
}

Ensemble ensemble(std::size_t dim, std::size_t count, SplitMix64& rng) {
    std::vector<DensityOperator> states;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t rank = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(dim));
        states.push_back(density(dim, rank, rng));
        weights.push_back(-std::log(1.0 - rng.uniform()));
        total += weights.back();
    }
    for (auto& w : weights) w /= total;
    return Ensemble(std::move(states), std::move(weights));
}

Povm povm(std::size_t dim, std::size_t outcomes, SplitMix64& rng) {
    std::vector<Matrix> parts;
    Matrix sum(dim);
    // Enough total rank for S to be invertible.
    const std::size_t min_rank = (dim + outcomes - 1) / outcomes;
    for (std::size_t k = 0; k < outcomes; ++k) {
        const std::size_t drawn = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(dim));
        const std::size_t rank = std::max(min_rank, std::min(drawn, dim));
        const Matrix g = ginibre(dim, rank, rng);
        parts.push_back(g * g.adjoint());
        sum += parts.back();
    }
    const Matrix norm = linalg::inverse_sqrt(HermitianOperator(sum)).matrix();
    std::vector<Matrix> elements;
    for (const auto& p : parts) elements.push_back(norm * p * norm);
    return Povm::from_matrices(elements);
}

Matrix unitary(std::size_t dim, SplitMix64& rng) {
    return linalg::hermitian_eig(hermitian(dim, rng)).eigenvectors;
}

}  // namespace retro::random
