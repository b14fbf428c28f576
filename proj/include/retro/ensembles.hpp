#pragma once

// States, priors and measurements, and the source function built from them.

#include <cstddef>
#include <span>
#include <vector>

#include "retro/errors.hpp"
#include "retro/linalg.hpp"

namespace retro {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kPriorSumTol = 1e-12;

class DensityOperator;

/// Unit vector. Construction rejects norms off by more than kStateTol.
class PureState {
public:
    explicit PureState(linalg::Vector amplitudes);
    /// Rescales to unit norm; throws InvalidParameter on a (near) zero vector.
    static PureState normalized(linalg::Vector amplitudes);

    std::size_t dim() const noexcept { return amplitudes_.size(); }
    const linalg::Vector& amplitudes() const noexcept { return amplitudes_; }
    DensityOperator density() const;
    /// |psi><psi|, skipping the density-operator validation.
    linalg::Matrix projector() const { return linalg::outer(amplitudes_, amplitudes_); }

private:
    linalg::Vector amplitudes_;
};

/// Hermitian, PSD within kStateTol, unit trace within kStateTol.
class DensityOperator {
public:
    explicit DensityOperator(const linalg::HermitianOperator& op);
    explicit DensityOperator(const linalg::Matrix& m);

    const linalg::HermitianOperator& op() const noexcept { return op_; }
    const linalg::Matrix& matrix() const noexcept { return op_.matrix(); }
    std::size_t dim() const noexcept { return op_.dim(); }
    double purity() const;

private:
    linalg::HermitianOperator op_;
};

/// Prepared states with their priors. Priors are stored as given; a sum off
/// by more than kPriorSumTol is rejected, never renormalized.
class Ensemble {
public:
    Ensemble(std::vector<DensityOperator> states, std::vector<double> priors);
    static Ensemble from_pure(const std::vector<PureState>& states, std::vector<double> priors);

    std::size_t size() const noexcept { return states_.size(); }
    std::size_t dim() const noexcept { return states_.front().dim(); }
    const std::vector<DensityOperator>& states() const noexcept { return states_; }
    const std::vector<double>& priors() const noexcept { return priors_; }

private:
    std::vector<DensityOperator> states_;
    std::vector<double> priors_;
};

/// PSD elements summing to the identity, both within kStateTol.
class Povm {
public:
    explicit Povm(std::vector<linalg::HermitianOperator> elements);
    static Povm from_matrices(const std::vector<linalg::Matrix>& elements);

    std::size_t size() const noexcept { return elements_.size(); }
    std::size_t dim() const noexcept { return elements_.front().dim(); }
    const std::vector<linalg::HermitianOperator>& elements() const noexcept { return elements_; }
    const linalg::HermitianOperator& operator[](std::size_t j) const { return elements_.at(j); }

private:
    std::vector<linalg::HermitianOperator> elements_;
};

struct SourceFunction {
    DensityOperator omega;
    bool unbiased;

    explicit SourceFunction(DensityOperator omega);
    std::size_t dim() const noexcept { return omega.dim(); }
};

/// Omega = sum_i eta_i rho_i
SourceFunction source_from_ensemble(const Ensemble& e);

/// Report-style validation of raw data; never throws for bad content.
ValidationReport validate_ensemble(std::span<const linalg::Matrix> states,
                                   std::span<const double> priors);
ValidationReport validate_povm(std::span<const linalg::Matrix> elements);
ValidationReport validate(const Ensemble& e);
ValidationReport validate(const Povm& p);

}  // namespace retro
