#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "retro/errors.hpp"
#include "retro/linalg.hpp"
#include "retro/random.hpp"

using namespace retro;
using namespace retro::linalg;

namespace {

Eigen::MatrixXcd to_eigen(const Matrix& m) {
    Eigen::MatrixXcd out(m.dim(), m.dim());
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) out(r, c) = m(r, c);
    return out;
}

double projector_gap(const Vector& a, const Vector& b) { return max_abs_diff(outer(a, a), outer(b, b)); }

Matrix omega_ud(double eta1, double alpha) {
    const double c = std::cos(alpha), s = std::sin(alpha);
    return Matrix::from_rows({{c * c, (2 * eta1 - 1) * s * c}, {(2 * eta1 - 1) * s * c, s * s}});
}

}  // namespace

TEST_CASE("matrix basics") {
    const Matrix a = Matrix::from_rows({{1.0, Complex(0, 2)}, {3.0, 4.0}});
    CHECK(a.trace() == Complex(5.0));
    CHECK(a.adjoint()(0, 1) == Complex(3.0));
    CHECK(a.adjoint()(1, 0) == Complex(0, -2));
    CHECK(max_abs_diff(a * Matrix::identity(2), a) == 0.0);
    CHECK(hermiticity_residual(a) == doctest::Approx(std::abs(Complex(0, 2) - 3.0)));
    CHECK_THROWS_AS(Matrix(0), InvalidParameter);
    CHECK_THROWS_AS(Matrix(2, {1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST_CASE("outer, inner and Kronecker products") {
    const Vector v{Complex(1, 1), 2.0};
    const Vector w{3.0, Complex(0, -1)};
    CHECK(inner(v, w) == std::conj(v[0]) * w[0] + std::conj(v[1]) * w[1]);
    CHECK(outer(v, w)(0, 1) == v[0] * std::conj(w[1]));
    const Vector k = kron(v, w);
    REQUIRE(k.size() == 4);
    CHECK(k[1] == v[0] * w[1]);
    CHECK(k[2] == v[1] * w[0]);
    const Matrix km = kron(outer(v, v), outer(w, w));
    CHECK(max_abs_diff(km, outer(k, k)) < 1e-14);
}

TEST_CASE("HermitianOperator rejects non-Hermitian and non-finite input") {
    CHECK_THROWS_AS(HermitianOperator(Matrix::from_rows({{1.0, 0.5}, {0.0, 1.0}})), NonHermitianInput);
    CHECK_THROWS_AS(HermitianOperator(Matrix::from_rows({{1.0, Complex(0, 1)}, {Complex(0, 1), 1.0}})),
                    NonHermitianInput);
    CHECK_THROWS_AS(HermitianOperator(Matrix::from_rows({{std::nan(""), 0.0}, {0.0, 1.0}})), NumericIntegrityError);
    const HermitianOperator h(Matrix::from_rows({{1.0, Complex(0.5, 1e-14)}, {Complex(0.5, 0.0), 2.0}}));
    CHECK(hermiticity_residual(h.matrix()) == 0.0);
}

TEST_CASE("eigen: Pauli X, identity and the UD source") {
    const Spectrum x = hermitian_eig(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
    CHECK(x.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(x.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-15));
    const double r = 1 / std::sqrt(2.0);
    CHECK(projector_gap(x.eigenvector(0), {r, -r}) < 1e-14);
    CHECK(projector_gap(x.eigenvector(1), {r, r}) < 1e-14);

    const Spectrum id = hermitian_eig(Matrix::identity(2));
    CHECK(id.eigenvalues == std::vector<double>{1.0, 1.0});
    CHECK(std::abs(inner(id.eigenvector(0), id.eigenvector(1))) < 1e-15);

    // eta = (1/2, 1/2), alpha = pi/8: w = (1 -/+ sqrt(1 - sin^2(pi/4))) / 2, frozen from a 30-digit evaluation.
    const Spectrum ud = hermitian_eig(omega_ud(0.5, std::numbers::pi / 8));
    CHECK(std::abs(ud.eigenvalues[0] - 0.1464466094067262378) < 1e-15);
    CHECK(std::abs(ud.eigenvalues[1] - 0.8535533905932737622) < 1e-15);
}

TEST_CASE("eigen: biased UD source against frozen values") {
    // eta = (0.7, 0.3), alpha = pi/6, evaluated independently at 30 digits.
    const Spectrum s = hermitian_eig(omega_ud(0.7, std::numbers::pi / 6));
    CHECK(std::abs(s.eigenvalues[0] - 0.1958618734850890155) < 1e-14);
    CHECK(std::abs(s.eigenvalues[1] - 0.8041381265149109844) < 1e-14);
    CHECK(projector_gap(s.eigenvector(1), {0.9544618736562467964, 0.2983329209735438798}) < 1e-14);
    // Phase convention: first non-negligible component real and positive.
    CHECK(s.eigenvector(1)[0].real() > 0);
    CHECK(s.eigenvector(1)[0].imag() == 0.0);
}

TEST_CASE("eigen: random Hermitian matrices against Eigen") {
    SplitMix64 rng(2024);
    double worst_recon = 0, worst_values = 0, worst_sqrt = 0, worst_unitary = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t dim = 1 + trial % 8;
        const HermitianOperator h = random::hermitian(dim, rng);
        const Spectrum s = hermitian_eig(h);
        const double scale = std::max(1.0, frobenius_norm(h.matrix()));
        worst_recon = std::max(worst_recon, max_abs_diff(s.reconstruct(), h.matrix()) / scale);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> oracle(to_eigen(h.matrix()));
        for (std::size_t k = 0; k < dim; ++k)
            worst_values = std::max(worst_values, std::abs(s.eigenvalues[k] - oracle.eigenvalues()(k)) / scale);
        CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));

        worst_unitary = std::max(worst_unitary, max_abs_diff(s.eigenvectors.adjoint() * s.eigenvectors,
                                                             Matrix::identity(dim)));

        // Shift to PSD before taking the square root.
        const Matrix psd = h.matrix() * h.matrix();
        const HermitianOperator root = sqrt_psd(HermitianOperator(psd));
        worst_sqrt = std::max(worst_sqrt, max_abs_diff(root.matrix() * root.matrix(), psd) /
                                              std::max(1.0, max_abs(psd)));
    }
    CHECK(worst_recon < 1e-10);
    CHECK(worst_values < 1e-10);
    CHECK(worst_unitary < 1e-10);
    CHECK(worst_sqrt < 1e-9);
}

TEST_CASE("spectral maps") {
    const std::vector<double> d{4.0, 9.0};
    const HermitianOperator r = sqrt_psd(HermitianOperator(Matrix::diagonal(d)));
    CHECK(max_abs_diff(r.matrix(), Matrix::from_rows({{2.0, 0.0}, {0.0, 3.0}})) < 1e-15);

    const HermitianOperator half(Matrix::identity(2) * Complex(0.5));
    CHECK(max_abs_diff(inverse_sqrt(half).matrix(), Matrix::identity(2) * Complex(std::sqrt(2.0))) < 1e-14);

    // Round trip: (Omega^{-1/2})^2 inverted recovers Omega.
    const HermitianOperator omega(omega_ud(0.7, std::numbers::pi / 6));
    const HermitianOperator m = inverse_sqrt(omega);
    const HermitianOperator back = spectral_map(HermitianOperator(m.matrix() * m.matrix()), spectral::inverse());
    CHECK(max_abs_diff(back.matrix(), omega.matrix()) < 1e-10);
}

TEST_CASE("inverse square root sandwich on random positive matrices") {
    SplitMix64 rng(77);
    double worst = 0;
    int used = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dim = 2 + trial % 7;
        const Matrix g = random::ginibre(dim, dim, rng);
        const HermitianOperator h(g * g.adjoint());
        if (min_eigenvalue(h) < 1e-6) continue;
        const Matrix s = inverse_sqrt(h).matrix();
        worst = std::max(worst, max_abs_diff(s * h.matrix() * s, Matrix::identity(dim)));
        ++used;
    }
    CHECK(used > 400);
    CHECK(worst < 1e-9);
}

TEST_CASE("pole handling") {
    const HermitianOperator singular(Matrix::diagonal(std::vector<double>{1.0, 0.0}));
    CHECK_THROWS_AS(inverse_sqrt(singular), SingularOperator);
    const HermitianOperator restricted =
        inverse_sqrt(singular, kDefaultMinEig, PoleHandling::support_restricted);
    CHECK(max_abs_diff(restricted.matrix(), Matrix::diagonal(std::vector<double>{1.0, 0.0})) < 1e-15);
    // sqrt has no pole; tiny negative eigenvalues are treated as zero.
    const HermitianOperator nearly(Matrix::diagonal(std::vector<double>{1.0, -1e-12}));
    CHECK(max_abs_diff(sqrt_psd(nearly).matrix(), Matrix::diagonal(std::vector<double>{1.0, 0.0})) < 1e-15);
    const HermitianOperator negative(Matrix::diagonal(std::vector<double>{1.0, -1e-3}));
    CHECK_THROWS_AS(sqrt_psd(negative), NumericIntegrityError);
}

TEST_CASE("is_psd") {
    CHECK(is_psd(HermitianOperator(Matrix::identity(2)), 1e-10));
    CHECK_FALSE(is_psd(HermitianOperator(Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}})), 1e-10));
}

TEST_CASE("partial trace of product operators") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t da = 2 + trial % 3, db = 2 + (trial / 3) % 3;
        const Matrix a = random::hermitian(da, rng).matrix();
        const Matrix b = random::hermitian(db, rng).matrix();
        const Matrix ab = kron(a, b);
        CHECK(max_abs_diff(partial_trace(ab, da, db, Subsystem::b), a * b.trace()) < 1e-12);
        CHECK(max_abs_diff(partial_trace(ab, da, db, Subsystem::a), b * a.trace()) < 1e-12);
    }
    CHECK_THROWS_AS(partial_trace(Matrix::identity(4), 3, 2, Subsystem::a), DimensionMismatch);
}

TEST_CASE("eigensolver is safe to call concurrently") {
    SplitMix64 rng(9);
    const HermitianOperator h = random::hermitian(6, rng);
    const Spectrum expected = hermitian_eig(h);
    std::vector<int> same(8, 0);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] { same[t] = hermitian_eig(h).eigenvalues == expected.eigenvalues; });
    for (auto& t : threads) t.join();
    CHECK(std::all_of(same.begin(), same.end(), [](int s) { return s == 1; }));
}
