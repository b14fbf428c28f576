#pragma once

// Dense complex linear algebra for small dimensions (D <= 8).
//
// Matrices are row-major. Everything here is a value type; operations are
// pure functions and safe to call concurrently.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace retro::linalg {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultMinEig = 1e-10;

class Matrix {
public:
    /// Zero matrix of the given dimension. Throws InvalidParameter for dim == 0.
    explicit Matrix(std::size_t dim);
    Matrix(std::size_t dim, std::vector<Complex> entries);

    static Matrix identity(std::size_t dim);
    static Matrix diagonal(std::span<const double> values);
    static Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t dim() const noexcept { return dim_; }
    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    std::span<const Complex> entries() const noexcept { return entries_; }

    Matrix adjoint() const;
    Complex trace() const;
    bool is_finite() const;
    Vector column(std::size_t c) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(Complex scale);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t dim_;
    std::vector<Complex> entries_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(Matrix m, Complex scale);
Matrix operator*(Complex scale, Matrix m);
Vector operator*(const Matrix& m, const Vector& v);

/// v w^dagger
Matrix outer(const Vector& v, const Vector& w);
/// <v|w>, conjugate-linear in v.
Complex inner(const Vector& v, const Vector& w);
double norm(const Vector& v);
Vector scaled(const Vector& v, Complex scale);
Vector kron(const Vector& a, const Vector& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// Tr(a b) without forming the product.
Complex trace_product(const Matrix& a, const Matrix& b);

double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);
double frobenius_norm(const Matrix& m);
/// max |m(i,j) - conj(m(j,i))|
double hermiticity_residual(const Matrix& m);

enum class Subsystem { a, b };

/// Traces out one factor of an operator on C^{dim_a} (x) C^{dim_b} (index order a-then-b).
Matrix partial_trace(const Matrix& m, std::size_t dim_a, std::size_t dim_b, Subsystem traced);

/// A matrix certified Hermitian within kHermitianTol (scaled by max(1, max|entry|)).
/// Construction symmetrizes to (M + M^dagger)/2 so downstream code sees an exactly
/// Hermitian matrix.
class HermitianOperator {
public:
    explicit HermitianOperator(const Matrix& m, double tol = kHermitianTol);

    const Matrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return m_.dim(); }
    double trace() const { return m_.trace().real(); }

private:
    Matrix m_;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // column k pairs with eigenvalues[k]

    Vector eigenvector(std::size_t k) const { return eigenvectors.column(k); }
    Matrix reconstruct() const;
};

/// Cyclic complex Jacobi. Eigenvectors are phase-fixed so that the first
/// component with modulus above 1e-12 is real and positive.
Spectrum hermitian_eig(const HermitianOperator& h);
Spectrum hermitian_eig(const Matrix& m);

enum class PoleHandling {
    strict,              // SingularOperator if any eigenvalue < min_eig
    support_restricted,  // apply f on eigenvalues >= min_eig, zero elsewhere
};

struct SpectralFunction {
    std::function<double(double)> fn;
    bool pole_at_zero = false;
    std::string name;
};

namespace spectral {
/// Tolerates eigenvalues down to -1e-10 (treated as 0); below that the map is undefined.
SpectralFunction sqrt();
SpectralFunction inverse_sqrt();
SpectralFunction inverse();
}  // namespace spectral

/// Sum_k f(lambda_k) v_k v_k^dagger.
HermitianOperator spectral_map(const HermitianOperator& h, const SpectralFunction& f,
                               double min_eig = kDefaultMinEig,
                               PoleHandling poles = PoleHandling::strict);

HermitianOperator sqrt_psd(const HermitianOperator& h);
HermitianOperator inverse_sqrt(const HermitianOperator& h, double min_eig = kDefaultMinEig,
                               PoleHandling poles = PoleHandling::strict);

double min_eigenvalue(const HermitianOperator& h);
bool is_psd(const HermitianOperator& h, double tol);

}  // namespace retro::linalg
