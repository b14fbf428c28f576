#include "retro/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "retro/errors.hpp"

namespace retro::linalg {

namespace {

constexpr double kJacobiTol = 1e-14;
constexpr int kMaxSweeps = 100;
constexpr double kPhaseThreshold = 1e-12;

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw DimensionMismatch(a, b, what);
}

double off_diagonal_norm(const Matrix& m) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c)
            if (r != c) acc += std::norm(m(r, c));
    return std::sqrt(acc);
}

}  // namespace

Matrix::Matrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {
    if (dim == 0) throw InvalidParameter("matrix dimension must be at least 1");
}

Matrix::Matrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim == 0) throw InvalidParameter("matrix dimension must be at least 1");
    if (entries_.size() != dim * dim) throw DimensionMismatch(dim * dim, entries_.size(), "matrix entries");
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t dim = rows.size();
    std::vector<Complex> entries;
    entries.reserve(dim * dim);
    for (const auto& row : rows) {
        if (row.size() != dim) throw DimensionMismatch(dim, row.size(), "matrix row");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(dim, std::move(entries));
}

Matrix Matrix::adjoint() const {
    Matrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Complex Matrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

bool Matrix::is_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

Vector Matrix::column(std::size_t c) const {
    Vector v(dim_);
    for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
    return v;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_dim(dim_, rhs.dim_, "matrix addition");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_dim(dim_, rhs.dim_, "matrix subtraction");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
    return *this;
}

Matrix& Matrix::operator*=(Complex scale) {
    for (auto& z : entries_) z *= scale;
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix m, Complex scale) { return m *= scale; }
Matrix operator*(Complex scale, Matrix m) { return m *= scale; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    require_same_dim(lhs.dim(), rhs.dim(), "matrix product");
    const std::size_t n = lhs.dim();
    Matrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(r, k);
            if (a == Complex{}) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += a * rhs(k, c);
        }
    return out;
}

Vector operator*(const Matrix& m, const Vector& v) {
    require_same_dim(m.dim(), v.size(), "matrix-vector product");
    Vector out(m.dim());
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) out[r] += m(r, c) * v[c];
    return out;
}

Matrix outer(const Vector& v, const Vector& w) {
    require_same_dim(v.size(), w.size(), "outer product");
    Matrix out(v.size());
    for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = 0; c < w.size(); ++c) out(r, c) = v[r] * std::conj(w[c]);
    return out;
}

Complex inner(const Vector& v, const Vector& w) {
    require_same_dim(v.size(), w.size(), "inner product");
    Complex acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += std::conj(v[i]) * w[i];
    return acc;
}

double norm(const Vector& v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

Vector scaled(const Vector& v, Complex scale) {
    Vector out(v);
    for (auto& z : out) z *= scale;
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(x * y);
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    Matrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
    return out;
}

Complex trace_product(const Matrix& a, const Matrix& b) {
    require_same_dim(a.dim(), b.dim(), "trace of product");
    Complex acc = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) acc += a(r, c) * b(c, r);
    return acc;
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (const auto& z : m.entries()) best = std::max(best, std::abs(z));
    return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_dim(a.dim(), b.dim(), "matrix comparison");
    double best = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        best = std::max(best, std::abs(a.entries()[i] - b.entries()[i]));
    return best;
}

double max_abs_diff(const Vector& a, const Vector& b) {
    require_same_dim(a.size(), b.size(), "vector comparison");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (const auto& z : m.entries()) acc += std::norm(z);
    return std::sqrt(acc);
}

double hermiticity_residual(const Matrix& m) {
    double best = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = r; c < m.dim(); ++c)
            best = std::max(best, std::abs(m(r, c) - std::conj(m(c, r))));
    return best;
}

Matrix partial_trace(const Matrix& m, std::size_t dim_a, std::size_t dim_b, Subsystem traced) {
    require_same_dim(dim_a * dim_b, m.dim(), "partial trace");
    if (traced == Subsystem::b) {
        Matrix out(dim_a);
        for (std::size_t i = 0; i < dim_a; ++i)
            for (std::size_t j = 0; j < dim_a; ++j)
                for (std::size_t k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
        return out;
    }
    Matrix out(dim_b);
    for (std::size_t i = 0; i < dim_b; ++i)
        for (std::size_t j = 0; j < dim_b; ++j)
            for (std::size_t k = 0; k < dim_a; ++k) out(i, j) += m(k * dim_b + i, k * dim_b + j);
    return out;
}

HermitianOperator::HermitianOperator(const Matrix& m, double tol) : m_(m.dim()) {
    if (!m.is_finite()) throw NumericIntegrityError("matrix has non-finite entries");
    const double scaled_tol = tol * std::max(1.0, max_abs(m));
    const double residual = hermiticity_residual(m);
    if (residual > scaled_tol) throw NonHermitianInput(residual, scaled_tol);
    const std::size_t n = m.dim();
    for (std::size_t r = 0; r < n; ++r) {
        m_(r, r) = m(r, r).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            const Complex avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
            m_(r, c) = avg;
            m_(c, r) = std::conj(avg);
        }
    }
}

Matrix Spectrum::reconstruct() const {
    const std::size_t n = eigenvalues.size();
    Matrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vector v = eigenvector(k);
        out += outer(v, v) * Complex(eigenvalues[k]);
    }
    return out;
}

Spectrum hermitian_eig(const Matrix& m) { return hermitian_eig(HermitianOperator(m)); }

Spectrum hermitian_eig(const HermitianOperator& h) {
    const std::size_t n = h.dim();
    Matrix a = h.matrix();
    Matrix v = Matrix::identity(n);
    const double threshold = kJacobiTol * std::max(1.0, frobenius_norm(a));

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) < threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                // Phase the q axis so a(p,q) becomes real, then a real Jacobi rotation.
                const Complex phase = std::conj(apq / mag);
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                const Complex upp = cs, upq = sn, uqp = -sn * phase, uqq = cs * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * upp + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
    }
    if (!converged && off_diagonal_norm(a) >= threshold)
        throw NumericIntegrityError("Jacobi eigensolver did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    Spectrum out{std::vector<double>(n), Matrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.eigenvalues[k] = a(src, src).real();
        Complex fix = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double mag = std::abs(v(r, src));
            if (mag > kPhaseThreshold) {
                fix = std::conj(v(r, src)) / mag;
                break;
            }
        }
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, src) * fix;
        // The leading component is real positive by construction; drop rounding residue.
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(out.eigenvectors(r, k)) > kPhaseThreshold) {
                out.eigenvectors(r, k) = std::abs(out.eigenvectors(r, k));
                break;
            }
        }
    }
    return out;
}

namespace spectral {

SpectralFunction sqrt() {
    return {[](double x) {
                if (x >= 0.0) return std::sqrt(x);
                return x >= -kDefaultMinEig ? 0.0 : std::nan("");
            },
            false, "sqrt"};
}

SpectralFunction inverse_sqrt() {
    return {[](double x) { return 1.0 / std::sqrt(x); }, true, "inverse_sqrt"};
}

SpectralFunction inverse() {
    return {[](double x) { return 1.0 / x; }, true, "inverse"};
}

}  // namespace spectral

HermitianOperator spectral_map(const HermitianOperator& h, const SpectralFunction& f,
                               double min_eig, PoleHandling poles) {
    const Spectrum spectrum = hermitian_eig(h);
    const std::size_t n = h.dim();
    if (f.pole_at_zero && poles == PoleHandling::strict && spectrum.eigenvalues.front() < min_eig)
        throw SingularOperator(spectrum.eigenvalues.front(), min_eig);

    Matrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = spectrum.eigenvalues[k];
        if (f.pole_at_zero && lambda < min_eig) continue;  // support-restricted
        const double value = f.fn(lambda);
        if (!std::isfinite(value))
            throw NumericIntegrityError("spectral function '" + f.name +
                                        "' is undefined at eigenvalue " + std::to_string(lambda));
        const Vector vk = spectrum.eigenvector(k);
        out += outer(vk, vk) * Complex(value);
    }
    return HermitianOperator(out);
}

HermitianOperator sqrt_psd(const HermitianOperator& h) { return spectral_map(h, spectral::sqrt()); }

HermitianOperator inverse_sqrt(const HermitianOperator& h, double min_eig, PoleHandling poles) {
    return spectral_map(h, spectral::inverse_sqrt(), min_eig, poles);
}

double min_eigenvalue(const HermitianOperator& h) { return hermitian_eig(h).eigenvalues.front(); }

bool is_psd(const HermitianOperator& h, double tol) { return min_eigenvalue(h) >= -tol; }

}  // namespace retro::linalg
