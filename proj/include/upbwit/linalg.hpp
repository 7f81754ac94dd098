// linalg.hpp — dense complex matrices on small composite Hilbert spaces:
// Kronecker products, trace inner product, partial transposition, and a
// cyclic-Jacobi Hermitian eigensolver. Everything here is a pure function
// of its inputs; values are safe to share across threads.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace upbwit::linalg {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Sized at construction; entries mutable.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
    /// Column vector as an n-by-1 matrix.
    static Matrix column(const std::vector<cplx>& v);
    /// Rank-one projector |v><v| (v need not be normalized; no scaling applied).
    static Matrix projector(const std::vector<cplx>& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    Matrix adjoint() const;
    Matrix transpose() const;
    Matrix conjugate() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    /// max |(*this - other)(i,j)|; shapes must match.
    double max_abs_diff(const Matrix& other) const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(cplx z);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(cplx z, Matrix a) { return a *= z; }
    friend Matrix operator*(Matrix a, cplx z) { return a *= z; }
    friend Matrix operator*(double x, Matrix a) { return a *= cplx(x, 0.0); }
    friend Matrix operator*(Matrix a, double x) { return a *= cplx(x, 0.0); }
    Matrix operator*(const Matrix& o) const;

    std::vector<cplx> apply(const std::vector<cplx>& v) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// Local dimensions d_1..d_n of a tensor-product space; N = prod d_k.
/// Requires n >= 2 and every d_k >= 2.
struct Dims {
    std::vector<std::size_t> local;

    Dims() = default;
    explicit Dims(std::vector<std::size_t> d);

    std::size_t parties() const { return local.size(); }
    std::size_t total() const;

    bool operator==(const Dims&) const = default;
};

/// max |A(i,j) - conj(A(j,i))| over all entries.
double hermiticity_residual(const Matrix& a);

bool is_hermitian(const Matrix& a, double tol = 1e-12);

/// (A + A^dagger)/2 when the residual is within tol; throws otherwise.
/// Absorbs round-off without masking genuinely non-Hermitian inputs.
Matrix hermitized(const Matrix& a, double tol = 1e-12);

Matrix kron(const Matrix& a, const Matrix& b);
std::vector<cplx> kron(const std::vector<cplx>& a, const std::vector<cplx>& b);

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b);
double norm(const std::vector<cplx>& v);

/// Re <v|W|v> for Hermitian W.
double expectation(const Matrix& w, const std::vector<cplx>& v);

/// Tr(A^dagger B) for Hermitian A, B of equal shape. The value is real up to
/// round-off; the imaginary residue is checked and discarded.
double trace_inner(const Matrix& a, const Matrix& b);

/// Transpose the tensor factors listed in `subset` (0-based party indices).
/// Preserves trace and Hermiticity; applying the same subset twice is the
/// identity, and subset + complement equals the full transpose.
Matrix partial_transpose(const Matrix& rho, const Dims& dims,
                         const std::vector<std::size_t>& subset);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // orthonormal columns, same order
};

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Terminates when the off-diagonal Frobenius residual falls below
/// 1e-12 * max(1, ||A||_F) or after 100 sweeps; the sweep limit is reported
/// as an error, never silently. Deterministic for fixed input.
Spectrum hermitian_eig(const Matrix& a);

struct PsdCheck {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

/// min eigenvalue >= -tol test for a Hermitian matrix.
PsdCheck is_psd(const Matrix& a, double tol = 1e-9);

/// Solve the m-by-m real system A x = b by Gaussian elimination with partial
/// pivoting. Throws on a singular pivot.
std::vector<double> solve_real(std::vector<double> a, std::vector<double> b);

}  // namespace upbwit::linalg
