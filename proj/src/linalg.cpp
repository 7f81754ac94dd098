#include "upbwit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace upbwit::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        std::size_t j = 0;
        for (const auto& z : row) m(i, j++) = z;
        ++i;
    }
    return m;
}

Matrix Matrix::column(const std::vector<cplx>& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix Matrix::projector(const std::vector<cplx>& v) {
    const std::size_t n = v.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

Matrix Matrix::conjugate() const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
    return m;
}

cplx Matrix::trace() const {
    if (!square()) throw std::invalid_argument("trace: matrix not square");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double s = 0.0;
    for (const auto& z : a_) s = std::max(s, std::abs(z));
    return s;
}

double Matrix::max_abs_diff(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s = std::max(s, std::abs(a_[i] - other.a_[i]));
    return s;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("operator+=: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("operator-=: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(cplx z) {
    for (auto& v : a_) v *= z;
    return *this;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("operator*: shape mismatch");
    Matrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx aik = (*this)(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += aik * o(k, j);
        }
    }
    return m;
}

std::vector<cplx> Matrix::apply(const std::vector<cplx>& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("apply: shape mismatch");
    std::vector<cplx> out(rows_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rows_; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Dims::Dims(std::vector<std::size_t> d) : local(std::move(d)) {
    if (local.size() < 2) throw std::invalid_argument("Dims: need at least two tensor factors");
    for (const auto dk : local)
        if (dk < 2) throw std::invalid_argument("Dims: every local dimension must be >= 2");
}

std::size_t Dims::total() const {
    std::size_t n = 1;
    for (const auto dk : local) n *= dk;
    return n;
}

double hermiticity_residual(const Matrix& a) {
    if (!a.square()) throw std::invalid_argument("hermiticity_residual: matrix not square");
    double r = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
    return r;
}

bool is_hermitian(const Matrix& a, double tol) {
    return a.square() && hermiticity_residual(a) <= tol;
}

Matrix hermitized(const Matrix& a, double tol) {
    const double r = hermiticity_residual(a);
    if (r > tol)
        throw std::invalid_argument("hermitized: residual " + std::to_string(r) +
                                    " exceeds tolerance");
    Matrix m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        m(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const cplx z = 0.5 * (a(i, j) + std::conj(a(j, i)));
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return m;
}

std::vector<cplx> kron(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() * b.size());
    std::size_t idx = 0;
    for (const auto& x : a)
        for (const auto& y : b) out[idx++] = x * y;
    return out;
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double expectation(const Matrix& w, const std::vector<cplx>& v) {
    if (!w.square() || w.rows() != v.size())
        throw std::invalid_argument("expectation: shape mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        cplx row = 0.0;
        for (std::size_t j = 0; j < w.cols(); ++j) row += w(i, j) * v[j];
        s += std::conj(v[i]) * row;
    }
    return s.real();
}

double trace_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace_inner: shape mismatch");
    constexpr double kHermTol = 1e-12;
    if (!is_hermitian(a, kHermTol) || !is_hermitian(b, kHermTol))
        throw std::invalid_argument("trace_inner: inputs must be Hermitian within 1e-12");
    // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += std::conj(a.data()[i]) * b.data()[i];
    const double scale = std::max(1.0, a.frobenius_norm() * b.frobenius_norm());
    if (std::abs(s.imag()) > 1e-12 * scale)
        throw std::runtime_error("trace_inner: imaginary residue beyond tolerance");
    return s.real();
}

namespace {

std::vector<std::size_t> tensor_strides(const Dims& dims) {
    const std::size_t n = dims.parties();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims.local[k];
    return stride;
}

}  // namespace

Matrix partial_transpose(const Matrix& rho, const Dims& dims,
                         const std::vector<std::size_t>& subset) {
    const std::size_t n = dims.parties();
    const std::size_t total = dims.total();
    if (!rho.square() || rho.rows() != total)
        throw std::invalid_argument("partial_transpose: matrix size does not match dims");
    std::vector<bool> flip(n, false);
    for (const auto k : subset) {
        if (k >= n) throw std::invalid_argument("partial_transpose: subset index out of range");
        if (flip[k]) throw std::invalid_argument("partial_transpose: duplicate subset index");
        flip[k] = true;
    }

    const auto stride = tensor_strides(dims);
    // digits[i][k]: k-th local index of composite index i
    std::vector<std::vector<std::size_t>> digits(total, std::vector<std::size_t>(n));
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (std::size_t k = 0; k < n; ++k) {
            digits[i][k] = rem / stride[k];
            rem %= stride[k];
        }
    }

    Matrix out(total, total);
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < total; ++j) {
            std::size_t ii = 0, jj = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t di = digits[i][k], dj = digits[j][k];
                ii += (flip[k] ? dj : di) * stride[k];
                jj += (flip[k] ? di : dj) * stride[k];
            }
            out(ii, jj) = rho(i, j);
        }
    }
    return out;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

Spectrum hermitian_eig(const Matrix& a_in) {
    if (!a_in.square()) throw std::invalid_argument("hermitian_eig: matrix not square");
    Matrix a = hermitized(a_in);  // rejects residual > 1e-12
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);

    if (n == 1) return {{a(0, 0).real()}, v};

    const double tol = 1e-12 * std::max(1.0, a.frobenius_norm());
    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const cplx phase = apq / r;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Unitary plane rotation J with J_pp = c, J_pq = s e^{i phi},
                // J_qp = -s e^{-i phi}, J_qq = c annihilates A_pq when
                // t^2 + 2 tau t - 1 = 0 with tau = (A_qq - A_pp)/(2|A_pq|).
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {  // A <- A J
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {  // A <- J^dagger A
                    const cplx api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * phase * aqi;
                    a(q, i) = s * std::conj(phase) * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {  // V <- V J
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(phase) * viq;
                    v(i, q) = s * phase * vip + c * viq;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (!converged && off_diagonal_norm(a) > tol)
        throw std::runtime_error("hermitian_eig: no convergence within 100 Jacobi sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a(x, x).real() < a(y, y).real();
    });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        spec.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) spec.eigenvectors(i, k) = v(i, order[k]);
    }
    return spec;
}

PsdCheck is_psd(const Matrix& a, double tol) {
    const auto spec = hermitian_eig(a);
    const double min_eig = spec.eigenvalues.front();
    return {min_eig >= -tol, min_eig};
}

std::vector<double> solve_real(std::vector<double> a, std::vector<double> b) {
    const std::size_t m = b.size();
    if (a.size() != m * m) throw std::invalid_argument("solve_real: shape mismatch");
    double scale = 0.0;
    for (const double x : a) scale = std::max(scale, std::abs(x));
    const double pivot_tol = 1e-13 * std::max(1.0, scale);

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
        if (std::abs(a[piv * m + col]) <= pivot_tol)
            throw std::runtime_error("solve_real: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a[piv * m + j], a[col * m + j]);
            std::swap(b[piv], b[col]);
        }
        const double inv = 1.0 / a[col * m + col];
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r * m + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < m; ++j) a[r * m + j] -= f * a[col * m + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < m; ++j) s -= a[i * m + j] * x[j];
        x[i] = s / a[i * m + i];
    }
    return x;
}

}  // namespace upbwit::linalg
