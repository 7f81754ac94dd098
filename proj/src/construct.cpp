#include "upbwit/construct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace upbwit::construct {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-9;

}  // namespace

Density Density::make(Matrix mat, Dims dims) {
    if (!mat.square() || mat.rows() != dims.total())
        throw std::invalid_argument("Density: matrix size does not match dims");
    Matrix h = linalg::hermitized(mat, kHermTol);
    const double tr = h.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw std::invalid_argument("Density: trace " + std::to_string(tr) + " is not 1");
    const auto check = linalg::is_psd(h, kPsdTol);
    if (!check.psd)
        throw std::invalid_argument("Density: min eigenvalue " +
                                    std::to_string(check.min_eigenvalue) + " below -1e-9");
    return {std::move(h), std::move(dims)};
}

Density Density::unchecked(Matrix mat, Dims dims) { return {std::move(mat), std::move(dims)}; }

Density maximally_mixed(const Dims& dims) {
    const std::size_t n = dims.total();
    Matrix m = Matrix::identity(n);
    m *= cplx(1.0 / static_cast<double>(n), 0.0);
    return Density::unchecked(std::move(m), dims);
}

PVec PVec::make(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("PVec: empty");
    double sum = 0.0;
    for (const double w : weights) {
        if (w < -1e-12) throw std::invalid_argument("PVec: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("PVec: weights must sum to 1");
    for (auto& w : weights) w = std::max(w, 0.0);
    return {std::move(weights)};
}

PVec PVec::uniform(std::size_t m) {
    if (m == 0) throw std::invalid_argument("PVec::uniform: m = 0");
    return {std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

double PVec::max() const { return *std::max_element(weights.begin(), weights.end()); }

std::size_t PVec::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
}

double PVec::min() const { return *std::min_element(weights.begin(), weights.end()); }

Condition2Solution solve_condition2(const states::QMatrix& q) {
    const std::size_t m = q.size;
    std::vector<double> x = linalg::solve_real(q.entries, std::vector<double>(m, 1.0));

    double sum = 0.0;
    for (const double v : x) sum += v;
    if (sum <= 0.0) throw std::runtime_error("solve_condition2: solution has nonpositive mass");

    const bool hypothesis = q.max_offdiag_row_sum() < 1.0;
    double min_entry = x[0];
    for (const double v : x) min_entry = std::min(min_entry, v);
    if (min_entry / sum < -1e-12)
        throw std::runtime_error(
            "solve_condition2: solution has negative entries; no nonnegative weight vector on "
            "this route");
    if (hypothesis && min_entry <= 0.0)
        throw std::logic_error(
            "solve_condition2: row-sum hypothesis holds but the solution is not strictly "
            "positive");

    std::vector<double> p(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = std::max(x[k], 0.0) / sum;
    // Remove the last round-off from the normalization.
    double psum = 0.0;
    for (const double v : p) psum += v;
    for (auto& v : p) v /= psum;

    return {PVec::make(std::move(p)), 1.0 / sum, hypothesis};
}

Density mu_of_p(const ProductStateSet& set, const PVec& p) {
    if (p.size() != set.size())
        throw std::invalid_argument("mu_of_p: weight count does not match member count");
    const std::size_t n = set.dims.total();
    Matrix mu(n, n);
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (p.weights[k] == 0.0) continue;
        const auto v = set.members[k].full();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                mu(i, j) += p.weights[k] * v[i] * std::conj(v[j]);
    }
    return Density::make(std::move(mu), set.dims);
}

Reflection reflect_through_identity(const Density& mu, double b) {
    const std::size_t n = mu.dims.total();
    const double nd = static_cast<double>(n);
    if (!(b < nd)) throw std::invalid_argument("reflect_through_identity: requires b < N");

    const auto spec = linalg::hermitian_eig(mu.mat);
    const double lambda_max = spec.eigenvalues.back();
    if (b * lambda_max > 1.0 + 1e-10)
        throw std::invalid_argument(
            "reflect_through_identity: b * lambda_max = " + std::to_string(b * lambda_max) +
            " > 1, the reflection is not a density");

    Matrix rho = Matrix::identity(n);
    rho -= b * mu.mat;
    rho *= cplx(1.0 / (nd - b), 0.0);

    Reflection out;
    out.rho = Density::make(std::move(rho), mu.dims);
    out.b = b;
    // Eigenvalues of rho are (1 - b lambda_k)/(N - b); count the null ones.
    const auto rho_spec = linalg::hermitian_eig(out.rho.mat);
    for (const double e : rho_spec.eigenvalues)
        if (std::abs(e) <= kPsdTol) ++out.null_dim;
    return out;
}

Reflection rho_of_p(const ProductStateSet& set, const PVec& p, double b) {
    Reflection out = reflect_through_identity(mu_of_p(set, p), b);
    out.max_weight_index = p.argmax();
    return out;
}

double b_from_pmax(const PVec& p) { return 1.0 / p.max(); }

double b_from_lambda_max(double lambda_max) {
    if (lambda_max <= 0.0) throw std::invalid_argument("b_from_lambda_max: lambda_max <= 0");
    return 1.0 / lambda_max;
}

Spectrum r_matrix_spectrum(const ProductStateSet& set, const PVec& p) {
    if (p.size() != set.size())
        throw std::invalid_argument("r_matrix_spectrum: weight count does not match members");
    if (p.min() <= 0.0) {
        // Zero weights break the diagonal similarity; use the full solve.
        return linalg::hermitian_eig(mu_of_p(set, p).mat);
    }
    const std::size_t m = set.size();
    Matrix g(m, m);
    for (std::size_t r = 0; r < m; ++r) {
        const double sr = std::sqrt(p.weights[r]);
        for (std::size_t k = 0; k < m; ++k)
            g(r, k) = sr * set.overlap(r, k) * std::sqrt(p.weights[k]);
    }
    return linalg::hermitian_eig(g);
}

namespace {

double tr_mu0_sq_from(const states::QMatrix& q, const PVec& p) {
    double c = 0.0;
    for (std::size_t r = 0; r < q.size; ++r)
        for (std::size_t k = 0; k < q.size; ++k)
            c += p.weights[r] * q.at(r, k) * p.weights[k];
    return c;
}

double general_s0(std::size_t n_total, double inf_value, double lambda_max, double tr_mu0_sq) {
    const double nd = static_cast<double>(n_total);
    return (1.0 - nd * inf_value) * (nd * lambda_max - 1.0) / (nd * tr_mu0_sq - 1.0);
}

}  // namespace

ConditionsReport evaluate_conditions(const ProductStateSet& set, const PVec& p,
                                     double epsilon_lambda_max) {
    const std::size_t n_total = set.dims.total();
    const double nd = static_cast<double>(n_total);
    ConditionsReport rep;
    rep.p = p;
    rep.epsilon_lambda_max = epsilon_lambda_max;
    rep.lhs = epsilon_lambda_max;

    // Condition 1. A set that fills the whole space leaves no room for the
    // reflection construction, so m >= N is rejected alongside extendibility.
    const auto cert = states::is_unextendible(set);
    rep.cond1 = !cert.extendible() && set.size() < n_total;

    // Condition 2: Qp must be a constant vector.
    const auto q = states::gram_q(set);
    rep.tr_mu0_sq = tr_mu0_sq_from(q, p);
    double residual = 0.0;
    for (std::size_t r = 0; r < q.size; ++r) {
        double row = 0.0;
        for (std::size_t k = 0; k < q.size; ++k) row += q.at(r, k) * p.weights[k];
        residual = std::max(residual, std::abs(row - rep.tr_mu0_sq));
    }
    rep.cond2 = residual <= 1e-10;

    const auto spec = r_matrix_spectrum(set, p);
    rep.lambda_max = spec.eigenvalues.back();
    rep.b = 1.0 / rep.lambda_max;

    rep.rhs = (rep.lambda_max - rep.tr_mu0_sq) / (nd * rep.lambda_max - 1.0);
    rep.cond3 = rep.lhs > rep.rhs;
    rep.sanity_interval = 0.0 < nd * epsilon_lambda_max && nd * epsilon_lambda_max < 1.0;

    rep.s0 = general_s0(n_total, epsilon_lambda_max, rep.lambda_max, rep.tr_mu0_sq);
    // s0 < 1 and Condition 3 are the same statement in different variables;
    // check the equivalence numerically away from the boundary.
    if (std::abs(rep.lhs - rep.rhs) > 1e-12 && (rep.s0 < 1.0) != rep.cond3)
        throw std::logic_error("evaluate_conditions: s0 < 1 disagrees with Condition 3");
    return rep;
}

WitnessMatrix build_witness(const ProductStateSet& set, const PVec& p,
                            double epsilon_lambda_max, bool force) {
    const std::size_t n_total = set.dims.total();
    const double nd = static_cast<double>(n_total);
    const auto q = states::gram_q(set);
    const double tr_mu0_sq = tr_mu0_sq_from(q, p);
    const auto spec = r_matrix_spectrum(set, p);
    const double lambda_max = spec.eigenvalues.back();

    const double s0 = general_s0(n_total, epsilon_lambda_max, lambda_max, tr_mu0_sq);

    // Orthonormal uniform input must reproduce the simpler closed form
    // 1 - N * inf exactly; a discrepancy means a transcription bug.
    const std::size_t m = set.size();
    bool uniform = true;
    for (const double w : p.weights)
        if (std::abs(w - 1.0 / static_cast<double>(m)) > 1e-12) uniform = false;
    if (q.is_identity(1e-12) && uniform) {
        const double s0_orth = 1.0 - nd * epsilon_lambda_max;
        if (std::abs(s0 - s0_orth) > 1e-10)
            throw std::logic_error("build_witness: general s0 does not reduce to 1 - eps N / m");
    }

    if (!(s0 > 0.0 && s0 < 1.0) && !force)
        throw std::runtime_error("build_witness: s0 = " + std::to_string(s0) +
                                 " outside (0,1); Condition 3 fails");

    const Density mu0 = mu_of_p(set, p);
    const Density rho0 = reflect_through_identity(mu0, 1.0 / lambda_max).rho;
    const Density d0 = maximally_mixed(set.dims);

    Matrix tau_mat = (1.0 - s0) * d0.mat + s0 * rho0.mat;
    Density tau0 = force ? Density::unchecked(std::move(tau_mat), set.dims)
                         : Density::make(std::move(tau_mat), set.dims);

    Matrix diff = rho0.mat - tau0.mat;
    const double c0 = (tau0.mat * diff).trace().real();
    Matrix w = tau0.mat + Matrix::identity(n_total) * cplx(c0, 0.0) - rho0.mat;

    if (!force) {
        const double tr_mu_tau = (mu0.mat * tau0.mat).trace().real();
        if (std::abs(tr_mu_tau - epsilon_lambda_max) > 1e-9)
            throw std::logic_error("build_witness: Tr(mu0 tau0) drifted from the infimum");
        const double tr_w_rho = (w * rho0.mat).trace().real();
        if (!(tr_w_rho < 0.0))
            throw std::runtime_error("build_witness: Tr(W rho0) is not negative");
    }

    WitnessMatrix out;
    out.mat = std::move(w);
    out.s0 = s0;
    out.c0 = c0;
    out.tau0 = std::move(tau0);
    out.rho0 = rho0;
    return out;
}

double pmax_threshold(std::size_t n_total, std::size_t m, double epsilon) {
    const double nd = static_cast<double>(n_total);
    const double md = static_cast<double>(m);
    const double ratio = nd * epsilon / md;
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("pmax_threshold: requires 0 < N eps / m < 1");
    return 1.0 / md + (epsilon / md) * ((nd - md) / (md - nd * epsilon));
}

double frustum_threshold(std::size_t n_total, std::size_t m, double p_max, double s0) {
    const double nd = static_cast<double>(n_total);
    const double md = static_cast<double>(m);
    return s0 * (nd * p_max - 1.0) / (nd / md - 1.0);
}

Density lambda_of_t(const Density& rho_b, double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("lambda_of_t: t outside [0,1]");
    const Density d0 = maximally_mixed(rho_b.dims);
    Matrix mix = (1.0 - t) * d0.mat + t * rho_b.mat;
    return Density::make(std::move(mix), rho_b.dims);
}

}  // namespace upbwit::construct
