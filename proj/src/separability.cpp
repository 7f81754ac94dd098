#include "upbwit/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "upbwit/rng.hpp"

namespace upbwit::separability {

using linalg::cplx;

namespace {

// K^dagger W K where the columns of K are the product vectors with factor
// `free_idx` replaced by each local basis vector. The result is the operator
// whose minimal eigenvector is the optimal factor given the others.
Matrix contract_environment(const Matrix& w, const Dims& dims,
                            const std::vector<std::vector<cplx>>& factors,
                            std::size_t free_idx) {
    const std::size_t d = dims.local[free_idx];
    const std::size_t n_total = dims.total();

    std::vector<std::vector<cplx>> columns(d);
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<cplx> v = {cplx(1.0, 0.0)};
        for (std::size_t k = 0; k < dims.parties(); ++k) {
            if (k == free_idx) {
                std::vector<cplx> basis(d, 0.0);
                basis[a] = 1.0;
                v = linalg::kron(v, basis);
            } else {
                v = linalg::kron(v, factors[k]);
            }
        }
        columns[a] = std::move(v);
    }

    Matrix out(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<cplx> wk(n_total, 0.0);
        for (std::size_t i = 0; i < n_total; ++i) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < n_total; ++j) s += w(i, j) * columns[a][j];
            wk[i] = s;
        }
        for (std::size_t b = 0; b < d; ++b) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < n_total; ++i) s += std::conj(columns[b][i]) * wk[i];
            out(b, a) = s;
        }
    }
    return linalg::hermitized(out, 1e-9);
}

std::vector<cplx> product_full(const std::vector<std::vector<cplx>>& factors) {
    std::vector<cplx> v = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) v = linalg::kron(v, factors[k]);
    return v;
}

}  // namespace

SeesawResult seesaw_min_product(const Matrix& w, const Dims& dims, const SeesawOptions& opt) {
    if (opt.restarts == 0) throw std::invalid_argument("seesaw_min_product: restarts = 0");
    if (!w.square() || w.rows() != dims.total())
        throw std::invalid_argument("seesaw_min_product: matrix size does not match dims");

    const std::size_t n = dims.parties();
    SeesawResult best;
    bool have_best = false;

    for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
        auto gen = rng::Xoshiro256pp::fork(opt.seed, restart);
        std::vector<std::vector<cplx>> factors(n);
        for (std::size_t k = 0; k < n; ++k) factors[k] = gen.unit_vector(dims.local[k]);

        double obj = linalg::expectation(w, product_full(factors));
        bool converged = false;
        for (std::size_t sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
            const double before = obj;
            for (std::size_t k = 0; k < n; ++k) {
                const Matrix env = contract_environment(w, dims, factors, k);
                const auto spec = linalg::hermitian_eig(env);
                const std::size_t d = dims.local[k];
                std::vector<cplx> vk(d);
                for (std::size_t i = 0; i < d; ++i) vk[i] = spec.eigenvectors(i, 0);
                factors[k] = std::move(vk);
                const double next = spec.eigenvalues.front();
                if (next > obj + 1e-12)
                    throw std::logic_error("seesaw_min_product: objective increased");
                obj = next;
            }
            if (before - obj < opt.decrease_tol) converged = true;
        }

        if (!have_best || obj < best.value) {
            best.value = obj;
            best.argmin = states::ProductVector::make(factors);
            best.converged = converged;
            have_best = true;
        }
    }
    best.restarts_used = opt.restarts;
    return best;
}

EpsilonEstimate epsilon_seesaw(const Density& mu0, std::size_t restarts, std::uint64_t seed) {
    SeesawOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;
    const SeesawResult res = seesaw_min_product(mu0.mat, mu0.dims, opt);

    EpsilonEstimate est;
    est.value = res.value;
    est.argmin = res.argmin;
    est.restarts_used = res.restarts_used;
    est.converged = res.converged;

    // The reported value must be achieved by the reported product state.
    const double achieved = linalg::expectation(mu0.mat, est.argmin.full());
    if (std::abs(achieved - est.value) > 1e-10)
        throw std::logic_error("epsilon_seesaw: reported value is not achieved by argmin");
    return est;
}

std::size_t grid_angle_count(const Dims& dims) {
    std::size_t n = 0;
    for (const auto d : dims.local) n += 2 * (d - 1);
    return n;
}

namespace {

// All grid unit vectors in C^d: amplitudes from half-offset polar angles in
// (0, pi/2), phases from the full circle including 0 (so real optima sit on
// the grid exactly).
std::vector<std::vector<cplx>> factor_grid(std::size_t d, std::size_t res) {
    const std::size_t k_angles = d - 1;
    std::vector<std::vector<cplx>> out;
    std::vector<std::size_t> idx(2 * k_angles, 0);
    while (true) {
        std::vector<double> theta(k_angles), phi(k_angles);
        for (std::size_t i = 0; i < k_angles; ++i) {
            theta[i] = (M_PI / 2.0) * (static_cast<double>(idx[i]) + 0.5) /
                       static_cast<double>(res);
            phi[i] = 2.0 * M_PI * static_cast<double>(idx[k_angles + i]) /
                     static_cast<double>(res);
        }
        std::vector<cplx> v(d);
        double sin_prod = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            double amp = (i < k_angles) ? sin_prod * std::cos(theta[i]) : sin_prod;
            if (i < k_angles) sin_prod *= std::sin(theta[i]);
            v[i] = (i == 0) ? cplx(amp, 0.0)
                            : amp * cplx(std::cos(phi[i - 1]), std::sin(phi[i - 1]));
        }
        out.push_back(std::move(v));

        std::size_t pos = idx.size();
        while (pos-- > 0) {
            if (++idx[pos] < res) break;
            idx[pos] = 0;
            if (pos == 0) return out;
        }
    }
}

double grid_scan(const Matrix& w, const Dims& dims,
                 const std::vector<std::vector<std::vector<cplx>>>& grids,
                 std::vector<std::vector<cplx>>& factors, std::size_t k) {
    const std::size_t n = dims.parties();
    if (k + 1 == n) {
        // Contract down to the last factor once, then sweep its grid with
        // cheap d x d quadratic forms.
        const Matrix env = contract_environment(w, dims, factors, k);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : grids[k]) best = std::min(best, linalg::expectation(env, v));
        return best;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : grids[k]) {
        factors[k] = v;
        best = std::min(best, grid_scan(w, dims, grids, factors, k + 1));
    }
    return best;
}

}  // namespace

double epsilon_grid_oracle(const Density& mu0, std::size_t resolution) {
    if (resolution < 2) throw std::invalid_argument("epsilon_grid_oracle: resolution < 2");
    const Dims& dims = mu0.dims;
    const std::size_t angles = grid_angle_count(dims);
    if (angles > 8)
        throw std::invalid_argument("epsilon_grid_oracle: more than 8 grid angles");
    const double work = std::pow(static_cast<double>(resolution), static_cast<double>(angles));
    if (work > 4e9)
        throw std::invalid_argument("epsilon_grid_oracle: resolution too high for this space");

    std::vector<std::vector<std::vector<cplx>>> grids;
    for (const auto d : dims.local) grids.push_back(factor_grid(d, resolution));
    std::vector<std::vector<cplx>> factors(dims.parties());
    return grid_scan(mu0.mat, dims, grids, factors, 0);
}

bool PptReport::all_psd() const {
    for (const auto& v : verdicts)
        if (!v.psd) return false;
    return true;
}

double PptReport::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : verdicts) m = std::min(m, v.min_eigenvalue);
    return m;
}

PptReport is_ppt(const Density& rho, double tol) {
    const std::size_t n = rho.dims.parties();
    PptReport report;
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (std::size_t{1} << k)) subset.push_back(k);
        const Matrix pt = linalg::partial_transpose(rho.mat, rho.dims, subset);
        const auto check = linalg::is_psd(pt, tol);
        report.verdicts.push_back({std::move(subset), check.psd, check.min_eigenvalue});
    }
    return report;
}

WitnessValidation validate_witness(const Matrix& w, const Dims& dims, std::size_t samples,
                                   std::uint64_t seed, std::size_t attack_restarts) {
    if (samples == 0) throw std::invalid_argument("validate_witness: samples = 0");
    if (!w.square() || w.rows() != dims.total())
        throw std::invalid_argument("validate_witness: matrix size does not match dims");

    const std::size_t n_total = dims.total();
    const std::size_t n = dims.parties();

    WitnessValidation out;
    out.sample_min = std::numeric_limits<double>::infinity();
    std::vector<double> best_weights;
    std::vector<std::vector<std::vector<cplx>>> best_terms;

    for (std::size_t s = 0; s < samples; ++s) {
        auto gen = rng::Xoshiro256pp::fork(seed, s);
        const std::size_t terms = 1 + static_cast<std::size_t>(gen.below(n_total));
        const auto weights = gen.simplex_weights(terms);
        double value = 0.0;
        std::vector<std::vector<std::vector<cplx>>> term_factors(terms);
        for (std::size_t t = 0; t < terms; ++t) {
            auto& factors = term_factors[t];
            factors.resize(n);
            for (std::size_t k = 0; k < n; ++k) factors[k] = gen.unit_vector(dims.local[k]);
            value += weights[t] * linalg::expectation(w, product_full(factors));
        }
        if (value < out.sample_min) {
            out.sample_min = value;
            best_weights = weights;
            best_terms = std::move(term_factors);
        }
    }

    SeesawOptions opt;
    opt.restarts = attack_restarts;
    opt.seed = rng::SplitMix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL).next();
    const SeesawResult attack = seesaw_min_product(w, dims, opt);
    out.attack_min = attack.value;

    if (out.min() < -1e-9) {
        if (out.attack_min <= out.sample_min) {
            out.violating_sigma = Matrix::projector(attack.argmin.full());
        } else {
            Matrix sigma(n_total, n_total);
            for (std::size_t t = 0; t < best_terms.size(); ++t) {
                const auto v = product_full(best_terms[t]);
                for (std::size_t i = 0; i < n_total; ++i)
                    for (std::size_t j = 0; j < n_total; ++j)
                        sigma(i, j) += best_weights[t] * v[i] * std::conj(v[j]);
            }
            out.violating_sigma = std::move(sigma);
        }
    }
    return out;
}

}  // namespace upbwit::separability
