// construct.hpp — the densities and witnesses built from a product-state
// set: the mixture mu(p), its reflection through the maximally mixed state,
// the m x m route to mu's positive spectrum, the three certification
// conditions, the witness W0 = tau0 + c0 I - rho0, and the thresholds that
// carve out the certified region.

#pragma once

#include <cstddef>
#include <optional>

#include "upbwit/linalg.hpp"
#include "upbwit/states.hpp"

namespace upbwit::construct {

using linalg::cplx;
using linalg::Dims;
using linalg::Matrix;
using linalg::Spectrum;
using states::ProductStateSet;

/// Trace-one PSD Hermitian matrix on the composite space. `make` validates
/// (Hermitian within 1e-12, trace within 1e-10 of 1, min eigenvalue
/// >= -1e-9); `unchecked` skips validation for diagnostic constructions that
/// deliberately leave the density cone.
struct Density {
    Matrix mat;
    Dims dims;

    static Density make(Matrix mat, Dims dims);
    static Density unchecked(Matrix mat, Dims dims);
};

/// Maximally mixed state I/N.
Density maximally_mixed(const Dims& dims);

/// Probability vector over the m members: nonnegative, sums to 1 (1e-12).
struct PVec {
    std::vector<double> weights;

    static PVec make(std::vector<double> weights);
    static PVec uniform(std::size_t m);

    std::size_t size() const { return weights.size(); }
    double max() const;
    /// Smallest index attaining the maximum weight.
    std::size_t argmax() const;
    double min() const;
};

struct Condition2Solution {
    PVec p;
    double c = 0.0;  // Tr(mu0^2) = 1/sum(x) for the solve Qx = e
    /// True when every off-diagonal row sum of Q is < 1, the hypothesis under
    /// which the solution is guaranteed strictly positive.
    bool row_sum_hypothesis = false;
};

/// Solve Qx = e directly and normalize. Throws on a singular Q or on a
/// solution with meaningfully negative entries; when the row-sum hypothesis
/// fails but the solution is still nonnegative, returns it flagged.
Condition2Solution solve_condition2(const states::QMatrix& q);

/// Convex mixture sum_k p_k |phi_k><phi_k|.
Density mu_of_p(const ProductStateSet& set, const PVec& p);

struct Reflection {
    Density rho;
    double b = 0.0;
    std::size_t null_dim = 0;  // >= 1 puts rho on the boundary
    /// For rho_of_p with b = 1/max(p): the smallest member index attaining
    /// the maximum weight, whose vector certifies the boundary membership.
    std::optional<std::size_t> max_weight_index;
};

/// rho = (N D0 - b mu) / (N - b). Requires b < N and b * lambda_max(mu) <= 1
/// within 1e-10, otherwise the result is not a density.
Reflection reflect_through_identity(const Density& mu, double b);

/// reflect_through_identity of mu(p). Choose b via one of the presets below.
Reflection rho_of_p(const ProductStateSet& set, const PVec& p, double b);

/// b = 1/max(p_k): the preset for orthonormal sets, where the weights are
/// the eigenvalues of mu(p).
double b_from_pmax(const PVec& p);
/// b = 1/lambda_max: the general preset.
double b_from_lambda_max(double lambda_max);

/// Eigenvalues of mu(p) computed on the m x m weighted Gram matrix
/// G(r,n) = sqrt(p_r) <phi_r|phi_n> sqrt(p_n), whose positive spectrum
/// coincides with mu(p)'s. Needs strictly positive p; with zero weights it
/// falls back to the full N x N eigensolve.
Spectrum r_matrix_spectrum(const ProductStateSet& set, const PVec& p);

/// The certification conditions for a candidate set with weight vector p and
/// a measured infimum of Tr(mu0 sigma) over separable sigma:
///   1. no product vector orthogonal to the whole set (and m < N);
///   2. Qp is a constant vector (mu0 - D0 orthogonal to the member face);
///   3. inf > (lambda_max - Tr(mu0^2)) / (N lambda_max - 1).
struct ConditionsReport {
    bool cond1 = false;
    bool cond2 = false;
    PVec p;
    bool cond3 = false;
    double lhs = 0.0;  // the measured infimum (epsilon * lambda_max)
    double rhs = 0.0;
    double epsilon_lambda_max = 0.0;
    double lambda_max = 0.0;
    double tr_mu0_sq = 0.0;
    double b = 0.0;
    double s0 = 0.0;
    /// 0 < N * inf < 1, necessary for a usable witness.
    bool sanity_interval = false;
};

ConditionsReport evaluate_conditions(const ProductStateSet& set, const PVec& p,
                                     double epsilon_lambda_max);

/// W0 = tau0 + c0 I - rho0 with tau0 = (1 - s0) D0 + s0 rho0 and
/// c0 = Tr(tau0 (rho0 - tau0)).
struct WitnessMatrix {
    Matrix mat;
    double s0 = 0.0;
    double c0 = 0.0;
    Density tau0;
    Density rho0;
};

/// Builds the witness from the general s0 formula
///   s0 = (1 - N inf)(N lambda_max - 1) / (N Tr(mu0^2) - 1),
/// cross-checked against 1 - N inf for orthonormal uniform input. Throws when
/// s0 leaves (0,1) — the Condition 3 failure signature — unless `force` is
/// set, which constructs the (invalid) witness anyway for diagnostics.
WitnessMatrix build_witness(const ProductStateSet& set, const PVec& p,
                            double epsilon_lambda_max, bool force = false);

/// Orthonormal-case inseparability bound: rho(p) is certified inseparable
/// when p_max < 1/m + (eps/m)((N - m)/(m - N eps)). Here eps is the m-scaled
/// infimum, eps = m * inf Tr(mu0 sigma). Requires 0 < N eps / m < 1.
double pmax_threshold(std::size_t n_total, std::size_t m, double epsilon);

/// t(b) = s0 (N p_max - 1)/(N/m - 1): mixtures (1-t) D0 + t rho(b) are
/// certified inseparable for t above this. t(1/m... ) with p_max = 1/m
/// equals s0.
double frustum_threshold(std::size_t n_total, std::size_t m, double p_max, double s0);

/// (1 - t) D0 + t rho_b for t in [0, 1].
Density lambda_of_t(const Density& rho_b, double t);

}  // namespace upbwit::construct
