// separability.hpp — estimating the separable infimum of Tr(mu0 sigma) by
// alternating (see-saw) minimization over product states, an independent
// brute-force grid oracle, partial-transpose reports, and randomized witness
// validation. Every randomized routine is driven by the seeded PRNG in
// rng.hpp; restarts and sample batches fork independent streams.

#pragma once

#include <cstdint>
#include <optional>

#include "upbwit/construct.hpp"
#include "upbwit/linalg.hpp"
#include "upbwit/states.hpp"

namespace upbwit::separability {

using construct::Density;
using linalg::Dims;
using linalg::Matrix;
using states::ProductVector;

struct SeesawOptions {
    std::size_t restarts = 256;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 500;
    double decrease_tol = 1e-12;
};

struct SeesawResult {
    double value = 0.0;
    ProductVector argmin;
    bool converged = false;
    std::size_t restarts_used = 0;
};

/// Minimize <v|W|v> over product vectors v for any Hermitian W: per restart,
/// start from a random product vector and repeatedly replace one factor by
/// the minimal eigenvector of the operator obtained by contracting W with
/// the other factors. The objective is nonincreasing by construction and the
/// sweep stops once it decreases by less than `decrease_tol`.
SeesawResult seesaw_min_product(const Matrix& w, const Dims& dims, const SeesawOptions& opt);

struct EpsilonEstimate {
    double value = 0.0;  // best achieved Tr(mu0 |v><v|); an upper bound on the infimum
    ProductVector argmin;
    std::size_t restarts_used = 0;
    bool converged = false;
    std::optional<double> oracle_value;
};

/// Best product-state value of Tr(mu0 sigma) over `restarts` see-saw runs.
EpsilonEstimate epsilon_seesaw(const Density& mu0, std::size_t restarts, std::uint64_t seed);

/// Deterministic brute-force upper bound: minimum of <v|mu0|v> over a grid
/// of product states, each local unit vector parameterized by generalized
/// spherical angles (half-offset grid) and phases (including 0). Feasible up
/// to 8 real angles in total; converges to the infimum with resolution.
double epsilon_grid_oracle(const Density& mu0, std::size_t resolution);

/// Number of real grid angles for these dims: sum of 2(d_k - 1).
std::size_t grid_angle_count(const Dims& dims);

struct PptVerdict {
    std::vector<std::size_t> subset;  // transposed parties, 0-based
    bool psd = false;
    double min_eigenvalue = 0.0;
};

struct PptReport {
    std::vector<PptVerdict> verdicts;  // every nonempty proper subset

    bool all_psd() const;
    double min_eigenvalue() const;
};

/// is_psd of rho under partial transposition of every nonempty proper subset
/// of parties.
PptReport is_ppt(const Density& rho, double tol = 1e-9);

struct WitnessValidation {
    double sample_min = 0.0;  // min Tr(W sigma) over sampled separable densities
    double attack_min = 0.0;  // see-saw minimum of <v|W|v> over product states
    std::optional<Matrix> violating_sigma;  // present when min() < -1e-9

    double min() const { return std::min(sample_min, attack_min); }
};

/// Samples random separable densities (mixtures of 1..N random product
/// projectors with flat simplex weights) and additionally attacks the
/// product-state minimum directly with the see-saw, which by convexity
/// suffices for the separable minimum.
WitnessValidation validate_witness(const Matrix& w, const Dims& dims, std::size_t samples,
                                   std::uint64_t seed, std::size_t attack_restarts = 256);

}  // namespace upbwit::separability
