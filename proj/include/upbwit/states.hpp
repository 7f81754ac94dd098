// states.hpp — product-state sets: the Gram form Q of squared overlaps,
// extendibility decisions with explicit certificates, the built-in families,
// and the on-disk JSON format.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "upbwit/linalg.hpp"

namespace upbwit::states {

using linalg::cplx;
using linalg::Dims;
using linalg::Matrix;

/// One n-partite product vector; factor k is a unit vector in C^{d_k}.
struct ProductVector {
    std::vector<std::vector<cplx>> factors;

    /// Validates unit norm of every factor (tolerance 1e-12).
    static ProductVector make(std::vector<std::vector<cplx>> factors);

    /// Full composite vector (Kronecker product of the factors).
    std::vector<cplx> full() const;
};

struct ProductStateSet {
    Dims dims;
    std::vector<ProductVector> members;
    std::string name;

    static ProductStateSet make(Dims dims, std::vector<ProductVector> members,
                                std::string name = "");

    std::size_t size() const { return members.size(); }
    /// <member r | member k> as a product of per-factor overlaps.
    cplx overlap(std::size_t r, std::size_t k) const;
    /// Projector onto member k of the composite space.
    Matrix member_projector(std::size_t k) const;
};

/// m-by-m matrix of squared overlaps; symmetric, unit diagonal, entries in [0,1].
struct QMatrix {
    std::size_t size = 0;
    std::vector<double> entries;  // row-major

    double at(std::size_t r, std::size_t k) const { return entries[r * size + k]; }
    double& at(std::size_t r, std::size_t k) { return entries[r * size + k]; }
    /// Largest off-diagonal row sum, the quantity bounding the Neumann series.
    double max_offdiag_row_sum() const;
    bool is_identity(double tol = 1e-12) const;
};

QMatrix gram_q(const ProductStateSet& set);

enum class Extendibility { Extendible, Unextendible };

/// Outcome of the exhaustive partition search. For an extendible set the
/// certificate carries a partition of the member indices over parties and an
/// explicit orthogonal product vector; for an unextendible one it records the
/// exhaustion size.
struct PartitionCertificate {
    Extendibility verdict = Extendibility::Unextendible;
    std::optional<std::vector<std::size_t>> witness_partition;  // member index -> party
    std::optional<ProductVector> witness_vector;
    std::uint64_t partitions_examined = 0;

    bool extendible() const { return verdict == Extendibility::Extendible; }
};

/// Decides whether some product vector is orthogonal to every member, by
/// enumerating all assignments of the m member indices to the n parties and
/// testing, per assignment, that every party's received factors span a proper
/// subspace (rank by singular values > 1e-9). Branches die as soon as one
/// party's span fills its local space. Requires m <= 20.
PartitionCertificate is_unextendible(const ProductStateSet& set);

/// For bipartite d x d sets with m = 2d-1: true iff every size-d subset of
/// the first factors and of the second factors has full rank d. When true,
/// no product vector is orthogonal to the whole set.
bool check_subset_basis_condition(const ProductStateSet& set);

/// Built-in families: "tiles" (3x3, m=5, orthonormal), "example_b2"
/// (2x2, m=3, non-orthogonal), "tiles_perturbed" (last member's second
/// factor becomes ((1+t),1,1)/sqrt(c(t)) with c(t) = (1+t)^2 + 2).
ProductStateSet tiles();
ProductStateSet example_b2();
ProductStateSet tiles_perturbed(double t);
ProductStateSet make_family(const std::string& name, double t = 0.0);
std::vector<std::string> family_names();

/// JSON file format:
///   { "dims": [d1,...,dn],
///     "members": [ [ [[re,im],...], ...one list per factor... ], ... ] }
/// Factors must be unit vectors (tolerance 1e-9) unless `normalize` is set.
ProductStateSet load_product_state_set(std::istream& in, bool normalize = false,
                                       const std::string& name = "");
ProductStateSet load_product_state_set_file(const std::string& path, bool normalize = false);
std::string product_state_set_to_json(const ProductStateSet& set);

}  // namespace upbwit::states
