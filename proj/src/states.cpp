#include "upbwit/states.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace upbwit::states {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kRankSingularValueTol = 1e-9;

}  // namespace

ProductVector ProductVector::make(std::vector<std::vector<cplx>> factors) {
    if (factors.empty()) throw std::invalid_argument("ProductVector: no factors");
    for (const auto& f : factors) {
        if (f.empty()) throw std::invalid_argument("ProductVector: empty factor");
        if (std::abs(linalg::norm(f) - 1.0) > kUnitTol)
            throw std::invalid_argument("ProductVector: factor is not a unit vector");
    }
    ProductVector v;
    v.factors = std::move(factors);
    return v;
}

std::vector<cplx> ProductVector::full() const {
    std::vector<cplx> out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = linalg::kron(out, factors[k]);
    return out;
}

ProductStateSet ProductStateSet::make(Dims dims, std::vector<ProductVector> members,
                                      std::string name) {
    if (members.empty()) throw std::invalid_argument("ProductStateSet: needs at least one member");
    for (const auto& v : members) {
        if (v.factors.size() != dims.parties())
            throw std::invalid_argument("ProductStateSet: member arity does not match dims");
        for (std::size_t k = 0; k < v.factors.size(); ++k)
            if (v.factors[k].size() != dims.local[k])
                throw std::invalid_argument("ProductStateSet: factor length does not match dims");
    }
    ProductStateSet s;
    s.dims = std::move(dims);
    s.members = std::move(members);
    s.name = std::move(name);
    return s;
}

cplx ProductStateSet::overlap(std::size_t r, std::size_t k) const {
    cplx z = 1.0;
    for (std::size_t j = 0; j < dims.parties(); ++j)
        z *= linalg::inner(members[r].factors[j], members[k].factors[j]);
    return z;
}

Matrix ProductStateSet::member_projector(std::size_t k) const {
    return Matrix::projector(members[k].full());
}

double QMatrix::max_offdiag_row_sum() const {
    double best = 0.0;
    for (std::size_t r = 0; r < size; ++r) {
        double s = 0.0;
        for (std::size_t k = 0; k < size; ++k)
            if (k != r) s += at(r, k);
        best = std::max(best, s);
    }
    return best;
}

bool QMatrix::is_identity(double tol) const {
    for (std::size_t r = 0; r < size; ++r)
        for (std::size_t k = 0; k < size; ++k)
            if (std::abs(at(r, k) - (r == k ? 1.0 : 0.0)) > tol) return false;
    return true;
}

QMatrix gram_q(const ProductStateSet& set) {
    const std::size_t m = set.size();
    QMatrix q;
    q.size = m;
    q.entries.assign(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        q.at(r, r) = 1.0;
        for (std::size_t k = r + 1; k < m; ++k) {
            double v = std::norm(set.overlap(r, k));
            v = std::min(v, 1.0);  // clip round-off above the exact bound
            q.at(r, k) = q.at(k, r) = v;
        }
    }
    return q;
}

namespace {

// Incremental orthonormal basis per party, used to prune the partition
// search: once a party's received factors span its whole local space, no
// extension of the assignment can leave room for an orthogonal vector.
struct SpanTracker {
    std::size_t dim;
    std::vector<std::vector<cplx>> basis;

    bool full() const { return basis.size() == dim; }

    // Gram-Schmidt insert; returns true if the rank grew (caller pops later).
    bool add(std::vector<cplx> v) {
        for (const auto& b : basis) {
            const cplx c = linalg::inner(b, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
        const double n = linalg::norm(v);
        if (n <= kRankSingularValueTol) return false;
        for (auto& z : v) z /= n;
        basis.push_back(std::move(v));
        return true;
    }

    void pop() { basis.pop_back(); }
};

// Orthonormal basis of span(vectors) by modified Gram-Schmidt with one
// reorthogonalization pass. Residuals are compared against the rank
// tolerance directly in vector units, which keeps the 1e-9 singular-value
// cutoff usable (a Gram-matrix eigenvalue route would square it below the
// eigensolver's noise floor).
std::vector<std::vector<cplx>> orthonormal_span_basis(
    const std::vector<std::vector<cplx>>& vectors, std::size_t d) {
    std::vector<std::vector<cplx>> basis;
    for (auto v : vectors) {
        if (basis.size() == d) break;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const cplx c = linalg::inner(b, v);
                for (std::size_t i = 0; i < d; ++i) v[i] -= c * b[i];
            }
        }
        const double n = linalg::norm(v);
        if (n <= kRankSingularValueTol) continue;
        for (auto& z : v) z /= n;
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t rank_of(const std::vector<std::vector<cplx>>& vectors, std::size_t d) {
    return orthonormal_span_basis(vectors, d).size();
}

// Null space of the span inside C^d: eigenvectors of the complement
// projector I - sum |b><b| with eigenvalue near 1. The 0/1 spectral gap
// makes the split numerically unambiguous, and the fixed eigensolver keeps
// the choice of "first null vector" deterministic.
std::vector<std::vector<cplx>> orthocomplement_basis(
    const std::vector<std::vector<cplx>>& vectors, std::size_t d) {
    const auto span = orthonormal_span_basis(vectors, d);
    if (span.size() >= d) return {};
    Matrix c = Matrix::identity(d);
    for (const auto& b : span) c -= Matrix::projector(b);
    const auto spec = linalg::hermitian_eig(c);
    std::vector<std::vector<cplx>> out;
    for (std::size_t k = span.size(); k < d; ++k) {
        std::vector<cplx> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = spec.eigenvectors(i, k);
        out.push_back(std::move(v));
    }
    return out;
}

struct PartitionSearch {
    const ProductStateSet& set;
    std::size_t n;
    std::vector<SpanTracker> spans;
    std::vector<std::size_t> assignment;
    std::uint64_t examined = 0;
    std::optional<std::vector<std::size_t>> found;

    explicit PartitionSearch(const ProductStateSet& s) : set(s), n(s.dims.parties()) {
        for (std::size_t j = 0; j < n; ++j) spans.push_back({s.dims.local[j], {}});
        assignment.assign(set.size(), 0);
    }

    void run(std::size_t k) {
        if (found) return;
        if (k == set.size()) {
            // Every party deficient: confirm by singular values before
            // accepting, since the incremental ranks are only a pruning aid.
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<std::vector<cplx>> received;
                for (std::size_t i = 0; i < set.size(); ++i)
                    if (assignment[i] == j) received.push_back(set.members[i].factors[j]);
                if (rank_of(received, set.dims.local[j]) >= set.dims.local[j])
                    return;
            }
            found = assignment;
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            ++examined;  // partial assignments explored, pruned branches included
            assignment[k] = j;
            const bool grew = spans[j].add(set.members[k].factors[j]);
            if (!spans[j].full()) run(k + 1);
            if (grew) spans[j].pop();
            if (found) return;
        }
    }
};

}  // namespace

PartitionCertificate is_unextendible(const ProductStateSet& set) {
    if (set.size() > 20)
        throw std::invalid_argument("is_unextendible: enumeration bound is m <= 20");

    PartitionSearch search(set);
    search.run(0);

    PartitionCertificate cert;
    cert.partitions_examined = search.examined;
    if (!search.found) {
        cert.verdict = Extendibility::Unextendible;
        return cert;
    }

    const auto& assignment = *search.found;
    std::vector<std::vector<cplx>> factors;
    for (std::size_t j = 0; j < set.dims.parties(); ++j) {
        std::vector<std::vector<cplx>> received;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (assignment[i] == j) received.push_back(set.members[i].factors[j]);
        auto null_basis = orthocomplement_basis(received, set.dims.local[j]);
        if (null_basis.empty())
            throw std::logic_error("is_unextendible: confirmed partition lost its null space");
        factors.push_back(std::move(null_basis.front()));
    }
    cert.verdict = Extendibility::Extendible;
    cert.witness_partition = assignment;
    cert.witness_vector = ProductVector::make(std::move(factors));
    return cert;
}

bool check_subset_basis_condition(const ProductStateSet& set) {
    if (set.dims.parties() != 2 || set.dims.local[0] != set.dims.local[1])
        throw std::invalid_argument("check_subset_basis_condition: needs a bipartite d x d set");
    const std::size_t d = set.dims.local[0];
    if (set.size() != 2 * d - 1)
        throw std::invalid_argument("check_subset_basis_condition: needs m = 2d-1 members");

    const std::size_t m = set.size();
    std::vector<std::size_t> pick(d);
    // Enumerate all size-d index subsets via the usual odometer.
    for (std::size_t i = 0; i < d; ++i) pick[i] = i;
    while (true) {
        for (std::size_t side = 0; side < 2; ++side) {
            std::vector<std::vector<cplx>> chosen;
            for (const auto i : pick) chosen.push_back(set.members[i].factors[side]);
            if (rank_of(chosen, d) < d) return false;
        }
        std::size_t i = d;
        while (i-- > 0) {
            if (pick[i] + 1 <= m - d + i) {
                ++pick[i];
                for (std::size_t j = i + 1; j < d; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return true;
        }
    }
}

namespace {

std::vector<cplx> basis_vec(std::size_t d, std::size_t k) {
    std::vector<cplx> v(d, 0.0);
    v[k] = 1.0;
    return v;
}

std::vector<cplx> normalized(std::vector<cplx> v) {
    const double n = linalg::norm(v);
    if (n < 1e-15) throw std::invalid_argument("normalized: zero vector");
    for (auto& z : v) z /= n;
    return v;
}

}  // namespace

ProductStateSet tiles() {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = 1.0 / std::sqrt(3.0);
    const std::vector<cplx> e0 = basis_vec(3, 0), e1 = basis_vec(3, 1), e2 = basis_vec(3, 2);
    const std::vector<cplx> d01 = {r2, -r2, 0.0};
    const std::vector<cplx> d12 = {0.0, r2, -r2};
    const std::vector<cplx> gamma = {r3, r3, r3};
    std::vector<ProductVector> members = {
        ProductVector::make({e0, d01}),
        ProductVector::make({e2, d12}),
        ProductVector::make({d01, e2}),
        ProductVector::make({d12, e0}),
        ProductVector::make({gamma, gamma}),
    };
    return ProductStateSet::make(Dims({3, 3}), std::move(members), "tiles");
}

ProductStateSet example_b2() {
    const double r2 = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    const std::vector<cplx> plus = {r2, r2};
    const std::vector<cplx> minus = {r2, -r2};
    const std::vector<cplx> plus_i = {r2, r2 * i};
    const std::vector<cplx> minus_i = {r2, -r2 * i};
    std::vector<ProductVector> members = {
        ProductVector::make({plus, plus}),
        ProductVector::make({minus, minus}),
        ProductVector::make({plus_i, minus_i}),
    };
    return ProductStateSet::make(Dims({2, 2}), std::move(members), "example_b2");
}

ProductStateSet tiles_perturbed(double t) {
    auto base = tiles();
    const double c = (1.0 + t) * (1.0 + t) + 2.0;
    if (c < 1e-12) throw std::invalid_argument("tiles_perturbed: degenerate normalizer");
    const std::vector<cplx> tilted = normalized({1.0 + t, 1.0, 1.0});
    base.members[4] = ProductVector::make({base.members[4].factors[0], tilted});
    std::ostringstream label;
    label << "tiles_perturbed(t=" << t << ")";
    base.name = label.str();
    return base;
}

ProductStateSet make_family(const std::string& name, double t) {
    if (name == "tiles") return tiles();
    if (name == "example_b2") return example_b2();
    if (name == "tiles_perturbed") return tiles_perturbed(t);
    throw std::invalid_argument("unknown family: " + name);
}

std::vector<std::string> family_names() { return {"tiles", "example_b2", "tiles_perturbed"}; }

namespace {

using nlohmann::json;

std::vector<cplx> parse_factor(const json& jf) {
    std::vector<cplx> v;
    for (const auto& jz : jf) {
        if (!jz.is_array() || jz.size() != 2)
            throw std::invalid_argument("product-state file: complex scalar must be [re, im]");
        v.emplace_back(jz[0].get<double>(), jz[1].get<double>());
    }
    return v;
}

}  // namespace

ProductStateSet load_product_state_set(std::istream& in, bool normalize,
                                       const std::string& name) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("product-state file: ") + e.what());
    }
    if (!j.contains("dims") || !j.contains("members"))
        throw std::invalid_argument("product-state file: needs \"dims\" and \"members\"");

    std::vector<std::size_t> local;
    for (const auto& jd : j.at("dims")) local.push_back(jd.get<std::size_t>());
    Dims dims(local);

    std::vector<ProductVector> members;
    for (const auto& jm : j.at("members")) {
        std::vector<std::vector<cplx>> factors;
        for (const auto& jf : jm) factors.push_back(parse_factor(jf));
        if (!normalize) {
            for (const auto& f : factors)
                if (std::abs(linalg::norm(f) - 1.0) > 1e-9)
                    throw std::invalid_argument(
                        "product-state file: non-unit factor (pass the normalize flag to rescale)");
        }
        // Rescale in both modes so stored factors meet the strict unit-norm
        // invariant even when the input only passed the 1e-9 gate.
        for (auto& f : factors) f = normalized(f);
        members.push_back(ProductVector::make(std::move(factors)));
    }
    return ProductStateSet::make(std::move(dims), std::move(members), name);
}

ProductStateSet load_product_state_set_file(const std::string& path, bool normalize) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return load_product_state_set(in, normalize, path);
}

std::string product_state_set_to_json(const ProductStateSet& set) {
    json j;
    j["dims"] = set.dims.local;
    json members = json::array();
    for (const auto& v : set.members) {
        json factors = json::array();
        for (const auto& f : v.factors) {
            json jf = json::array();
            for (const auto& z : f) jf.push_back({z.real(), z.imag()});
            factors.push_back(jf);
        }
        members.push_back(factors);
    }
    j["members"] = members;
    return j.dump(2);
}

}  // namespace upbwit::states
