#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "upbwit/construct.hpp"
#include "upbwit/rng.hpp"
#include "upbwit/states.hpp"

using namespace upbwit;
using construct::Density;
using construct::PVec;
using linalg::cplx;
using linalg::Dims;
using linalg::Matrix;
using states::ProductStateSet;
using states::ProductVector;

namespace {

ProductStateSet random_set(rng::Xoshiro256pp& gen, const Dims& dims, std::size_t m) {
    std::vector<ProductVector> members;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<std::vector<cplx>> factors;
        for (const auto d : dims.local) factors.push_back(gen.unit_vector(d));
        members.push_back(ProductVector::make(std::move(factors)));
    }
    return ProductStateSet::make(dims, std::move(members), "random");
}

PVec random_pvec(rng::Xoshiro256pp& gen, std::size_t m) {
    return PVec::make(gen.simplex_weights(m));
}

states::QMatrix q_from(std::initializer_list<double> rows, std::size_t m) {
    states::QMatrix q;
    q.size = m;
    q.entries.assign(rows.begin(), rows.end());
    return q;
}

}  // namespace

TEST_CASE("solve_condition2 on identity and the b2 Gram matrix") {
    const auto id = construct::solve_condition2(states::gram_q(states::tiles()));
    for (const double w : id.p.weights) CHECK(std::abs(w - 0.2) <= 1e-14);
    CHECK(std::abs(id.c - 0.2) <= 1e-14);
    CHECK(id.row_sum_hypothesis);

    const auto b2 = construct::solve_condition2(states::gram_q(states::example_b2()));
    CHECK(std::abs(b2.p.weights[0] - 3.0 / 8.0) <= 1e-12);
    CHECK(std::abs(b2.p.weights[1] - 3.0 / 8.0) <= 1e-12);
    CHECK(std::abs(b2.p.weights[2] - 2.0 / 8.0) <= 1e-12);
    CHECK(std::abs(b2.c - 7.0 / 16.0) <= 1e-12);
}

TEST_CASE("solve_condition2 failure modes") {
    CHECK_THROWS_AS(construct::solve_condition2(q_from({1, 1, 1, 1}, 2)), std::runtime_error);
    // Large overlaps push the solution negative.
    CHECK_THROWS_AS(
        construct::solve_condition2(q_from({1, 0.9, 0, 0.9, 1, 0.9, 0, 0.9, 1}, 3)),
        std::runtime_error);
    // Moderate overlaps violate the row-sum hypothesis but stay nonnegative.
    const auto flagged =
        construct::solve_condition2(q_from({1, 0.6, 0.6, 0.6, 1, 0.6, 0.6, 0.6, 1}, 3));
    CHECK_FALSE(flagged.row_sum_hypothesis);
    for (const double w : flagged.p.weights) CHECK(w >= 0.0);
}

TEST_CASE("mu_of_p basics") {
    const auto tiles = states::tiles();
    const auto mu = construct::mu_of_p(tiles, PVec::uniform(5));
    CHECK(std::abs(linalg::trace_inner(mu.mat, mu.mat) - 0.2) <= 1e-12);

    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    const auto mu_b2 = construct::mu_of_p(b2, p);
    const double c = linalg::trace_inner(mu_b2.mat, mu_b2.mat);
    for (std::size_t r = 0; r < 3; ++r) {
        const double tr_r = linalg::trace_inner(b2.member_projector(r), mu_b2.mat);
        CHECK(std::abs(tr_r - c) <= 1e-12);
    }

    const auto single = ProductStateSet::make(
        Dims({2, 2}),
        {ProductVector::make({{1.0, 0.0}, {1.0, 0.0}})}, "single");
    const auto proj = construct::mu_of_p(single, PVec::make({1.0}));
    CHECK(proj.mat.max_abs_diff(single.member_projector(0)) <= 1e-15);

    CHECK_THROWS_AS(construct::mu_of_p(tiles, PVec::uniform(4)), std::invalid_argument);
}

TEST_CASE("reflection through the maximally mixed state") {
    const auto tiles = states::tiles();
    const auto refl = construct::rho_of_p(tiles, PVec::uniform(5), 5.0);
    CHECK(refl.b == 5.0);
    CHECK(refl.null_dim == 5);
    CHECK(refl.max_weight_index.value() == 0);  // smallest index on ties
    const auto spec = linalg::hermitian_eig(refl.rho.mat);
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(spec.eigenvalues[k]) <= 1e-10);
    for (std::size_t k = 5; k < 9; ++k) CHECK(std::abs(spec.eigenvalues[k] - 0.25) <= 1e-10);

    // b beyond 1/lambda_max is rejected: the result would dip negative.
    CHECK_THROWS_AS(construct::rho_of_p(tiles, PVec::uniform(5), 5.5), std::invalid_argument);
    // b >= N is rejected outright.
    const auto mu = construct::mu_of_p(tiles, PVec::uniform(5));
    CHECK_THROWS_AS(construct::reflect_through_identity(mu, 9.0), std::invalid_argument);
}

TEST_CASE("reflection recovers the maximally entangled state") {
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::vector<cplx> psi = {r2, 0.0, 0.0, r2};
    const Matrix proj = Matrix::projector(psi);
    Matrix mu_mat = Matrix::identity(4);
    mu_mat -= proj;
    mu_mat *= cplx(1.0 / 3.0, 0.0);
    const auto refl =
        construct::reflect_through_identity(Density::make(std::move(mu_mat), Dims({2, 2})), 3.0);
    CHECK(refl.rho.mat.max_abs_diff(proj) <= 1e-12);
}

TEST_CASE("collinearity: N D0 = b mu + (N - b) rho") {
    auto gen = rng::Xoshiro256pp(53);
    const std::vector<Dims> spaces = {Dims({2, 2}), Dims({2, 3}), Dims({3, 3})};
    for (int trial = 0; trial < 1000; ++trial) {
        const Dims& dims = spaces[gen.below(spaces.size())];
        const auto set = random_set(gen, dims, 2 + gen.below(3));
        const auto p = random_pvec(gen, set.size());
        const auto mu = construct::mu_of_p(set, p);
        const double lam = linalg::hermitian_eig(mu.mat).eigenvalues.back();
        const double b = (0.2 + 0.8 * gen.uniform()) / lam;
        const auto refl = construct::reflect_through_identity(mu, b);

        const double nd = static_cast<double>(dims.total());
        Matrix lhs = Matrix::identity(dims.total());
        Matrix rhs = b * mu.mat + (nd - b) * refl.rho.mat;
        CHECK(lhs.max_abs_diff(rhs) <= 1e-12);
    }
}

TEST_CASE("the m x m spectrum route matches the full eigensolve") {
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;

    const auto via_gram = construct::r_matrix_spectrum(b2, p);
    const double s13 = std::sqrt(13.0);
    CHECK(std::abs(via_gram.eigenvalues[0] - (5.0 - s13) / 16.0) <= 1e-12);
    CHECK(std::abs(via_gram.eigenvalues[1] - 3.0 / 8.0) <= 1e-12);
    CHECK(std::abs(via_gram.eigenvalues[2] - (5.0 + s13) / 16.0) <= 1e-12);

    const auto full = linalg::hermitian_eig(construct::mu_of_p(b2, p).mat);
    std::vector<double> positive;
    for (const double e : full.eigenvalues)
        if (e > 1e-9) positive.push_back(e);
    REQUIRE(positive.size() == via_gram.eigenvalues.size());
    for (std::size_t k = 0; k < positive.size(); ++k)
        CHECK(std::abs(positive[k] - via_gram.eigenvalues[k]) <= 1e-9);

    const auto uniform = construct::r_matrix_spectrum(states::tiles(), PVec::uniform(5));
    for (const double e : uniform.eigenvalues) CHECK(std::abs(e - 0.2) <= 1e-12);
}

TEST_CASE("zero weights fall back to the full eigensolve") {
    const auto tiles = states::tiles();
    const auto p = PVec::make({0.5, 0.5, 0.0, 0.0, 0.0});
    const auto spec = construct::r_matrix_spectrum(tiles, p);
    CHECK(spec.eigenvalues.size() == 9);  // N-dimensional, not m
    CHECK(std::abs(spec.eigenvalues.back() - 0.5) <= 1e-12);
}

TEST_CASE("the member face is a simplex: weights reconstruct through Q") {
    auto gen = rng::Xoshiro256pp(59);
    const std::vector<Dims> spaces = {Dims({2, 2}), Dims({2, 3}), Dims({3, 3})};
    int done = 0;
    while (done < 1000) {
        const Dims& dims = spaces[gen.below(spaces.size())];
        const auto set = random_set(gen, dims, 2 + gen.below(3));
        const auto p = random_pvec(gen, set.size());
        const auto q = states::gram_q(set);
        const auto mu = construct::mu_of_p(set, p);

        std::vector<double> overlaps(set.size());
        for (std::size_t j = 0; j < set.size(); ++j)
            overlaps[j] = linalg::trace_inner(mu.mat, set.member_projector(j));
        std::vector<double> recovered;
        try {
            recovered = linalg::solve_real(q.entries, overlaps);
        } catch (const std::runtime_error&) {
            continue;  // near-coincident members; Q not invertible
        }
        for (std::size_t j = 0; j < set.size(); ++j)
            CHECK(std::abs(recovered[j] - p.weights[j]) <= 1e-10);
        ++done;
    }
}

TEST_CASE("Neumann series agrees with the direct solve") {
    auto gen = rng::Xoshiro256pp(61);
    int done = 0;
    while (done < 1000) {
        const auto set = random_set(gen, Dims({3, 3}), 3 + gen.below(2));
        const auto q = states::gram_q(set);
        if (q.max_offdiag_row_sum() >= 0.95) continue;

        const std::size_t m = q.size;
        std::vector<double> term(m, 1.0), series(m, 1.0);  // k = 0 term: e
        for (int k = 1; k <= 200; ++k) {
            std::vector<double> next(m, 0.0);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t j = 0; j < m; ++j)
                    if (r != j) next[r] += q.at(r, j) * term[j];  // B = Q - I
            term = next;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            for (std::size_t r = 0; r < m; ++r) series[r] += sign * term[r];
        }
        const auto direct = linalg::solve_real(q.entries, std::vector<double>(m, 1.0));
        for (std::size_t r = 0; r < m; ++r) CHECK(std::abs(series[r] - direct[r]) <= 1e-8);
        ++done;
    }
}

TEST_CASE("condition evaluation on the b2 family with a fixed infimum") {
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    const auto rep = construct::evaluate_conditions(b2, p, 1.0 / 16.0);
    CHECK(rep.cond1);
    CHECK(rep.cond2);
    CHECK_FALSE(rep.cond3);
    CHECK(std::abs(rep.rhs - (5.0 - std::sqrt(13.0)) / 16.0) <= 1e-10);
    CHECK(std::abs(rep.tr_mu0_sq - 7.0 / 16.0) <= 1e-12);
    CHECK(rep.sanity_interval);
    CHECK(rep.s0 >= 1.0);
}

TEST_CASE("condition evaluation on an orthonormal family") {
    const auto tiles = states::tiles();
    const double inf = 0.005;  // any positive value: the rhs vanishes here
    const auto rep = construct::evaluate_conditions(tiles, PVec::uniform(5), inf);
    CHECK(rep.cond1);
    CHECK(rep.cond2);
    CHECK(rep.cond3);
    CHECK(std::abs(rep.rhs) <= 1e-12);
    CHECK(std::abs(rep.s0 - (1.0 - 9.0 * inf)) <= 1e-12);
}

TEST_CASE("condition 1 refuses a set that fills the space") {
    const std::vector<cplx> e0 = {1.0, 0.0}, e1 = {0.0, 1.0};
    std::vector<ProductVector> members;
    for (const auto& a : {e0, e1})
        for (const auto& b : {e0, e1}) members.push_back(ProductVector::make({a, b}));
    const auto basis = ProductStateSet::make(Dims({2, 2}), std::move(members), "full-basis");
    const auto rep = construct::evaluate_conditions(basis, PVec::uniform(4), 0.1);
    CHECK_FALSE(rep.cond1);
}

TEST_CASE("witness construction and its contract") {
    const auto tiles = states::tiles();
    const double inf = 0.0056;
    const auto wit = construct::build_witness(tiles, PVec::uniform(5), inf);
    CHECK(wit.s0 > 0.0);
    CHECK(wit.s0 < 1.0);

    const auto mu0 = construct::mu_of_p(tiles, PVec::uniform(5));
    CHECK(std::abs((mu0.mat * wit.tau0.mat).trace().real() - inf) <= 1e-9);
    CHECK((wit.mat * wit.rho0.mat).trace().real() < 0.0);
    CHECK(std::abs(wit.c0 - (wit.tau0.mat * (wit.rho0.mat - wit.tau0.mat)).trace().real()) <=
          1e-15);

    // The matrix is exactly tau0 + c0 I - rho0.
    Matrix expected = wit.tau0.mat + Matrix::identity(9) * cplx(wit.c0, 0.0) - wit.rho0.mat;
    CHECK(wit.mat.max_abs_diff(expected) <= 1e-12);
}

TEST_CASE("witness construction refuses a failing condition 3") {
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    CHECK_THROWS_AS(construct::build_witness(b2, p, 1.0 / 16.0), std::runtime_error);
    const auto forced = construct::build_witness(b2, p, 1.0 / 16.0, /*force=*/true);
    CHECK(forced.s0 >= 1.0);
}

TEST_CASE("witness trace identity for arbitrary trace-one Hermitians") {
    const auto tiles = states::tiles();
    const auto wit = construct::build_witness(tiles, PVec::uniform(5), 0.0056);
    const Matrix dir = wit.rho0.mat - wit.tau0.mat;
    auto gen = rng::Xoshiro256pp(67);
    for (int trial = 0; trial < 1000; ++trial) {
        Matrix h(9, 9);
        for (std::size_t i = 0; i < 9; ++i) {
            h(i, i) = gen.normal();
            for (std::size_t j = i + 1; j < 9; ++j) {
                const cplx z = gen.complex_normal();
                h(i, j) = z;
                h(j, i) = std::conj(z);
            }
        }
        h += Matrix::identity(9) * cplx((1.0 - h.trace().real()) / 9.0, 0.0);
        const double lhs = linalg::trace_inner(h, wit.mat);
        const double rhs = -linalg::trace_inner(dir, h - wit.tau0.mat);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("face orthogonality holds whenever the weight solve succeeds") {
    // The segment from mu0 through D0 is orthogonal to every member
    // direction, in the non-orthogonal family too.
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    const auto mu0 = construct::mu_of_p(b2, p);
    const auto d0 = construct::maximally_mixed(b2.dims);
    const Matrix diff = d0.mat - mu0.mat;
    for (std::size_t r = 0; r < b2.size(); ++r) {
        const Matrix dir = b2.member_projector(r) - mu0.mat;
        CHECK(std::abs(linalg::trace_inner(diff, dir)) <= 1e-10);
    }
}

TEST_CASE("orthonormal annihilation: rho0 kills every member") {
    const auto tiles = states::tiles();
    const auto rho0 = construct::rho_of_p(tiles, PVec::uniform(5), 5.0).rho;
    for (std::size_t k = 0; k < 5; ++k) {
        const Matrix prod = rho0.mat * tiles.member_projector(k);
        CHECK(prod.max_abs() <= 1e-12);
    }
}

TEST_CASE("thresholds") {
    const double eps = 0.028;  // m-scaled value for a 9-dimensional, m=5 family
    const double thr = construct::pmax_threshold(9, 5, eps);
    CHECK(thr > 0.2);
    CHECK_THROWS_AS(construct::pmax_threshold(9, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(construct::pmax_threshold(9, 5, 2.0), std::invalid_argument);

    const double s0 = 0.95;
    CHECK(std::abs(construct::frustum_threshold(9, 5, 0.2, s0) - s0) <= 1e-15);
    CHECK(construct::frustum_threshold(9, 5, 0.25, s0) > s0);
}

TEST_CASE("the weight-maximum threshold marks exact hyperplane crossing") {
    // With p_max sitting exactly on the bound, the reflection's overlap with
    // mu0 lands exactly on the infimum: the boundary case certifies nothing.
    const double inf = 0.0056;
    const double eps_m = 5.0 * inf;
    const double thr = construct::pmax_threshold(9, 5, eps_m);
    const double b = 1.0 / thr;
    const double tr_at_threshold = (1.0 - b / 5.0) / (9.0 - b);
    CHECK(std::abs(tr_at_threshold - inf) <= 1e-14);
}

TEST_CASE("mixtures along the segment") {
    const auto tiles = states::tiles();
    const auto rho_b = construct::rho_of_p(tiles, PVec::uniform(5), 5.0).rho;
    const auto d0 = construct::maximally_mixed(tiles.dims);
    CHECK(construct::lambda_of_t(rho_b, 0.0).mat.max_abs_diff(d0.mat) <= 1e-15);
    CHECK(construct::lambda_of_t(rho_b, 1.0).mat.max_abs_diff(rho_b.mat) <= 1e-15);
    CHECK_THROWS_AS(construct::lambda_of_t(rho_b, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(construct::lambda_of_t(rho_b, 1.1), std::invalid_argument);
}

TEST_CASE("density validation") {
    CHECK_THROWS_AS(Density::make(Matrix::identity(4), Dims({2, 2})), std::invalid_argument);
    Matrix not_psd = Matrix::identity(4);
    not_psd *= cplx(0.5, 0.0);
    not_psd(3, 3) = -0.5;
    CHECK_THROWS_AS(Density::make(std::move(not_psd), Dims({2, 2})), std::invalid_argument);
}
