#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "upbwit/construct.hpp"
#include "upbwit/rng.hpp"
#include "upbwit/separability.hpp"
#include "upbwit/states.hpp"

using namespace upbwit;
using construct::Density;
using construct::PVec;
using linalg::cplx;
using linalg::Dims;
using linalg::Matrix;

namespace {

Density random_separable(rng::Xoshiro256pp& gen, const Dims& dims) {
    const std::size_t n_total = dims.total();
    const std::size_t terms = 1 + gen.below(n_total);
    const auto weights = gen.simplex_weights(terms);
    Matrix sigma(n_total, n_total);
    for (std::size_t t = 0; t < terms; ++t) {
        std::vector<cplx> v = {cplx(1.0, 0.0)};
        for (const auto d : dims.local) v = linalg::kron(v, gen.unit_vector(d));
        for (std::size_t i = 0; i < n_total; ++i)
            for (std::size_t j = 0; j < n_total; ++j)
                sigma(i, j) += weights[t] * v[i] * std::conj(v[j]);
    }
    return Density::make(std::move(sigma), dims);
}

}  // namespace

TEST_CASE("see-saw on a flat objective returns 1/N") {
    const Dims dims({3, 3});
    const auto d0 = construct::maximally_mixed(dims);
    const auto est = separability::epsilon_seesaw(d0, 8, 1);
    CHECK(std::abs(est.value - 1.0 / 9.0) <= 1e-12);
    CHECK(est.converged);
}

TEST_CASE("see-saw argument checks") {
    const auto d0 = construct::maximally_mixed(Dims({2, 2}));
    CHECK_THROWS_AS(separability::epsilon_seesaw(d0, 0, 0), std::invalid_argument);
    separability::SeesawOptions opt;
    CHECK_THROWS_AS(separability::seesaw_min_product(Matrix::identity(4), Dims({2, 3}), opt),
                    std::invalid_argument);
}

TEST_CASE("see-saw is deterministic under a fixed seed") {
    const auto tiles = states::tiles();
    const auto mu0 = construct::mu_of_p(tiles, PVec::uniform(5));
    const auto a = separability::epsilon_seesaw(mu0, 16, 123);
    const auto b = separability::epsilon_seesaw(mu0, 16, 123);
    CHECK(a.value == b.value);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(a.argmin.factors[k][i] == b.argmin.factors[k][i]);
    const auto c = separability::epsilon_seesaw(mu0, 16, 124);
    CHECK(c.value <= a.value + 1e-6);  // different seed, same basin up to noise
}

TEST_CASE("see-saw on the tiling family stays in the expected interval") {
    const auto tiles = states::tiles();
    const auto mu0 = construct::mu_of_p(tiles, PVec::uniform(5));
    const auto est = separability::epsilon_seesaw(mu0, 64, 0);
    CHECK(est.value > 0.0);
    CHECK(est.value < 1.0 / 9.0);
    // The estimate is achieved by its argmin.
    CHECK(std::abs(linalg::expectation(mu0.mat, est.argmin.full()) - est.value) <= 1e-10);
}

TEST_CASE("grid oracle on a flat objective") {
    const auto d0 = construct::maximally_mixed(Dims({2, 2}));
    CHECK(std::abs(separability::epsilon_grid_oracle(d0, 6) - 0.25) <= 1e-12);
    CHECK(std::abs(separability::epsilon_grid_oracle(d0, 11) - 0.25) <= 1e-12);
}

TEST_CASE("grid oracle brackets the see-saw value on example_b2") {
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    const auto mu0 = construct::mu_of_p(b2, p);
    const double oracle = separability::epsilon_grid_oracle(mu0, 40);
    const auto seesaw = separability::epsilon_seesaw(mu0, 256, 0);
    // Both are upper bounds on the infimum; the grid converges from above.
    CHECK(oracle <= 1.0 / 16.0 + 2e-3);
    CHECK(oracle >= seesaw.value - 1e-9);
    CHECK(oracle - seesaw.value <= 2e-3);
}

TEST_CASE("grid oracle agrees with the see-saw on the tiling family") {
    const auto tiles = states::tiles();
    const auto mu0 = construct::mu_of_p(tiles, PVec::uniform(5));
    const double oracle = separability::epsilon_grid_oracle(mu0, 8);
    const auto seesaw = separability::epsilon_seesaw(mu0, 64, 0);
    CHECK(oracle >= seesaw.value - 1e-9);
    CHECK(oracle - seesaw.value <= 5e-3);
}

TEST_CASE("grid oracle refuses oversized parameter spaces") {
    const auto big = construct::maximally_mixed(Dims({3, 3, 3}));
    CHECK_THROWS_AS(separability::epsilon_grid_oracle(big, 4), std::invalid_argument);
    const auto tiles_mu = construct::mu_of_p(states::tiles(), PVec::uniform(5));
    CHECK_THROWS_AS(separability::epsilon_grid_oracle(tiles_mu, 40), std::invalid_argument);
}

TEST_CASE("ppt report on entangled and separable states") {
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::vector<cplx> psi = {r2, 0.0, 0.0, r2};
    const auto bell = Density::make(Matrix::projector(psi), Dims({2, 2}));
    const auto bad = separability::is_ppt(bell);
    CHECK_FALSE(bad.all_psd());
    CHECK(std::abs(bad.min_eigenvalue() + 0.5) <= 1e-12);

    const auto rho0 = construct::rho_of_p(states::tiles(), PVec::uniform(5), 5.0).rho;
    CHECK(separability::is_ppt(rho0, 1e-10).all_psd());
}

TEST_CASE("peres consistency: sampled separable states stay ppt") {
    auto gen = rng::Xoshiro256pp(71);
    const std::vector<Dims> spaces = {Dims({2, 2}), Dims({2, 3}), Dims({2, 2, 2})};
    for (int trial = 0; trial < 1000; ++trial) {
        const Dims& dims = spaces[gen.below(spaces.size())];
        const auto sigma = random_separable(gen, dims);
        CHECK(separability::is_ppt(sigma).all_psd());
    }
}

TEST_CASE("a subset and its complement share the minimum eigenvalue") {
    auto gen = rng::Xoshiro256pp(73);
    for (int trial = 0; trial < 200; ++trial) {
        Matrix g(6, 6);
        for (auto& z : g.data()) z = gen.complex_normal();
        Matrix rho = g * g.adjoint();
        rho *= cplx(1.0 / rho.trace().real(), 0.0);
        const auto rep = separability::is_ppt(Density::make(std::move(rho), Dims({2, 3})));
        REQUIRE(rep.verdicts.size() == 2);
        CHECK(std::abs(rep.verdicts[0].min_eigenvalue - rep.verdicts[1].min_eigenvalue) <=
              1e-10);
    }
}

TEST_CASE("witness validation flags an inverted witness") {
    Matrix w = Matrix::identity(4);
    w *= cplx(-1.0, 0.0);
    const auto val = separability::validate_witness(w, Dims({2, 2}), 200, 0, 8);
    CHECK(std::abs(val.min() + 1.0) <= 1e-9);
    REQUIRE(val.violating_sigma.has_value());
    CHECK(std::abs(val.violating_sigma->trace().real() - 1.0) <= 1e-10);
}

TEST_CASE("witness validation clears a valid witness") {
    const auto tiles = states::tiles();
    const auto mu0 = construct::mu_of_p(tiles, PVec::uniform(5));
    const double inf = separability::epsilon_seesaw(mu0, 128, 0).value;
    const auto wit = construct::build_witness(tiles, PVec::uniform(5), inf);
    const auto val = separability::validate_witness(wit.mat, tiles.dims, 20000, 1);
    CHECK(val.min() >= -1e-9);
    CHECK_FALSE(val.violating_sigma.has_value());
}

TEST_CASE("witness validation finds violations of a forced witness") {
    const auto b2 = states::example_b2();
    const auto p = construct::solve_condition2(states::gram_q(b2)).p;
    const auto mu0 = construct::mu_of_p(b2, p);
    const double inf = separability::epsilon_seesaw(mu0, 64, 0).value;
    const auto wit = construct::build_witness(b2, p, inf, /*force=*/true);
    const auto val = separability::validate_witness(wit.mat, b2.dims, 5000, 2, 64);
    CHECK(val.min() < -1e-9);
    REQUIRE(val.violating_sigma.has_value());
    // The reported violator is a trace-one state that actually violates.
    const double tr = val.violating_sigma->trace().real();
    CHECK(std::abs(tr - 1.0) <= 1e-10);
    const double value = linalg::trace_inner(*val.violating_sigma, wit.mat);
    CHECK(value < -1e-9);
}
