#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "upbwit/rng.hpp"
#include "upbwit/states.hpp"

using namespace upbwit;
using linalg::cplx;
using linalg::Dims;
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

}  // namespace

TEST_CASE("gram_q of the built-in families") {
    const auto q_tiles = states::gram_q(states::tiles());
    CHECK(q_tiles.is_identity(1e-12));

    const auto q_b2 = states::gram_q(states::example_b2());
    const double expected[3][3] = {{1, 0, 0.25}, {0, 1, 0.25}, {0.25, 0.25, 1}};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::abs(q_b2.at(r, k) - expected[r][k]) <= 1e-12);

    const double t = 0.1;
    const double c = (1.0 + t) * (1.0 + t) + 2.0;
    const auto q_pert = states::gram_q(states::tiles_perturbed(t));
    CHECK(std::abs(q_pert.at(0, 4) - t * t / (6.0 * c)) <= 1e-15);
    CHECK(q_pert.at(0, 4) == q_pert.at(4, 0));
    CHECK(std::abs(q_pert.at(1, 4)) <= 1e-15);
}

TEST_CASE("gram_q is symmetric with unit diagonal and entries in [0,1]") {
    auto gen = rng::Xoshiro256pp(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto set = random_set(gen, Dims({3, 3}), 4);
        const auto q = states::gram_q(set);
        for (std::size_t r = 0; r < q.size; ++r) {
            CHECK(q.at(r, r) == 1.0);
            for (std::size_t k = 0; k < q.size; ++k) {
                CHECK(q.at(r, k) == q.at(k, r));
                CHECK(q.at(r, k) >= 0.0);
                CHECK(q.at(r, k) <= 1.0);
            }
        }
    }
}

TEST_CASE("the built-in families are unextendible") {
    CHECK_FALSE(states::is_unextendible(states::tiles()).extendible());
    CHECK_FALSE(states::is_unextendible(states::example_b2()).extendible());
}

TEST_CASE("a two-member set in 2x2 is extendible with a sound certificate") {
    const std::vector<cplx> e0 = {1.0, 0.0}, e1 = {0.0, 1.0};
    const auto set = ProductStateSet::make(
        Dims({2, 2}),
        {ProductVector::make({e0, e0}), ProductVector::make({e0, e1})}, "pair");
    const auto cert = states::is_unextendible(set);
    CHECK(cert.extendible());
    REQUIRE(cert.witness_vector.has_value());
    const auto w = cert.witness_vector->full();
    for (const auto& member : set.members)
        CHECK(std::abs(linalg::inner(member.full(), w)) <= 1e-9);
    CHECK(cert.witness_partition.has_value());
}

TEST_CASE("extendible certificates stay sound on random small sets") {
    auto gen = rng::Xoshiro256pp(37);
    for (int trial = 0; trial < 50; ++trial) {
        // Up to 3 random members in 3x3 always leave an orthogonal product
        // vector (one party can absorb at most rank-2 worth of factors).
        const auto set = random_set(gen, Dims({3, 3}), 1 + gen.below(3));
        const auto cert = states::is_unextendible(set);
        REQUIRE(cert.extendible());
        const auto w = cert.witness_vector->full();
        for (const auto& member : set.members)
            CHECK(std::abs(linalg::inner(member.full(), w)) <= 1e-9);
    }
}

TEST_CASE("enumeration bound is enforced") {
    auto gen = rng::Xoshiro256pp(41);
    const auto set = random_set(gen, Dims({2, 2}), 21);
    CHECK_THROWS_AS(states::is_unextendible(set), std::invalid_argument);
}

TEST_CASE("subset basis condition on the families and degenerate sets") {
    CHECK(states::check_subset_basis_condition(states::example_b2()));
    CHECK(states::check_subset_basis_condition(states::tiles()));

    // Repeated first factor: the pair {1,2} of first factors has rank 1.
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::vector<cplx> e0 = {1.0, 0.0}, e1 = {0.0, 1.0}, plus = {r2, r2};
    const auto degenerate = ProductStateSet::make(
        Dims({2, 2}),
        {ProductVector::make({e0, e0}), ProductVector::make({e0, e1}),
         ProductVector::make({plus, plus})},
        "degenerate");
    CHECK_FALSE(states::check_subset_basis_condition(degenerate));

    const auto wrong_m = ProductStateSet::make(
        Dims({2, 2}), {ProductVector::make({e0, e0}), ProductVector::make({e1, e1})}, "m=2");
    CHECK_THROWS_AS(states::check_subset_basis_condition(wrong_m), std::invalid_argument);
    auto gen = rng::Xoshiro256pp(43);
    CHECK_THROWS_AS(states::check_subset_basis_condition(random_set(gen, Dims({2, 3}), 3)),
                    std::invalid_argument);
}

TEST_CASE("basis condition implies unextendibility on random 2x2 triples") {
    auto gen = rng::Xoshiro256pp(47);
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto set = random_set(gen, Dims({2, 2}), 3);
        if (!states::check_subset_basis_condition(set)) continue;
        ++hits;
        CHECK_FALSE(states::is_unextendible(set).extendible());
    }
    CHECK(hits > 50);  // random triples generically satisfy the condition
}

TEST_CASE("builtin families dispatch and edge cases") {
    CHECK(states::family_names().size() == 3);
    CHECK(states::make_family("tiles").size() == 5);
    CHECK(states::make_family("example_b2").size() == 3);
    CHECK_THROWS_AS(states::make_family("nope"), std::invalid_argument);

    const auto base = states::tiles();
    const auto at_zero = states::tiles_perturbed(0.0);
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(std::abs(at_zero.members[k].factors[j][i] -
                               base.members[k].factors[j][i]) <= 1e-12);
}

TEST_CASE("product-state set JSON round trip") {
    const auto set = states::example_b2();
    const auto text = states::product_state_set_to_json(set);
    std::istringstream in(text);
    const auto loaded = states::load_product_state_set(in, false, "roundtrip");
    REQUIRE(loaded.size() == set.size());
    CHECK(loaded.dims == set.dims);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto a = set.members[k].full();
        const auto b = loaded.members[k].full();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14);
    }
}

TEST_CASE("loader rejects non-unit factors unless told to normalize") {
    const std::string text = R"({
      "dims": [2, 2],
      "members": [ [ [[2.0, 0], [0, 0]], [[1, 0], [0, 0]] ] ]
    })";
    {
        std::istringstream in(text);
        CHECK_THROWS_AS(states::load_product_state_set(in, false), std::invalid_argument);
    }
    {
        std::istringstream in(text);
        const auto set = states::load_product_state_set(in, true);
        CHECK(std::abs(linalg::norm(set.members[0].factors[0]) - 1.0) <= 1e-12);
    }
}

TEST_CASE("loader rejects malformed input") {
    std::istringstream bad("this is not json");
    CHECK_THROWS_AS(states::load_product_state_set(bad, false), std::invalid_argument);
    std::istringstream missing(R"({"dims": [2,2]})");
    CHECK_THROWS_AS(states::load_product_state_set(missing, false), std::invalid_argument);
    std::istringstream tiny_dim(R"({"dims": [2], "members": []})");
    CHECK_THROWS_AS(states::load_product_state_set(tiny_dim, false), std::invalid_argument);
}

TEST_CASE("a full product basis is unextendible but fills the space") {
    // m = N: nothing is orthogonal to it, and its orthocomplement is empty,
    // so the pipeline must refuse it at condition 1 (m < N).
    const std::vector<cplx> e0 = {1.0, 0.0}, e1 = {0.0, 1.0};
    std::vector<ProductVector> members;
    for (const auto& a : {e0, e1})
        for (const auto& b : {e0, e1}) members.push_back(ProductVector::make({a, b}));
    const auto set = ProductStateSet::make(Dims({2, 2}), std::move(members), "full-basis");
    CHECK_FALSE(states::is_unextendible(set).extendible());
    CHECK(set.size() == set.dims.total());
}
