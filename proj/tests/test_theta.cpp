#include <doctest.h>

#include "qtheta/theta.hpp"

#include <algorithm>
#include <array>
#include <vector>

using namespace qtheta;

namespace {

std::vector<std::int64_t> coeff_window(const Series& s, std::int64_t count) {
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < count; ++i)
        out.push_back(static_cast<std::int64_t>(s.coefficient(i)));
    return out;
}

} // namespace

TEST_CASE("phi enumerates squares") {
    CHECK(coeff_window(theta_phi(10), 10) ==
          std::vector<std::int64_t>{1, 2, 0, 0, 2, 0, 0, 0, 0, 2});
    CHECK(coeff_window(theta_phi(1), 1) == std::vector<std::int64_t>{1});
    CHECK(theta_phi(20).coefficient(16) == 2);
}

TEST_CASE("psi enumerates triangular numbers") {
    CHECK(coeff_window(theta_psi(11), 11) ==
          std::vector<std::int64_t>{1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1});
    CHECK(coeff_window(theta_psi(1), 1) == std::vector<std::int64_t>{1});
    CHECK(theta_psi(16).coefficient(15) == 1);
}

TEST_CASE("theta coefficients stay in their characteristic sets") {
    const Series phi = theta_phi(2000);
    const Series psi = theta_psi(2000);
    for (std::int64_t n = 0; n < 2000; ++n) {
        const auto p = static_cast<std::int64_t>(phi.coefficient(n));
        const auto s = static_cast<std::int64_t>(psi.coefficient(n));
        CHECK((p == 0 || p == 1 || p == 2));
        CHECK((s == 0 || s == 1));
    }
}

TEST_CASE("generating functions match the defining products") {
    CHECK(gf({Kind::t, {1, 1, 1}}, 4).coefficient(0) == 8);
    CHECK(gf({Kind::N, {1, 3, 3}}, 4).coefficient(1) == 2);
    CHECK(gf({Kind::T, {2, 3, 3}}, 8).coefficient(6) == 2);
    CHECK(gf({Kind::t, {2, 3, 3}}, 8).coefficient(6) == 16);
}

TEST_CASE("oracle counts match hand enumeration") {
    CHECK(oracle_count({Kind::N, {1, 1, 1}}, 3) == 8); // all sign choices of (1,1,1)
    for (const FormTriple f : {FormTriple{1, 1, 1}, FormTriple{9, 9, 9}, FormTriple{2, 3, 7}})
        CHECK(oracle_count({Kind::t, f}, 0) == 8);
    CHECK(oracle_count({Kind::N, {1, 3, 16}}, 7) == 4);
    CHECK(oracle_count({Kind::t, {1, 3, 16}}, 1) == 8);
}

TEST_CASE("form constant follows the multiplicity formula") {
    CHECK(form_constant({1, 1, 1}).value == 0);
    CHECK(form_constant({1, 1, 2}).value == 1);
    CHECK(form_constant({2, 2, 3}).value == 0);
    CHECK(form_constant({1, 1, 3}).value == 2);
    CHECK(form_constant({1, 3, 3}).value == 2);
    CHECK(form_constant({1, 3, 4}).value == 1);
    CHECK(form_constant({4, 5, 6}).value == 0);
    CHECK_THROWS(form_constant({0, 1, 1}));
}

TEST_CASE("series and oracle engines agree") {
    const std::array<FormTriple, 6> forms{
        FormTriple{1, 1, 1}, FormTriple{1, 2, 3}, FormTriple{1, 3, 3},
        FormTriple{2, 3, 3}, FormTriple{1, 4, 4}, FormTriple{3, 5, 12},
    };
    const std::int64_t order = 120;
    for (const auto& form : forms)
        for (const Kind kind : {Kind::N, Kind::t, Kind::T}) {
            const SeqSpec spec{kind, form};
            const Series s = gf(spec, order);
            for (std::int64_t n = 0; n < order; ++n)
                REQUIRE(s.coefficient(n) == oracle_count(spec, n));
        }
}

TEST_CASE("t counts are eight times T counts") {
    for (const FormTriple f : {FormTriple{1, 1, 2}, FormTriple{2, 3, 3}, FormTriple{1, 4, 4}})
        for (std::int64_t n = 0; n <= 150; ++n)
            CHECK(oracle_count({Kind::t, f}, n) == 8 * oracle_count({Kind::T, f}, n));
}

TEST_CASE("counts are symmetric in the form coefficients") {
    std::array<std::int64_t, 3> perm{1, 3, 16};
    std::sort(perm.begin(), perm.end());
    do {
        const FormTriple f{perm[0], perm[1], perm[2]};
        for (std::int64_t n = 0; n <= 60; ++n) {
            CHECK(oracle_count({Kind::N, f}, n) == oracle_count({Kind::N, {1, 3, 16}}, n));
            CHECK(oracle_count({Kind::t, f}, n) == oracle_count({Kind::t, {1, 3, 16}}, n));
        }
        const Series a = gf({Kind::N, f}, 40);
        const Series b = gf({Kind::N, {16, 3, 1}}, 40);
        CHECK(equal_to_order(a, b, 40));
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("integer square root and triangular tests are exact") {
    CHECK(isqrt64(0) == 0);
    CHECK(isqrt64(1) == 1);
    CHECK(isqrt64(3) == 1);
    CHECK(isqrt64(4) == 2);
    CHECK(isqrt64(999999999999999999) == 999999999);
    for (std::int64_t r = 0; r < 2000; ++r) {
        CHECK(isqrt64(r * r) == r);
        if (r > 0) CHECK(isqrt64(r * r - 1) == r - 1);
    }
    CHECK(is_perfect_square(49));
    CHECK_FALSE(is_perfect_square(48));
    for (const std::int64_t good : {0, 1, 3, 6, 10, 15, 5050}) CHECK(is_triangular(good));
    for (const std::int64_t bad : {2, 4, 5, 7, 5049}) CHECK_FALSE(is_triangular(bad));
}

TEST_CASE("kind names round-trip") {
    CHECK(kind_from_name("N") == Kind::N);
    CHECK(kind_from_name("t") == Kind::t);
    CHECK(kind_from_name("T") == Kind::T);
    CHECK_THROWS(kind_from_name("x"));
    CHECK(seq_label({Kind::t, {2, 3, 3}}) == "t(2,3,3)");
}
