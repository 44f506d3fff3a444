#include <doctest.h>

#include "qtheta/dsl.hpp"
#include "qtheta/theta.hpp"

#include <random>

using namespace qtheta;

namespace {

ThetaExpr random_expr(std::mt19937& rng) {
    std::uniform_int_distribution<int> nterms(1, 4);
    std::uniform_int_distribution<int> nfactors(0, 3);
    std::uniform_int_distribution<std::int64_t> coeff(1, 30);
    std::uniform_int_distribution<std::int64_t> qexp(0, 9);
    std::uniform_int_distribution<std::int64_t> arg(1, 24);
    std::uniform_int_distribution<std::int64_t> pw(1, 3);
    std::uniform_int_distribution<int> sign(0, 1);
    std::uniform_int_distribution<int> func(0, 1);

    ThetaExpr e;
    const int terms = nterms(rng);
    for (int i = 0; i < terms; ++i) {
        Term t;
        t.coefficient = coeff(rng) * (sign(rng) ? 1 : -1);
        t.qexponent = qexp(rng);
        const int fs = nfactors(rng);
        for (int j = 0; j < fs; ++j)
            t.factors.push_back(
                {func(rng) ? ThetaFunc::psi : ThetaFunc::phi, arg(rng), pw(rng)});
        e.terms.push_back(std::move(t));
    }
    return e;
}

} // namespace

TEST_CASE("parses a two-term identity side") {
    const ThetaExpr e = parse_expr("phi(q^6)*psi(q^4) + q*phi(q^2)*psi(q^12)");
    REQUIRE(e.terms.size() == 2);
    CHECK(e.terms[0].coefficient == 1);
    CHECK(e.terms[0].qexponent == 0);
    REQUIRE(e.terms[0].factors.size() == 2);
    CHECK(e.terms[0].factors[0] == Factor{ThetaFunc::phi, 6, 1});
    CHECK(e.terms[0].factors[1] == Factor{ThetaFunc::psi, 4, 1});
    CHECK(e.terms[1].qexponent == 1);
    CHECK(e.terms[1].factors[0] == Factor{ThetaFunc::phi, 2, 1});
}

TEST_CASE("parses powers and bare q") {
    const ThetaExpr e = parse_expr("psi(q)^2");
    REQUIRE(e.terms.size() == 1);
    REQUIRE(e.terms[0].factors.size() == 1);
    CHECK(e.terms[0].factors[0] == Factor{ThetaFunc::psi, 1, 2});

    const ThetaExpr q = parse_expr("q");
    CHECK(q.terms[0].qexponent == 1);
    CHECK(parse_expr("q^0").terms[0].qexponent == 0);
}

TEST_CASE("juxtaposed coefficient binds to the following q power") {
    const ThetaExpr e = parse_expr("2q^4*psi(q^32)");
    REQUIRE(e.terms.size() == 1);
    CHECK(e.terms[0].coefficient == 2);
    CHECK(e.terms[0].qexponent == 4);
    REQUIRE(e.terms[0].factors.size() == 1);
    CHECK(e.terms[0].factors[0] == Factor{ThetaFunc::psi, 32, 1});

    CHECK(parse_expr("2q^4*psi(q^32)") == parse_expr("2*q^4*psi(q^32)"));
}

TEST_CASE("subtraction folds into negative coefficients") {
    const ThetaExpr e = parse_expr("phi(q) - 2*q*psi(q^8)");
    REQUIRE(e.terms.size() == 2);
    CHECK(e.terms[1].coefficient == -2);

    const ThetaExpr neg = parse_expr("-3*phi(q)");
    CHECK(neg.terms[0].coefficient == -3);
}

TEST_CASE("comments and whitespace are ignored") {
    const ThetaExpr e = parse_expr("  8 * psi(q)^3   # the t(1,1,1) generating function\n");
    CHECK(e.terms.size() == 1);
    CHECK(e.terms[0].coefficient == 8);
}

TEST_CASE("syntax errors carry position and expectation") {
    try {
        parse_expr("phi(q^6)*psi(q^4) + + q");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 21);
        CHECK(!e.expected().empty());
    }

    CHECK_THROWS_AS(parse_expr("phi(q^0)"), ParseError);   // zero argument exponent
    CHECK_THROWS_AS(parse_expr("psi(q)^0"), ParseError);   // zero power
    CHECK_THROWS_AS(parse_expr("0*phi(q)"), ParseError);   // zero coefficient
    CHECK_THROWS_AS(parse_expr("phi(p)"), ParseError);
    CHECK_THROWS_AS(parse_expr("phi(q"), ParseError);
    CHECK_THROWS_AS(parse_expr("theta(q)"), ParseError);
    CHECK_THROWS_AS(parse_expr("phi(q) %"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("phi(q)phi(q)"), ParseError); // '*' required between calls
}

TEST_CASE("multi-line input reports the right line") {
    try {
        parse_expr("phi(q) +\n psi(w)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("print and parse round-trip structurally") {
    CHECK(to_string(parse_expr("2q^4*psi(q^32)")) == "2*q^4*psi(q^32)");
    CHECK(to_string(parse_expr("1")) == "1");
    CHECK(to_string(parse_expr("phi(q) - phi(q)")) == "phi(q) - phi(q)");
    CHECK(to_string(parse_expr("-psi(q)^2 + q")) == "-psi(q)^2 + q");

    std::mt19937 rng(424242);
    for (int iter = 0; iter < 300; ++iter) {
        const ThetaExpr e = random_expr(rng);
        const std::string text = to_string(e);
        CAPTURE(text);
        CHECK(parse_expr(text) == e);
    }
}

TEST_CASE("eval builds the expected windows") {
    const Series s = eval(parse_expr("psi(q)^2"), 7);
    CHECK(s.precision() == 7);
    const std::vector<std::int64_t> expect{1, 2, 1, 2, 2, 0, 3};
    for (std::int64_t i = 0; i < 7; ++i) CHECK(s.coefficient(i) == expect[static_cast<std::size_t>(i)]);

    const Series one = eval(parse_expr("1"), 3);
    CHECK(one.coefficient(0) == 1);
    CHECK(one.coefficient(1) == 0);
    CHECK(one.coefficient(2) == 0);

    // A term whose monomial shift exceeds the window contributes nothing.
    const Series far = eval(parse_expr("q^9 + phi(q)"), 4);
    CHECK(equal_to_order(far, theta_phi(4), 4));

    CHECK_THROWS_AS(eval(ThetaExpr{}, 8), SeriesError);
}

TEST_CASE("large factor powers evaluate by repeated squaring") {
    // Same window as the naive product chain, exercised well past the
    // point where a linear chain would be reasonable to unroll by hand.
    const std::int64_t order = 96;
    const Series by_pow = eval(parse_expr("psi(q)^13"), order);
    Series chain = theta_psi(order);
    for (int i = 1; i < 13; ++i) chain = mul(chain, theta_psi(order));
    CHECK(equal_to_order(by_pow, chain, order));

    // A gigantic power terminates and yields the right low coefficients:
    // the product of that many psi factors starts 1, k, ... at q^0, q^1.
    const Series huge = eval(parse_expr("psi(q)^1000000"), 3);
    CHECK(huge.coefficient(0) == 1);
    CHECK(huge.coefficient(1) == 1000000);

    CHECK_THROWS_AS(parse_expr("q^4611686018427387904*q^4611686018427387904"), ParseError);
}

TEST_CASE("eval is a homomorphism for + and *") {
    std::mt19937 rng(77);
    const std::int64_t order = 64;
    for (int iter = 0; iter < 40; ++iter) {
        const ThetaExpr a = random_expr(rng);
        const ThetaExpr b = random_expr(rng);

        ThetaExpr sum = a;
        sum.terms.insert(sum.terms.end(), b.terms.begin(), b.terms.end());
        CHECK(equal_to_order(eval(sum, order), add(eval(a, order), eval(b, order)), order));

        ThetaExpr product; // distribute termwise, merging monomials
        for (const Term& ta : a.terms)
            for (const Term& tb : b.terms) {
                Term t;
                t.coefficient = ta.coefficient * tb.coefficient;
                t.qexponent = ta.qexponent + tb.qexponent;
                t.factors = ta.factors;
                t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
                product.terms.push_back(std::move(t));
            }
        CHECK(equal_to_order(eval(product, order), mul(eval(a, order), eval(b, order)), order));
    }
}

TEST_CASE("eval windows are prefixes of longer windows") {
    std::mt19937 rng(909);
    for (int iter = 0; iter < 30; ++iter) {
        const ThetaExpr e = random_expr(rng);
        const Series shorter = eval(e, 40);
        const Series longer = eval(e, 160);
        CHECK(equal_to_order(shorter, longer, 40));
    }
}

TEST_CASE("a shared leaf cache is semantically invisible") {
    LeafCache cache;
    const ThetaExpr e = parse_expr("8*psi(q^8)*phi(q^2) + q*psi(q^8)^2");
    const Series cached1 = eval(e, 200, &cache);
    const Series cached2 = eval(e, 200, &cache);
    const Series plain = eval(e, 200);
    CHECK(equal_to_order(cached1, plain, 200));
    CHECK(equal_to_order(cached2, plain, 200));
}
