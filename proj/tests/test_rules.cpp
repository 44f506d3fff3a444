#include <doctest.h>

#include "qtheta/rules.hpp"

#include <algorithm>
#include <thread>

using namespace qtheta;

namespace {

GfIdentity lane_identity() {
    GfIdentity id;
    id.name = "n133_lane_4m1";
    id.seq = {Kind::N, {1, 3, 3}};
    id.map = {4, 1};
    id.rhs = parse_expr("2*phi(q^3)^2*psi(q^2)");
    return id;
}

CorrectionRule t144_correction() {
    CorrectionRule rule;
    rule.name = "t144_correction";
    rule.lhs_seq = {Kind::t, {1, 4, 4}};
    rule.lhs_map = {1, 0};
    rule.rhs_seq = {Kind::N, {1, 4, 4}};
    rule.rhs_map = {8, 9};
    rule.den = 2;
    rule.families = {
        {0, 9, -9, 0, 1, 6, -3, {3, {0}}},
        {1, 9, -3, 0, 0, 6, -1, {3, {2}}},
        {1, 9, 3, 0, 1, 6, 1, {3, {2}}},
    };
    return rule;
}

} // namespace

TEST_CASE("gf identity lanes verify against expressions") {
    SeriesCache cache;
    const auto report = check_gf_identity(lane_identity(), 256, cache);
    CHECK(report.status == Status::verified);
    CHECK(report.engine == "series");
}

TEST_CASE("gf identity restating a generating function verifies") {
    SeriesCache cache;
    GfIdentity id;
    id.name = "t111_restated";
    id.seq = {Kind::t, {1, 1, 1}};
    id.map = {1, 0};
    id.rhs = parse_expr("8*psi(q)^3");
    CHECK(check_gf_identity(id, 200, cache).status == Status::verified);
}

TEST_CASE("scale denominators cross-multiply") {
    SeriesCache cache;
    GfIdentity id = lane_identity();
    id.name = "n133_lane_scaled";
    id.scale_den = 2;
    id.rhs = parse_expr("4*phi(q^3)^2*psi(q^2)");
    CHECK(check_gf_identity(id, 128, cache).status == Status::verified);
}

TEST_CASE("index offsets past the modulus shift the lane") {
    SeriesCache cache;
    GfIdentity id;
    id.name = "t354_lane_4m5";
    id.seq = {Kind::t, {3, 5, 4}};
    id.map = {4, 5};
    id.rhs = parse_expr("8*phi(q^10)*psi(q)*psi(q^12) + 8*q*phi(q^6)*psi(q)*psi(q^20)");
    CHECK(check_gf_identity(id, 200, cache).status == Status::verified);
}

TEST_CASE("a wrong gf identity yields an oracle-confirmed witness") {
    SeriesCache cache;
    GfIdentity id = lane_identity();
    id.name = "n133_lane_broken";
    id.rhs = parse_expr("2*phi(q^3)^2*psi(q^2) + q^5");
    const auto report = check_gf_identity(id, 64, cache);
    CHECK(report.status == Status::counterexample);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->n == 5);
    CHECK(*report.witness->orig_n == 21);
    REQUIRE(report.witness->oracle_confirmed.has_value());
    CHECK(*report.witness->oracle_confirmed);
}

TEST_CASE("linear rules run under all three engines") {
    SeriesCache cache;
    LinearRule rule;
    rule.name = "t13_16_lane";
    rule.lhs_seq = {Kind::t, {1, 3, 16}};
    rule.lhs_map = {4, 1};
    rule.rhs = {{2, {Kind::N, {1, 3, 16}}, {8, 7}}};
    rule.n_start = 0;
    rule.orig = IndexMap{4, 1};

    for (const Engine engine : {Engine::series, Engine::oracle, Engine::both}) {
        const auto report = check_linear_rule(rule, 120, engine, cache);
        CHECK(report.status == Status::verified);
    }
}

TEST_CASE("residue domains and exclusions select the right indices") {
    SeriesCache cache;
    // Ratio-1 row: t(2,3,3;n) = N(1,3,3;n+1) on 6 mod 8 and 27 mod 32.
    LinearRule rule;
    rule.name = "t233_ratio1";
    rule.lhs_seq = {Kind::t, {2, 3, 3}};
    rule.lhs_map = {1, 0};
    rule.rhs = {{1, {Kind::N, {1, 3, 3}}, {1, 1}}};
    rule.domain = {32, {6, 14, 22, 27, 30}};
    rule.exclude = Domain{16, {15}};
    CHECK(check_linear_rule(rule, 200, Engine::series, cache).status == Status::verified);
    CHECK(check_linear_rule(rule, 60, Engine::oracle, cache).status == Status::verified);

    // Off its residue classes the same relation is false.
    rule.name = "t233_ratio1_everywhere";
    rule.domain = {1, {0}};
    rule.exclude.reset();
    const auto broken = check_linear_rule(rule, 200, Engine::series, cache);
    CHECK(broken.status == Status::counterexample);
    REQUIRE(broken.witness.has_value());
    CHECK(*broken.witness->oracle_confirmed);
}

TEST_CASE("ratio rules cross-multiply exactly") {
    SeriesCache cache;
    // (2+C)*t(1,1,2;n) = 2*N(1,1,2;8n+4) with C(1,1,2) = 1.
    LinearRule rule;
    rule.name = "ratio_112";
    rule.lhs_seq = {Kind::t, {1, 1, 2}};
    rule.rhs = {{1, {Kind::N, {1, 1, 2}}, {8, 4}}};
    rule.num = 2;
    rule.den = 3;
    CHECK(check_linear_rule(rule, 64, Engine::both, cache).status == Status::verified);

    // Frozen spot value: 3*t(1,1,2;1) = 48 = 2*N(1,1,2;12).
    CHECK(oracle_count({Kind::t, {1, 1, 2}}, 1) == 16);
    CHECK(oracle_count({Kind::N, {1, 1, 2}}, 12) == 24);
}

TEST_CASE("a false ratio is reported with a witness") {
    SeriesCache cache;
    LinearRule rule;
    rule.name = "t111_wrong_ratio";
    rule.lhs_seq = {Kind::t, {1, 1, 1}};
    rule.rhs = {{1, {Kind::N, {1, 1, 1}}, {8, 3}}};
    rule.num = 2; // correct ratio is 1
    const auto report = check_linear_rule(rule, 50, Engine::series, cache);
    CHECK(report.status == Status::counterexample);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->n == 1);
    CHECK(*report.witness->oracle_confirmed);
}

TEST_CASE("empty scan windows are reported as skipped") {
    SeriesCache cache;
    LinearRule rule;
    rule.name = "skipped_rule";
    rule.lhs_seq = {Kind::t, {1, 3, 16}};
    rule.lhs_map = {4, 1};
    rule.rhs = {{2, {Kind::N, {1, 3, 16}}, {8, 7}}};
    rule.n_start = 1;
    rule.orig = IndexMap{4, 1};
    CHECK(check_linear_rule(rule, 3, Engine::series, cache).status == Status::skipped);
}

TEST_CASE("correction rule matches the index families") {
    SeriesCache cache;
    const auto report = check_correction_rule(t144_correction(), 80, cache);
    CHECK(report.status == Status::verified);
}

TEST_CASE("correction rule flags a wrong family value") {
    SeriesCache cache;
    CorrectionRule rule = t144_correction();
    rule.families[0].D = 12; // 12k-6 instead of 6k-3
    rule.families[0].E = -6;
    const auto report = check_correction_rule(rule, 20, cache);
    CHECK(report.status == Status::counterexample);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->n == 9);
    CHECK(report.witness->lhs == -9);  // actual correction value
    CHECK(report.witness->rhs == -18); // broken prediction
}

TEST_CASE("conflicting family predictions are surfaced") {
    SeriesCache cache;
    CorrectionRule rule = t144_correction();
    rule.families[0].E = -4; // breaks the k <-> 1-k symmetry of the family
    const auto report = check_correction_rule(rule, 20, cache);
    CHECK(report.status == Status::counterexample);
    CHECK(report.detail.find("conflict") != std::string::npos);
}

TEST_CASE("frozen correction values") {
    // r(n) = t(1,4,4;n) - N(1,4,4;8n+9)/2 by direct enumeration.
    auto r = [](std::int64_t n) {
        return oracle_count({Kind::t, {1, 4, 4}}, n) -
               oracle_count({Kind::N, {1, 4, 4}}, 8 * n + 9) / 2;
    };
    CHECK(r(1) == 0);
    CHECK(r(2) == -5); // family 2(n+1) = 9k^2 - 3k fires at k = 1
    CHECK(r(3) == 0);
    CHECK(r(9) == -9); // family 2n = 9k^2 - 9k fires at k = 2
}

TEST_CASE("residue partition checker") {
    const std::vector<Domain> cases{
        {4, {0, 1}}, {8, {2}}, {32, {6, 14, 22, 27, 30}}, {16, {3, 7}}, {32, {11}},
    };
    const Domain exclusion{16, {15}};
    std::string detail;
    CHECK(residues_partition(cases, exclusion, 32, &detail));

    std::vector<Domain> missing(cases.begin(), cases.end() - 1);
    CHECK_FALSE(residues_partition(missing, exclusion, 32, &detail));
    CHECK(detail.find("residue 11") != std::string::npos);

    std::vector<Domain> doubled = cases;
    doubled.push_back(Domain{32, {6}});
    CHECK_FALSE(residues_partition(doubled, exclusion, 32, &detail));
}

TEST_CASE("generated rule families") {
    const auto rules = generate_ach_rules();

    const auto named = [&](const std::string& name) -> const LinearRule& {
        const auto it = std::find_if(rules.begin(), rules.end(),
                                     [&](const LinearRule& r) { return r.name == name; });
        REQUIRE(it != rules.end());
        return *it;
    };

    std::size_t ratio = 0, diff8 = 0, oddpair = 0;
    for (const auto& r : rules) {
        if (r.name.rfind("gen_ratio_", 0) == 0) ++ratio;
        if (r.name.rfind("gen_diff8_", 0) == 0) ++diff8;
        if (r.name.rfind("gen_oddpair_", 0) == 0) ++oddpair;
    }
    CHECK(ratio == 11);  // ordered forms with a+b+c <= 7
    CHECK(diff8 == 5);   // (1,1,6) (1,2,5) (1,3,4) (2,2,4) (2,3,3)
    CHECK(oddpair >= 2);
    CHECK(rules.size() == ratio + diff8 + oddpair);

    const auto& r111 = named("gen_ratio_1_1_1");
    CHECK(r111.num == 1);
    CHECK(r111.den == 1);

    const auto& r134 = named("gen_diff8_1_3_4");
    CHECK(r134.num == 2);
    CHECK(r134.den == 3);
    REQUIRE(r134.rhs.size() == 2);
    CHECK(r134.rhs[0].map == IndexMap{8, 8});
    CHECK(r134.rhs[1].coef == -1);
    CHECK(r134.rhs[1].map == IndexMap{2, 2});

    const auto& s112 = named("gen_oddpair_1_1_2");
    CHECK(s112.num == 1);
    CHECK(s112.den == 1);
    CHECK(s112.rhs[0].map == IndexMap{8, 4});
    CHECK(s112.rhs[1].map == IndexMap{2, 1});
    named("gen_oddpair_1_5_2");

    // Every generated rule holds on a short oracle scan.
    SeriesCache cache;
    for (const auto& rule : rules) {
        const auto report = check_linear_rule(rule, 24, Engine::oracle, cache);
        CAPTURE(rule.name);
        CHECK(report.status == Status::verified);
    }
}

TEST_CASE("series cache enforces its memory budget") {
    SeriesCache small_cache(128);
    CHECK_THROWS_AS(small_cache.get({Kind::N, {1, 1, 1}}, 4096), ResourceError);

    SeriesCache tiny(64);
    LinearRule rule;
    rule.name = "budgeted";
    rule.lhs_seq = {Kind::t, {1, 1, 1}};
    rule.rhs = {{1, {Kind::N, {1, 1, 1}}, {8, 3}}};
    const auto report = check_linear_rule(rule, 2000, Engine::series, tiny);
    CHECK(report.status == Status::error);
    CHECK(report.detail.find("budget") != std::string::npos);
}

TEST_CASE("concurrent cache readers see one consistent build") {
    SeriesCache cache;
    const SeqSpec spec{Kind::t, {1, 3, 5}};
    std::vector<std::thread> pool;
    std::vector<std::shared_ptr<const Series>> seen(8);
    for (int i = 0; i < 8; ++i)
        pool.emplace_back([&, i] { seen[static_cast<std::size_t>(i)] = cache.get(spec, 2000); });
    for (auto& th : pool) th.join();
    for (const auto& s : seen) {
        REQUIRE(s != nullptr);
        CHECK(s.get() == seen[0].get());
        CHECK(s->coefficient(0) == 8);
    }
}

TEST_CASE("series cache reuses builds at planned orders") {
    SeriesCache cache;
    cache.plan({Kind::N, {1, 3, 3}}, 500);
    const auto a = cache.get({Kind::N, {1, 3, 3}}, 100);
    CHECK(a->precision() == 500);
    const auto b = cache.get({Kind::N, {1, 3, 3}}, 400);
    CHECK(a.get() == b.get());
}
