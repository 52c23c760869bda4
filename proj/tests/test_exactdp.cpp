#include <catch2/catch_amalgamated.hpp>

#include "intcomp/exactdp.hpp"

using namespace intcomp;

namespace {

// Minimal checker-side evaluator so table expressions are validated without
// depending on the big-number module.
std::int64_t eval_expr(const std::string& s, std::size_t& i);

std::int64_t eval_factor(const std::string& s, std::size_t& i) {
    REQUIRE(i < s.size());
    if (s[i] == '1') {
        ++i;
        return 1;
    }
    REQUIRE(s[i] == '(');
    ++i;
    const std::int64_t v = eval_expr(s, i);
    REQUIRE(i < s.size());
    REQUIRE(s[i] == ')');
    ++i;
    return v;
}

std::int64_t eval_term(const std::string& s, std::size_t& i) {
    std::int64_t v = eval_factor(s, i);
    while (i < s.size() && s[i] == '*') {
        ++i;
        v *= eval_factor(s, i);
    }
    return v;
}

std::int64_t eval_expr(const std::string& s, std::size_t& i) {
    std::int64_t v = eval_term(s, i);
    while (i < s.size() && s[i] == '+') {
        ++i;
        v += eval_term(s, i);
    }
    return v;
}

std::int64_t eval_small(const std::string& s) {
    std::size_t i = 0;
    const std::int64_t v = eval_expr(s, i);
    REQUIRE(i == s.size());
    return v;
}

}  // namespace

TEST_CASE("small values match hand-checked complexities") {
    auto t = build_table(2000);
    const int expect[] = {0, 1, 2, 3, 4, 5, 5, 6, 6, 6, 7, 8, 7};
    for (int n = 1; n <= 12; ++n) CHECK(t.f(n) == expect[n]);
    CHECK(t.f(1439) == 26);
    CHECK(t.f(0) == 0);
}

TEST_CASE("ratio values") {
    auto t = build_table(2000);
    CHECK(ratio(3, t) == Catch::Approx(3.0).margin(1e-12));
    CHECK(ratio(1439, t) == Catch::Approx(3.928).margin(1e-3));
    CHECK(ratio(6, t) == Catch::Approx(3.065).margin(1e-3));
    CHECK_THROWS_AS(ratio(1, t), Error);
    CHECK_THROWS_AS(ratio(2001, t), Error);
}

TEST_CASE("selfridge bound and equality set") {
    auto t = build_table(20000);
    auto rep = verify_selfridge(t);
    CHECK(rep.violations.empty());
    std::vector<std::int64_t> powers;
    for (std::int64_t p = 3; p <= t.limit; p *= 3) powers.push_back(p);
    CHECK(rep.equality_set == powers);
}

TEST_CASE("table invariants") {
    auto t = build_table(20000);
    for (std::int64_t p = 1, j = 0; p <= t.limit; p *= 3, ++j)
        CHECK(t.f(p) == (p == 1 ? 1 : 3 * j));
    for (std::int64_t n = 2; n <= t.limit; ++n) {
        CHECK(t.f(n) <= t.f(n - 1) + 1);
    }
}

TEST_CASE("additive cap cross-check against the full search") {
    // Full search everywhere vs. cap applied from n = 1: values must agree,
    // validating the cap empirically before larger tables rely on it.
    auto full = build_table(10000, 10000);
    auto capped = build_table(10000, 0, 4096);
    for (std::int64_t n = 1; n <= 10000; ++n)
        REQUIRE(full.f(n) == capped.f(n));
}

TEST_CASE("subadditivity under both operations") {
    const std::int64_t limit = 3000;
    auto t = build_table(limit);
    for (std::int64_t m = 2; m * m <= limit; ++m) {
        for (std::int64_t n = m; m * n <= limit; ++n) {
            CHECK(t.f(m * n) <= t.f(m) + t.f(n));
            if (m + n <= limit) CHECK(t.f(m + n) <= t.f(m) + t.f(n));
        }
    }
}

TEST_CASE("stored expressions evaluate to n with exactly f(n) ones") {
    auto t = build_table(1500);
    for (std::int64_t n = 1; n <= 1500; ++n) {
        const std::string e = t.expression(n);
        CHECK(eval_small(e) == n);
        CHECK(std::count(e.begin(), e.end(), '1') == t.f(n));
    }
    CHECK(t.expression(1) == "1");
}

TEST_CASE("resource and range errors") {
    CHECK_THROWS_AS(build_table(kTableMax + 1), Error);
    try {
        build_table(kTableMax + 1);
    } catch (const Error& e) {
        CHECK(e.code == "resource-limit");
        CHECK(static_cast<int>(e.kind) == 3);
    }
    auto t = build_table(100);
    CHECK_THROWS_AS(t.f(101), Error);
    CHECK_THROWS_AS(t.f(-1), Error);
}
