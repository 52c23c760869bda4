#include <cmath>
#include <set>

#include "catch2/catch_amalgamated.hpp"
#include "intcomp/walks.hpp"

using namespace intcomp;

namespace {

AlgorithmSpec greedy6() { return {6, {3, 3, 2, 3, 2, 2}}; }

// Exact-step reachability redone from the edge-membership relation
// y mod (a/lambda) == (x - x mod lambda)/lambda, with no shared code paths.
std::vector<std::vector<char>> reach_oracle(const AlgorithmSpec& s, std::int64_t kmax) {
    const std::int64_t a = s.base;
    std::vector<std::vector<char>> E;
    std::vector<char> cur(static_cast<std::size_t>(a), 0);
    cur[1] = 1;
    E.push_back(cur);
    for (std::int64_t j = 1; j <= kmax; ++j) {
        std::vector<char> nxt(static_cast<std::size_t>(a), 0);
        for (std::int64_t x = 0; x < a; ++x) {
            const std::int64_t lam = s.factors[static_cast<std::size_t>(x)];
            const std::int64_t q = (x - x % lam) / lam;
            for (std::int64_t y = 0; y < a; ++y)
                if (y % (a / lam) == q && cur[static_cast<std::size_t>(y)]) {
                    nxt[static_cast<std::size_t>(x)] = 1;
                    break;
                }
        }
        E.push_back(nxt);
        cur = nxt;
    }
    return E;
}

std::int64_t popcount_set(const ReachSets& rs, std::int64_t j) {
    std::int64_t c = 0;
    for (const auto w : rs.E[static_cast<std::size_t>(j)]) c += __builtin_popcountll(w);
    return c;
}

}  // namespace

TEST_CASE("reach sets match an independent recursion") {
    const auto g30 =
        load_spec_file(std::string(FIXTURES_DIR) + "/greedy30.txt");
    for (const auto& spec : {greedy6(), g30}) {
        const auto ts = build_chain(spec);
        const auto rs = reach_sets(ts, 12);
        const auto oracle = reach_oracle(spec, 12);
        for (std::int64_t j = 0; j <= 12; ++j)
            for (std::int64_t x = 0; x < spec.base; ++x)
                REQUIRE(rs.test(j, x) == (oracle[static_cast<std::size_t>(j)]
                                                [static_cast<std::size_t>(x)] != 0));
    }
}

TEST_CASE("reach sets report the least full index and stay full") {
    const auto t = build_table(100);
    const auto ts6 = build_chain(greedy6());
    const auto rs6 = reach_sets(ts6, 10);
    REQUIRE(rs6.m == 3);
    REQUIRE(rs6.m == reachability(ts6).m);

    const auto t30 = build_table(100);
    const auto g30 = greedy(30, t30);
    const auto ts30 = build_chain(g30);
    const auto rs30 = reach_sets(ts30, 12);
    REQUIRE(rs30.m == 6);
    REQUIRE(popcount_set(rs30, 5) == 29);
    for (std::int64_t j = rs30.m; j <= 12; ++j) REQUIRE(popcount_set(rs30, j) == 30);
    (void)t;
}

TEST_CASE("walk length must exceed the reachability index") {
    const auto ts = build_chain(greedy6());
    const auto rs = reach_sets(ts, 3);
    Rng rng(1);
    REQUIRE_THROWS_MATCHES(sample_residues(ts, rs, 3, rng), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.code == "invalid-k"; }));
    const auto rs4 = reach_sets(ts, 4);
    const auto w = sample_residues(ts, rs4, 4, rng);
    REQUIRE(w.size() == 5);
    REQUIRE(w.back() == 1);
}

TEST_CASE("sampled walks are valid traces of their reconstructed integer") {
    const auto t = build_table(4096);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const auto rs = reach_sets(ts, 64);
    Rng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = sample_walk(spec, ts, rs, t, 64, rng, 20240817);
        REQUIRE(s.k == 64);
        REQUIRE(s.residues.size() == 65);
        REQUIRE(s.residues.back() == 1);
        REQUIRE(s.seed == 20240817);
        for (const auto r : s.residues) {
            REQUIRE(r >= 0);
            REQUIRE(r < 6);
        }
        // the walk is exactly the strict evaluation trace of n
        const auto tr = run(spec, s.n, EvalMode::strict, t);
        REQUIRE(tr.residues == s.residues);
        REQUIRE(tr.ones == s.ones);
        REQUIRE(s.avg_cost == static_cast<double>(s.ones) / 64.0);
        REQUIRE(s.avg_factor ==
                Catch::Approx(std::exp(ln_big(s.n) / 64.0)).epsilon(1e-12));
        // product bounds: prod(lambda) <= n < a * prod(lambda)
        BigNat prod = 1;
        for (const auto f : tr.factors) prod *= f;
        REQUIRE(s.n >= prod);
        REQUIRE(s.n < prod * 6);
    }
}

TEST_CASE("walk sampling is reproducible from its seed") {
    const auto t = build_table(4096);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const auto a = sample_walk(spec, ts, t, 32, 99);
    const auto b = sample_walk(spec, ts, t, 32, 99);
    const auto c = sample_walk(spec, ts, t, 32, 100);
    REQUIRE(a.residues == b.residues);
    REQUIRE(a.n == b.n);
    REQUIRE(a.residues != c.residues);
}

TEST_CASE("brownian bridge series returns to log n at both ends") {
    const auto t = build_table(4096);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const auto s = sample_walk(spec, ts, t, 256, 7);
    const auto series = brownian_series(spec, s);
    REQUIRE(series.size() == 257);
    const double logn = ln_big(s.n);
    REQUIRE(std::fabs(series.front() - logn) <= 1e-9 * logn);
    REQUIRE(std::fabs(series.back() - logn) <= 1e-9 * logn);
    // interior stays positive and bounded by a crude envelope
    for (const auto v : series) {
        REQUIRE(v > 0.0);
        REQUIRE(v < 2.0 * logn);
    }
}

TEST_CASE("conditioned marginals match unconstrained ones until the horizon binds") {
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const std::int64_t k = 20;
    const auto rs = reach_sets(ts, k);
    REQUIRE(rs.m == 3);
    const auto mu = conditioned_marginals(ts, rs, k);
    const auto nu = unconstrained_marginals(ts, k);
    REQUIRE(mu.size() == 21);
    REQUIRE(nu.size() == 21);
    double max_free = 0.0;
    for (std::int64_t i = 0; i <= k - rs.m; ++i)
        for (std::size_t x = 0; x < 6; ++x)
            max_free = std::max(max_free,
                                std::fabs(mu[static_cast<std::size_t>(i)][x] -
                                          nu[static_cast<std::size_t>(i)][x]));
    REQUIRE(max_free <= 1e-12);
    // first constrained index departs visibly
    double diff18 = 0.0;
    for (std::size_t x = 0; x < 6; ++x)
        diff18 = std::max(diff18, std::fabs(mu[18][x] - nu[18][x]));
    REQUIRE(diff18 > 0.01);
    // each marginal is a distribution; the last one is the point mass at 1
    for (const auto& m : mu) {
        double sum = 0.0;
        for (const auto p : m) sum += p;
        REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(mu[20][1] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical variance of an iid chain matches the exact variance") {
    const auto t = build_table(100);
    const AlgorithmSpec spec{2, {2, 2}};
    const auto ts = build_chain(spec);
    const auto st = stationary(ts);
    std::vector<double> g{static_cast<double>(step_cost(0, 2, t)),
                          static_cast<double>(step_cost(1, 2, t))};
    Rng rng(5);
    const double v = empirical_variance(ts, st.pi, g, 1024, 4000, rng);
    REQUIRE(v == Catch::Approx(0.25).epsilon(0.1));
    // a constant observable has no fluctuation at all
    std::vector<double> c{2.0, 2.0};
    Rng rng2(6);
    REQUIRE(empirical_variance(ts, st.pi, c, 256, 200, rng2) == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("empirical variance agrees with the asymptotic variance estimate") {
    const auto t = build_table(100);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const auto st = stationary(ts);
    std::vector<double> cost(6);
    for (std::int64_t r = 0; r < 6; ++r)
        cost[static_cast<std::size_t>(r)] = static_cast<double>(
            step_cost(r, spec.factors[static_cast<std::size_t>(r)], t));
    Rng rng(321);
    const double emp = empirical_variance(ts, st.pi, cost, 2048, 4000, rng);
    REQUIRE(emp == Catch::Approx(0.307692308).epsilon(0.1));
}

TEST_CASE("cost rate of long walks concentrates at the chain constant") {
    const auto t = build_table(4096);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const std::int64_t k = 4096;
    const auto rs = reach_sets(ts, k);
    Rng rng(424242);
    double sum_ratio = 0.0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const auto s = sample_walk(spec, ts, rs, t, k, rng, 424242);
        sum_ratio += static_cast<double>(s.ones) / log3_big(s.n);
    }
    REQUIRE(sum_ratio / trials == Catch::Approx(3.652263).margin(0.02));
}

TEST_CASE("density of expensive walks decays with the length") {
    const auto t = build_table(4096);
    const auto spec = greedy6();
    const auto ts = build_chain(spec);
    const auto res = density_experiment(spec, ts, t, 3.652263, 0.1, {64, 128, 256, 512},
                                        2000, 2026, 1);
    REQUIRE(res.points.size() == 4);
    REQUIRE(res.points[0].rate > res.points[1].rate);
    REQUIRE(res.points[1].rate > res.points[2].rate);
    REQUIRE(res.points[2].rate >= res.points[3].rate);
    REQUIRE(res.points[0].rate > 0.03);
    REQUIRE(res.points[0].rate < 0.25);
    REQUIRE(res.points[3].rate <= 0.01);
    REQUIRE(res.decay_exponent < -1.0);
    // thread count must not change the outcome
    const auto res4 = density_experiment(spec, ts, t, 3.652263, 0.1, {64, 128, 256, 512},
                                         2000, 2026, 4);
    for (std::size_t i = 0; i < 4; ++i)
        REQUIRE(res.points[i].rate == res4.points[i].rate);
    REQUIRE(res.decay_exponent == res4.decay_exponent);
}
