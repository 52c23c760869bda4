#include <cmath>
#include <cstdio>
#include <set>

#include "catch2/catch_amalgamated.hpp"
#include "intcomp/anneal.hpp"

using namespace intcomp;

namespace {

auto has_code(const std::string& code) {
    return Catch::Matchers::Predicate<Error>(
        [code](const Error& e) { return e.code == code; },
        "error code == " + code);
}

AlgorithmSpec greedy6() { return {6, {3, 3, 2, 3, 2, 2}}; }

std::string fixture(const char* name) {
    return std::string(FIXTURES_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("config validation rejects degenerate schedules") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 0;
    REQUIRE_THROWS_MATCHES(anneal(2, cfg, t), Error, has_code("invalid-config"));
    cfg = {};
    cfg.cooling_rate = 1.0;
    REQUIRE_THROWS_MATCHES(anneal(2, cfg, t), Error, has_code("invalid-config"));
    cfg = {};
    cfg.cooling_rate = 0.0;
    REQUIRE_THROWS_MATCHES(anneal(2, cfg, t), Error, has_code("invalid-config"));
    cfg = {};
    cfg.initial_temperature = 0.0;
    REQUIRE_THROWS_MATCHES(anneal(2, cfg, t), Error, has_code("invalid-config"));
}

TEST_CASE("neighbors change exactly one coordinate to another divisor") {
    Rng rng(11);
    const auto base = greedy6();
    std::set<std::size_t> indices_seen;
    for (int trial = 0; trial < 500; ++trial) {
        const auto cand = neighbors(base, rng);
        int diffs = 0;
        std::size_t where = 0;
        for (std::size_t i = 0; i < 6; ++i)
            if (cand.factors[i] != base.factors[i]) {
                ++diffs;
                where = i;
            }
        REQUIRE(diffs == 1);
        indices_seen.insert(where);
        const auto v = cand.factors[where];
        REQUIRE((v == 2 || v == 3 || v == 6));
        REQUIRE(v != base.factors[where]);
    }
    REQUIRE(indices_seen.size() == 6);
}

TEST_CASE("prime bases admit no neighbor moves") {
    Rng rng(3);
    REQUIRE_THROWS_MATCHES(neighbors({2, {2, 2}}, rng), Error, has_code("no-neighbor"));
    REQUIRE_THROWS_MATCHES(neighbors({3, {3, 3, 3}}, rng), Error,
                           has_code("no-neighbor"));
}

TEST_CASE("neighbor entries for base 2310 come from its divisor list") {
    REQUIRE(divisors_ge2(2310).size() == 31);
    const auto spec = load_spec_file(fixture("greedy2310.txt"));
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cand = neighbors(spec, rng);
        for (std::size_t i = 0; i < spec.factors.size(); ++i)
            if (cand.factors[i] != spec.factors[i]) {
                REQUIRE(cand.factors[i] >= 2);
                REQUIRE(2310 % cand.factors[i] == 0);
            }
    }
}

TEST_CASE("energy reproduces the published constants and their ordering") {
    const auto t = build_table(4096);
    const double e2 = energy({2, {2, 2}}, t);
    const double e6 = energy(greedy6(), t);
    const double eg = energy(load_spec_file(fixture("greedy2310.txt")), t);
    const double ei = energy(load_spec_file(fixture("improved2310.txt")), t);
    REQUIRE(e2 == Catch::Approx(3.962406).margin(1e-6));
    REQUIRE(e6 == Catch::Approx(3.652263).margin(1e-6));
    REQUIRE(eg == Catch::Approx(3.560556).margin(1e-6));
    REQUIRE(ei == Catch::Approx(3.519668).margin(1e-6));
    REQUIRE(ei < eg);
    REQUIRE(eg < e6);
    REQUIRE(std::isinf(energy({6, {3, 2, 3, 3, 2, 2}}, t)));
}

TEST_CASE("single-point landscape returns its only tuple") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 100;
    cfg.seed = 7;
    const auto res = anneal(2, cfg, t);
    REQUIRE(res.best_spec == AlgorithmSpec{2, {2, 2}});
    REQUIRE(res.best_constant == Catch::Approx(3.962406).margin(1e-6));
    REQUIRE(res.history.empty());
    REQUIRE(res.rejected_invalid == 0);
}

TEST_CASE("base-6 annealing never ends worse than the greedy start") {
    const auto t = build_table(100);
    const double start_e = energy(greedy6(), t);
    AnnealConfig cfg;
    cfg.iterations = 10000;
    cfg.seed = 20240824;
    const auto res = anneal(6, cfg, t);
    REQUIRE(res.history.size() == 10000);
    REQUIRE(res.best_constant <= start_e);
    REQUIRE(res.best_constant >= 3.0);
    // the greedy tuple is the base-6 landscape minimum
    REQUIRE(res.best_constant == Catch::Approx(start_e).margin(1e-9));
    // best-so-far is non-increasing along the accepted trajectory
    double best = start_e;
    for (const auto& h : res.history) {
        if (h.accepted) {
            REQUIRE(h.constant >= 3.0);
            best = std::min(best, h.constant);
        }
    }
    REQUIRE(best == Catch::Approx(res.best_constant).margin(1e-12));
    // final state is a valid, reachable tuple
    REQUIRE(validate(res.final_state.current).ok);
    REQUIRE(reachability(build_chain(res.final_state.current)).ok);
}

TEST_CASE("annealing runs are reproducible from their seed") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 300;
    cfg.seed = 5150;
    const auto a = anneal(6, cfg, t);
    const auto b = anneal(6, cfg, t);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        REQUIRE(a.history[i].constant == b.history[i].constant);
        REQUIRE(a.history[i].accepted == b.history[i].accepted);
    }
    REQUIRE(a.best_spec == b.best_spec);
    REQUIRE(a.best_constant == b.best_constant);
}

TEST_CASE("checkpoint resume continues the exact trajectory") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 10;
    cfg.seed = 99;
    const auto first = anneal(30, cfg, t);
    REQUIRE(first.final_state.iteration == 10);

    AnnealConfig cfg20 = cfg;
    cfg20.iterations = 20;
    const auto resumed = anneal(30, cfg20, t, &first.final_state);
    const auto straight = anneal(30, cfg20, t);

    REQUIRE(resumed.best_spec == straight.best_spec);
    REQUIRE(resumed.best_constant == straight.best_constant);
    REQUIRE(first.history.size() + resumed.history.size() == straight.history.size());
    for (std::size_t i = 0; i < straight.history.size(); ++i) {
        const auto& h = i < 10 ? first.history[i] : resumed.history[i - 10];
        REQUIRE(h.iteration == straight.history[i].iteration);
        REQUIRE(h.constant == straight.history[i].constant);
        REQUIRE(h.accepted == straight.history[i].accepted);
    }
    REQUIRE(first.rejected_invalid + resumed.rejected_invalid ==
            straight.rejected_invalid);
    REQUIRE(resumed.final_state.rng_state == straight.final_state.rng_state);
    REQUIRE(resumed.final_state.temperature == straight.final_state.temperature);
}

TEST_CASE("checkpoint files round-trip byte-for-byte state") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 25;
    cfg.seed = 4242;
    const auto run = anneal(30, cfg, t);
    const std::string path = "/tmp/intcomp_anneal_ckpt.json";
    save_checkpoint(path, run.final_state);
    const auto loaded = load_checkpoint(path);
    REQUIRE(loaded.iteration == run.final_state.iteration);
    REQUIRE(loaded.temperature == run.final_state.temperature);
    REQUIRE(loaded.current == run.final_state.current);
    REQUIRE(loaded.best == run.final_state.best);
    REQUIRE(loaded.best_constant == run.final_state.best_constant);
    REQUIRE(loaded.rng_state == run.final_state.rng_state);

    AnnealConfig cfg35 = cfg;
    cfg35.iterations = 35;
    const auto via_file = anneal(30, cfg35, t, &loaded);
    const auto via_memory = anneal(30, cfg35, t, &run.final_state);
    REQUIRE(via_file.best_spec == via_memory.best_spec);
    REQUIRE(via_file.best_constant == via_memory.best_constant);
    REQUIRE(via_file.final_state.rng_state == via_memory.final_state.rng_state);
    std::remove(path.c_str());

    REQUIRE_THROWS_MATCHES(load_checkpoint("/tmp/intcomp_no_such_ckpt.json"), Error,
                           has_code("file-not-found"));
}

TEST_CASE("start tuple must match the base and reach the terminal") {
    const auto t = build_table(100);
    AnnealConfig cfg;
    cfg.iterations = 10;
    cfg.start = AlgorithmSpec{6, {3, 2, 3, 3, 2, 2}};
    REQUIRE_THROWS_MATCHES(anneal(6, cfg, t), Error, has_code("invalid-start"));
    cfg.start = greedy6();
    REQUIRE_THROWS_MATCHES(anneal(30, cfg, t), Error, has_code("bad-shape"));
}