#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "intcomp/chain.hpp"
#include "intcomp/rng.hpp"
#include "json.hpp"

namespace intcomp {

struct AnnealConfig {
    double initial_temperature = 0.05;
    double cooling_rate = 0.999;
    std::int64_t iterations = 100000;
    std::uint64_t seed = 0;
    std::optional<AlgorithmSpec> start;  // defaults to the greedy tuple
};

struct HistoryEntry {
    std::int64_t iteration = 0;
    double constant = 0.0;  // constant of the current tuple after this step
    bool accepted = false;
};

struct AnnealState {
    std::int64_t iteration = 0;
    double temperature = 0.0;
    AlgorithmSpec current;
    AlgorithmSpec best;
    double best_constant = 0.0;
    std::string rng_state;
};

struct AnnealResult {
    AlgorithmSpec best_spec;
    double best_constant = 0.0;
    std::vector<HistoryEntry> history;
    std::int64_t rejected_invalid = 0;  // neighbors failing reachability
    AnnealState final_state;
};

// Single-coordinate move: pick an index uniformly, replace its divisor by a
// uniformly chosen different one.
inline AlgorithmSpec neighbors(const AlgorithmSpec& spec, Rng& rng) {
    const auto divs = divisors_ge2(spec.base);
    if (divs.size() <= 1)
        throw Error("no-neighbor", ErrorKind::bad_input,
                    "base " + std::to_string(spec.base) +
                        " admits a single tuple; the landscape is one point");
    AlgorithmSpec cand = spec;
    const auto i = static_cast<std::size_t>(rng.below(cand.factors.size()));
    std::size_t cur = 0;
    while (cur < divs.size() && divs[cur] != cand.factors[i]) ++cur;
    if (cur == divs.size())
        throw Error("invalid-spec", ErrorKind::bad_input,
                    "entry " + std::to_string(i) + " is not a divisor of the base");
    auto j = static_cast<std::size_t>(rng.below(divs.size() - 1));
    if (j >= cur) ++j;
    cand.factors[i] = divs[j];
    return cand;
}

// c_A when the reachability condition holds, +infinity otherwise.  Always
// solved cold from the uniform vector so the value is a pure function of the
// tuple (checkpoint resume recomputes it bit-for-bit).
inline double energy(const AlgorithmSpec& spec, const ComplexityTable& t) {
    const auto ts = build_chain(spec);
    if (!reachability(ts).ok) return std::numeric_limits<double>::infinity();
    const auto st = stationary(ts);
    const double l3 = std::log(3.0);
    double ec = 0.0, el = 0.0;
    for (std::size_t i = 0; i < st.pi.size(); ++i) {
        ec += st.pi[i] * step_cost(static_cast<std::int64_t>(i), spec.factors[i], t);
        el += st.pi[i] * std::log(static_cast<double>(spec.factors[i])) / l3;
    }
    return ec / el;
}

inline void validate_config(const AnnealConfig& cfg) {
    if (cfg.iterations < 1)
        throw Error("invalid-config", ErrorKind::bad_input, "iterations must be >= 1");
    if (!(cfg.cooling_rate > 0.0) || !(cfg.cooling_rate < 1.0))
        throw Error("invalid-config", ErrorKind::bad_input,
                    "cooling_rate must lie in (0,1)");
    if (!(cfg.initial_temperature > 0.0))
        throw Error("invalid-config", ErrorKind::bad_input,
                    "initial_temperature must be positive");
}

inline AnnealResult anneal(std::int64_t base, const AnnealConfig& cfg,
                           const ComplexityTable& t,
                           const AnnealState* resume = nullptr) {
    validate_config(cfg);
    AnnealState st;
    Rng rng(cfg.seed);
    if (resume) {
        st = *resume;
        rng.restore(st.rng_state);
        if (st.current.base != base)
            throw Error("bad-shape", ErrorKind::bad_input,
                        "checkpoint base does not match the requested base");
    } else {
        st.iteration = 0;
        st.temperature = cfg.initial_temperature;
        st.current = cfg.start ? *cfg.start : greedy(base, t);
        if (st.current.base != base)
            throw Error("bad-shape", ErrorKind::bad_input,
                        "starting tuple base does not match the requested base");
        st.best = st.current;
    }

    const double start_e = energy(st.current, t);
    if (std::isinf(start_e))
        throw Error("invalid-start", ErrorKind::bad_input,
                    "starting tuple fails the reachability condition");

    AnnealResult res;
    if (!resume) st.best_constant = start_e;
    res.best_spec = st.best;
    res.best_constant = st.best_constant;

    // single-point landscape: nothing to move, report the start
    if (divisors_ge2(base).size() <= 1) {
        st.rng_state = rng.state();
        res.final_state = st;
        return res;
    }

    double cur_e = start_e;
    for (std::int64_t it = st.iteration; it < cfg.iterations; ++it) {
        const auto cand = neighbors(st.current, rng);
        const double e = energy(cand, t);
        bool accepted = false;
        if (std::isinf(e)) {
            ++res.rejected_invalid;
        } else if (e <= cur_e ||
                   rng.unit() < std::exp(-(e - cur_e) / st.temperature)) {
            accepted = true;
            st.current = cand;
            cur_e = e;
            if (e < res.best_constant) {
                res.best_constant = e;
                res.best_spec = cand;
            }
        }
        res.history.push_back({it, cur_e, accepted});
        st.temperature *= cfg.cooling_rate;
        st.iteration = it + 1;
    }

    st.best = res.best_spec;
    st.best_constant = res.best_constant;
    st.rng_state = rng.state();
    res.final_state = st;
    return res;
}

inline nlohmann::json checkpoint_json(const AnnealState& st) {
    return nlohmann::json{{"iteration", st.iteration},
                          {"temperature", st.temperature},
                          {"current_spec", {{"base", st.current.base},
                                            {"factors", st.current.factors}}},
                          {"best_spec", {{"base", st.best.base},
                                         {"factors", st.best.factors}}},
                          {"best_constant", st.best_constant},
                          {"rng_state", st.rng_state}};
}

inline AnnealState checkpoint_from_json(const nlohmann::json& j) {
    try {
        AnnealState st;
        st.iteration = j.at("iteration").get<std::int64_t>();
        st.temperature = j.at("temperature").get<double>();
        st.current.base = j.at("current_spec").at("base").get<std::int64_t>();
        st.current.factors =
            j.at("current_spec").at("factors").get<std::vector<std::int64_t>>();
        st.best.base = j.at("best_spec").at("base").get<std::int64_t>();
        st.best.factors =
            j.at("best_spec").at("factors").get<std::vector<std::int64_t>>();
        st.best_constant = j.at("best_constant").get<double>();
        st.rng_state = j.at("rng_state").get<std::string>();
        return st;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed-input", ErrorKind::bad_input,
                    std::string("checkpoint: ") + e.what());
    }
}

inline void save_checkpoint(const std::string& path, const AnnealState& st) {
    std::ofstream out(path);
    if (!out)
        throw Error("file-not-found", ErrorKind::bad_input, "cannot write " + path);
    out << checkpoint_json(st).dump(1) << "\n";
}

inline AnnealState load_checkpoint(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed-input", ErrorKind::bad_input,
                    std::string("checkpoint: ") + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace intcomp
