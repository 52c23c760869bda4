#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "intcomp/algspec.hpp"

namespace intcomp {

// The walk graph G(A) on residues mod a.  A state i has exactly lambda =
// Lambda(i) successors { k*(a/lambda) + (i - i mod lambda)/lambda, k <
// lambda }, each taken with probability 1/lambda.  T is row-stochastic; the
// dense form is materialized only on demand.
struct TransitionSystem {
    std::int64_t base = 0;
    std::vector<std::int64_t> factors;
    std::vector<std::vector<std::int64_t>> succ;

    std::vector<std::vector<double>> dense() const {
        const auto a = static_cast<std::size_t>(base);
        std::vector<std::vector<double>> T(a, std::vector<double>(a, 0.0));
        for (std::size_t i = 0; i < a; ++i) {
            const double p = 1.0 / static_cast<double>(factors[i]);
            for (const std::int64_t j : succ[i]) T[i][static_cast<std::size_t>(j)] = p;
        }
        return T;
    }
};

inline std::vector<std::int64_t> successors(const AlgorithmSpec& spec, std::int64_t i) {
    const std::int64_t lam = spec.factors[static_cast<std::size_t>(i)];
    const std::int64_t q = (i - i % lam) / lam;
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(lam));
    for (std::int64_t k = 0; k < lam; ++k) out.push_back(k * (spec.base / lam) + q);
    return out;
}

inline TransitionSystem build_chain(const AlgorithmSpec& spec) {
    const auto rep = validate(spec);
    if (!rep.ok)
        throw Error("invalid-spec", ErrorKind::verification,
                    "build_chain: spec fails validation");
    TransitionSystem ts;
    ts.base = spec.base;
    ts.factors = spec.factors;
    ts.succ.reserve(static_cast<std::size_t>(spec.base));
    for (std::int64_t i = 0; i < spec.base; ++i) ts.succ.push_back(successors(spec, i));
    return ts;
}

namespace detail {

// E' = { x : succ(x) intersects E }, on word-packed state sets.
inline std::vector<std::uint64_t> reach_step(const TransitionSystem& ts,
                                             const std::vector<std::uint64_t>& E) {
    std::vector<std::uint64_t> next(E.size(), 0);
    for (std::int64_t x = 0; x < ts.base; ++x) {
        for (const std::int64_t j : ts.succ[static_cast<std::size_t>(x)]) {
            if (E[static_cast<std::size_t>(j) >> 6] & (1ull << (j & 63))) {
                next[static_cast<std::size_t>(x) >> 6] |= 1ull << (x & 63);
                break;
            }
        }
    }
    return next;
}

struct WordsHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        return fnv1a64(v.data(), v.size() * sizeof(std::uint64_t));
    }
};

}  // namespace detail

struct Reachability {
    bool ok = false;
    std::int64_t m = 0;  // least m with E_n = all states for every n >= m
    std::int64_t iterations = 0;
};

// Iterates the exact-step reach sets E_0 = {1}, E_{j+1} = preimage(E_j).
// Once E_j covers every state it stays that way (every state has a
// successor), so the first full set gives the least index m.  The iteration
// is deterministic, so a repeated set proves a cycle that never reaches the
// full set: condition-failure.  A cap bounds the search regardless.
inline Reachability reachability(const TransitionSystem& ts) {
    const std::int64_t a = ts.base;
    const std::size_t words = static_cast<std::size_t>(a + 63) / 64;
    std::vector<std::uint64_t> all(words, ~0ull);
    if (a & 63) all.back() = (1ull << (a & 63)) - 1;
    std::vector<std::uint64_t> E(words, 0);
    E[1 >> 6] |= 1ull << 1;
    const std::int64_t cap = std::min<std::int64_t>(4 * a * a, 200'000);
    std::unordered_set<std::vector<std::uint64_t>, detail::WordsHash> seen;
    seen.insert(E);
    for (std::int64_t j = 1; j <= cap; ++j) {
        E = detail::reach_step(ts, E);
        if (E == all) return {true, j, j};
        if (!seen.insert(E).second) return {false, 0, j};
    }
    return {false, 0, cap};
}

struct StationaryResult {
    std::vector<double> pi;
    double residual = 0.0;
    std::int64_t iterations = 0;
};

namespace detail {

// Forward-and-backward closure of state 1.  Under the reachability
// condition this is the unique closed class (it always contains 0 and 1:
// the edge 1 -> 0 exists in every chain), and every state outside it is
// transient with stationary mass exactly zero.
inline std::vector<char> recurrent_support(const TransitionSystem& ts) {
    const auto a = static_cast<std::size_t>(ts.base);
    std::vector<char> fwd(a, 0), bwd(a, 0);
    std::vector<std::int64_t> stack{1};
    fwd[1] = 1;
    while (!stack.empty()) {
        const std::int64_t x = stack.back();
        stack.pop_back();
        for (const std::int64_t j : ts.succ[static_cast<std::size_t>(x)])
            if (!fwd[static_cast<std::size_t>(j)]) {
                fwd[static_cast<std::size_t>(j)] = 1;
                stack.push_back(j);
            }
    }
    std::vector<std::vector<std::int64_t>> pred(a);
    for (std::size_t i = 0; i < a; ++i)
        for (const std::int64_t j : ts.succ[i]) pred[static_cast<std::size_t>(j)].push_back(static_cast<std::int64_t>(i));
    stack.assign(1, 1);
    bwd[1] = 1;
    while (!stack.empty()) {
        const std::int64_t x = stack.back();
        stack.pop_back();
        for (const std::int64_t p : pred[static_cast<std::size_t>(x)])
            if (!bwd[static_cast<std::size_t>(p)]) {
                bwd[static_cast<std::size_t>(p)] = 1;
                stack.push_back(p);
            }
    }
    std::vector<char> out(a, 0);
    for (std::size_t i = 0; i < a; ++i) out[i] = fwd[i] && bwd[i];
    return out;
}

}  // namespace detail

// Power iteration for pi = pi T from the uniform vector (or a supplied
// start).  Requires the reachability condition; under it the chain has a
// unique closed aperiodic class, so the iteration converges geometrically
// and the states outside that class are snapped to exact zero afterwards.
inline StationaryResult stationary(const TransitionSystem& ts, double tolerance = 1e-12,
                                   std::int64_t max_iterations = 1'000'000,
                                   const std::vector<double>* start = nullptr) {
    const auto a = static_cast<std::size_t>(ts.base);
    std::vector<double> pi(a, 1.0 / static_cast<double>(a));
    if (start) {
        if (start->size() != a)
            throw Error("bad-input", ErrorKind::bad_input, "stationary: start size mismatch");
        pi = *start;
    }
    std::vector<double> next(a);
    double residual = 0.0;
    std::int64_t it = 0;
    for (; it < max_iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < a; ++i) {
            const double w = pi[i] / static_cast<double>(ts.factors[i]);
            if (w == 0.0) continue;
            for (const std::int64_t j : ts.succ[i]) next[static_cast<std::size_t>(j)] += w;
        }
        residual = 0.0;
        for (std::size_t i = 0; i < a; ++i) residual += std::abs(next[i] - pi[i]);
        pi.swap(next);
        if (residual <= tolerance) break;
    }
    if (residual > tolerance)
        throw Error("no-convergence", ErrorKind::verification,
                    "stationary distribution did not converge",
                    {{"residual", std::to_string(residual)},
                     {"iterations", std::to_string(it)}});
    const auto support = detail::recurrent_support(ts);
    double mass = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        if (!support[i]) pi[i] = 0.0;
        mass += pi[i];
    }
    for (auto& p : pi) p /= mass;
    // honest post-snap residual
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < a; ++i) {
        const double w = pi[i] / static_cast<double>(ts.factors[i]);
        for (const std::int64_t j : ts.succ[i]) next[static_cast<std::size_t>(j)] += w;
    }
    residual = 0.0;
    for (std::size_t i = 0; i < a; ++i) residual += std::abs(next[i] - pi[i]);
    return {std::move(pi), residual, it + 1};
}

// max over starting states x of TV(T^n(x, .), pi), for n = 1..horizon.
inline std::vector<std::pair<std::int64_t, double>> tv_convergence(
    const TransitionSystem& ts, const std::vector<double>& pi, std::int64_t horizon) {
    const auto a = static_cast<std::size_t>(ts.base);
    if (ts.base > 5000)
        throw Error("resource-limit", ErrorKind::resource,
                    "tv_convergence: dense powers need base <= 5000");
    std::vector<std::vector<double>> P(a, std::vector<double>(a, 0.0));
    for (std::size_t i = 0; i < a; ++i) P[i][i] = 1.0;
    std::vector<std::pair<std::int64_t, double>> series;
    std::vector<double> row(a);
    for (std::int64_t n = 1; n <= horizon; ++n) {
        for (std::size_t x = 0; x < a; ++x) {
            std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < a; ++i) {
                const double w = P[x][i] / static_cast<double>(ts.factors[i]);
                if (w == 0.0) continue;
                for (const std::int64_t j : ts.succ[i]) row[static_cast<std::size_t>(j)] += w;
            }
            P[x].swap(row);
        }
        double worst = 0.0;
        for (std::size_t x = 0; x < a; ++x) {
            double tv = 0.0;
            for (std::size_t j = 0; j < a; ++j) tv += std::abs(P[x][j] - pi[j]);
            worst = std::max(worst, 0.5 * tv);
        }
        series.emplace_back(n, worst);
    }
    return series;
}

struct VarianceEstimate {
    double value = 0.0;
    std::int64_t truncation = 0;
    double tail_bound = 0.0;
};

// gamma_g^2 ~= Var_pi(gb) + 2 sum_{t<=truncation} Cov_pi(gb(X_0), gb(X_t)),
// gb = g - E_pi[g], covariances from matrix powers acting on gb.  When every
// state has the same successor row the chain is i.i.d. and the covariances
// vanish identically, so the value is Var_pi(g) with no truncation error.
// Otherwise the neglected tail is bounded through the TV series:
// |Cov_t| <= 2 max|gb|^2 TV(t), summed geometrically past the truncation.
inline VarianceEstimate asymptotic_variance(const TransitionSystem& ts,
                                            const std::vector<double>& pi,
                                            const std::vector<double>& g,
                                            std::int64_t truncation,
                                            const std::vector<std::pair<std::int64_t, double>>* tv =
                                                nullptr) {
    const auto a = static_cast<std::size_t>(ts.base);
    double mean = 0.0;
    for (std::size_t i = 0; i < a; ++i) mean += pi[i] * g[i];
    std::vector<double> gb(a);
    double var = 0.0, ginf = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        gb[i] = g[i] - mean;
        var += pi[i] * gb[i] * gb[i];
        ginf = std::max(ginf, std::abs(gb[i]));
    }
    bool iid = true;
    for (std::size_t i = 1; i < a && iid; ++i)
        iid = ts.succ[i] == ts.succ[0] && ts.factors[i] == ts.factors[0];
    if (iid) return {var, 0, 0.0};

    double total = var;
    std::vector<double> v = gb, nv(a);
    for (std::int64_t t = 1; t <= truncation; ++t) {
        for (std::size_t x = 0; x < a; ++x) {
            double s = 0.0;
            for (const std::int64_t j : ts.succ[x]) s += v[static_cast<std::size_t>(j)];
            nv[x] = s / static_cast<double>(ts.factors[x]);
        }
        v.swap(nv);
        double cov = 0.0;
        for (std::size_t i = 0; i < a; ++i) cov += pi[i] * gb[i] * v[i];
        total += 2.0 * cov;
    }

    double tail = 0.0;
    std::vector<std::pair<std::int64_t, double>> local;
    if (!tv && truncation >= 1) {
        local = tv_convergence(ts, pi, truncation);
        tv = &local;
    }
    if (tv && !tv->empty() && truncation >= 1) {
        const std::size_t last = std::min<std::size_t>(tv->size(), static_cast<std::size_t>(truncation)) - 1;
        const double tv_end = (*tv)[last].second;
        double rate = 0.5;
        if (last >= 5 && (*tv)[last - 5].second > 0.0)
            rate = std::pow(tv_end / (*tv)[last - 5].second, 1.0 / 5.0);
        rate = std::min(rate, 0.999);
        tail = 4.0 * ginf * ginf * tv_end * rate / (1.0 - rate);
    }
    return {total, truncation, tail};
}

struct ChainMetrics {
    double expected_cost = 0.0;
    double expected_log_factor = 0.0;
    double constant = 0.0;
    std::int64_t reach_m = 0;
    std::map<std::int64_t, double> factor_freq;
    std::map<std::string, double> gamma_sq;
};

inline ChainMetrics metrics(const AlgorithmSpec& spec, const TransitionSystem& ts,
                            const std::vector<double>& pi, const ComplexityTable& t,
                            bool with_variance = true) {
    const auto a = static_cast<std::size_t>(spec.base);
    ChainMetrics out;
    const double l3 = std::log(3.0);
    std::vector<double> cost(a), logf(a);
    for (std::size_t i = 0; i < a; ++i) {
        cost[i] = step_cost(static_cast<std::int64_t>(i), spec.factors[i], t);
        logf[i] = std::log(static_cast<double>(spec.factors[i])) / l3;
        out.expected_cost += pi[i] * cost[i];
        out.expected_log_factor += pi[i] * logf[i];
        out.factor_freq[spec.factors[i]] += pi[i];
    }
    out.constant = out.expected_cost / out.expected_log_factor;
    const auto reach = reachability(ts);
    if (!reach.ok)
        throw Error("condition-failure", ErrorKind::verification,
                    "metrics: reachability condition does not hold");
    out.reach_m = reach.m;
    if (with_variance) {
        const std::int64_t trunc = 10 * reach.m;
        const auto tv = tv_convergence(ts, pi, trunc);
        out.gamma_sq["cost"] = asymptotic_variance(ts, pi, cost, trunc, &tv).value;
        out.gamma_sq["log_factor"] = asymptotic_variance(ts, pi, logf, trunc, &tv).value;
    }
    return out;
}

enum class MatrixOrientation { row, column, none };

// The printed matrix convention is column-stochastic (columns are sources);
// this artifact stores the row form.  Compares against both and reports
// which one matched.
inline MatrixOrientation match_orientation(const TransitionSystem& ts,
                                           const std::vector<std::vector<double>>& M,
                                           double tol = 1e-9) {
    const auto a = static_cast<std::size_t>(ts.base);
    if (M.size() != a) return MatrixOrientation::none;
    const auto T = ts.dense();
    bool row = true, col = true;
    for (std::size_t i = 0; i < a; ++i) {
        if (M[i].size() != a) return MatrixOrientation::none;
        for (std::size_t j = 0; j < a; ++j) {
            if (std::abs(M[i][j] - T[i][j]) > tol) row = false;
            if (std::abs(M[i][j] - T[j][i]) > tol) col = false;
        }
        if (!row && !col) break;
    }
    if (row) return MatrixOrientation::row;
    if (col) return MatrixOrientation::column;
    return MatrixOrientation::none;
}

}  // namespace intcomp
