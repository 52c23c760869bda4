#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "intcomp/bigeval.hpp"
#include "intcomp/chain.hpp"
#include "intcomp/rng.hpp"

namespace intcomp {

// E_j = set of states from which state 1 is reachable in exactly j steps.
// Once E_j covers the space it stays covering; m is the first such j.
struct ReachSets {
    std::int64_t k = 0;
    std::int64_t m = -1;  // -1: full coverage never seen up to k
    std::size_t words = 0;
    std::vector<std::vector<std::uint64_t>> E;  // E[j], j = 0..k

    bool test(std::int64_t j, std::int64_t x) const {
        return E[static_cast<std::size_t>(j)][static_cast<std::size_t>(x) >> 6] >>
                   (x & 63) &
               1;
    }
};

inline ReachSets reach_sets(const TransitionSystem& ts, std::int64_t k) {
    const std::int64_t a = ts.base;
    ReachSets rs;
    rs.k = k;
    rs.words = static_cast<std::size_t>(a + 63) / 64;
    std::vector<std::uint64_t> all(rs.words, ~0ull);
    if (a & 63) all.back() = (1ull << (a & 63)) - 1;
    std::vector<std::uint64_t> E(rs.words, 0);
    E[1 >> 6] |= 1ull << 1;
    rs.E.push_back(E);
    for (std::int64_t j = 1; j <= k; ++j) {
        E = detail::reach_step(ts, E);
        if (rs.m < 0 && E == all) rs.m = j;
        rs.E.push_back(E);
    }
    return rs;
}

// Conditioned walk step sets S_j(x) = succ(x) intersect E_j, chosen uniformly.
inline std::vector<std::int64_t> constrained_successors(const TransitionSystem& ts,
                                                        const ReachSets& rs,
                                                        std::int64_t j, std::int64_t x) {
    std::vector<std::int64_t> out;
    for (const std::int64_t y : ts.succ[static_cast<std::size_t>(x)])
        if (rs.test(j, y)) out.push_back(y);
    return out;
}

// Psi^k: uniform start, each step uniform on S_{k-i}(previous); lands on
// state 1 with probability one.  Residue sequence only; the integer
// reconstruction lives in sample_walk.
inline std::vector<std::int64_t> sample_residues(const TransitionSystem& ts,
                                                 const ReachSets& rs, std::int64_t k,
                                                 Rng& rng) {
    if (rs.m < 0 || k <= rs.m)
        throw Error("invalid-k", ErrorKind::bad_input,
                    "walk length must exceed the reachability index m = " +
                        std::to_string(rs.m));
    std::vector<std::int64_t> w;
    w.reserve(static_cast<std::size_t>(k) + 1);
    w.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(ts.base))));
    for (std::int64_t i = 1; i <= k; ++i) {
        const auto S = constrained_successors(ts, rs, k - i, w.back());
        w.push_back(S[rng.below(S.size())]);
    }
    return w;
}

struct WalkSample {
    std::int64_t k = 0;
    std::vector<std::int64_t> residues;  // Psi_0 .. Psi_k, ends at 1
    BigNat n;
    std::int64_t ones = 0;    // f_A(n), summed along the walk
    double avg_cost = 0.0;    // f_A(n) / k
    double avg_factor = 0.0;  // n^(1/k)
    std::uint64_t seed = 0;
};

inline WalkSample sample_walk(const AlgorithmSpec& spec, const TransitionSystem& ts,
                              const ReachSets& rs, const ComplexityTable& t,
                              std::int64_t k, Rng& rng, std::uint64_t seed = 0) {
    WalkSample s;
    s.k = k;
    s.seed = seed;
    s.residues = sample_residues(ts, rs, k, rng);
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t r = s.residues[static_cast<std::size_t>(i)];
        s.ones += step_cost(r, spec.factors[static_cast<std::size_t>(r)], t);
    }
    s.n = number_of_walk(spec, s.residues);
    s.avg_cost = static_cast<double>(s.ones) / static_cast<double>(k);
    s.avg_factor = std::exp(ln_big(s.n) / static_cast<double>(k));
    return s;
}

inline WalkSample sample_walk(const AlgorithmSpec& spec, const TransitionSystem& ts,
                              const ComplexityTable& t, std::int64_t k,
                              std::uint64_t seed) {
    const auto rs = reach_sets(ts, k);
    Rng rng(seed);
    return sample_walk(spec, ts, rs, t, k, rng, seed);
}

// Figure-2 style series log(x_i * lambda_bar^i) for the iterates x_i of the
// evaluation of n; both endpoints equal log n.
inline std::vector<double> brownian_series(const AlgorithmSpec& spec, const WalkSample& s) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(s.k) + 1);
    const double step = ln_big(s.n) / static_cast<double>(s.k);
    BigNat x = s.n;
    for (std::int64_t i = 0; i <= s.k; ++i) {
        out.push_back(ln_big(x) + static_cast<double>(i) * step);
        if (i < s.k) {
            const std::int64_t r = s.residues[static_cast<std::size_t>(i)];
            const std::int64_t lam = spec.factors[static_cast<std::size_t>(r)];
            x -= r % lam;
            x /= lam;
        }
    }
    return out;
}

// Monte Carlo Var[ (1/sqrt(k)) sum_{i<k} (g(Psi_i) - E_pi g) ].
inline double empirical_variance(const TransitionSystem& ts, const std::vector<double>& pi,
                                 const std::vector<double>& g, std::int64_t k,
                                 std::int64_t trials, Rng& rng) {
    const auto rs = reach_sets(ts, k);
    double mean_g = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean_g += pi[i] * g[i];
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const auto w = sample_residues(ts, rs, k, rng);
        double s = 0.0;
        for (std::int64_t i = 0; i < k; ++i)
            s += g[static_cast<std::size_t>(w[static_cast<std::size_t>(i)])] - mean_g;
        s /= std::sqrt(static_cast<double>(k));
        sum += s;
        sumsq += s * s;
    }
    const double n = static_cast<double>(trials);
    return sumsq / n - (sum / n) * (sum / n);
}

struct DensityPoint {
    std::int64_t k = 0;
    double rate = 0.0;  // fraction of samples with f_A(n) > (c + eps) log3 n
};

struct DensityResult {
    std::vector<DensityPoint> points;
    double decay_exponent = 0.0;  // slope of log rate vs log k over nonzero rates
};

// Empirical look at the measure of the bad sets B_k: how often a random
// k-step integer costs more than (c + eps) log3 n.  Trials use derived
// per-index seeds, so results are independent of --jobs.
inline DensityResult density_experiment(const AlgorithmSpec& spec, const TransitionSystem& ts,
                                        const ComplexityTable& t, double c, double eps,
                                        const std::vector<std::int64_t>& ks,
                                        std::int64_t trials, std::uint64_t seed,
                                        int jobs = 1) {
    DensityResult out;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        const std::int64_t k = ks[ki];
        const auto rs = reach_sets(ts, k);
        const int nthreads = std::max(1, jobs);
        std::vector<std::int64_t> viol(static_cast<std::size_t>(nthreads), 0);
        auto worker = [&](int tid) {
            for (std::int64_t trial = tid; trial < trials; trial += nthreads) {
                Rng rng(derive_seed(seed, ki, static_cast<std::uint64_t>(trial)));
                const auto w = sample_residues(ts, rs, k, rng);
                std::int64_t ones = 0;
                BigNat n = 1;
                for (std::size_t i = w.size() - 1; i-- > 0;) {
                    const std::int64_t r = w[i];
                    const std::int64_t lam = spec.factors[static_cast<std::size_t>(r)];
                    n = n * lam + r % lam;
                }
                for (std::int64_t i = 0; i < k; ++i) {
                    const std::int64_t r = w[static_cast<std::size_t>(i)];
                    ones += step_cost(r, spec.factors[static_cast<std::size_t>(r)], t);
                }
                if (static_cast<double>(ones) > (c + eps) * log3_big(n))
                    ++viol[static_cast<std::size_t>(tid)];
            }
        };
        if (nthreads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int tid = 0; tid < nthreads; ++tid) pool.emplace_back(worker, tid);
            for (auto& th : pool) th.join();
        }
        std::int64_t total = 0;
        for (const auto v : viol) total += v;
        out.points.push_back(
            {k, static_cast<double>(total) / static_cast<double>(trials)});
    }
    // fit log rate ~ alpha log k on the nonzero rates
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int np = 0;
    for (const auto& p : out.points) {
        if (p.rate <= 0.0) continue;
        const double x = std::log(static_cast<double>(p.k)), y = std::log(p.rate);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++np;
    }
    out.decay_exponent = np >= 2 ? (np * sxy - sx * sy) / (np * sxx - sx * sx) : 0.0;
    return out;
}

// Exact distribution of Psi_i under the constrained kernel; for i <= k - m
// the kernels coincide with T, so these equal the unconstrained marginals.
inline std::vector<std::vector<double>> conditioned_marginals(const TransitionSystem& ts,
                                                              const ReachSets& rs,
                                                              std::int64_t k) {
    const auto a = static_cast<std::size_t>(ts.base);
    std::vector<std::vector<double>> out;
    std::vector<double> mu(a, 1.0 / static_cast<double>(a));
    out.push_back(mu);
    for (std::int64_t i = 1; i <= k; ++i) {
        std::vector<double> next(a, 0.0);
        for (std::size_t x = 0; x < a; ++x) {
            if (mu[x] == 0.0) continue;
            const auto S = constrained_successors(ts, rs, k - i, static_cast<std::int64_t>(x));
            const double w = mu[x] / static_cast<double>(S.size());
            for (const std::int64_t y : S) next[static_cast<std::size_t>(y)] += w;
        }
        out.push_back(next);
        mu.swap(next);
    }
    return out;
}

inline std::vector<std::vector<double>> unconstrained_marginals(const TransitionSystem& ts,
                                                                std::int64_t k) {
    const auto a = static_cast<std::size_t>(ts.base);
    std::vector<std::vector<double>> out;
    std::vector<double> mu(a, 1.0 / static_cast<double>(a));
    out.push_back(mu);
    for (std::int64_t i = 1; i <= k; ++i) {
        std::vector<double> next(a, 0.0);
        for (std::size_t x = 0; x < a; ++x) {
            const double w = mu[x] / static_cast<double>(ts.factors[x]);
            if (w == 0.0) continue;
            for (const std::int64_t y : ts.succ[x]) next[static_cast<std::size_t>(y)] += w;
        }
        out.push_back(next);
        mu.swap(next);
    }
    return out;
}

}  // namespace intcomp
