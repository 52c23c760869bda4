#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "intcomp/util.hpp"

namespace intcomp {

// Exact integer complexity f(n): the least number of 1's expressing n with
// +, * and parentheses.  Guy's recursion:
//
//   f(n) = min(  min_{d | n, 2 <= d <= sqrt(n)}  f(d) + f(n/d),
//                min_{1 <= e <= n/2}             f(e) + f(n-e)  ),   f(1) = 1.
//
// The additive branch is searched in full up to full_sum_limit and capped at
// e <= e_cap beyond it.  The cap is configuration, not a theorem; a
// cross-check against the full search below full_sum_limit guards it
// empirically (see tests).

inline constexpr std::int64_t kTableMax = 2'000'000;

struct ComplexityTable {
    std::int64_t limit = 0;
    std::int64_t full_sum_limit = 0;
    std::int64_t e_cap = 0;
    std::vector<std::uint16_t> values;  // values[n] = f(n), index 0 unused
    std::vector<std::int32_t> split;    // d > 0: n = d*(n/d); -e: n = e+(n-e); 0: leaf

    int f(std::int64_t n) const {
        if (n == 0) return 0;  // empty remainder contributes no ones
        if (n < 0 || n > limit)
            throw Error("table-too-small", ErrorKind::bad_input,
                        "f(" + std::to_string(n) + ") exceeds table limit " +
                            std::to_string(limit));
        return values[static_cast<std::size_t>(n)];
    }

    // Optimal expression for n, fully parenthesized, with exactly f(n) ones.
    std::string expression(std::int64_t n) const {
        bool is_sum = false;
        return render(n, is_sum);
    }

  private:
    std::string render(std::int64_t n, bool& is_sum) const {
        f(n);  // bounds check
        const std::int32_t s = split[static_cast<std::size_t>(n)];
        if (s == 0) {
            is_sum = false;
            return "1";
        }
        if (s > 0) {
            bool ls = false, rs = false;
            std::string l = render(s, ls);
            std::string r = render(n / s, rs);
            is_sum = false;
            return (ls ? "(" + l + ")" : l) + "*" + (rs ? "(" + r + ")" : r);
        }
        bool ls = false, rs = false;
        std::string l = render(-s, ls);
        std::string r = render(n + s, rs);
        is_sum = true;
        return l + "+" + r;
    }
};

inline ComplexityTable build_table(std::int64_t limit, std::int64_t full_sum_limit = 10'000,
                                   std::int64_t e_cap = 4096) {
    if (limit < 1 || full_sum_limit < 0 || e_cap < 1)
        throw Error("bad-input", ErrorKind::bad_input, "build_table: bad parameters");
    if (limit > kTableMax)
        throw Error("resource-limit", ErrorKind::resource,
                    "table limit " + std::to_string(limit) + " exceeds maximum " +
                        std::to_string(kTableMax));
    ComplexityTable t;
    t.limit = limit;
    t.full_sum_limit = full_sum_limit;
    t.e_cap = e_cap;
    t.values.assign(static_cast<std::size_t>(limit) + 1, 0);
    t.split.assign(static_cast<std::size_t>(limit) + 1, 0);
    if (limit >= 1) t.values[1] = 1;
    for (std::int64_t n = 2; n <= limit; ++n) {
        // e = 1 seed, then divisor splits, then the remaining additive splits.
        int best = t.values[n - 1] + 1;
        std::int32_t how = -1;
        for (std::int64_t d = 2; d * d <= n; ++d) {
            if (n % d) continue;
            const int c = t.values[d] + t.values[n / d];
            if (c < best) {
                best = c;
                how = static_cast<std::int32_t>(d);
            }
        }
        const std::int64_t cap = n <= full_sum_limit ? n / 2 : std::min(n / 2, e_cap);
        for (std::int64_t e = 2; e <= cap; ++e) {
            const int c = t.values[e] + t.values[n - e];
            if (c < best) {
                best = c;
                how = static_cast<std::int32_t>(-e);
            }
        }
        t.values[n] = static_cast<std::uint16_t>(best);
        t.split[n] = how;
    }
    return t;
}

inline __int128 pow3_128(int e) {
    __int128 v = 1;
    for (int i = 0; i < e; ++i) v *= 3;
    return v;
}

struct SelfridgeReport {
    std::vector<std::int64_t> violations;    // n with f(n) < 3 log3 n; must stay empty
    std::vector<std::int64_t> equality_set;  // n with f(n) = 3 log3 n exactly
};

// f(n) >= 3 log3 n  <=>  3^f(n) >= n^3, checked in exact integer arithmetic.
// Equality forces n to be a power of 3 with f = 3 log3 n.
inline SelfridgeReport verify_selfridge(const ComplexityTable& t) {
    SelfridgeReport rep;
    for (std::int64_t n = 1; n <= t.limit; ++n) {
        const int fn = t.values[static_cast<std::size_t>(n)];
        const __int128 cube = static_cast<__int128>(n) * n * n;
        // 3^41 > (2e6)^3 already, so large f can never violate.
        if (fn <= 40) {
            const __int128 p = pow3_128(fn);
            if (p < cube) {
                rep.violations.push_back(n);
                continue;
            }
            if (p == cube) rep.equality_set.push_back(n);
        }
    }
    return rep;
}

inline double ratio(std::int64_t n, const ComplexityTable& t) {
    if (n < 2 || n > t.limit)
        throw Error("out-of-range", ErrorKind::bad_input,
                    "ratio: n = " + std::to_string(n) + " outside [2, limit]");
    return t.f(n) / (std::log(static_cast<double>(n)) / std::log(3.0));
}

}  // namespace intcomp
