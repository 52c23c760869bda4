#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "intcomp/util.hpp"

namespace intcomp {

// All randomness flows through mt19937_64.  The engine itself is fully
// specified by the standard, but uniform_int_distribution is not, so bounded
// draws and unit doubles are derived by hand to keep seeded runs
// byte-reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Unbiased draw from [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("empty-range", ErrorKind::bad_input, "draw from empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::string state() const {
        std::ostringstream ss;
        ss << eng_;
        return ss.str();
    }

    void restore(const std::string& s) {
        std::istringstream ss(s);
        ss >> eng_;
        if (ss.fail())
            throw Error("bad-rng-state", ErrorKind::bad_input, "unparsable RNG state");
    }

  private:
    std::mt19937_64 eng_;
};

// Stateless mixer for deriving independent per-trial seeds from a base seed;
// keeps parallel trial schedules identical to sequential ones.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(base ^ splitmix64(a)) ^ b);
}

}  // namespace intcomp
