#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "intcomp/util.hpp"

namespace intcomp {

using BigNat = boost::multiprecision::cpp_int;

inline BigNat parse_decimal(const std::string& text) {
    std::string digits;
    digits.reserve(text.size());
    for (const char c : text) {
        if (c >= '0' && c <= '9') {
            digits += c;
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            continue;
        } else {
            throw Error("malformed-input", ErrorKind::bad_input,
                        std::string("non-digit character '") + c + "' in decimal input");
        }
    }
    if (digits.empty())
        throw Error("malformed-input", ErrorKind::bad_input, "empty decimal input");
    return BigNat(digits);
}

inline BigNat read_decimal_file(const std::string& path) {
    return parse_decimal(read_file(path));
}

inline std::string to_decimal(const BigNat& n) { return n.str(); }

// Natural log from the top 53 bits plus the bit length; relative error is a
// few ulps, which is far finer than any tolerance used downstream.
inline double ln_big(const BigNat& n) {
    if (n <= 0)
        throw Error("bad-input", ErrorKind::bad_input, "ln of nonpositive value");
    const unsigned bits = boost::multiprecision::msb(n);
    if (bits <= 52) return std::log(n.convert_to<double>());
    const unsigned shift = bits - 52;
    const std::uint64_t hi = (n >> shift).convert_to<std::uint64_t>();
    return std::log(static_cast<double>(hi)) + shift * std::log(2.0);
}

inline double log3_big(const BigNat& n) { return ln_big(n) / std::log(3.0); }

}  // namespace intcomp
