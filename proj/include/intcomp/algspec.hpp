#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "intcomp/exactdp.hpp"
#include "intcomp/util.hpp"

namespace intcomp {

// A base-a algorithm is a map from residues mod a to dividing factors of a.
// One step on n with residue r = n mod a divides out lambda = factors[r]
// after subtracting s = r mod lambda.
struct AlgorithmSpec {
    std::int64_t base = 0;
    std::vector<std::int64_t> factors;

    bool operator==(const AlgorithmSpec&) const = default;
};

struct ValidationIssue {
    std::int64_t index;
    std::int64_t value;
    std::string reason;  // non-divisor | below-2 | above-base
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
};

inline ValidationReport validate(const AlgorithmSpec& spec) {
    ValidationReport rep;
    if (spec.base < 2 || spec.factors.size() != static_cast<std::size_t>(spec.base)) {
        rep.ok = false;
        rep.issues.push_back({-1, spec.base, "bad-shape"});
        return rep;
    }
    for (std::int64_t i = 0; i < spec.base; ++i) {
        const std::int64_t v = spec.factors[static_cast<std::size_t>(i)];
        if (v < 2)
            rep.issues.push_back({i, v, "below-2"});
        else if (v > spec.base)
            rep.issues.push_back({i, v, "above-base"});
        else if (spec.base % v != 0)
            rep.issues.push_back({i, v, "non-divisor"});
    }
    rep.ok = rep.issues.empty();
    return rep;
}

inline int step_cost(std::int64_t residue, std::int64_t divisor, const ComplexityTable& t) {
    if (divisor < 2)
        throw Error("bad-input", ErrorKind::bad_input, "step_cost: divisor < 2");
    return t.f(divisor) + t.f(residue % divisor);
}

struct InefficiencyRow {
    std::int64_t residue;
    std::int64_t divisor;
    int cost;
    double inefficiency;
};

inline InefficiencyRow inefficiency(std::int64_t residue, std::int64_t divisor,
                                    const ComplexityTable& t) {
    const int c = step_cost(residue, divisor, t);
    const double ineff = c - 3.0 * std::log(static_cast<double>(divisor)) / std::log(3.0);
    return {residue, divisor, c, ineff};
}

// Sign of (m1 - 3 log3 d1) - (m2 - 3 log3 d2), decided exactly:
// the difference is positive iff 3^m1 * d2^3 > 3^m2 * d1^3.  For |m1 - m2|
// >= 40 the power term dominates any divisor ratio below the table maximum,
// so the comparison short-circuits and the 128-bit products cannot overflow.
inline int inefficiency_cmp(int m1, std::int64_t d1, int m2, std::int64_t d2) {
    const int dm = m1 - m2;
    if (dm >= 40) return 1;
    if (dm <= -40) return -1;
    const __int128 lhs = (dm > 0 ? pow3_128(dm) : 1) * static_cast<__int128>(d2) * d2 * d2;
    const __int128 rhs = (dm < 0 ? pow3_128(-dm) : 1) * static_cast<__int128>(d1) * d1 * d1;
    return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

inline std::vector<std::int64_t> divisors_ge2(std::int64_t a) {
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d <= a; ++d)
        if (a % d == 0) out.push_back(d);
    return out;
}

// Per residue, pick the divisor of the base with the least inefficiency;
// exact ties go to the larger divisor (fewer steps per magnitude drop).
inline AlgorithmSpec greedy(std::int64_t base, const ComplexityTable& t) {
    if (base < 2) throw Error("bad-input", ErrorKind::bad_input, "greedy: base < 2");
    t.f(base);  // coverage check
    const auto divs = divisors_ge2(base);
    AlgorithmSpec spec{base, {}};
    spec.factors.reserve(static_cast<std::size_t>(base));
    for (std::int64_t i = 0; i < base; ++i) {
        std::int64_t best_d = divs.front();
        int best_m = step_cost(i, best_d, t);
        for (std::size_t j = 1; j < divs.size(); ++j) {
            const std::int64_t d = divs[j];
            const int m = step_cost(i, d, t);
            // ascending divisors: "<= 0" makes the larger divisor win ties
            if (inefficiency_cmp(m, d, best_m, best_d) <= 0) {
                best_d = d;
                best_m = m;
            }
        }
        spec.factors.push_back(best_d);
    }
    return spec;
}

// Text form: comma/whitespace separated integers, parentheses optional,
// '#' starts a comment line.  Base = number of entries.
inline AlgorithmSpec parse_text(const std::string& text) {
    std::vector<std::int64_t> vals;
    std::int64_t line = 1, col = 0;
    std::int64_t cur = -1;
    auto flush = [&] {
        if (cur >= 0) vals.push_back(cur);
        cur = -1;
    };
    bool comment = false;
    for (const char ch : text) {
        ++col;
        if (ch == '\n') {
            comment = false;
            flush();
            ++line;
            col = 0;
            continue;
        }
        if (comment) continue;
        if (ch == '#') {
            comment = true;
            flush();
            continue;
        }
        if (ch >= '0' && ch <= '9') {
            cur = (cur < 0 ? 0 : cur * 10) + (ch - '0');
            if (cur > kTableMax)
                throw Error("malformed-input", ErrorKind::bad_input,
                            "tuple entry out of range at line " + std::to_string(line),
                            {{"line", std::to_string(line)}, {"column", std::to_string(col)}});
            continue;
        }
        if (ch == ',' || ch == '(' || ch == ')' || ch == ' ' || ch == '\t' || ch == '\r') {
            flush();
            continue;
        }
        throw Error("malformed-input", ErrorKind::bad_input,
                    std::string("unexpected character '") + ch + "' at line " +
                        std::to_string(line) + ", column " + std::to_string(col),
                    {{"line", std::to_string(line)}, {"column", std::to_string(col)}});
    }
    flush();
    if (vals.empty())
        throw Error("malformed-input", ErrorKind::bad_input, "empty tuple");
    return {static_cast<std::int64_t>(vals.size()), vals};
}

inline std::string serialize_text(const AlgorithmSpec& spec) {
    std::string out = "(";
    for (std::size_t i = 0; i < spec.factors.size(); ++i) {
        if (i) out += i % 30 == 0 ? ",\n" : ", ";
        out += std::to_string(spec.factors[i]);
    }
    out += ")";
    return out;
}

inline AlgorithmSpec parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed-input", ErrorKind::bad_input, e.what());
    }
    if (!j.is_object() || !j.contains("base") || !j.contains("factors"))
        throw Error("malformed-input", ErrorKind::bad_input,
                    "expected {\"base\": ..., \"factors\": [...]}");
    AlgorithmSpec spec;
    spec.base = j["base"].get<std::int64_t>();
    spec.factors = j["factors"].get<std::vector<std::int64_t>>();
    if (spec.base != static_cast<std::int64_t>(spec.factors.size()))
        throw Error("malformed-input", ErrorKind::bad_input,
                    "base does not match factors length");
    return spec;
}

inline std::string serialize_json(const AlgorithmSpec& spec) {
    nlohmann::json j;
    j["base"] = spec.base;
    j["factors"] = spec.factors;
    return j.dump();
}

// Sniffs JSON objects by their leading brace; everything else is text form.
inline AlgorithmSpec parse_any(const std::string& text) {
    for (const char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        return c == '{' ? parse_json(text) : parse_text(text);
    }
    throw Error("malformed-input", ErrorKind::bad_input, "empty tuple");
}

inline AlgorithmSpec load_spec_file(const std::string& path) {
    return parse_any(read_file(path));
}

}  // namespace intcomp
