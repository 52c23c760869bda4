#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intcomp/algspec.hpp"
#include "intcomp/bignat.hpp"

namespace intcomp {

enum class EvalMode { strict, practical };

// One run of a base-a algorithm on n: the residue sequence r_0..r_k, the
// factors and remainders of each step, and the total ones count f_A(n).
struct EvalTrace {
    std::int64_t base = 0;
    EvalMode mode = EvalMode::strict;
    std::vector<std::int64_t> residues;    // r_0 .. r_k
    std::vector<std::int64_t> factors;     // lambda_0 .. lambda_{k-1}
    std::vector<std::int64_t> remainders;  // s_0 .. s_{k-1}
    std::int64_t terminal = 1;             // n_k (strict: always 1)
    std::int64_t steps = 0;                // k
    std::int64_t ones = 0;                 // f_A(n)
};

// Iterates n_{i+1} = (n_i - s_i) / lambda_i with r_i = n_i mod a,
// lambda_i = Lambda(r_i), s_i = r_i mod lambda_i.
//
// strict stops exactly at n_k = 1 and charges sum of step costs; the
// innermost expression is lambda_{k-1} * 1 + s_{k-1}, so the terminal 1
// costs an extra one only for the empty run (n = 1).  practical stops as
// soon as n_i < a and charges the exact f(n_i) for the terminal.
inline EvalTrace run(const AlgorithmSpec& spec, const BigNat& n0, EvalMode mode,
                     const ComplexityTable& t) {
    if (n0 < 1)
        throw Error("bad-input", ErrorKind::bad_input, "run: n must be positive");
    const std::int64_t a = spec.base;
    EvalTrace tr;
    tr.base = a;
    tr.mode = mode;
    BigNat n = n0;
    while (mode == EvalMode::strict ? n != 1 : n >= a) {
        const std::int64_t r = (n % a).convert_to<std::int64_t>();
        const std::int64_t lam = spec.factors[static_cast<std::size_t>(r)];
        const std::int64_t s = r % lam;
        tr.residues.push_back(r);
        tr.factors.push_back(lam);
        tr.remainders.push_back(s);
        tr.ones += step_cost(r, lam, t);
        n -= s;
        n /= lam;
        if (n == 0)
            throw Error("dead-end", ErrorKind::verification,
                        "strict evaluation reached 0 (n_i < lambda_i)",
                        {{"step", std::to_string(tr.steps)},
                         {"residue", std::to_string(r)},
                         {"factor", std::to_string(lam)}});
        ++tr.steps;
    }
    tr.terminal = n.convert_to<std::int64_t>();
    tr.residues.push_back((n % a).convert_to<std::int64_t>());
    if (mode == EvalMode::strict) {
        if (tr.steps == 0) tr.ones = 1;  // n = 1 is the bare expression "1"
    } else {
        tr.ones += t.f(tr.terminal);
    }
    return tr;
}

inline std::int64_t ones_count(const AlgorithmSpec& spec, const BigNat& n, EvalMode mode,
                               const ComplexityTable& t) {
    return run(spec, n, mode, t).ones;
}

inline bool top_level_sum(const std::string& expr) {
    int depth = 0;
    for (const char c : expr) {
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == '+' && depth == 0) return true;
    }
    return false;
}

// Renders the trace as n = lambda_0 * ( lambda_1 * ( ... ) + s_1 ) + s_0,
// with the small constants expanded via their optimal stored expressions.
// The '1' count of the result equals trace.ones.
inline std::string emit_expression(const EvalTrace& tr, const ComplexityTable& t) {
    auto wrap = [](const std::string& e) {
        return top_level_sum(e) ? "(" + e + ")" : e;
    };
    std::string inner;  // empty until the innermost factor seeds it
    if (tr.mode == EvalMode::practical || tr.steps == 0)
        inner = t.expression(tr.terminal);
    for (std::int64_t i = tr.steps - 1; i >= 0; --i) {
        const auto iu = static_cast<std::size_t>(i);
        std::string prod = inner.empty()
                               ? t.expression(tr.factors[iu])
                               : wrap(t.expression(tr.factors[iu])) + "*" + wrap(inner);
        if (tr.remainders[iu] > 0) prod += "+" + t.expression(tr.remainders[iu]);
        inner = std::move(prod);
    }
    return inner;
}

namespace detail {

inline void expr_fail(std::size_t pos, const std::string& why) {
    throw Error("parse-error", ErrorKind::bad_input,
                why + " at position " + std::to_string(pos),
                {{"position", std::to_string(pos)}});
}

inline BigNat parse_sum(const std::string& s, std::size_t& i);

inline BigNat parse_factor(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\n')) ++i;
    if (i >= s.size()) expr_fail(i, "unexpected end of expression");
    if (s[i] == '1') {
        ++i;
        return 1;
    }
    if (s[i] == '(') {
        ++i;
        BigNat v = parse_sum(s, i);
        while (i < s.size() && (s[i] == ' ' || s[i] == '\n')) ++i;
        if (i >= s.size() || s[i] != ')') expr_fail(i, "expected ')'");
        ++i;
        return v;
    }
    expr_fail(i, std::string("expected '1' or '(', got '") + s[i] + "'");
    return 0;  // unreachable
}

inline BigNat parse_term(const std::string& s, std::size_t& i) {
    BigNat v = parse_factor(s, i);
    while (true) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\n')) ++i;
        if (i < s.size() && s[i] == '*') {
            ++i;
            v *= parse_factor(s, i);
        } else {
            return v;
        }
    }
}

inline BigNat parse_sum(const std::string& s, std::size_t& i) {
    BigNat v = parse_term(s, i);
    while (true) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\n')) ++i;
        if (i < s.size() && s[i] == '+') {
            ++i;
            v += parse_term(s, i);
        } else {
            return v;
        }
    }
}

}  // namespace detail

inline BigNat eval_expression(const std::string& expr) {
    std::size_t i = 0;
    BigNat v = detail::parse_sum(expr, i);
    while (i < expr.size() && (expr[i] == ' ' || expr[i] == '\n')) ++i;
    if (i != expr.size()) detail::expr_fail(i, "trailing input");
    return v;
}

// N(walk): Horner reconstruction of the unique integer whose residue
// sequence is the given walk.  Edge membership is checked with the successor
// characterization: y follows x exactly when y = q mod (a / lambda) with
// q = (x - x mod lambda) / lambda.
inline BigNat number_of_walk(const AlgorithmSpec& spec, const std::vector<std::int64_t>& walk) {
    const std::int64_t a = spec.base;
    if (walk.empty() || walk.back() != 1)
        throw Error("invalid-walk", ErrorKind::verification, "walk must end at residue 1");
    for (const std::int64_t r : walk)
        if (r < 0 || r >= a)
            throw Error("invalid-walk", ErrorKind::verification,
                        "residue " + std::to_string(r) + " outside [0, base)");
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        const std::int64_t lam = spec.factors[static_cast<std::size_t>(walk[i])];
        const std::int64_t q = (walk[i] - walk[i] % lam) / lam;
        if (walk[i + 1] % (a / lam) != q)
            throw Error("invalid-walk", ErrorKind::verification,
                        "pair (" + std::to_string(walk[i]) + ", " +
                            std::to_string(walk[i + 1]) + ") is not an edge",
                        {{"index", std::to_string(i)}});
    }
    BigNat acc = 1;
    for (std::size_t i = walk.size() - 1; i-- > 0;) {
        const std::int64_t lam = spec.factors[static_cast<std::size_t>(walk[i])];
        acc = acc * lam + walk[i] % lam;
    }
    return acc;
}

}  // namespace intcomp
