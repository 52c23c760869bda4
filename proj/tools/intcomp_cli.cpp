// Command-line surface over the whole library.  Every randomized command
// takes an explicit --seed; identical flags and seeds produce byte-identical
// output.  Errors leave as machine-readable JSON on stderr with the exit
// code encoding the failure class (1 verification, 2 bad input, 3 resource).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "intcomp/verify.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace intcomp;

namespace {

std::string fixtures_default() { return FIXTURES_DIR; }

std::string hash_of_file(const std::string& path) {
    const auto body = read_file(path);
    return hex16(fnv1a64(body));
}

// first line of every CSV/text output file
std::string file_header(const std::string& command, const std::string& alg_hash,
                        const std::string& seed) {
    return "# intcomp " + command + " alg=" + alg_hash + " seed=" + seed + "\n";
}

json meta_json(const std::string& command, const std::string& alg_hash,
               const std::string& seed) {
    return json{{"command", command}, {"alg_hash", alg_hash}, {"seed", seed}};
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out)
        throw Error("file-not-found", ErrorKind::bad_input, "cannot write " + path);
    out << body;
}

json spec_json(const AlgorithmSpec& s) {
    return json{{"base", s.base}, {"factors", s.factors}};
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ComplexityTable make_table(std::int64_t base, std::int64_t table_limit) {
    const std::int64_t limit =
        table_limit > 0 ? table_limit : std::max<std::int64_t>(base, 4096);
    return build_table(limit, std::min<std::int64_t>(limit, 10000), 4096);
}

EvalMode parse_mode(const std::string& mode) {
    if (mode == "strict") return EvalMode::strict;
    if (mode == "practical") return EvalMode::practical;
    throw Error("bad-input", ErrorKind::bad_input,
                "mode must be strict or practical, got " + mode);
}

struct ExactArgs {
    std::int64_t limit = 0;
    std::int64_t full_sum_limit = 10000;
    std::int64_t e_cap = 4096;
    std::string out;
};

int run_exact(const ExactArgs& a) {
    const auto t = build_table(a.limit, a.full_sum_limit, a.e_cap);
    std::string csv = "n,f(n),ratio\n";
    char row[64];
    for (std::int64_t n = 2; n <= t.limit; ++n) {
        std::snprintf(row, sizeof row, "%lld,%d,%.6f\n",
                      static_cast<long long>(n), t.f(n), ratio(n, t));
        csv += row;
    }
    const auto rep = verify_selfridge(t);
    json report{{"limit", t.limit},
                {"full_sum_limit", t.full_sum_limit},
                {"e_cap", t.e_cap},
                {"violations", rep.violations},
                {"equality_set", rep.equality_set},
                {"ok", rep.violations.empty()}};
    if (a.out.empty()) {
        std::cout << file_header("exact", "none", "none") << csv;
        std::cout << "# violations=" << rep.violations.size() << " equality_set=";
        for (std::size_t i = 0; i < rep.equality_set.size(); ++i)
            std::cout << (i ? "," : "") << rep.equality_set[i];
        std::cout << "\n";
    } else {
        write_file(a.out, file_header("exact", "none", "none") + csv);
        std::cout << report.dump(1) << "\n";
    }
    return rep.violations.empty() ? 0 : 1;
}

struct GreedyArgs {
    std::int64_t base = 0;
    std::int64_t table_limit = 0;
    bool as_json = false;
    std::string out;
};

int run_greedy(const GreedyArgs& a) {
    const auto t = make_table(a.base, a.table_limit);
    const auto spec = greedy(a.base, t);
    if (a.as_json)
        std::cout << spec_json(spec).dump(1) << "\n";
    else
        std::cout << serialize_text(spec) << "\n";
    if (!a.out.empty())
        write_file(a.out, file_header("greedy", "none", "none") +
                              serialize_text(spec) + "\n");
    return 0;
}

int run_validate(const std::string& alg) {
    const auto spec = load_spec_file(alg);
    const auto rep = validate(spec);
    json issues = json::array();
    for (const auto& issue : rep.issues)
        issues.push_back(json{{"index", issue.index},
                              {"value", issue.value},
                              {"reason", issue.reason}});
    std::cout << json{{"ok", rep.ok},
                      {"alg_hash", hash_of_file(alg)},
                      {"issues", issues}}
                     .dump(1)
              << "\n";
    return rep.ok ? 0 : 1;
}

struct EvalArgs {
    std::string alg, n_text, n_file, mode = "strict", trace, out;
    std::int64_t table_limit = 0;
    bool expr = false;
};

int run_eval(const EvalArgs& a) {
    if (a.n_text.empty() == a.n_file.empty())
        throw Error("bad-input", ErrorKind::bad_input,
                    "provide exactly one of --n and --n-file");
    const auto spec = load_spec_file(a.alg);
    const auto hash = hash_of_file(a.alg);
    const auto n =
        a.n_text.empty() ? read_decimal_file(a.n_file) : parse_decimal(a.n_text);
    const auto t = make_table(spec.base, a.table_limit);
    const auto tr = run(spec, n, parse_mode(a.mode), t);
    const double l3n = log3_big(n);
    json out{{"mode", a.mode},
             {"ones", tr.ones},
             {"steps", tr.steps},
             {"terminal", tr.terminal},
             {"log3_n", l3n},
             {"alg_hash", hash}};
    if (l3n > 0.0)
        out["ratio"] = static_cast<double>(tr.ones) / l3n;
    if (a.expr) out["expression"] = emit_expression(tr, t);
    if (!a.trace.empty()) {
        std::string csv = file_header("eval", hash, "none");
        csv += "step,residue,factor,remainder\n";
        char row[96];
        for (std::int64_t i = 0; i < tr.steps; ++i) {
            std::snprintf(row, sizeof row, "%lld,%lld,%lld,%lld\n",
                          static_cast<long long>(i),
                          static_cast<long long>(tr.residues[i]),
                          static_cast<long long>(tr.factors[i]),
                          static_cast<long long>(tr.remainders[i]));
            csv += row;
        }
        write_file(a.trace, csv);
    }
    std::cout << out.dump(1) << "\n";
    if (!a.out.empty()) {
        out["meta"] = meta_json("eval", hash, "none");
        write_file(a.out, out.dump(1) + "\n");
    }
    return 0;
}

struct AnalyzeArgs {
    std::string alg, pi_csv, tv_csv, out;
    std::int64_t tv_horizon = 0;
    std::int64_t table_limit = 0;
    bool variance = false;
};

int run_analyze(const AnalyzeArgs& a) {
    const auto spec = load_spec_file(a.alg);
    const auto hash = hash_of_file(a.alg);
    const auto t = make_table(spec.base, a.table_limit);
    const auto ts = build_chain(spec);
    const auto st = stationary(ts);
    const auto met = metrics(spec, ts, st.pi, t, a.variance);
    json freq = json::object();
    for (const auto& [factor, p] : met.factor_freq)
        freq[std::to_string(factor)] = p;
    json out{{"constant", met.constant},
             {"expected_cost", met.expected_cost},
             {"expected_log_factor", met.expected_log_factor},
             {"reach_m", met.reach_m},
             {"factor_freq", freq},
             {"pi", st.pi},
             {"residual", st.residual},
             {"alg_hash", hash}};
    if (a.variance) {
        json g = json::object();
        for (const auto& [name, v] : met.gamma_sq) g[name] = v;
        out["gamma_sq"] = g;
    }
    std::vector<std::pair<std::int64_t, double>> tv;
    if (a.tv_horizon > 0) {
        tv = tv_convergence(ts, st.pi, a.tv_horizon);
        json series = json::array();
        for (const auto& [step, d] : tv) series.push_back(json::array({step, d}));
        out["tv"] = series;
    }
    if (!a.pi_csv.empty()) {
        std::string csv = file_header("analyze", hash, "none") + "state,pi\n";
        for (std::size_t i = 0; i < st.pi.size(); ++i)
            csv += std::to_string(i) + "," + num(st.pi[i]) + "\n";
        write_file(a.pi_csv, csv);
    }
    if (!a.tv_csv.empty()) {
        if (tv.empty())
            throw Error("bad-input", ErrorKind::bad_input,
                        "--tv-csv needs --tv-horizon");
        std::string csv = file_header("analyze", hash, "none") + "step,tv\n";
        for (const auto& [step, d] : tv)
            csv += std::to_string(step) + "," + num(d) + "\n";
        write_file(a.tv_csv, csv);
    }
    std::cout << out.dump(1) << "\n";
    if (!a.out.empty()) {
        out["meta"] = meta_json("analyze", hash, "none");
        write_file(a.out, out.dump(1) + "\n");
    }
    return 0;
}

struct AnnealArgs {
    std::int64_t base = 0;
    std::int64_t iters = 100000;
    double t0 = 0.05;
    double rate = 0.999;
    std::uint64_t seed = 0;
    std::string start, resume, checkpoint, history, out;
    std::int64_t table_limit = 0;
};

int run_anneal(const AnnealArgs& a) {
    const auto t = make_table(a.base, a.table_limit);
    AnnealConfig cfg;
    cfg.initial_temperature = a.t0;
    cfg.cooling_rate = a.rate;
    cfg.iterations = a.iters;
    cfg.seed = a.seed;
    if (!a.start.empty()) cfg.start = load_spec_file(a.start);
    AnnealResult res;
    if (!a.resume.empty()) {
        const auto state = load_checkpoint(a.resume);
        res = anneal(a.base, cfg, t, &state);
    } else {
        res = anneal(a.base, cfg, t);
    }
    const auto seed_text = std::to_string(a.seed);
    json out{{"best_spec", spec_json(res.best_spec)},
             {"best_constant", res.best_constant},
             {"iterations", res.final_state.iteration},
             {"rejected_invalid", res.rejected_invalid},
             {"schedule",
              {{"initial_temperature", a.t0}, {"cooling_rate", a.rate}}},
             {"seed", a.seed}};
    if (!a.checkpoint.empty()) save_checkpoint(a.checkpoint, res.final_state);
    if (!a.history.empty()) {
        std::string csv = file_header("anneal", "none", seed_text);
        csv += "iteration,constant,accepted\n";
        for (const auto& h : res.history)
            csv += std::to_string(h.iteration) + "," + num(h.constant) + "," +
                   (h.accepted ? "1" : "0") + "\n";
        write_file(a.history, csv);
    }
    std::cout << out.dump(1) << "\n";
    if (!a.out.empty()) {
        out["meta"] = meta_json("anneal", "none", seed_text);
        write_file(a.out, out.dump(1) + "\n");
    }
    return 0;
}

struct SampleArgs {
    std::string alg, brownian, out;
    std::int64_t k = 0;
    std::uint64_t seed = 0;
    std::int64_t table_limit = 0;
};

int run_sample(const SampleArgs& a) {
    const auto spec = load_spec_file(a.alg);
    const auto hash = hash_of_file(a.alg);
    const auto t = make_table(spec.base, a.table_limit);
    const auto ts = build_chain(spec);
    const auto s = sample_walk(spec, ts, t, a.k, a.seed);
    const auto seed_text = std::to_string(a.seed);
    json out{{"k", s.k},
             {"seed", s.seed},
             {"n", to_decimal(s.n)},
             {"ones", s.ones},
             {"avg_cost", s.avg_cost},
             {"avg_factor", s.avg_factor},
             {"residues", s.residues},
             {"alg_hash", hash}};
    if (!a.brownian.empty()) {
        const auto series = brownian_series(spec, s);
        std::string csv = file_header("sample", hash, seed_text) + "i,value\n";
        for (std::size_t i = 0; i < series.size(); ++i)
            csv += std::to_string(i) + "," + num(series[i]) + "\n";
        write_file(a.brownian, csv);
    }
    std::cout << out.dump(1) << "\n";
    if (!a.out.empty()) {
        out["meta"] = meta_json("sample", hash, seed_text);
        write_file(a.out, out.dump(1) + "\n");
    }
    return 0;
}

struct DensityArgs {
    std::string alg, out;
    double c = 0.0;
    bool c_set = false;
    double eps = 0.1;
    std::vector<std::int64_t> ks;
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::int64_t table_limit = 0;
};

int run_density(const DensityArgs& a) {
    const auto spec = load_spec_file(a.alg);
    const auto hash = hash_of_file(a.alg);
    const auto t = make_table(spec.base, a.table_limit);
    const auto ts = build_chain(spec);
    const double c = a.c_set ? a.c : energy(spec, t);
    const auto res =
        density_experiment(spec, ts, t, c, a.eps, a.ks, a.trials, a.seed, a.jobs);
    const auto seed_text = std::to_string(a.seed);
    json points = json::array();
    for (const auto& p : res.points)
        points.push_back(json{{"k", p.k}, {"violation_rate", p.rate}});
    json out{{"c", c},
             {"eps", a.eps},
             {"trials", a.trials},
             {"seed", a.seed},
             {"points", points},
             {"decay_exponent", res.decay_exponent},
             {"alg_hash", hash}};
    if (!a.out.empty()) {
        std::string csv = file_header("density", hash, seed_text);
        csv += "k,violation_rate\n";
        for (const auto& p : res.points)
            csv += std::to_string(p.k) + "," + num(p.rate) + "\n";
        write_file(a.out, csv);
    }
    std::cout << out.dump(1) << "\n";
    return 0;
}

int run_verify(const std::string& fixtures, int only) {
    const auto results = run_acceptance(fixtures, only);
    const int failures = report_acceptance(results, std::cout);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"base-a integer-complexity algorithms: exact oracle, "
                 "evaluator, chain analysis, annealing search"};
    app.require_subcommand(1);

    ExactArgs exact_args;
    auto* cmd_exact = app.add_subcommand(
        "exact", "build the exact f-table and check the lower bound");
    cmd_exact->add_option("--limit", exact_args.limit, "table upper bound")
        ->required();
    cmd_exact->add_option("--full-sum-limit", exact_args.full_sum_limit,
                          "full additive search below this");
    cmd_exact->add_option("--e-cap", exact_args.e_cap,
                          "additive cap above full-sum-limit");
    cmd_exact->add_option("--out", exact_args.out, "write the CSV here");

    GreedyArgs greedy_args;
    auto* cmd_greedy =
        app.add_subcommand("greedy", "derive the greedy tuple for a base");
    cmd_greedy->add_option("--base", greedy_args.base, "base a")->required();
    cmd_greedy->add_option("--table-limit", greedy_args.table_limit,
                           "f-table size override");
    cmd_greedy->add_flag("--json", greedy_args.as_json, "JSON instead of text");
    cmd_greedy->add_option("--out", greedy_args.out, "write the tuple here");

    std::string validate_alg;
    auto* cmd_validate =
        app.add_subcommand("validate", "check a tuple file for validity");
    cmd_validate->add_option("--alg", validate_alg, "algorithm tuple file")
        ->required();

    EvalArgs eval_args;
    auto* cmd_eval =
        app.add_subcommand("eval", "run an algorithm on an integer");
    cmd_eval->add_option("--alg", eval_args.alg, "algorithm tuple file")
        ->required();
    cmd_eval->add_option("--n", eval_args.n_text, "decimal input");
    cmd_eval->add_option("--n-file", eval_args.n_file, "file with decimal input");
    cmd_eval->add_option("--mode", eval_args.mode, "strict | practical");
    cmd_eval->add_flag("--expr", eval_args.expr, "emit the expression");
    cmd_eval->add_option("--trace", eval_args.trace, "write the step CSV here");
    cmd_eval->add_option("--table-limit", eval_args.table_limit,
                         "f-table size override");
    cmd_eval->add_option("--out", eval_args.out, "write the JSON here");

    AnalyzeArgs analyze_args;
    auto* cmd_analyze =
        app.add_subcommand("analyze", "chain metrics for an algorithm");
    cmd_analyze->add_option("--alg", analyze_args.alg, "algorithm tuple file")
        ->required();
    cmd_analyze->add_option("--tv-horizon", analyze_args.tv_horizon,
                            "emit the TV series to this depth");
    cmd_analyze->add_flag("--variance", analyze_args.variance,
                          "include asymptotic variances");
    cmd_analyze->add_option("--pi-csv", analyze_args.pi_csv,
                            "write the stationary vector CSV here");
    cmd_analyze->add_option("--tv-csv", analyze_args.tv_csv,
                            "write the TV series CSV here");
    cmd_analyze->add_option("--table-limit", analyze_args.table_limit,
                            "f-table size override");
    cmd_analyze->add_option("--out", analyze_args.out, "write the JSON here");

    AnnealArgs anneal_args;
    auto* cmd_anneal =
        app.add_subcommand("anneal", "simulated annealing over tuples");
    cmd_anneal->add_option("--base", anneal_args.base, "base a")->required();
    cmd_anneal->add_option("--iters", anneal_args.iters,
                           "total iteration target");
    cmd_anneal->add_option("--t0", anneal_args.t0, "initial temperature");
    cmd_anneal->add_option("--rate", anneal_args.rate, "cooling rate");
    cmd_anneal->add_option("--seed", anneal_args.seed, "RNG seed")->required();
    cmd_anneal->add_option("--start", anneal_args.start,
                           "starting tuple file (default: greedy)");
    cmd_anneal->add_option("--resume", anneal_args.resume,
                           "resume from this checkpoint");
    cmd_anneal->add_option("--checkpoint", anneal_args.checkpoint,
                           "write the final checkpoint here");
    cmd_anneal->add_option("--history", anneal_args.history,
                           "write the history CSV here");
    cmd_anneal->add_option("--table-limit", anneal_args.table_limit,
                           "f-table size override");
    cmd_anneal->add_option("--out", anneal_args.out, "write the JSON here");

    SampleArgs sample_args;
    auto* cmd_sample =
        app.add_subcommand("sample", "draw one conditioned walk");
    cmd_sample->add_option("--alg", sample_args.alg, "algorithm tuple file")
        ->required();
    cmd_sample->add_option("--k", sample_args.k, "walk length")->required();
    cmd_sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
    cmd_sample->add_option("--brownian", sample_args.brownian,
                           "write the bridge series CSV here");
    cmd_sample->add_option("--table-limit", sample_args.table_limit,
                           "f-table size override");
    cmd_sample->add_option("--out", sample_args.out, "write the JSON here");

    DensityArgs density_args;
    auto* cmd_density = app.add_subcommand(
        "density", "violation-rate experiment over walk lengths");
    cmd_density->add_option("--alg", density_args.alg, "algorithm tuple file")
        ->required();
    auto* c_opt = cmd_density->add_option("--c", density_args.c,
                                          "cost constant (default: computed)");
    cmd_density->add_option("--eps", density_args.eps, "violation margin");
    cmd_density
        ->add_option("--k-list", density_args.ks, "comma-separated walk lengths")
        ->required()
        ->delimiter(',');
    cmd_density->add_option("--trials", density_args.trials, "trials per length");
    cmd_density->add_option("--seed", density_args.seed, "RNG seed")->required();
    cmd_density->add_option("--jobs", density_args.jobs, "worker threads");
    cmd_density->add_option("--table-limit", density_args.table_limit,
                            "f-table size override");
    cmd_density->add_option("--out", density_args.out, "write the CSV here");

    std::string verify_fixtures = fixtures_default();
    int verify_only = 0;
    auto* cmd_verify =
        app.add_subcommand("verify", "run the acceptance suite");
    cmd_verify->add_option("--fixtures", verify_fixtures, "fixtures directory");
    cmd_verify->add_option("--only", verify_only, "single criterion number");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"code", "bad-flags"},
                          {"message", e.what()},
                          {"context", json::object()}}
                         .dump()
                  << "\n";
        return 2;
    }

    try {
        if (*cmd_exact) return run_exact(exact_args);
        if (*cmd_greedy) return run_greedy(greedy_args);
        if (*cmd_validate) return run_validate(validate_alg);
        if (*cmd_eval) return run_eval(eval_args);
        if (*cmd_analyze) return run_analyze(analyze_args);
        if (*cmd_anneal) return run_anneal(anneal_args);
        if (*cmd_sample) return run_sample(sample_args);
        if (*cmd_density) {
            density_args.c_set = c_opt->count() > 0;
            return run_density(density_args);
        }
        if (*cmd_verify) return run_verify(verify_fixtures, verify_only);
    } catch (const Error& e) {
        json ctx = json::object();
        for (const auto& [k, v] : e.context) ctx[k] = v;
        std::cerr << json{{"code", e.code}, {"message", e.what()}, {"context", ctx}}
                         .dump()
                  << "\n";
        return static_cast<int>(e.kind);
    } catch (const std::exception& e) {
        std::cerr << json{{"code", "internal"},
                          {"message", e.what()},
                          {"context", json::object()}}
                         .dump()
                  << "\n";
        return 3;
    }
    return 0;
}
