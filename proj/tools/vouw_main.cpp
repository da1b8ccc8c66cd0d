// Command-line front end: generate synthetic benchmark matrices, mine them,
// evaluate mined pattern sets against a ground truth, and run benchmark
// sweeps. Exit codes: 0 on success, 2 on usage or input errors.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <vouw/vouw.hpp>

namespace {

int env_threads() {
    const char* raw = std::getenv("VOUW_THREADS");
    if (!raw) return 0;
    try {
        const int n = std::stoi(raw);
        return n > 0 ? n : 0;
    } catch (...) {
        return 0;
    }
}

struct GenArgs {
    int rows = 0, cols = 0;
    int alphabet = 256;
    int pattern_size = 16;
    int num_patterns = 5;
    std::optional<double> snr;
    std::optional<std::int64_t> prevalence;
    std::uint64_t seed = 1;
    std::string out, truth_out;
};

int cmd_gen(const GenArgs& args) {
    if (args.snr.has_value() == args.prevalence.has_value()) {
        std::cerr << "gen: exactly one of --snr or --prevalence must be given\n";
        return 2;
    }
    vouw::RilConfig cfg;
    cfg.rows = args.rows;
    cfg.cols = args.cols;
    cfg.alphabet_size = args.alphabet;
    cfg.pattern_size = args.pattern_size;
    cfg.num_patterns = args.num_patterns;
    cfg.prevalence = args.prevalence;
    cfg.target_snr = args.snr;
    cfg.seed = args.seed;

    const auto [matrix, truth] = vouw::generate(cfg);
    vouw::write_file(args.out, [&](std::ostream& o) { vouw::write_matrix(o, matrix); });
    if (!args.truth_out.empty())
        vouw::write_file(args.truth_out, [&](std::ostream& o) {
            vouw::write_mask(o, truth.rows, truth.cols, truth.mask);
        });
    std::fprintf(stderr, "generated %dx%d matrix, planted snr=%.4f\n", matrix.rows(),
                 matrix.cols(), truth.snr());
    return 0;
}

struct MineArgs {
    std::string input, out, log;
    bool best_star = false;
    bool local_search = false;
    std::optional<std::int64_t> max_iters;
};

int cmd_mine(const MineArgs& args) {
    const vouw::Matrix matrix =
        vouw::read_file(args.input, [](std::istream& in) { return vouw::read_matrix(in); });

    vouw::MinerConfig config;
    config.heuristic =
        args.best_star ? vouw::Heuristic::BestStar : vouw::Heuristic::Best1;
    config.local_search = args.local_search;
    config.max_iterations = args.max_iters;

    const auto t0 = std::chrono::steady_clock::now();
    vouw::MineResult result = vouw::mine(matrix, config);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    if (!args.out.empty()) {
        const vouw::PatternSet set = vouw::pattern_set_from_state(result.state);
        vouw::write_file(args.out,
                         [&](std::ostream& o) { vouw::write_pattern_set(o, set); });
    }
    if (!args.log.empty()) {
        vouw::write_file(args.log, [&](std::ostream& o) {
            o << "iteration,best_gain,model_size,instance_count,total_bits,merges\n";
            char buf[160];
            for (const vouw::IterationRow& row : result.log) {
                std::snprintf(buf, sizeof(buf), "%lld,%.6f,%lld,%lld,%.6f,%lld\n",
                              static_cast<long long>(row.iteration), row.best_gain,
                              static_cast<long long>(row.model_size),
                              static_cast<long long>(row.instance_count),
                              row.total_bits, static_cast<long long>(row.merges));
                o << buf;
            }
        });
    }

    std::printf("|H|=%lld |I|=%lld bits=%.3f ratio=%.3f seconds=%.3f\n",
                static_cast<long long>(result.state.model_size),
                static_cast<long long>(result.state.instance_count),
                result.state.lengths.total_bits(), result.state.lengths.ratio(),
                seconds);
    return 0;
}

struct EvalArgs {
    std::string matrix, patterns, truth;
};

int cmd_eval(const EvalArgs& args) {
    const vouw::Matrix matrix =
        vouw::read_file(args.matrix, [](std::istream& in) { return vouw::read_matrix(in); });
    const vouw::PatternSet set = vouw::read_file(
        args.patterns, [](std::istream& in) { return vouw::read_pattern_set(in); });
    const vouw::MaskFile truth =
        vouw::read_file(args.truth, [](std::istream& in) { return vouw::read_mask(in); });

    if (truth.rows != matrix.rows() || truth.cols != matrix.cols())
        throw vouw::DimMismatch("truth mask dimensions do not match the matrix");
    const vouw::Matrix rebuilt = vouw::reconstruct(set, matrix.alphabet_size());
    if (rebuilt != matrix)
        throw vouw::Error("pattern set does not reconstruct the given matrix");

    // Coverage: cells under instances of non-singleton patterns.
    std::vector<std::uint8_t> found(truth.mask.size(), 0);
    for (const vouw::PatternInstance& inst : set.instances) {
        const vouw::Pattern& p =
            set.patterns[static_cast<std::size_t>(inst.pattern_index)].pattern;
        if (p.cardinality() < 2) continue;
        const vouw::RowCol pv = vouw::pivot(p);
        for (const vouw::PatternCell& c : p.cells())
            found[static_cast<std::size_t>(inst.row + c.row - pv.row) * matrix.cols() +
                  (inst.col + c.col - pv.col)] = 1;
    }
    const auto [precision, recall] = vouw::precision_recall(found, truth.mask);

    // Description length of the stored model/instantiation pair against the
    // singleton baseline of the matrix.
    vouw::EncodingParams params;
    params.rows = matrix.rows();
    params.cols = matrix.cols();
    params.alphabet_size = matrix.alphabet_size();
    const vouw::EncodingContext enc(params);
    std::vector<const vouw::Pattern*> model;
    std::vector<std::int64_t> usages;
    for (const vouw::PatternSetEntry& e : set.patterns) {
        model.push_back(&e.pattern);
        usages.push_back(e.usage);
    }
    const double total = enc.model_length(model) + enc.instantiation_length(usages);
    const double baseline = vouw::baseline_length(matrix, enc);

    std::printf("precision=%.4f recall=%.4f ratio=%.4f\n", precision, recall,
                total / baseline);
    return 0;
}

struct BenchArgs {
    std::vector<int> sizes{256};
    std::vector<double> snrs{0.05};
    std::vector<std::string> heuristics{"none", "local", "beststar", "both"};
    int seeds = 5;
    int pattern_size = 16;
    int num_patterns = 5;
    int alphabet = 256;
    std::string out;
};

int cmd_bench(const BenchArgs& args) {
    vouw::BenchConfig cfg;
    cfg.sizes = args.sizes;
    cfg.snrs = args.snrs;
    cfg.heuristics = args.heuristics;
    cfg.seeds = args.seeds;
    cfg.pattern_size = args.pattern_size;
    cfg.num_patterns = args.num_patterns;
    cfg.alphabet_size = args.alphabet;
    cfg.threads = env_threads();
    for (const std::string& h : cfg.heuristics) vouw::heuristic_config(h);  // validate

    const std::vector<vouw::EvalReport> rows = vouw::bench(cfg);
    if (!args.out.empty())
        vouw::write_file(args.out, [&](std::ostream& o) { o << vouw::bench_csv(rows); });
    std::cout << vouw::bench_table(rows, cfg.heuristics);

    bool any_ok = false;
    for (const vouw::EvalReport& r : rows)
        if (r.ok) any_ok = true;
    return any_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric pattern mining by MDL-driven merging"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic benchmark matrix");
    gen_cmd->add_option("--rows", gen.rows, "matrix rows")->required();
    gen_cmd->add_option("--cols", gen.cols, "matrix columns")->required();
    gen_cmd->add_option("--alphabet", gen.alphabet, "alphabet size");
    gen_cmd->add_option("--snr", gen.snr, "target fraction of planted cells");
    gen_cmd->add_option("--pattern-size", gen.pattern_size, "cells per planted pattern");
    gen_cmd->add_option("--num-patterns", gen.num_patterns, "distinct planted patterns");
    gen_cmd->add_option("--prevalence", gen.prevalence, "occurrences per pattern");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("--out", gen.out, "matrix output file")->required();
    gen_cmd->add_option("--truth-out", gen.truth_out, "ground-truth mask output file");

    MineArgs mine_args;
    CLI::App* mine_cmd = app.add_subcommand("mine", "Mine patterns from a matrix file");
    mine_cmd->add_option("--input", mine_args.input, "matrix input file")->required();
    mine_cmd->add_flag("--best-star", mine_args.best_star,
                       "merge all disjoint positive-gain candidates per iteration");
    mine_cmd->add_flag("--local-search", mine_args.local_search,
                       "grow each new pattern along its peripheries");
    mine_cmd->add_option("--max-iters", mine_args.max_iters, "iteration cap")
        ->check(CLI::PositiveNumber);
    mine_cmd->add_option("--out", mine_args.out, "pattern set output file");
    mine_cmd->add_option("--log", mine_args.log, "iteration log output file (csv)");

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate a mined pattern set against ground truth");
    eval_cmd->add_option("--matrix", eval_args.matrix, "matrix file")->required();
    eval_cmd->add_option("--patterns", eval_args.patterns, "pattern set file")->required();
    eval_cmd->add_option("--truth", eval_args.truth, "ground-truth mask file")->required();

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
    bench_cmd->add_option("--sizes", bench_args.sizes, "matrix sizes")->delimiter(',');
    bench_cmd->add_option("--snrs", bench_args.snrs, "signal fractions")->delimiter(',');
    bench_cmd->add_option("--heuristics", bench_args.heuristics,
                          "heuristics: none,local,beststar,both")
        ->delimiter(',');
    bench_cmd->add_option("--seeds", bench_args.seeds, "seeds per cell");
    bench_cmd->add_option("--pattern-size", bench_args.pattern_size,
                          "cells per planted pattern");
    bench_cmd->add_option("--num-patterns", bench_args.num_patterns,
                          "distinct planted patterns");
    bench_cmd->add_option("--alphabet", bench_args.alphabet, "alphabet size");
    bench_cmd->add_option("--out", bench_args.out, "csv output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (mine_cmd->parsed()) return cmd_mine(mine_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (bench_cmd->parsed()) return cmd_bench(bench_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
