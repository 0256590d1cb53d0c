// Command-line front end: convert, spmv, verify, stats, balance-report,
// cache-sim, bench. Reports are JSON on stdout.
//
// Exit status: 0 success, 1 domain error (or failed verification), 2 usage
// error (bad flags, dimension mismatch between matrix and vector).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbspmv/balance.hpp"
#include "cbspmv/cache_sim.hpp"
#include "cbspmv/container.hpp"
#include "cbspmv/error.hpp"
#include "cbspmv/matrix_market.hpp"
#include "cbspmv/pipeline.hpp"
#include "cbspmv/spmv.hpp"
#include "cbspmv/storage_model.hpp"
#include "cbspmv/trace.hpp"

using json = nlohmann::ordered_json;
using namespace cbspmv;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kVerifySeed = 0x5eed;
constexpr double kVerifyTolerance = 1e-10;

struct CliConfig {
    PipelineConfig pipeline;
    std::string agg = "auto";
    std::string mode = "seq";
    unsigned threads = 0;

    PipelineConfig resolve() const {
        PipelineConfig p = pipeline;
        p.aggregation = agg == "on" ? AggregationMode::On : agg == "off" ? AggregationMode::Off : AggregationMode::Auto;
        p.exec.mode = mode == "par" ? ExecMode::ParallelTB : ExecMode::Sequential;
        p.exec.threads = threads;
        p.validate();
        return p;
    }
};

void add_exec_flags(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--mode", cfg.mode, "Execution mode")->check(CLI::IsMember({"seq", "par"}))->capture_default_str();
    cmd->add_option("--threads", cfg.threads, "Worker threads for --mode par (0 = hardware)")
        ->envname("CBSPMV_THREADS")
        ->capture_default_str();
}

void add_pipeline_flags(CLI::App* cmd, CliConfig& cfg) {
    auto& p = cfg.pipeline;
    cmd->add_option("--th0", p.th0, "Super-sparse fraction that triggers column aggregation")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--th1", p.formats.th1, "Blocks with nnz below th1 use COO")->capture_default_str();
    cmd->add_option("--th2", p.formats.th2, "Blocks with nnz above th2 use DENSE")->capture_default_str();
    cmd->add_option("--warps", p.warps_per_tb, "Warps (blocks) per thread block")->capture_default_str();
    cmd->add_option("--agg", cfg.agg, "Column aggregation")->check(CLI::IsMember({"auto", "on", "off"}))->capture_default_str();
    cmd->add_flag("--balance,!--no-balance", p.balance, "Thread-block load balancing")->capture_default_str();
    add_exec_flags(cmd, cfg);
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    std::vector<double> v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        char* end = nullptr;
        const double d = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || line.find_first_not_of(" \t\r", end - line.c_str()) != std::string::npos)
            throw FormatError(path + ": line " + std::to_string(lineno) + ": not a number");
        v.push_back(d);
    }
    return v;
}

void write_vector(std::ostream& out, const std::vector<double>& y) {
    char buf[32];
    for (double v : y) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
}

json stats_json(const LoadStats& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}, {"max", s.max}, {"min", s.min}};
}

json report_json(const PipelineReport& r) {
    json j;
    j["blocks"] = r.blocks;
    j["nnz"] = r.nnz;
    j["aggregation_applied"] = r.aggregation_applied;
    j["balanced"] = r.balanced;
    j["formats"] = {{"coo", r.format_counts[0]}, {"csr", r.format_counts[1]}, {"dense", r.format_counts[2]}};
    j["preprocess_seconds"] = r.seconds;
    return j;
}

template <typename F>
double mean_seconds(std::size_t iters, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < iters; ++i)
        f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
           static_cast<double>(iters);
}

double gflops(std::size_t nnz, double seconds) {
    return seconds > 0 ? 2.0 * static_cast<double>(nnz) / seconds / 1e9 : 0.0;
}

double max_relative_error(const std::vector<double>& y, const std::vector<double>& ref) {
    double diff = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        diff = std::max(diff, std::abs(y[i] - ref[i]));
        scale = std::max(scale, std::abs(ref[i]));
    }
    return diff / scale;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CB-SpMV: cache-friendly block sparse format, preprocessing pipeline and SpMV emulator"};
    app.require_subcommand(1);
    CliConfig cfg;

    std::string input, output, x_path, cbsm_path;
    bool ones = false;
    std::size_t iters = 1000;
    CacheConfig cache = kDefaultL1;

    auto* convert = app.add_subcommand("convert", "Convert a Matrix Market file to a CBSM container");
    convert->add_option("input", input, "Input .mtx")->required();
    convert->add_option("output", output, "Output .cbsm")->required();
    add_pipeline_flags(convert, cfg);

    auto* spmv = app.add_subcommand("spmv", "Multiply a CBSM matrix by a vector");
    spmv->add_option("matrix", input, "Input .cbsm")->required();
    auto* xopt = spmv->add_option("--x", x_path, "Vector file, one value per line");
    auto* ones_flag = spmv->add_flag("--ones", ones, "Use x = 1");
    xopt->excludes(ones_flag);
    spmv->add_option("-o,--output", output, "Write y here (default: stdout JSON only)");
    spmv->add_option("--iters", iters, "Timed repetitions")->check(CLI::PositiveNumber)->capture_default_str();
    add_exec_flags(spmv, cfg);

    auto* verify = app.add_subcommand("verify", "Check the CB kernels against the CSR reference");
    verify->add_option("matrix", input, "Input .mtx")->required();
    verify->add_option("--cbsm", cbsm_path, "Verify this container instead of converting the matrix");
    verify->add_option("--x", x_path, "Use this vector instead of the seeded random ones");
    add_pipeline_flags(verify, cfg);

    auto* stats = app.add_subcommand("stats", "Block sparsity statistics and storage model");
    stats->add_option("matrix", input, "Input .mtx")->required();
    stats->add_option("--th0", cfg.pipeline.th0, "Aggregation threshold")->check(CLI::Range(0.0, 1.0));

    auto* balance_report = app.add_subcommand("balance-report", "Per-thread-block loads before and after balancing");
    balance_report->add_option("matrix", input, "Input .mtx")->required();
    add_pipeline_flags(balance_report, cfg);

    auto* cache_sim = app.add_subcommand("cache-sim", "Simulated cache hit rates of CSR and CB access traces");
    cache_sim->add_option("matrix", input, "Input .mtx")->required();
    cache_sim->add_option("--capacity", cache.capacity_bytes, "Cache capacity in bytes")->capture_default_str();
    cache_sim->add_option("--line", cache.line_bytes, "Line size in bytes")->capture_default_str();
    cache_sim->add_option("--ways", cache.associativity, "Associativity")->capture_default_str();
    add_pipeline_flags(cache_sim, cfg);

    auto* bench = app.add_subcommand("bench", "Preprocess and time CB and reference SpMV");
    bench->add_option("matrix", input, "Input .mtx")->required();
    bench->add_option("--iters", iters, "Timed repetitions")->check(CLI::PositiveNumber)->capture_default_str();
    add_pipeline_flags(bench, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        PipelineConfig pc;
        try {
            pc = cfg.resolve();
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        }

        if (*convert) {
            const auto m = read_matrix_market_file(input);
            const auto result = build_packed(m, pc);
            write_container_file(output, result.packed);
            json j{{"input", input}, {"output", output}, {"n_rows", m.n_rows}, {"n_cols", m.n_cols}};
            j.update(report_json(result.report));
            print(j);
        } else if (*spmv) {
            const auto p = read_container_file(input);
            if (!ones && x_path.empty()) {
                std::cerr << "error: spmv needs --x FILE or --ones\n";
                return kExitUsage;
            }
            const std::vector<double> x = ones ? std::vector<double>(p.n_cols, 1.0) : read_vector_file(x_path);
            std::vector<double> y = spmv_cb(p, x, pc.exec);
            const double secs = mean_seconds(iters, [&] { y = spmv_cb(p, x, pc.exec); });
            if (!output.empty()) {
                std::ofstream out(output);
                if (!out)
                    throw Error("cannot open '" + output + "' for writing");
                write_vector(out, y);
            }
            print({{"matrix", input},
                   {"n_rows", p.n_rows},
                   {"n_cols", p.n_cols},
                   {"nnz", p.nnz()},
                   {"mode", cfg.mode},
                   {"iters", iters},
                   {"mean_seconds", secs},
                   {"gflops", gflops(p.nnz(), secs)}});
        } else if (*verify) {
            const auto m = read_matrix_market_file(input);
            PackedMatrix p;
            json j{{"matrix", input}};
            if (!cbsm_path.empty()) {
                p = read_container_file(cbsm_path);
                if (p.n_rows != m.n_rows || p.n_cols != m.n_cols)
                    throw DimensionMismatch("container is " + std::to_string(p.n_rows) + "x" +
                                            std::to_string(p.n_cols) + ", matrix is " + std::to_string(m.n_rows) +
                                            "x" + std::to_string(m.n_cols));
                j["container"] = cbsm_path;
            } else {
                auto result = build_packed(m, pc);
                j.update(report_json(result.report));
                p = std::move(result.packed);
            }
            std::vector<std::vector<double>> xs;
            if (!x_path.empty()) {
                xs.push_back(read_vector_file(x_path));
            } else {
                std::mt19937_64 rng(kVerifySeed);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                for (int k = 0; k < 3; ++k) {
                    std::vector<double> x(m.n_cols);
                    for (auto& v : x)
                        v = u(rng);
                    xs.push_back(std::move(x));
                }
            }
            double worst = 0.0;
            for (const auto& x : xs)
                worst = std::max(worst, max_relative_error(spmv_cb(p, x, pc.exec), spmv_reference_csr(m, x)));
            const bool pass = worst <= kVerifyTolerance;
            j["vectors"] = xs.size();
            j["max_relative_error"] = worst;
            j["tolerance"] = kVerifyTolerance;
            j["pass"] = pass;
            print(j);
            return pass ? 0 : kExitDomain;
        } else if (*stats) {
            const auto m = read_matrix_market_file(input);
            const auto b = partition(m);
            const auto s = compute_block_stats(b);
            const auto st = storage_model(m.n_rows, m.n_cols, m.nnz(), b.blocks.size(), b.blk_m);
            print({{"matrix", input},
                   {"n_rows", m.n_rows},
                   {"n_cols", m.n_cols},
                   {"nnz", m.nnz()},
                   {"blocks", s.total_blocks},
                   {"histogram8", s.histogram8},
                   {"histogram_sub4", s.histogram_sub4},
                   {"super_sparse_fraction", s.super_sparse_fraction},
                   {"would_aggregate", should_aggregate(s, cfg.pipeline.th0)},
                   {"storage", {{"csr_bytes", st.csr_bytes}, {"bsr_bytes", st.bsr_bytes}, {"cb_bytes", st.cb_bytes}}}});
        } else if (*balance_report) {
            const auto m = read_matrix_market_file(input);
            PipelineConfig unbalanced = pc;
            unbalanced.balance = false;
            const auto result = build_packed(m, unbalanced);
            const auto pre = contiguous_loads(result.packed.nnz_per_blk, pc.warps_per_tb);
            const auto balanced = balance(result.packed, pc.warps_per_tb);
            const auto& post = balanced.schedule->load_per_tb;
            print({{"matrix", input},
                   {"blocks", result.packed.block_count()},
                   {"warps_per_tb", pc.warps_per_tb},
                   {"aggregation_applied", result.report.aggregation_applied},
                   {"pre", {{"loads", pre}, {"stats", stats_json(load_stats(pre))}}},
                   {"post", {{"loads", post}, {"stats", stats_json(load_stats(post))}}}});
        } else if (*cache_sim) {
            validate(cache);
            const auto m = read_matrix_market_file(input);
            const auto result = build_packed(m, pc);
            const json config{{"capacity_bytes", cache.capacity_bytes},
                              {"line_bytes", cache.line_bytes},
                              {"associativity", cache.associativity},
                              {"policy", "LRU"}};
            json j{{"matrix", input}, {"cb_block_order", result.report.balanced ? "balanced" : "packed"}};
            for (const auto& [name, trace] : {std::pair{"csr", trace_csr(m)}, std::pair{"cb", trace_cb(result.packed)}}) {
                if (trace.empty()) {
                    j[name] = {{"format", name}, {"config", config}, {"accesses", 0}, {"hits", 0}, {"hit_rate", nullptr}};
                    continue;
                }
                const auto r = simulate_cache(trace, cache);
                j[name] = {{"format", name}, {"config", config}, {"accesses", r.accesses}, {"hits", r.hits},
                           {"hit_rate", r.hit_rate}};
            }
            print(j);
        } else if (*bench) {
            const auto m = read_matrix_market_file(input);
            const auto result = build_packed(m, pc);
            const std::vector<double> x(m.n_cols, 1.0);
            std::vector<double> y;
            const double cb = mean_seconds(iters, [&] { y = spmv_cb(result.packed, x, pc.exec); });
            const double ref = mean_seconds(iters, [&] { y = spmv_reference_csr(m, x); });
            json j{{"matrix", input}, {"n_rows", m.n_rows}, {"n_cols", m.n_cols}, {"iters", iters}};
            j.update(report_json(result.report));
            j["cb"] = {{"mean_seconds", cb}, {"gflops", gflops(m.nnz(), cb)}};
            j["reference_csr"] = {{"mean_seconds", ref}, {"gflops", gflops(m.nnz(), ref)}};
            print(j);
        }
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return 0;
}
