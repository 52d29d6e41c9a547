// Command-line front end: matrix generation, static communication analysis,
// instrumented strategy runs, performance prediction, and the 2D heat demo.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgaslab/bench.hpp"
#include "pgaslab/comm_analysis.hpp"
#include "pgaslab/ellpack.hpp"
#include "pgaslab/heat2d.hpp"
#include "pgaslab/matrix_io.hpp"
#include "pgaslab/perf_model.hpp"
#include "pgaslab/profile.hpp"
#include "pgaslab/runtime.hpp"
#include "pgaslab/strategies.hpp"

namespace {

using namespace pgaslab;

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    return file;
}

StatsKind parse_kind(const std::string& s) {
    if (s == "v1") return StatsKind::v1;
    if (s == "v2") return StatsKind::v2;
    if (s == "v3") return StatsKind::v3;
    throw CLI::ValidationError("--strategy", "expected v1, v2 or v3, got '" + s + "'");
}

Strategy parse_strategy(const std::string& s) {
    if (s == "naive") return Strategy::naive;
    if (s == "v1") return Strategy::v1;
    if (s == "v2") return Strategy::v2;
    if (s == "v3") return Strategy::v3;
    throw CLI::ValidationError("--strategy", "expected naive, v1, v2 or v3, got '" + s + "'");
}

void write_ledger_csv(std::ostream& os, const std::vector<TrafficLedger>& ledgers) {
    os << "thread,local_indv_count,remote_indv_count,local_cntg_bytes,"
          "remote_cntg_bytes,remote_message_count\n";
    for (std::size_t t = 0; t < ledgers.size(); ++t) {
        const TrafficLedger& l = ledgers[t];
        os << t << ',' << l.local_indv_count << ',' << l.remote_indv_count << ','
           << l.local_cntg_bytes << ',' << l.remote_cntg_bytes << ',' << l.remote_message_count
           << '\n';
    }
}

struct GridSpec {
    int rows = 1, cols = 1;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char x = 0;
    std::istringstream in(s);
    if (!(in >> g.rows >> x >> g.cols) || (x != 'x' && x != 'X') || g.rows < 1 || g.cols < 1)
        throw CLI::ValidationError("--pgrid", "expected RxC, e.g. 4x4, got '" + s + "'");
    return g;
}

int run_gen(const std::string& out, index_t n, int r_nz, index_t bandwidth, std::uint64_t seed) {
    const EllPackMatrix m = generate_banded(n, r_nz, bandwidth, seed);
    save_ellpack(m, out);
    std::cout << "wrote " << out << ": n=" << m.n << " r_nz=" << m.r_nz
              << " bandwidth=" << bandwidth << " seed=" << seed << '\n';
    return 0;
}

int run_analyze(const std::string& matrix_path, int r_nz_override, index_t blocksize, int threads,
                int threads_per_node, const std::string& strategy, const std::string& out) {
    const EllPackMatrix m = load_matrix(matrix_path, r_nz_override);
    const BlockCyclicLayout layout(m.n, blocksize);
    const Topology topo(threads, threads_per_node);
    const CommStats stats = analyze(parse_kind(strategy), m, layout, topo);
    std::ofstream file;
    write_commstats_csv(open_or_stdout(file, out), stats);
    return 0;
}

int run_run(const std::string& matrix_path, int r_nz_override, index_t blocksize, int threads,
            int threads_per_node, const std::string& strategy, index_t iterations,
            const std::string& ledger_out) {
    const EllPackMatrix m = load_matrix(matrix_path, r_nz_override);
    const BlockCyclicLayout layout(m.n, blocksize);
    const Topology topo(threads, threads_per_node);
    const Strategy s = parse_strategy(strategy);

    DenseVector x(m.n);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : x) v = dist(rng);

    std::vector<TrafficLedger> ledgers;
    const DenseVector y = iterate(m, x, iterations, s, layout, topo, &ledgers);

    DenseVector expected = x;
    for (index_t it = 0; it < iterations; ++it) expected = spmv_reference(m, expected);
    index_t mismatches = 0;
    for (index_t i = 0; i < m.n; ++i)
        if (y[i] != expected[i]) ++mismatches;

    std::ofstream file;
    write_ledger_csv(open_or_stdout(file, ledger_out), ledgers);
    if (mismatches != 0) {
        std::cerr << "verification FAILED: " << mismatches << " of " << m.n
                  << " entries differ from the sequential result\n";
        return 1;
    }
    std::cerr << "verification ok: bitwise equal to the sequential result after " << iterations
              << " iteration(s)\n";
    return 0;
}

int run_predict(const std::string& matrix_path, int r_nz_override, index_t blocksize, int threads,
                int threads_per_node, const std::string& strategy, std::uint64_t iterations,
                const std::string& profile_name, const std::string& format,
                const std::string& out) {
    const EllPackMatrix m = load_matrix(matrix_path, r_nz_override);
    const BlockCyclicLayout layout(m.n, blocksize);
    const Topology topo(threads, threads_per_node);
    const HardwareProfile p = resolve_profile(profile_name);
    const StatsKind kind = parse_kind(strategy);
    const CommStats stats = analyze(kind, m, layout, topo);
    const Prediction pred = predict(kind, layout, topo, m.r_nz, stats, p, iterations);

    std::ofstream file;
    std::ostream& os = open_or_stdout(file, out);
    if (format == "json")
        os << prediction_to_json(pred).dump(2) << '\n';
    else
        write_prediction_csv(os, pred);
    return 0;
}

int run_compare(const std::string& matrix_path, int r_nz_override, index_t blocksize, int threads,
                int threads_per_node, const std::string& strategy,
                const std::string& profile_name) {
    const EllPackMatrix m = load_matrix(matrix_path, r_nz_override);
    const BlockCyclicLayout layout(m.n, blocksize);
    const Topology topo(threads, threads_per_node);
    const StatsKind kind = parse_kind(strategy);
    const Strategy s = parse_strategy(strategy);
    const HardwareProfile p = resolve_profile(profile_name);

    DenseVector x(m.n);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : x) v = dist(rng);

    const StrategyResult result = run_strategy(s, m, x, layout, topo);
    const CommStats stats = analyze(kind, m, layout, topo);
    const Prediction pred = predict(kind, layout, topo, m.r_nz, stats, p);

    std::cout << "measured ledgers (per thread):\n";
    write_ledger_csv(std::cout, result.ledgers);
    std::cout << "\nstatic analysis (per thread):\n";
    write_commstats_csv(std::cout, stats);
    std::cout << "\npredicted time (" << strategy << "): " << pred.total << " s/iteration\n";
    return 0;
}

int run_heat(index_t M, index_t N, const GridSpec& grid_spec, int steps, int threads_per_node,
             const std::string& profile_name, bool predict_only) {
    const ProcessGrid grid(grid_spec.rows, grid_spec.cols, M, N);
    const Topology topo(grid.total_threads(), threads_per_node);
    const HardwareProfile p = resolve_profile(profile_name);

    const double comp = model_comp(grid, p);
    const double halo = model_halo(grid, p, topo);
    std::cout << "mesh " << M << "x" << N << ", grid " << grid_spec.rows << "x" << grid_spec.cols
              << " (" << grid.total_threads() << " threads, " << topo.node_count()
              << " node(s)), " << steps << " step(s)\n";
    std::cout << "predicted compute: " << comp * steps << " s (" << comp << " s/step)\n";
    std::cout << "predicted halo exchange: " << halo * steps << " s (" << halo << " s/step)\n";
    if (predict_only) return 0;

    auto init = [&](index_t gi, index_t gk) {
        return std::sin(0.1 * static_cast<double>(gi)) + std::cos(0.07 * static_cast<double>(gk));
    };
    const HeatParams params{0.1, 0.25, 0.25};
    HeatSolver solver(grid, topo, params, init);
    solver.advance(steps);

    SerialHeatReference ref(M, N, params, init);
    ref.advance(steps);
    const std::vector<double> got = solver.gather_interior();
    const std::vector<double> want = ref.interior();
    index_t mismatches = 0;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i] != want[i]) ++mismatches;
    if (mismatches != 0) {
        std::cerr << "verification FAILED: " << mismatches
                  << " interior cells differ from the serial reference\n";
        return 1;
    }
    std::cout << "verification ok: bitwise equal to the serial reference\n";
    std::cout << "traffic (per thread):\n";
    write_ledger_csv(std::cout, solver.ledgers());
    return 0;
}

int run_bench(int threads, std::size_t buffer_mib, int repetitions, const std::string& out) {
    const BandwidthResult bw = measure_local_bandwidth(threads, buffer_mib << 20, repetitions);
    const RandomAccessResult ra = measure_random_access(256u << 20, 1, 1234);
    std::cout << "copy:  " << bw.copy_bytes_per_sec / 1e9 << " GB/s per thread\n";
    std::cout << "triad: " << bw.triad_bytes_per_sec / 1e9 << " GB/s per thread\n";
    std::cout << "random access penalty: " << ra.latency_estimate * 1e9 << " ns/element\n";
    if (!out.empty()) {
        HardwareProfile p;
        p.w_thread_private = bw.triad_bytes_per_sec;
        p.w_node_remote = bw.triad_bytes_per_sec;  // single-node box: no interconnect to measure
        p.tau = std::max(ra.latency_estimate, 1e-9);
        save_profile(out, p);
        std::cout << "wrote profile " << out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed-memory SpMV strategy laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random banded matrix");
    std::string gen_out = "matrix.bin";
    index_t gen_n = 4096, gen_bw = 64;
    int gen_rnz = 8;
    std::uint64_t gen_seed = 1;
    gen->add_option("--n", gen_n, "matrix dimension")->required();
    gen->add_option("--rnz", gen_rnz, "off-diagonal slots per row")->required();
    gen->add_option("--bandwidth", gen_bw, "half bandwidth of the column window");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output file");

    // shared options for matrix-consuming subcommands
    std::string matrix_path, strategy = "v1", profile_name = "abel", out_path;
    int r_nz_override = -1, threads = 4, threads_per_node = 4;
    index_t blocksize = 64;
    index_t iterations = 1;
    std::string format = "csv";
    auto add_common = [&](CLI::App* cmd, bool with_strategy = true) {
        cmd->add_option("--matrix", matrix_path, "matrix file (.mtx or binary)")->required();
        cmd->add_option("--rnz", r_nz_override, "override r_nz when reading .mtx");
        cmd->add_option("--blocksize", blocksize, "block size of the cyclic layout");
        cmd->add_option("--threads", threads, "emulated thread count");
        cmd->add_option("--threads-per-node", threads_per_node, "threads per node");
        if (with_strategy) cmd->add_option("--strategy", strategy, "v1 | v2 | v3");
    };

    auto* analyze = app.add_subcommand("analyze", "Static communication analysis (CSV)");
    add_common(analyze);
    analyze->add_option("--out", out_path, "output file, '-' for stdout");

    auto* runc = app.add_subcommand("run", "Run a strategy, verify, dump traffic ledgers");
    add_common(runc);
    runc->get_option("--strategy")->description("naive | v1 | v2 | v3");
    runc->add_option("--iterations", iterations, "power-iteration steps");
    runc->add_option("--out", out_path, "ledger CSV output, '-' for stdout");

    auto* predict_cmd = app.add_subcommand("predict", "Model-predicted execution time");
    add_common(predict_cmd);
    predict_cmd->add_option("--iterations", iterations, "iterations to scale by");
    predict_cmd->add_option("--profile", profile_name, "'abel' or a profile JSON path");
    predict_cmd->add_option("--format", format, "csv | json");
    predict_cmd->add_option("--out", out_path, "output file, '-' for stdout");

    auto* compare = app.add_subcommand("compare", "Measured ledger vs analysis vs prediction");
    add_common(compare);
    compare->add_option("--profile", profile_name, "'abel' or a profile JSON path");

    auto* heat = app.add_subcommand("heat2d", "2D heat diffusion demo");
    index_t heat_M = 128, heat_N = 128;
    std::string pgrid = "2x2";
    int heat_steps = 10;
    bool predict_only = false;
    heat->add_option("--M", heat_M, "global interior rows")->required();
    heat->add_option("--N", heat_N, "global interior columns")->required();
    heat->add_option("--pgrid", pgrid, "thread grid RxC")->required();
    heat->add_option("--steps", heat_steps, "time steps");
    heat->add_option("--threads-per-node", threads_per_node, "threads per node");
    heat->add_option("--profile", profile_name, "'abel' or a profile JSON path");
    heat->add_flag("--predict-only", predict_only, "skip the actual run");

    auto* bench = app.add_subcommand("bench", "Measure this machine's bandwidth/latency");
    int bench_threads = 1, bench_reps = 5;
    std::size_t bench_mib = 128;
    bench->add_option("--threads", bench_threads, "concurrent measurement threads");
    bench->add_option("--buffer-mib", bench_mib, "per-thread buffer size in MiB");
    bench->add_option("--repetitions", bench_reps, "repetitions, best one counts");
    bench->add_option("--out", out_path, "write the measured profile JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_out, gen_n, gen_rnz, gen_bw, gen_seed);
        if (analyze->parsed())
            return run_analyze(matrix_path, r_nz_override, blocksize, threads, threads_per_node,
                               strategy, out_path);
        if (runc->parsed())
            return run_run(matrix_path, r_nz_override, blocksize, threads, threads_per_node,
                           strategy, iterations, out_path);
        if (predict_cmd->parsed())
            return run_predict(matrix_path, r_nz_override, blocksize, threads, threads_per_node,
                               strategy, iterations, profile_name, format, out_path);
        if (compare->parsed())
            return run_compare(matrix_path, r_nz_override, blocksize, threads, threads_per_node,
                               strategy, profile_name);
        if (heat->parsed())
            return run_heat(heat_M, heat_N, parse_grid(pgrid), heat_steps, threads_per_node,
                            profile_name, predict_only);
        if (bench->parsed()) return run_bench(bench_threads, bench_mib, bench_reps, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
