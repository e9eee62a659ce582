// SPDX-License-Identifier: Apache-2.0
//
// ballstar command-line frontend: dataset generation, index statistics,
// single queries, benchmarks and scalability sweeps.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 exactness violation.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ballstar/ballstar.hpp>

namespace {

using namespace ballstar;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;
constexpr int exit_exactness = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
    }
}

std::size_t parse_count(const std::string& s, const char* what) {
    const double v = parse_real(s, what);
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

/// Options naming where points come from: a CSV file or a generator.
struct DataOptions {
    std::string data;
    std::string family;
    std::size_t n = 1000;
    std::size_t dim = 2;
    std::uint64_t seed = 1;
    bool skip_header = false;
    std::vector<std::size_t> columns;
    std::size_t sample = 0;

    void add_to(CLI::App& cmd, bool allow_family) {
        cmd.add_option("--data", data, "CSV file with one point per row");
        if (allow_family) {
            cmd.add_option("--family", family, "generator: latin_center | highleyman | lithuanian | sobol");
            cmd.add_option("--n", n, "number of generated points");
            cmd.add_option("--dim", dim, "dimension of generated points");
        }
        cmd.add_option("--seed", seed, "generator / sampling seed");
        cmd.add_flag("--skip-header", skip_header, "ignore the first CSV row");
        cmd.add_option("--columns", columns, "CSV columns to keep (0-based)")->delimiter(',');
        cmd.add_option("--sample", sample, "keep this many random CSV rows");
    }

    GenSpec spec() const {
        GenSpec g;
        if (!data.empty() && !family.empty()) throw UsageError("use either --data or --family, not both");
        if (data.empty() && family.empty()) throw UsageError("one of --data or --family is required");
        if (!data.empty()) {
            g.family = Family::csv;
            g.path = data;
            g.csv.skip_header = skip_header;
            g.csv.columns = columns;
            if (sample > 0) g.sample = sample;
        } else {
            g.family = family_from_string(family);
            if (g.family == Family::csv) throw UsageError("use --data for CSV input");
        }
        g.n = n;
        g.dim = dim;
        g.seed = seed;
        return g;
    }
};

/// Flags mirroring SplitConfig.
struct SplitOptions {
    double alpha = 0.5;
    std::size_t sections = 32;
    std::size_t leaf_size = 1;
    std::string f2 = "midpoint";

    void add_to(CLI::App& cmd) {
        cmd.add_option("--alpha", alpha, "workload-awareness weight of the split objective")->capture_default_str();
        cmd.add_option("--sections", sections, "candidate thresholds per split")->capture_default_str();
        cmd.add_option("--leaf-size", leaf_size, "maximum points per leaf")->capture_default_str();
        cmd.add_option("--f2", f2, "radius objective: midpoint | linear")->capture_default_str();
    }

    SplitConfig config(Splitter s) const {
        SplitConfig c;
        c.splitter = s;
        c.alpha = alpha;
        c.sections = sections;
        c.leaf_capacity = leaf_size;
        c.f2_variant = f2_variant_from_string(f2);
        c.validate();
        return c;
    }
};

std::vector<Splitter> parse_indexes(const std::string& s) {
    std::vector<Splitter> out;
    for (const auto& name : split_list(s)) out.push_back(splitter_from_string(name));
    if (out.empty()) throw UsageError("no indexes given");
    return out;
}

/// "K" or "K,r"
std::pair<std::size_t, std::optional<double>> parse_cnn(const std::string& s) {
    const auto parts = split_list(s);
    if (parts.empty() || parts.size() > 2) throw UsageError("--cnn expects K or K,r");
    std::optional<double> r;
    if (parts.size() == 2) {
        r = parse_real(parts[1], "radius");
        if (!(*r >= 0.0)) throw UsageError("radius must be >= 0");
    }
    return {parse_count(parts[0], "K"), r};
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// gen ---------------------------------------------------------------------

struct GenOptions {
    std::string family;
    std::size_t n = 0;
    std::size_t dim = 2;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen(const GenOptions& o) {
    GenSpec g;
    g.family = family_from_string(o.family);
    if (g.family == Family::csv) throw UsageError("gen cannot produce the csv family");
    if (o.n < 1) throw UsageError("--n must be >= 1");
    g.n = o.n;
    g.dim = o.dim;
    g.seed = o.seed;
    const Dataset data = generate(g);
    write_csv(data, o.out);
    std::cout << "wrote " << data.size() << " rows x " << data.dim() << " columns (" << to_string(g.family)
              << ") to " << o.out << '\n';
    return exit_ok;
}

// build-stats ---------------------------------------------------------------

int cmd_build_stats(const DataOptions& d, const SplitOptions& s, const std::string& indexes) {
    const auto data = std::make_shared<const Dataset>(generate(d.spec()));
    std::cout << "dataset: " << data->size() << " points, dim " << data->dim() << '\n';
    for (Splitter ix : parse_indexes(indexes)) {
        const Tree tree = build_tree(data, s.config(ix));
        const auto& st = tree.stats;
        std::cout << to_string(ix) << ": avg_depth " << format_real(st.avg_depth) << ", nodes " << st.node_count
                  << ", leaves " << st.leaf_count << ", max_depth " << st.max_depth << ", build "
                  << format_real(static_cast<double>(st.build_time.count()) / 1e6) << " ms\n";
    }
    return exit_ok;
}

// query ---------------------------------------------------------------------

struct QueryOptions {
    std::string index = "pca";
    std::string range;
    std::size_t knn = 0;
    std::string cnn;
    std::string point;
    bool verify = false;
};

int cmd_query(const DataOptions& d, const SplitOptions& s, const QueryOptions& o) {
    const int modes = (o.range.empty() ? 0 : 1) + (o.knn > 0 ? 1 : 0) + (o.cnn.empty() ? 0 : 1);
    if (modes != 1) throw UsageError("exactly one of --range, --knn, --cnn is required");
    if (!d.family.empty()) throw UsageError("query reads points from --data");

    std::vector<double> q;
    for (const auto& c : split_list(o.point)) q.push_back(parse_real(c, "coordinate"));

    const auto data = std::make_shared<const Dataset>(generate(d.spec()));
    if (q.size() != data->dim()) {
        throw UsageError("--point has " + std::to_string(q.size()) + " coordinates, data has dimension " +
                         std::to_string(data->dim()));
    }
    const Tree tree = build_tree(data, s.config(splitter_from_string(o.index)));

    QueryResult result;
    std::vector<Hit> expected;
    if (!o.range.empty()) {
        const double r = parse_real(o.range, "radius");
        if (!(r >= 0.0)) throw UsageError("--range must be >= 0");
        result = range_search(tree, q, r);
        if (o.verify) expected = oracle_range(*data, q, r);
    } else if (o.knn > 0) {
        result = knn_search(tree, q, o.knn);
        if (o.verify) expected = oracle_knn(*data, q, o.knn);
    } else {
        const auto [k, r] = parse_cnn(o.cnn);
        if (!r) throw UsageError("--cnn expects K,r");
        result = constrained_nn(tree, q, k, *r);
        if (o.verify) expected = oracle_constrained(*data, q, k, *r);
    }

    for (const auto& h : result.hits) std::cout << h.index << ' ' << format_real(h.distance) << '\n';
    std::cout << "hits " << result.hits.size() << ", visited_nodes " << result.visited_nodes << '\n';
    if (o.verify) {
        if (expected != result.hits) {
            std::cerr << "verification failed: index result differs from linear scan\n";
            return exit_exactness;
        }
        std::cout << "verified against linear scan\n";
    }
    return exit_ok;
}

// bench / sweep -------------------------------------------------------------

struct WorkloadOptions {
    std::string indexes = "moore,pca,kd";
    std::string range;
    std::size_t knn = 0;
    std::string cnn;
    std::string compare_modes;
    bool stats_only = false;
    std::size_t queries = 1000;
    std::uint64_t query_seed = 7;
    std::size_t repetitions = 3;
    double calibration_factor = 5.0;
    bool parallel = false;
    std::string out;
    std::string format = "json";

    void add_to(CLI::App& cmd) {
        cmd.add_option("--indexes", indexes, "comma list of moore, pca, kd")->capture_default_str();
        cmd.add_option("--range", range, "range workload radius ('auto' to calibrate)");
        cmd.add_option("--knn", knn, "K-NN workload with this K");
        cmd.add_option("--cnn", cnn, "constrained workload K[,r]; r calibrated when omitted");
        cmd.add_option("--compare-modes", compare_modes, "run several modes, e.g. knn,cnn");
        cmd.add_flag("--stats-only", stats_only, "build indexes and report tree statistics only");
        cmd.add_option("--queries", queries, "uniform queries per workload")->capture_default_str();
        cmd.add_option("--query-seed", query_seed, "query generator seed")->capture_default_str();
        cmd.add_option("--repetitions", repetitions, "timed replays; the median is reported")->capture_default_str();
        cmd.add_option("--calibration-factor", calibration_factor, "calibrated radius targets factor*K hits")
            ->capture_default_str();
        cmd.add_flag("--parallel", parallel, "replay queries on all hardware threads");
        cmd.add_option("--out", out, "report destination");
        cmd.add_option("--format", format, "json | csv")->capture_default_str();
    }

    std::vector<Workload> workloads() const {
        if (stats_only) return {};
        std::size_t k = 10;
        std::optional<double> radius;
        std::vector<QueryMode> modes;
        if (!range.empty()) {
            modes.push_back(QueryMode::range);
            if (range != "auto") {
                radius = parse_real(range, "radius");
                if (!(*radius >= 0.0)) throw UsageError("--range must be >= 0");
            }
        }
        if (knn > 0) {
            modes.push_back(QueryMode::knn);
            k = knn;
        }
        if (!cnn.empty()) {
            modes.push_back(QueryMode::cnn);
            const auto [ck, cr] = parse_cnn(cnn);
            k = ck;
            if (cr) radius = cr;
        }
        if (!compare_modes.empty()) {
            modes.clear();
            for (const auto& m : split_list(compare_modes)) modes.push_back(query_mode_from_string(m));
        }
        std::vector<Workload> out_workloads;
        for (QueryMode m : modes) out_workloads.push_back(Workload{m, k, m == QueryMode::knn ? std::nullopt : radius});
        return out_workloads;
    }
};

BenchConfig make_bench_config(const DataOptions& d, const SplitOptions& s, const WorkloadOptions& w) {
    BenchConfig c;
    c.dataset = d.spec();
    c.indexes = parse_indexes(w.indexes);
    c.split = s.config(Splitter::pca);
    c.workloads = w.workloads();
    c.query_count = w.queries;
    c.query_seed = w.query_seed;
    c.repetitions = w.repetitions;
    c.calibration_factor = w.calibration_factor;
    c.parallel = w.parallel;
    c.validate();
    return c;
}

void print_summary(const BenchReport& r) {
    std::cout << r.dataset << " n=" << r.n << " dim=" << r.dim;
    if (r.calibrated_radius) std::cout << " calibrated_radius=" << format_real(*r.calibrated_radius);
    std::cout << '\n';
    for (const auto& ix : r.indexes) {
        std::cout << "  " << to_string(ix.index) << ": avg_depth " << format_real(ix.avg_depth) << ", nodes "
                  << ix.node_count << ", build " << format_real(ix.build_time_us / 1000.0) << " ms";
        for (const auto& w : r.workloads) {
            if (w.index != ix.index) continue;
            std::cout << " | " << to_string(w.mode) << ": visited " << format_real(w.avg_visited_nodes) << ", total "
                      << format_real(w.total_time_us) << " us";
        }
        std::cout << '\n';
    }
}

int cmd_bench(const DataOptions& d, const SplitOptions& s, const WorkloadOptions& w) {
    const BenchConfig config = make_bench_config(d, s, w);
    const ReportFormat format = report_format_from_string(w.format);
    const BenchReport report = run_benchmark(config);
    print_summary(report);
    if (!w.out.empty()) emit_report(report, format, w.out);
    return exit_ok;
}

int cmd_sweep(const DataOptions& d, const SplitOptions& s, WorkloadOptions w, const std::string& sizes_arg) {
    std::vector<std::size_t> sizes;
    for (const auto& item : split_list(sizes_arg)) sizes.push_back(parse_count(item, "size"));
    if (sizes.empty()) throw UsageError("--sizes is required");
    if (w.range.empty() && w.knn == 0 && w.cnn.empty() && w.compare_modes.empty()) w.knn = 10;
    const BenchConfig config = make_bench_config(d, s, w);
    const ReportFormat format = report_format_from_string(w.format);
    const auto reports = scalability_sweep(config, sizes);
    for (const auto& p : sweep_series(reports)) {
        std::cout << "N=" << p.n << " total_search_time_us=" << format_real(p.total_time_us) << '\n';
    }
    if (!w.out.empty()) {
        std::ofstream out(w.out);
        if (!out) throw std::runtime_error("cannot write report to '" + w.out + "'");
        emit_reports(reports, format, out);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ballstar: ball-tree, ball*-tree and KD-tree exact nearest-neighbour indexes"};
    app.require_subcommand(1);

    GenOptions gen_opts;
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
    gen->add_option("--family", gen_opts.family, "latin_center | highleyman | lithuanian | sobol")->required();
    gen->add_option("--n", gen_opts.n, "number of points")->required();
    gen->add_option("--dim", gen_opts.dim, "dimension")->capture_default_str();
    gen->add_option("--seed", gen_opts.seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_opts.out, "output CSV path")->required();

    DataOptions stats_data;
    SplitOptions stats_split;
    std::string stats_indexes = "moore,pca,kd";
    auto* stats = app.add_subcommand("build-stats", "build indexes and print tree statistics");
    stats_data.add_to(*stats, true);
    stats_split.add_to(*stats);
    stats->add_option("--indexes", stats_indexes, "comma list of moore, pca, kd")->capture_default_str();

    DataOptions query_data;
    SplitOptions query_split;
    QueryOptions query_opts;
    auto* query = app.add_subcommand("query", "run one query against an index");
    query_data.add_to(*query, false);
    query_split.add_to(*query);
    query->add_option("--index", query_opts.index, "moore | pca | kd")->capture_default_str();
    query->add_option("--range", query_opts.range, "range query radius");
    query->add_option("--knn", query_opts.knn, "K nearest neighbours");
    query->add_option("--cnn", query_opts.cnn, "constrained K-NN as K,r");
    query->add_option("--point", query_opts.point, "query point c1,c2,...")->required();
    query->add_flag("--verify", query_opts.verify, "cross-check against a linear scan");

    DataOptions bench_data;
    SplitOptions bench_split;
    WorkloadOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "benchmark indexes on one dataset");
    bench_data.add_to(*bench, true);
    bench_split.add_to(*bench);
    bench_opts.add_to(*bench);

    DataOptions sweep_data;
    SplitOptions sweep_split;
    WorkloadOptions sweep_opts;
    sweep_opts.indexes = "pca";
    std::string sweep_sizes;
    auto* sweep = app.add_subcommand("sweep", "benchmark over increasing dataset sizes");
    sweep_data.add_to(*sweep, true);
    sweep_split.add_to(*sweep);
    sweep_opts.add_to(*sweep);
    sweep->add_option("--sizes", sweep_sizes, "ascending sizes, e.g. 1e3,1e4,1e5")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_opts);
        if (stats->parsed()) return cmd_build_stats(stats_data, stats_split, stats_indexes);
        if (query->parsed()) return cmd_query(query_data, query_split, query_opts);
        if (bench->parsed()) return cmd_bench(bench_data, bench_split, bench_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_data, sweep_split, sweep_opts, sweep_sizes);
    } catch (const ExactnessViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_exactness;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
