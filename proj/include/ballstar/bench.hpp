// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "datagen.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "search.hpp"

namespace ballstar {

enum class QueryMode { range, knn, cnn };

inline const char* to_string(QueryMode m) {
    switch (m) {
        case QueryMode::range: return "range";
        case QueryMode::knn: return "knn";
        case QueryMode::cnn: return "cnn";
    }
    return "?";
}

inline QueryMode query_mode_from_string(const std::string& s) {
    if (s == "range") return QueryMode::range;
    if (s == "knn") return QueryMode::knn;
    if (s == "cnn") return QueryMode::cnn;
    throw std::invalid_argument("unknown query mode: " + s);
}

/// One query workload. A missing radius for range/cnn is calibrated from the
/// data before replay.
struct Workload {
    QueryMode mode = QueryMode::knn;
    std::size_t k = 10;
    std::optional<double> radius;

    bool operator==(const Workload&) const = default;
};

struct BenchConfig {
    GenSpec dataset;
    std::vector<Splitter> indexes{Splitter::moore, Splitter::pca, Splitter::kd};
    SplitConfig split;  // `splitter` is overridden per index
    std::vector<Workload> workloads;  // empty: build statistics only
    std::size_t query_count = 1000;
    std::uint64_t query_seed = 7;
    std::optional<Bounds> query_bounds;
    std::size_t repetitions = 3;
    bool parallel = false;
    double calibration_factor = 5.0;  // target mean range size = factor * K

    bool operator==(const BenchConfig&) const = default;

    void validate() const {
        split.validate();
        if (indexes.empty()) throw std::invalid_argument("BenchConfig: no indexes requested");
        if (query_count < 1) throw std::invalid_argument("BenchConfig: query count must be >= 1");
        if (repetitions < 1) throw std::invalid_argument("BenchConfig: repetitions must be >= 1");
        for (const auto& w : workloads) {
            if (w.mode != QueryMode::range && w.k < 1) throw std::invalid_argument("BenchConfig: K must be >= 1");
            if (w.radius && !(*w.radius >= 0.0)) throw std::invalid_argument("BenchConfig: radius must be >= 0");
        }
    }
};

struct IndexReport {
    Splitter index = Splitter::pca;
    double avg_depth = 0.0;
    std::size_t node_count = 0;
    std::size_t leaf_count = 0;
    std::size_t max_depth = 0;
    double build_time_us = 0.0;

    bool operator==(const IndexReport&) const = default;
};

struct WorkloadReport {
    Splitter index = Splitter::pca;
    QueryMode mode = QueryMode::knn;
    std::size_t k = 0;
    double radius = 0.0;
    std::size_t queries = 0;
    double avg_visited_nodes = 0.0;
    double avg_query_time_us = 0.0;
    double total_time_us = 0.0;
    std::uint64_t checksum = 0;

    bool operator==(const WorkloadReport&) const = default;
};

struct BenchReport {
    BenchConfig config;
    std::string dataset;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::uint64_t query_seed = 0;
    std::string timestamp;
    std::optional<double> calibrated_radius;
    std::vector<IndexReport> indexes;
    std::vector<WorkloadReport> workloads;

    bool operator==(const BenchReport&) const = default;
};

/// Raised when two indexes disagree on a workload's results.
struct ExactnessViolation : std::runtime_error {
    std::size_t query;
    ExactnessViolation(std::size_t query_id, const std::string& what) : std::runtime_error(what), query(query_id) {}
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Distance quantised to 1e-9; very large values fall back to their bit pattern.
inline std::uint64_t quantise(double distance) {
    const double scaled = distance * 1e9;
    if (scaled < 9.0e18) return static_cast<std::uint64_t>(std::llround(scaled));
    return std::bit_cast<std::uint64_t>(distance);
}

}  // namespace detail

/// Order-independent digest of one query's hits.
inline std::uint64_t hits_digest(std::size_t query_id, std::span<const Hit> hits) {
    std::uint64_t sum = 0;
    for (const auto& h : hits) {
        std::uint64_t x = detail::mix64(query_id + 0x9e3779b97f4a7c15ULL);
        x = detail::mix64(x ^ h.index);
        x = detail::mix64(x ^ detail::quantise(h.distance));
        sum += x;
    }
    return sum;
}

/// First query on which two digest sequences differ.
inline std::optional<std::size_t> first_divergence(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return i;
    }
    if (a.size() != b.size()) return n;
    return std::nullopt;
}

inline QueryResult run_query(const Tree& tree, PointView q, const Workload& w, double radius) {
    switch (w.mode) {
        case QueryMode::range: return range_search(tree, q, radius);
        case QueryMode::knn: return knn_search(tree, q, w.k);
        case QueryMode::cnn: return constrained_nn(tree, q, w.k, radius);
    }
    throw std::invalid_argument("run_query: unknown mode");
}

/**
 * Radius whose mean range-result size over `queries` is about factor * K.
 * Starts from the 1st percentile of sampled pairwise distances, doubles until
 * the target is bracketed, then bisects.
 */
inline double calibrate_radius(const Tree& tree, const Dataset& queries, std::size_t k, double factor,
                               std::uint64_t seed) {
    const Dataset& data = tree.dataset();
    const double target = factor * static_cast<double>(k);
    const std::size_t probe_count = std::min<std::size_t>(queries.size(), 200);

    auto mean_count = [&](double r) {
        std::size_t total = 0;
        for (Index i = 0; i < probe_count; ++i) total += range_search(tree, queries[i], r).hits.size();
        return static_cast<double>(total) / static_cast<double>(probe_count);
    };

    const Bounds box = bounding_box(data);
    double diagonal = 0.0;
    for (std::size_t j = 0; j < box.dim(); ++j) diagonal += (box.high[j] - box.low[j]) * (box.high[j] - box.low[j]);
    diagonal = std::sqrt(diagonal);
    if (!(diagonal > 0.0)) return 0.0;

    Rng rng(seed ^ 0x5ca1ab1eULL);
    std::vector<double> pair_distances;
    const std::size_t pairs = data.size() > 1 ? 2000 : 0;
    for (std::size_t p = 0; p < pairs; ++p) {
        const Index a = rng.below(data.size());
        const Index b = rng.below(data.size());
        if (a != b) pair_distances.push_back(distance(data[a], data[b]));
    }
    double hi = diagonal * 1e-6;
    if (!pair_distances.empty()) {
        const std::size_t pct = pair_distances.size() / 100;
        std::nth_element(pair_distances.begin(), pair_distances.begin() + static_cast<std::ptrdiff_t>(pct),
                         pair_distances.end());
        hi = std::max(hi, pair_distances[pct]);
    }

    double lo = 0.0;
    while (mean_count(hi) < target) {
        if (hi > 4.0 * diagonal) return hi;
        lo = hi;
        hi *= 2.0;
    }
    for (int step = 0; step < 40; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double count = mean_count(mid);
        if (std::abs(count - target) <= 0.02 * target) return mid;
        (count < target ? lo : hi) = mid;
    }
    return hi;
}

struct ReplayOutcome {
    double avg_visited = 0.0;
    std::chrono::nanoseconds total{0};
    std::vector<std::uint64_t> digests;
};

/// Runs every query once. With `parallel`, queries are spread over hardware
/// threads and `total` is wall time.
inline ReplayOutcome replay(const Tree& tree, const Dataset& queries, const Workload& w, double radius,
                            bool parallel) {
    ReplayOutcome out;
    out.digests.assign(queries.size(), 0);
    std::vector<std::size_t> visited(queries.size(), 0);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
            const QueryResult res = run_query(tree, queries[qi], w, radius);
            visited[qi] = res.visited_nodes;
            out.digests[qi] = hits_digest(qi, res.hits);
        }
    };

    const auto started = std::chrono::steady_clock::now();
    const std::size_t workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1;
    if (workers == 1) {
        run_range(0, queries.size());
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (queries.size() + workers - 1) / workers;
        for (std::size_t t = 0; t < workers; ++t) {
            const std::size_t b = std::min(queries.size(), t * chunk);
            const std::size_t e = std::min(queries.size(), b + chunk);
            if (b < e) threads.emplace_back(run_range, b, e);
        }
        for (auto& th : threads) th.join();
    }
    out.total = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);

    double sum = 0.0;
    for (auto v : visited) sum += static_cast<double>(v);
    out.avg_visited = sum / static_cast<double>(queries.size());
    return out;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string dataset_label(const GenSpec& spec) {
    return spec.family == Family::csv ? spec.path : to_string(spec.family);
}

inline double to_us(std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) / 1000.0; }

/**
 * Builds each requested index over the same dataset, replays an identical
 * query sequence against each one and aggregates depth, visit and timing
 * metrics. Query timings are the median over `repetitions` replays.
 *
 * Throws ExactnessViolation if any two indexes disagree on a query.
 */
inline BenchReport run_benchmark(const BenchConfig& config, std::shared_ptr<const Dataset> data) {
    config.validate();
    BenchReport report;
    report.config = config;
    report.dataset = dataset_label(config.dataset);
    report.n = data->size();
    report.dim = data->dim();
    report.seed = config.dataset.seed;
    report.query_seed = config.query_seed;
    report.timestamp = utc_timestamp();

    std::vector<Tree> trees;
    for (Splitter s : config.indexes) {
        SplitConfig sc = config.split;
        sc.splitter = s;
        trees.push_back(build_tree(data, sc));
        const Tree& t = trees.back();
        report.indexes.push_back(IndexReport{s, t.stats.avg_depth, t.stats.node_count, t.stats.leaf_count,
                                             t.stats.max_depth, to_us(t.stats.build_time)});
    }
    if (config.workloads.empty()) return report;

    const Dataset queries = config.query_bounds ? gen_uniform_queries(config.query_count, *config.query_bounds, config.query_seed)
                                                : gen_uniform_queries(config.query_count, *data, config.query_seed);
    require_same_dim(queries.dim(), data->dim(), "run_benchmark queries");

    for (const Workload& w : config.workloads) {
        double radius = w.radius.value_or(0.0);
        if (w.mode != QueryMode::knn && !w.radius) {
            radius = calibrate_radius(trees.front(), queries, w.k, config.calibration_factor, config.query_seed);
            report.calibrated_radius = radius;
        }
        std::vector<std::uint64_t> reference;
        for (std::size_t t = 0; t < trees.size(); ++t) {
            std::vector<std::chrono::nanoseconds> totals;
            ReplayOutcome first;
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                ReplayOutcome outcome = replay(trees[t], queries, w, radius, config.parallel);
                totals.push_back(outcome.total);
                if (rep == 0) first = std::move(outcome);
            }
            std::nth_element(totals.begin(), totals.begin() + static_cast<std::ptrdiff_t>(totals.size() / 2), totals.end());
            const auto median = totals[totals.size() / 2];

            if (t == 0) {
                reference = first.digests;
            } else if (const auto qi = first_divergence(reference, first.digests)) {
                throw ExactnessViolation(*qi, std::string("exactness violation: ") + to_string(config.indexes[t]) +
                                                  " disagrees with " + to_string(config.indexes[0]) + " on " +
                                                  to_string(w.mode) + " query " + std::to_string(*qi));
            }
            std::uint64_t checksum = 0;
            for (auto d : first.digests) checksum += d;

            WorkloadReport wr;
            wr.index = config.indexes[t];
            wr.mode = w.mode;
            wr.k = w.mode == QueryMode::range ? 0 : w.k;
            wr.radius = w.mode == QueryMode::knn ? 0.0 : radius;
            wr.queries = queries.size();
            wr.avg_visited_nodes = first.avg_visited;
            wr.total_time_us = to_us(median);
            wr.avg_query_time_us = wr.total_time_us / static_cast<double>(queries.size());
            wr.checksum = checksum;
            report.workloads.push_back(wr);
        }
    }
    return report;
}

inline BenchReport run_benchmark(const BenchConfig& config) {
    return run_benchmark(config, std::make_shared<const Dataset>(generate(config.dataset)));
}

struct SweepPoint {
    std::size_t n = 0;
    double total_time_us = 0.0;
};

/// One benchmark per dataset size; each size regenerates data and queries.
inline std::vector<BenchReport> scalability_sweep(const BenchConfig& config, const std::vector<std::size_t>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("scalability_sweep: no sizes");
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("scalability_sweep: sizes must ascend");
    std::vector<BenchReport> reports;
    for (std::size_t n : sizes) {
        BenchConfig c = config;
        c.dataset.n = n;
        reports.push_back(run_benchmark(c));
    }
    return reports;
}

/// (N, total search time) of the first index and workload of each report.
inline std::vector<SweepPoint> sweep_series(const std::vector<BenchReport>& reports) {
    std::vector<SweepPoint> series;
    for (const auto& r : reports) {
        series.push_back({r.n, r.workloads.empty() ? 0.0 : r.workloads.front().total_time_us});
    }
    return series;
}

}  // namespace ballstar
