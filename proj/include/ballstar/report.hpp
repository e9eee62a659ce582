// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench.hpp"

namespace ballstar {

enum class ReportFormat { json, csv };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown report format: " + s);
}

/// Column order of the CSV report. Changing it breaks downstream tooling.
inline constexpr const char* report_csv_header =
    "dataset,n,dim,index,mode,k,radius,queries,avg_depth,node_count,leaf_count,max_depth,"
    "build_time_us,avg_visited_nodes,avg_query_time_us,total_time_us,checksum";

namespace detail {

using nlohmann::json;

inline std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json to_json(const GenSpec& g) {
    json j{{"family", to_string(g.family)}, {"n", g.n}, {"dim", g.dim}, {"seed", g.seed}};
    if (g.family == Family::csv) {
        j["path"] = g.path;
        j["skip_header"] = g.csv.skip_header;
        j["columns"] = g.csv.columns;
        if (g.sample) j["sample"] = *g.sample;
    }
    return j;
}

inline GenSpec gen_spec_from_json(const json& j) {
    GenSpec g;
    g.family = family_from_string(j.at("family").get<std::string>());
    g.n = j.at("n").get<std::size_t>();
    g.dim = j.at("dim").get<std::size_t>();
    g.seed = j.at("seed").get<std::uint64_t>();
    if (g.family == Family::csv) {
        g.path = j.at("path").get<std::string>();
        g.csv.skip_header = j.at("skip_header").get<bool>();
        g.csv.columns = j.at("columns").get<std::vector<std::size_t>>();
        if (j.contains("sample")) g.sample = j.at("sample").get<std::size_t>();
    }
    return g;
}

inline json to_json(const BenchConfig& c) {
    json indexes = json::array();
    for (auto s : c.indexes) indexes.push_back(to_string(s));
    json workloads = json::array();
    for (const auto& w : c.workloads) {
        json wj{{"mode", to_string(w.mode)}, {"k", w.k}};
        wj["radius"] = w.radius ? json(*w.radius) : json(nullptr);
        workloads.push_back(wj);
    }
    json j{{"dataset", to_json(c.dataset)},
           {"indexes", indexes},
           {"split",
            {{"alpha", c.split.alpha},
             {"sections", c.split.sections},
             {"leaf_capacity", c.split.leaf_capacity},
             {"f2", to_string(c.split.f2_variant)}}},
           {"workloads", workloads},
           {"query_count", c.query_count},
           {"query_seed", c.query_seed},
           {"repetitions", c.repetitions},
           {"parallel", c.parallel},
           {"calibration_factor", c.calibration_factor}};
    j["query_bounds"] = c.query_bounds ? json{{"low", c.query_bounds->low}, {"high", c.query_bounds->high}} : json(nullptr);
    return j;
}

inline BenchConfig config_from_json(const json& j) {
    BenchConfig c;
    c.dataset = gen_spec_from_json(j.at("dataset"));
    c.indexes.clear();
    for (const auto& s : j.at("indexes")) c.indexes.push_back(splitter_from_string(s.get<std::string>()));
    const auto& sp = j.at("split");
    c.split.alpha = sp.at("alpha").get<double>();
    c.split.sections = sp.at("sections").get<std::size_t>();
    c.split.leaf_capacity = sp.at("leaf_capacity").get<std::size_t>();
    c.split.f2_variant = f2_variant_from_string(sp.at("f2").get<std::string>());
    for (const auto& wj : j.at("workloads")) {
        Workload w;
        w.mode = query_mode_from_string(wj.at("mode").get<std::string>());
        w.k = wj.at("k").get<std::size_t>();
        if (!wj.at("radius").is_null()) w.radius = wj.at("radius").get<double>();
        c.workloads.push_back(w);
    }
    c.query_count = j.at("query_count").get<std::size_t>();
    c.query_seed = j.at("query_seed").get<std::uint64_t>();
    c.repetitions = j.at("repetitions").get<std::size_t>();
    c.parallel = j.at("parallel").get<bool>();
    c.calibration_factor = j.at("calibration_factor").get<double>();
    if (!j.at("query_bounds").is_null()) {
        c.query_bounds = Bounds{j["query_bounds"].at("low").get<std::vector<double>>(),
                                j["query_bounds"].at("high").get<std::vector<double>>()};
    }
    return c;
}

}  // namespace detail

/// JSON document for a report. With `include_timing` false the timestamp and
/// every duration field are omitted, leaving only reproducible content.
inline nlohmann::json report_to_json(const BenchReport& r, bool include_timing = true) {
    using nlohmann::json;
    json indexes = json::array();
    for (const auto& ix : r.indexes) {
        json j{{"index", to_string(ix.index)},
               {"avg_depth", ix.avg_depth},
               {"node_count", ix.node_count},
               {"leaf_count", ix.leaf_count},
               {"max_depth", ix.max_depth}};
        if (include_timing) j["build_time_us"] = ix.build_time_us;
        indexes.push_back(j);
    }
    json workloads = json::array();
    for (const auto& w : r.workloads) {
        json j{{"index", to_string(w.index)},
               {"mode", to_string(w.mode)},
               {"k", w.k},
               {"radius", w.radius},
               {"queries", w.queries},
               {"avg_visited_nodes", w.avg_visited_nodes},
               {"checksum", detail::hex64(w.checksum)}};
        if (include_timing) {
            j["avg_query_time_us"] = w.avg_query_time_us;
            j["total_time_us"] = w.total_time_us;
        }
        workloads.push_back(j);
    }
    json env{{"seed", r.seed}, {"query_seed", r.query_seed}, {"config", detail::to_json(r.config)}};
    env["calibrated_radius"] = r.calibrated_radius ? json(*r.calibrated_radius) : json(nullptr);
    if (include_timing) env["timestamp"] = r.timestamp;
    return json{{"dataset", {{"name", r.dataset}, {"n", r.n}, {"dim", r.dim}}},
                {"environment", env},
                {"indexes", indexes},
                {"workloads", workloads}};
}

inline BenchReport report_from_json(const nlohmann::json& j) {
    BenchReport r;
    r.dataset = j.at("dataset").at("name").get<std::string>();
    r.n = j.at("dataset").at("n").get<std::size_t>();
    r.dim = j.at("dataset").at("dim").get<std::size_t>();
    const auto& env = j.at("environment");
    r.seed = env.at("seed").get<std::uint64_t>();
    r.query_seed = env.at("query_seed").get<std::uint64_t>();
    r.config = detail::config_from_json(env.at("config"));
    if (!env.at("calibrated_radius").is_null()) r.calibrated_radius = env.at("calibrated_radius").get<double>();
    r.timestamp = env.value("timestamp", "");
    for (const auto& ij : j.at("indexes")) {
        IndexReport ix;
        ix.index = splitter_from_string(ij.at("index").get<std::string>());
        ix.avg_depth = ij.at("avg_depth").get<double>();
        ix.node_count = ij.at("node_count").get<std::size_t>();
        ix.leaf_count = ij.at("leaf_count").get<std::size_t>();
        ix.max_depth = ij.at("max_depth").get<std::size_t>();
        ix.build_time_us = ij.value("build_time_us", 0.0);
        r.indexes.push_back(ix);
    }
    for (const auto& wj : j.at("workloads")) {
        WorkloadReport w;
        w.index = splitter_from_string(wj.at("index").get<std::string>());
        w.mode = query_mode_from_string(wj.at("mode").get<std::string>());
        w.k = wj.at("k").get<std::size_t>();
        w.radius = wj.at("radius").get<double>();
        w.queries = wj.at("queries").get<std::size_t>();
        w.avg_visited_nodes = wj.at("avg_visited_nodes").get<double>();
        w.checksum = detail::parse_hex64(wj.at("checksum").get<std::string>());
        w.avg_query_time_us = wj.value("avg_query_time_us", 0.0);
        w.total_time_us = wj.value("total_time_us", 0.0);
        r.workloads.push_back(w);
    }
    return r;
}

/**
 * CSV report: the header row above, then one row per (index, workload). A
 * report without workloads gets one row per index with mode "stats" and empty
 * workload columns. Timing columns are left empty when `include_timing` is false.
 */
inline void write_report_csv(const BenchReport& r, std::ostream& out, bool include_timing = true) {
    using detail::num;
    out << report_csv_header << '\n';
    auto index_columns = [&](Splitter s) {
        for (const auto& ix : r.indexes) {
            if (ix.index != s) continue;
            return num(ix.avg_depth) + ',' + std::to_string(ix.node_count) + ',' + std::to_string(ix.leaf_count) + ',' +
                   std::to_string(ix.max_depth) + ',' + (include_timing ? num(ix.build_time_us) : "");
        }
        return std::string(",,,,");
    };
    const std::string prefix = r.dataset + ',' + std::to_string(r.n) + ',' + std::to_string(r.dim) + ',';
    if (r.workloads.empty()) {
        for (const auto& ix : r.indexes) {
            out << prefix << to_string(ix.index) << ",stats,,,," << index_columns(ix.index) << ",,,,\n";
        }
        return;
    }
    for (const auto& w : r.workloads) {
        out << prefix << to_string(w.index) << ',' << to_string(w.mode) << ',' << w.k << ',' << num(w.radius) << ','
            << w.queries << ',' << index_columns(w.index) << ',' << num(w.avg_visited_nodes) << ','
            << (include_timing ? num(w.avg_query_time_us) : "") << ',' << (include_timing ? num(w.total_time_us) : "")
            << ',' << detail::hex64(w.checksum) << '\n';
    }
}

inline void emit_report(const BenchReport& r, ReportFormat format, std::ostream& out, bool include_timing = true) {
    if (format == ReportFormat::json) {
        out << report_to_json(r, include_timing).dump(2) << '\n';
    } else {
        write_report_csv(r, out, include_timing);
    }
}

inline void emit_report(const BenchReport& r, ReportFormat format, const std::string& path, bool include_timing = true) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report to '" + path + "'");
    emit_report(r, format, out, include_timing);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Several reports (a sweep) as one JSON array or one CSV table.
inline void emit_reports(const std::vector<BenchReport>& reports, ReportFormat format, std::ostream& out,
                         bool include_timing = true) {
    if (format == ReportFormat::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(report_to_json(r, include_timing));
        out << arr.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::ostringstream one;
        write_report_csv(reports[i], one, include_timing);
        std::string body = one.str();
        if (i > 0) body.erase(0, body.find('\n') + 1);
        out << body;
    }
}

}  // namespace ballstar
