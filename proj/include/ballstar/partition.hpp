// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"
#include "pca.hpp"

namespace ballstar {

/// How the radius-evenness term of the split objective is measured.
enum class F2Variant {
    linear,  ///< (t_c - t_min) / (t_max - t_min)
    midpoint,  ///< |t_c - (t_min + t_max) / 2| / (t_max - t_min)
};

inline const char* to_string(F2Variant v) { return v == F2Variant::midpoint ? "midpoint" : "linear"; }

inline F2Variant f2_variant_from_string(const std::string& s) {
    if (s == "midpoint") return F2Variant::midpoint;
    if (s == "linear") return F2Variant::linear;
    throw std::invalid_argument("unknown f2 variant: " + s);
}

struct SplitConfig {
    Splitter splitter = Splitter::pca;
    double alpha = 0.5;
    std::size_t sections = 32;
    std::size_t leaf_capacity = 1;
    F2Variant f2_variant = F2Variant::midpoint;

    bool operator==(const SplitConfig&) const = default;

    void validate() const {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("SplitConfig: alpha must be >= 0");
        if (sections < 1) throw std::invalid_argument("SplitConfig: sections must be >= 1");
        if (leaf_capacity < 1) throw std::invalid_argument("SplitConfig: leaf_capacity must be >= 1");
    }
};

struct SplitOutcome {
    std::vector<Index> left;
    std::vector<Index> right;
    std::optional<double> threshold;
    std::optional<std::pair<Index, Index>> pivots;
};

/**
 * Moore ball-tree split. The left pivot is the point farthest from the
 * centroid, the right pivot the point farthest from the left pivot; every point
 * joins the nearer pivot, with ties going left. Farthest-point ties resolve
 * to the smallest dataset index.
 *
 * Returns nullopt when all points coincide.
 */
inline std::optional<SplitOutcome> split_moore(const Dataset& data, std::span<const Index> indices) {
    if (indices.size() < 2) return std::nullopt;
    const Ball centroid_ball = bounding_ball(data, indices);

    auto farthest_from = [&](PointView from) {
        Index best = indices.front();
        double best_sq = -1.0;
        for (Index i : indices) {
            const double sq = squared_distance(from, data[i]);
            if (sq > best_sq || (sq == best_sq && i < best)) {
                best = i;
                best_sq = sq;
            }
        }
        return std::pair{best, best_sq};
    };

    const Index left_pivot = farthest_from(centroid_ball.center).first;
    const auto [right_pivot, spread_sq] = farthest_from(data[left_pivot]);
    if (!(spread_sq > 0.0)) return std::nullopt;

    SplitOutcome out;
    out.pivots = std::pair{left_pivot, right_pivot};
    for (Index i : indices) {
        const double to_left = squared_distance(data[i], data[left_pivot]);
        const double to_right = squared_distance(data[i], data[right_pivot]);
        (to_left <= to_right ? out.left : out.right).push_back(i);
    }
    return out;
}

/**
 * Picks the splitting threshold on the projected axis. Candidates are the
 * midpoints of S equal sections of [t_min, t_max]; the one with the smallest
 *   |N2 - N1| / N + alpha * f2(t_c)
 * wins, where N1 counts values below t_c. Ties go to the candidate nearest the
 * median of the values, then to the smaller candidate.
 *
 * Returns nullopt when the projection has zero extent.
 */
inline std::optional<double> choose_threshold(const Projection& proj, double alpha, std::size_t sections,
                                              F2Variant f2_variant) {
    const std::size_t n = proj.values.size();
    const double width = proj.t_max - proj.t_min;
    if (n < 2 || !(width > 0.0) || sections < 1) return std::nullopt;

    std::vector<double> sorted = proj.values;
    std::sort(sorted.begin(), sorted.end());
    const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double mid = 0.5 * (proj.t_min + proj.t_max);

    double best_t = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sections; ++s) {
        const double t = proj.t_min + (static_cast<double>(s) + 0.5) * width / static_cast<double>(sections);
        const auto below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
        const double above = static_cast<double>(n) - below;
        const double f1 = std::abs(above - below) / static_cast<double>(n);
        const double f2 = f2_variant == F2Variant::linear ? (t - proj.t_min) / width : std::abs(t - mid) / width;
        const double f = f1 + alpha * f2;
        const double gap = std::abs(t - median);
        if (f < best_f || (f == best_f && (gap < best_gap || (gap == best_gap && t < best_t)))) {
            best_f = f;
            best_gap = gap;
            best_t = t;
        }
    }
    return best_t;
}

/// Ball*-tree split along a given axis: left = {t_i >= t_c}, right = {t_i < t_c}.
inline std::optional<SplitOutcome> split_pca_along(const Dataset& data, std::span<const Index> indices,
                                                   const Direction& dir, const SplitConfig& config) {
    const Projection proj = project(data, indices, dir);
    const auto threshold = choose_threshold(proj, config.alpha, config.sections, config.f2_variant);
    if (!threshold) return std::nullopt;

    SplitOutcome out;
    out.threshold = *threshold;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        (proj.values[k] >= *threshold ? out.left : out.right).push_back(indices[k]);
    }
    if (out.left.empty() || out.right.empty()) return std::nullopt;
    return out;
}

/// Ball*-tree split: hyperplane perpendicular to the first principal component.
inline std::optional<SplitOutcome> split_pca(const Dataset& data, std::span<const Index> indices,
                                             const SplitConfig& config) {
    if (indices.size() < 2) return std::nullopt;
    const auto dir = principal_direction(data, indices);
    if (!dir) return std::nullopt;
    return split_pca_along(data, indices, *dir, config);
}

/// KD baseline: median split on the coordinate with the largest spread.
inline std::optional<SplitOutcome> split_kd(const Dataset& data, std::span<const Index> indices) {
    if (indices.size() < 2) return std::nullopt;
    const std::size_t d = data.dim();
    std::size_t axis = 0;
    double best_spread = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Index i : indices) {
            lo = std::min(lo, data[i][j]);
            hi = std::max(hi, data[i][j]);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = j;
        }
    }
    if (!(best_spread > 0.0)) return std::nullopt;

    std::vector<Index> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end(), [&](Index a, Index b) {
        const double va = data[a][axis];
        const double vb = data[b][axis];
        return va < vb || (va == vb && a < b);
    });
    const std::size_t half = sorted.size() / 2;
    SplitOutcome out;
    out.threshold = data[sorted[half]][axis];
    out.left.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half));
    out.right.assign(sorted.begin() + static_cast<std::ptrdiff_t>(half), sorted.end());
    return out;
}

inline std::optional<SplitOutcome> split(const Dataset& data, std::span<const Index> indices,
                                         const SplitConfig& config) {
    switch (config.splitter) {
        case Splitter::moore: return split_moore(data, indices);
        case Splitter::pca: return split_pca(data, indices, config);
        case Splitter::kd: return split_kd(data, indices);
    }
    return std::nullopt;
}

struct TreeStats {
    double avg_depth = 0.0;
    std::size_t node_count = 0;
    std::size_t leaf_count = 0;
    std::size_t max_depth = 0;
};

inline TreeStats tree_stats(const Tree& tree) {
    TreeStats s;
    s.node_count = tree.nodes.size();
    std::size_t depth_sum = 0;
    for (const auto& node : tree.nodes) {
        if (!node.is_leaf()) continue;
        ++s.leaf_count;
        depth_sum += node.depth;
        s.max_depth = std::max<std::size_t>(s.max_depth, node.depth);
    }
    if (s.leaf_count > 0) s.avg_depth = static_cast<double>(depth_sum) / static_cast<double>(s.leaf_count);
    return s;
}

/**
 * Top-down construction. Any slice larger than leaf_capacity is split with
 * the configured splitter; a degenerate split ends the branch in a leaf even
 * above capacity.
 */
inline Tree build_tree(std::shared_ptr<const Dataset> data, const SplitConfig& config) {
    config.validate();
    if (!data || data->empty()) throw std::invalid_argument("build_tree: empty dataset");
    const auto started = std::chrono::steady_clock::now();

    Tree tree;
    tree.data = data;
    tree.splitter = config.splitter;
    tree.order.resize(data->size());
    std::iota(tree.order.begin(), tree.order.end(), Index{0});

    tree.nodes.push_back(Node{{}, -1, -1, 0, 0, data->size()});
    std::vector<std::size_t> pending{0};
    while (!pending.empty()) {
        const std::size_t id = pending.back();
        pending.pop_back();
        const std::size_t begin = tree.nodes[id].begin;
        const std::size_t end = tree.nodes[id].end;
        const std::uint32_t depth = tree.nodes[id].depth;
        const auto slice = std::span<const Index>(tree.order).subspan(begin, end - begin);
        tree.nodes[id].ball = bounding_ball(*data, slice);

        if (slice.size() <= config.leaf_capacity) continue;
        auto outcome = split(*data, slice, config);
        if (!outcome) continue;

        const std::size_t cut = begin + outcome->left.size();
        std::copy(outcome->left.begin(), outcome->left.end(), tree.order.begin() + static_cast<std::ptrdiff_t>(begin));
        std::copy(outcome->right.begin(), outcome->right.end(), tree.order.begin() + static_cast<std::ptrdiff_t>(cut));

        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(Node{{}, -1, -1, depth + 1, begin, cut});
        tree.nodes.push_back(Node{{}, -1, -1, depth + 1, cut, end});
        tree.nodes[id].left = left_id;
        tree.nodes[id].right = left_id + 1;
        pending.push_back(static_cast<std::size_t>(left_id + 1));
        pending.push_back(static_cast<std::size_t>(left_id));
    }

    const TreeStats s = tree_stats(tree);
    tree.stats.node_count = s.node_count;
    tree.stats.leaf_count = s.leaf_count;
    tree.stats.max_depth = s.max_depth;
    tree.stats.avg_depth = s.avg_depth;
    tree.stats.build_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    return tree;
}

inline Tree build_tree(const Dataset& data, const SplitConfig& config) {
    return build_tree(std::make_shared<const Dataset>(data), config);
}

}  // namespace ballstar
