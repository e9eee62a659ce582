// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ballstar {

using Point = std::vector<double>;
using PointView = std::span<const double>;
using Index = std::size_t;

/// Slack added to a ball radius when testing containment or intersection.
inline double contain_epsilon(double radius) { return 1e-9 * (1.0 + radius); }

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

inline double squared_distance(PointView a, PointView b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

inline double distance(PointView a, PointView b) {
    require_same_dim(a.size(), b.size(), "distance");
    return std::sqrt(squared_distance(a, b));
}

/**
 * Immutable row-major point set. Row indices are the identities used by
 * every tree and query result built over it.
 */
class Dataset {
public:
    Dataset() = default;

    Dataset(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
        if (dim_ == 0) {
            throw std::invalid_argument("Dataset: dimension must be positive");
        }
        if (coords_.size() % dim_ != 0) {
            throw std::invalid_argument("Dataset: coordinate count is not a multiple of dim");
        }
        for (double c : coords_) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("Dataset: non-finite coordinate");
            }
        }
    }

    static Dataset from_points(const std::vector<Point>& points) {
        if (points.empty()) {
            throw std::invalid_argument("Dataset::from_points: need at least one point to infer dim");
        }
        const std::size_t dim = points.front().size();
        std::vector<double> coords;
        coords.reserve(points.size() * dim);
        for (const auto& p : points) {
            require_same_dim(p.size(), dim, "Dataset::from_points");
            coords.insert(coords.end(), p.begin(), p.end());
        }
        return Dataset(dim, std::move(coords));
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const { return size() == 0; }

    PointView operator[](Index i) const { return {coords_.data() + i * dim_, dim_}; }
    std::span<const double> coords() const { return coords_; }

    bool operator==(const Dataset&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

struct Ball {
    Point center;
    double radius = 0.0;

    bool contains(PointView p) const {
        return distance(center, p) <= radius + contain_epsilon(radius);
    }
};

/// True when the query ball (q, r) touches `ball`.
inline bool ball_intersects(const Ball& ball, PointView q, double r) {
    return distance(ball.center, q) <= ball.radius + r + contain_epsilon(ball.radius);
}

/// Centroid ball over the selected rows: center is the mean, radius the largest
/// centroid distance.
inline Ball bounding_ball(const Dataset& data, std::span<const Index> indices) {
    if (indices.empty()) {
        throw std::invalid_argument("bounding_ball: empty point set");
    }
    const std::size_t d = data.dim();
    Ball ball{Point(d, 0.0), 0.0};
    for (Index i : indices) {
        const auto p = data[i];
        for (std::size_t j = 0; j < d; ++j) ball.center[j] += p[j];
    }
    for (auto& c : ball.center) c /= static_cast<double>(indices.size());
    double max_sq = 0.0;
    for (Index i : indices) max_sq = std::max(max_sq, squared_distance(ball.center, data[i]));
    ball.radius = std::sqrt(max_sq);
    return ball;
}

inline Ball bounding_ball(const std::vector<Point>& points) {
    if (points.empty()) {
        throw std::invalid_argument("bounding_ball: empty point set");
    }
    const Dataset data = Dataset::from_points(points);
    std::vector<Index> all(data.size());
    for (Index i = 0; i < all.size(); ++i) all[i] = i;
    return bounding_ball(data, all);
}

enum class Splitter { moore, pca, kd };

inline const char* to_string(Splitter s) {
    switch (s) {
        case Splitter::moore: return "moore";
        case Splitter::pca: return "pca";
        case Splitter::kd: return "kd";
    }
    return "?";
}

inline Splitter splitter_from_string(const std::string& name) {
    if (name == "moore" || name == "ball") return Splitter::moore;
    if (name == "pca" || name == "ball*") return Splitter::pca;
    if (name == "kd") return Splitter::kd;
    throw std::invalid_argument("unknown index type: " + name);
}

/**
 * One tree node. Leaves own the contiguous slice [begin, end) of
 * Tree::order; internal nodes cover the concatenation of their children's
 * slices.
 */
struct Node {
    Ball ball;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t depth = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool is_leaf() const { return left < 0; }
    std::size_t count() const { return end - begin; }
};

struct BuildStats {
    std::size_t node_count = 0;
    std::size_t leaf_count = 0;
    std::size_t max_depth = 0;
    double avg_depth = 0.0;
    std::chrono::nanoseconds build_time{0};
};

/// Immutable binary ball hierarchy. nodes[0] is the root.
struct Tree {
    std::shared_ptr<const Dataset> data;
    std::vector<Node> nodes;
    std::vector<Index> order;
    Splitter splitter = Splitter::pca;
    BuildStats stats;

    const Node& root() const { return nodes.front(); }
    const Dataset& dataset() const { return *data; }

    std::span<const Index> points_of(const Node& node) const {
        return std::span<const Index>(order).subspan(node.begin, node.count());
    }
};

}  // namespace ballstar
