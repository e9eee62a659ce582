// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace ballstar {

struct Hit {
    Index index = 0;
    double distance = 0.0;

    bool operator==(const Hit&) const = default;
    friend bool operator<(const Hit& a, const Hit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    }
};

struct QueryResult {
    std::vector<Hit> hits;  // ascending by (distance, index)
    std::size_t visited_nodes = 0;
    std::chrono::nanoseconds elapsed{0};
};

/// Optional instrumentation: nodes that passed or failed the prune test, and
/// the pruning distance seen at every visited node (K-NN traversals only).
struct SearchTrace {
    std::vector<std::size_t> expanded;
    std::vector<std::size_t> pruned;
    std::vector<double> pruning_distance;
};

/// max(parent_bound, |q - center| - radius, 0): no point of the ball can be
/// closer to q than this. The containment slack is subtracted so rounding in
/// the centroid cannot push the bound past a point sitting on the sphere.
inline double node_lower_bound(PointView q, const Ball& ball, double parent_bound) {
    return std::max({parent_bound, distance(q, ball.center) - ball.radius - contain_epsilon(ball.radius), 0.0});
}

/**
 * Bounded best-K list ordered by (distance, index). `bound()` is the pruning
 * distance: the current K-th distance once full, the initial limit before.
 */
class KnnState {
public:
    KnnState(std::size_t capacity, double initial_bound) : capacity_(capacity), initial_(initial_bound) {
        heap_.reserve(capacity + 1);
    }

    bool full() const { return heap_.size() >= capacity_; }
    double bound() const { return full() ? heap_.front().distance : initial_; }

    /// Would `hit` displace the current worst entry?
    bool admits(const Hit& hit) const { return !full() || hit < heap_.front(); }

    void insert(const Hit& hit) {
        heap_.push_back(hit);
        std::push_heap(heap_.begin(), heap_.end());
        if (heap_.size() > capacity_) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.pop_back();
        }
    }

    std::vector<Hit> sorted() && {
        std::sort_heap(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

private:
    std::size_t capacity_;
    double initial_;
    std::vector<Hit> heap_;
};

namespace detail {

inline void check_query(const Tree& tree, PointView q) {
    require_same_dim(q.size(), tree.dataset().dim(), "query");
    for (double c : q) {
        if (!std::isfinite(c)) throw std::invalid_argument("query: non-finite coordinate");
    }
}

inline void check_radius(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("query: radius must be >= 0");
}

inline void check_k(std::size_t k) {
    if (k < 1) throw std::invalid_argument("query: K must be >= 1");
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    std::chrono::nanoseconds elapsed() const {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_);
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Depth-first K-best traversal shared by plain and radius-constrained K-NN.
/// With `radius` = infinity the constraint is vacuous.
class KnnTraversal {
public:
    KnnTraversal(const Tree& tree, PointView q, std::size_t k, double radius, SearchTrace* trace)
        : tree_(tree), data_(tree.dataset()), q_(q), radius_(radius), state_(k, radius), trace_(trace) {}

    QueryResult run() && {
        visit(0, 0.0);
        QueryResult result;
        result.visited_nodes = visited_;
        result.hits = std::move(state_).sorted();
        return result;
    }

private:
    void visit(std::size_t id, double parent_bound) {
        ++visited_;
        const Node& node = tree_.nodes[id];
        const double lower = node_lower_bound(q_, node.ball, parent_bound);
        if (trace_) trace_->pruning_distance.push_back(state_.bound());

        const bool out_of_range = lower > radius_;
        const bool cannot_improve = state_.full() && lower > state_.bound();
        if (out_of_range || cannot_improve) {
            if (trace_) trace_->pruned.push_back(id);
            return;
        }
        if (trace_) trace_->expanded.push_back(id);

        if (node.is_leaf()) {
            for (Index i : tree_.points_of(node)) {
                const Hit hit{i, std::sqrt(squared_distance(q_, data_[i]))};
                if (hit.distance <= radius_ && state_.admits(hit)) state_.insert(hit);
            }
            return;
        }

        const auto& l = tree_.nodes[static_cast<std::size_t>(node.left)];
        const auto& r = tree_.nodes[static_cast<std::size_t>(node.right)];
        const double gap_l = distance(q_, l.ball.center) - l.ball.radius;
        const double gap_r = distance(q_, r.ball.center) - r.ball.radius;
        if (gap_r < gap_l) {
            visit(static_cast<std::size_t>(node.right), lower);
            visit(static_cast<std::size_t>(node.left), lower);
        } else {
            visit(static_cast<std::size_t>(node.left), lower);
            visit(static_cast<std::size_t>(node.right), lower);
        }
    }

    const Tree& tree_;
    const Dataset& data_;
    PointView q_;
    double radius_;
    KnnState state_;
    SearchTrace* trace_;
    std::size_t visited_ = 0;
};

}  // namespace detail

/// Every point within distance r of q (inclusive).
inline QueryResult range_search(const Tree& tree, PointView q, double r, SearchTrace* trace = nullptr) {
    detail::check_query(tree, q);
    detail::check_radius(r);
    const detail::Timer timer;
    const Dataset& data = tree.dataset();

    QueryResult result;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        ++result.visited_nodes;
        const Node& node = tree.nodes[id];
        if (!ball_intersects(node.ball, q, r)) {
            if (trace) trace->pruned.push_back(id);
            continue;
        }
        if (trace) trace->expanded.push_back(id);
        if (node.is_leaf()) {
            for (Index i : tree.points_of(node)) {
                const double dist = std::sqrt(squared_distance(q, data[i]));
                if (dist <= r) result.hits.push_back({i, dist});
            }
        } else {
            stack.push_back(static_cast<std::size_t>(node.right));
            stack.push_back(static_cast<std::size_t>(node.left));
        }
    }
    std::sort(result.hits.begin(), result.hits.end());
    result.elapsed = timer.elapsed();
    return result;
}

/**
 * K nearest neighbours, ties broken by index. A node is expanded unless the
 * list is full and its lower bound exceeds the current K-th distance;
 * children are visited nearer-first.
 */
inline QueryResult knn_search(const Tree& tree, PointView q, std::size_t k, SearchTrace* trace = nullptr) {
    detail::check_query(tree, q);
    detail::check_k(k);
    const detail::Timer timer;
    auto result = detail::KnnTraversal(tree, q, k, std::numeric_limits<double>::infinity(), trace).run();
    result.elapsed = timer.elapsed();
    return result;
}

/**
 * K nearest neighbours among the points within distance r. Prunes a node
 * when its lower bound exceeds r, or when the list is full and the bound
 * exceeds the current K-th distance. The pruning distance starts at r.
 */
inline QueryResult constrained_nn(const Tree& tree, PointView q, std::size_t k, double r,
                                  SearchTrace* trace = nullptr) {
    detail::check_query(tree, q);
    detail::check_k(k);
    detail::check_radius(r);
    const detail::Timer timer;
    auto result = detail::KnnTraversal(tree, q, k, r, trace).run();
    result.elapsed = timer.elapsed();
    return result;
}

// Linear-scan references.

inline std::vector<Hit> oracle_scan(const Dataset& data, PointView q) {
    std::vector<Hit> all;
    all.reserve(data.size());
    for (Index i = 0; i < data.size(); ++i) all.push_back({i, distance(data[i], q)});
    std::sort(all.begin(), all.end());
    return all;
}

inline std::vector<Hit> oracle_range(const Dataset& data, PointView q, double r) {
    auto all = oracle_scan(data, q);
    std::erase_if(all, [r](const Hit& h) { return h.distance > r; });
    return all;
}

inline std::vector<Hit> oracle_knn(const Dataset& data, PointView q, std::size_t k) {
    auto all = oracle_scan(data, q);
    if (all.size() > k) all.resize(k);
    return all;
}

inline std::vector<Hit> oracle_constrained(const Dataset& data, PointView q, std::size_t k, double r) {
    auto in_range = oracle_range(data, q, r);
    if (in_range.size() > k) in_range.resize(k);
    return in_range;
}

}  // namespace ballstar
