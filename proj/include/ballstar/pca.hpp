// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "core.hpp"

namespace ballstar {

/// Dense symmetric d x d matrix, row-major.
struct SymmetricMatrix {
    std::size_t dim = 0;
    std::vector<double> values;

    explicit SymmetricMatrix(std::size_t d = 0) : dim(d), values(d * d, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return values[i * dim + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }

    std::vector<double> apply(std::span<const double> v) const {
        std::vector<double> out(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dim; ++j) acc += (*this)(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    /// v^T M v
    double quadratic_form(std::span<const double> v) const {
        const auto mv = apply(v);
        return std::inner_product(v.begin(), v.end(), mv.begin(), 0.0);
    }
};

struct Direction {
    std::vector<double> vector;
};

struct Projection {
    std::vector<double> values;
    double t_min = 0.0;
    double t_max = 0.0;
};

/// Mean-centred covariance with 1/n normalisation over the selected rows.
inline SymmetricMatrix covariance_matrix(const Dataset& data, std::span<const Index> indices) {
    const std::size_t d = data.dim();
    SymmetricMatrix cov(d);
    if (indices.empty()) return cov;

    std::vector<double> mean(d, 0.0);
    for (Index i : indices) {
        const auto p = data[i];
        for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
    }
    const double n = static_cast<double>(indices.size());
    for (auto& m : mean) m /= n;

    std::vector<double> centred(d);
    for (Index i : indices) {
        const auto p = data[i];
        for (std::size_t j = 0; j < d; ++j) centred[j] = p[j] - mean[j];
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) cov(a, b) += centred[a] * centred[b];
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= n;
            cov(b, a) = cov(a, b);
        }
    }
    return cov;
}

inline SymmetricMatrix covariance_matrix(const std::vector<Point>& points) {
    if (points.empty()) return SymmetricMatrix{};
    const Dataset data = Dataset::from_points(points);
    std::vector<Index> all(data.size());
    std::iota(all.begin(), all.end(), Index{0});
    return covariance_matrix(data, all);
}

namespace detail {

inline double norm(std::span<const double> v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

inline bool normalize(std::vector<double>& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) return false;
    for (auto& x : v) x /= n;
    return true;
}

/// Largest-magnitude component made positive so the result does not depend on
/// which sign the iteration happened to settle on.
inline void canonical_sign(std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

/// Repeated squaring M -> M^(2^k), renormalised by the trace each step. The
/// result is close to the projector onto the dominant eigenspace.
inline SymmetricMatrix dominant_projector(const SymmetricMatrix& m) {
    const std::size_t d = m.dim;
    SymmetricMatrix b = m;
    const double t0 = b.trace();
    for (auto& x : b.values) x /= t0;
    SymmetricMatrix sq(d);
    for (int step = 0; step < 40; ++step) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) acc += b(i, k) * b(k, j);
                sq(i, j) = acc;
                sq(j, i) = acc;
            }
        }
        const double t = sq.trace();
        if (!(t > 0.0) || !std::isfinite(t)) break;
        for (auto& x : sq.values) x /= t;
        double change = 0.0;
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            change = std::max(change, std::abs(sq.values[i] - b.values[i]));
        }
        std::swap(b, sq);
        if (change < 1e-15) break;
    }
    return b;
}

}  // namespace detail

/**
 * Dominant eigenvector of the covariance of the selected rows.
 *
 * Power iteration from the normalised all-ones vector, with the start first
 * pushed through a high power of the matrix so that nearly-equal leading
 * eigenvalues still converge within the iteration budget. Iteration stops
 * once successive iterates agree to |cos| >= 1 - 1e-10 or after 1000 steps.
 *
 * Returns nullopt when the covariance is zero (all points coincide).
 */
inline std::optional<Direction> principal_direction(const SymmetricMatrix& cov) {
    const std::size_t d = cov.dim;
    if (d == 0) return std::nullopt;
    const double trace = cov.trace();
    if (!(trace > 0.0) || !std::isfinite(trace)) return std::nullopt;
    if (d == 1) return Direction{{1.0}};

    const SymmetricMatrix projector = detail::dominant_projector(cov);
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> next = projector.apply(v);
    if (detail::norm(next) < 1e-6) {
        // Start is (numerically) orthogonal to the dominant eigenspace.
        v[0] += 1e-3;
        detail::normalize(v);
        next = projector.apply(v);
    }
    if (detail::norm(next) < 1e-6) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (projector(j, j) > projector(best, best)) best = j;
        }
        next.assign(d, 0.0);
        next[best] = 1.0;
        next = projector.apply(next);
    }
    if (!detail::normalize(next)) return std::nullopt;
    v = std::move(next);

    for (int iter = 0; iter < 1000; ++iter) {
        auto mv = cov.apply(v);
        if (!detail::normalize(mv)) break;
        const double cosine = std::inner_product(v.begin(), v.end(), mv.begin(), 0.0);
        v = std::move(mv);
        if (std::abs(cosine) >= 1.0 - 1e-10) break;
    }
    detail::canonical_sign(v);
    return Direction{std::move(v)};
}

inline std::optional<Direction> principal_direction(const Dataset& data, std::span<const Index> indices) {
    if (indices.size() < 2) return std::nullopt;
    return principal_direction(covariance_matrix(data, indices));
}

inline std::optional<Direction> principal_direction(const std::vector<Point>& points) {
    if (points.size() < 2) return std::nullopt;
    return principal_direction(covariance_matrix(points));
}

inline double dot(PointView a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    return acc;
}

inline Projection project(const Dataset& data, std::span<const Index> indices, const Direction& dir) {
    require_same_dim(data.dim(), dir.vector.size(), "project");
    Projection proj;
    proj.values.reserve(indices.size());
    proj.t_min = std::numeric_limits<double>::infinity();
    proj.t_max = -std::numeric_limits<double>::infinity();
    for (Index i : indices) {
        const double t = dot(data[i], dir.vector);
        proj.values.push_back(t);
        proj.t_min = std::min(proj.t_min, t);
        proj.t_max = std::max(proj.t_max, t);
    }
    if (indices.empty()) proj.t_min = proj.t_max = 0.0;
    return proj;
}

inline Projection project(const std::vector<Point>& points, const Direction& dir) {
    Projection proj;
    if (points.empty()) return proj;
    const Dataset data = Dataset::from_points(points);
    std::vector<Index> all(data.size());
    std::iota(all.begin(), all.end(), Index{0});
    return project(data, all, dir);
}

}  // namespace ballstar
