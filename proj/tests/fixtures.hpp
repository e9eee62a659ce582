// Shared random inputs for the unit tests.
#pragma once

#include <cmath>
#include <vector>

#include <ballstar/core.hpp>
#include <ballstar/random.hpp>

namespace fixtures {

enum class Layout { gaussian, uniform, duplicates, collinear, grid };

inline constexpr Layout all_layouts[] = {Layout::gaussian, Layout::uniform, Layout::duplicates, Layout::collinear,
                                         Layout::grid};

inline ballstar::Dataset random_dataset(ballstar::Rng& rng, std::size_t n, std::size_t dim, Layout layout) {
    std::vector<ballstar::Point> pts;
    pts.reserve(n);
    switch (layout) {
        case Layout::gaussian:
            for (std::size_t i = 0; i < n; ++i) {
                ballstar::Point p(dim);
                for (auto& c : p) c = rng.gaussian(0.0, 3.0);
                pts.push_back(p);
            }
            break;
        case Layout::uniform:
            for (std::size_t i = 0; i < n; ++i) {
                ballstar::Point p(dim);
                for (auto& c : p) c = rng.uniform(-1.0, 1.0);
                pts.push_back(p);
            }
            break;
        case Layout::duplicates: {
            // few distinct locations, each repeated many times
            const std::size_t distinct = 1 + rng.below(5);
            std::vector<ballstar::Point> pool;
            for (std::size_t i = 0; i < distinct; ++i) {
                ballstar::Point p(dim);
                for (auto& c : p) c = rng.uniform(-2.0, 2.0);
                pool.push_back(p);
            }
            for (std::size_t i = 0; i < n; ++i) pts.push_back(pool[rng.below(distinct)]);
            break;
        }
        case Layout::collinear: {
            ballstar::Point origin(dim), dir(dim);
            for (auto& c : origin) c = rng.uniform(-1.0, 1.0);
            for (auto& c : dir) c = rng.gaussian();
            for (std::size_t i = 0; i < n; ++i) {
                const double t = rng.uniform(-5.0, 5.0);
                ballstar::Point p(dim);
                for (std::size_t j = 0; j < dim; ++j) p[j] = origin[j] + t * dir[j];
                pts.push_back(p);
            }
            break;
        }
        case Layout::grid:
            // small integer lattice: many exact distance ties
            for (std::size_t i = 0; i < n; ++i) {
                ballstar::Point p(dim);
                for (auto& c : p) c = static_cast<double>(rng.below(4));
                pts.push_back(p);
            }
            break;
    }
    return ballstar::Dataset::from_points(pts);
}

inline ballstar::Point random_query(ballstar::Rng& rng, const ballstar::Dataset& data) {
    ballstar::Point q(data.dim());
    if (rng.below(3) == 0) {
        // sometimes sit exactly on a data point
        const auto p = data[rng.below(data.size())];
        q.assign(p.begin(), p.end());
    } else {
        for (auto& c : q) c = rng.uniform(-4.0, 4.0);
    }
    return q;
}

}  // namespace fixtures
