// Dense eigen-decomposition reference for principal directions.
#pragma once

#include <Eigen/Dense>

#include <ballstar/core.hpp>
#include <ballstar/random.hpp>

namespace oracle {

struct Principal {
    Eigen::VectorXd direction;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

inline Eigen::MatrixXd as_matrix(const ballstar::Dataset& data) {
    Eigen::MatrixXd m(data.size(), data.dim());
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < data.dim(); ++j) m(i, j) = data[i][j];
    return m;
}

inline Eigen::MatrixXd covariance(const ballstar::Dataset& data) {
    const Eigen::MatrixXd x = as_matrix(data);
    const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
    return centred.transpose() * centred / static_cast<double>(data.size());
}

inline Principal principal(const ballstar::Dataset& data) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance(data));
    const auto& vals = solver.eigenvalues();  // ascending
    const auto d = vals.size();
    return {solver.eigenvectors().col(d - 1), vals(d - 1), d > 1 ? vals(d - 2) : 0.0};
}

/// Anisotropic Gaussian cloud, randomly rotated, so the top eigenvalue is usually well separated.
inline ballstar::Dataset rotated_cloud(ballstar::Rng& rng, std::size_t n, std::size_t dim) {
    Eigen::MatrixXd g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
    const Eigen::MatrixXd rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd scale(dim);
    for (std::size_t j = 0; j < dim; ++j) scale(j) = rng.uniform(0.2, 5.0);
    Eigen::VectorXd shift(dim);
    for (std::size_t j = 0; j < dim; ++j) shift(j) = rng.uniform(-100.0, 100.0);

    std::vector<double> coords;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd z(dim);
        for (std::size_t j = 0; j < dim; ++j) z(j) = rng.gaussian() * scale(j);
        const Eigen::VectorXd p = rotation * z + shift;
        for (std::size_t j = 0; j < dim; ++j) coords.push_back(p(j));
    }
    return ballstar::Dataset(dim, coords);
}

}  // namespace oracle
