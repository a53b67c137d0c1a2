#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mirviz/error.hpp"
#include "mirviz/feature_matrix.hpp"

namespace mirviz {

enum class Metric { euclidean, cosine, correlation };

Metric parse_metric(const std::string& name);
std::string to_string(Metric metric);

/// Distance between two equal-length vectors.
///   euclidean:   sqrt(sum (x_i - y_i)^2)
///   cosine:      1 - x.y / (|x| |y|), similarity 0 if either vector is zero
///   correlation: 1 - pearson(x, y), correlation 0 if either has zero variance
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar distance(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                   Metric metric) {
    using Scalar = typename DerivedX::Scalar;
    if (x.size() != y.size())
        throw Error(Errc::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (x.size() == 0) throw Error(Errc::EmptyVector);

    const auto xa = x.reshaped().array();
    const auto ya = y.reshaped().array();
    auto one_minus_similarity = [](Scalar dot, Scalar xx, Scalar yy) {
        const Scalar denom = std::sqrt(xx * yy);
        const Scalar sim = denom > Scalar(0) ? dot / denom : Scalar(0);
        return std::max(Scalar(0), Scalar(1) - sim);
    };

    switch (metric) {
        case Metric::euclidean:
            return std::sqrt((xa - ya).square().sum());
        case Metric::cosine:
            return one_minus_similarity((xa * ya).sum(), xa.square().sum(), ya.square().sum());
        case Metric::correlation: {
            const auto cx = (xa - xa.mean()).eval();
            const auto cy = (ya - ya.mean()).eval();
            return one_minus_similarity((cx * cy).sum(), cx.square().sum(), cy.square().sum());
        }
    }
    return Scalar(0);
}

struct DistanceMatrix {
    Eigen::MatrixXd values;
    Metric metric = Metric::euclidean;
};

/// Pairwise distances between the rows of `points`. The diagonal is exactly 0
/// and the upper triangle is mirrored into the lower one.
template <typename Derived>
DistanceMatrix self_similarity(const Eigen::MatrixBase<Derived>& points, Metric metric) {
    const Eigen::Index n = points.rows();
    if (n < 2) throw Error(Errc::TooFewFrames, std::to_string(n) + " frame(s)");
    DistanceMatrix out{Eigen::MatrixXd::Zero(n, n), metric};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            out.values(i, j) = out.values(j, i) = double(distance(points.row(i), points.row(j), metric));
    return out;
}

inline DistanceMatrix self_similarity(const FeatureMatrix& features, Metric metric) {
    return self_similarity(features.values, metric);
}

struct ValidityReport {
    bool symmetric = false;
    bool unit_diagonal = false;
    bool entries_in_range = false;
    double min_eigenvalue = 0;
    bool psd = false;
    Eigen::MatrixXd angles;  // arccos(clamp(r_ij)), radians
    std::vector<std::array<Eigen::Index, 3>> triangle_violations;

    bool valid() const { return symmetric && unit_diagonal && entries_in_range && psd; }
};

/// Structural, spectral and angular checks of a candidate correlation matrix.
/// A triple (i, j, k), i < k, j distinct, violates when theta_ik is outside
/// [|theta_ij - theta_jk| - tol, theta_ij + theta_jk + tol].
ValidityReport validate_correlation_matrix(const Eigen::MatrixXd& r, double tol = 1e-9);

}  // namespace mirviz
