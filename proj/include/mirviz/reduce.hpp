#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "mirviz/error.hpp"
#include "mirviz/feature_matrix.hpp"
#include "mirviz/similarity.hpp"

namespace mirviz {

enum class ReduceMethod { pca, mds, tsne };

std::string to_string(ReduceMethod method);

struct Embedding {
    Eigen::MatrixXd points;  // n x k, input order preserved
    ReduceMethod method = ReduceMethod::pca;
    std::vector<double> explained_variance;  // pca: one entry per component
    std::optional<std::uint64_t> seed;       // tsne
    int negative_eigenvalues = 0;            // mds: dimensions dropped as non-Euclidean
};

/// Projects the mean-centered rows onto the top-k right singular vectors.
/// Each component's largest-magnitude loading is made positive;
/// explained_variance = s^2 / (n - 1).
template <typename Derived>
Embedding pca_project(const Eigen::MatrixBase<Derived>& data, Eigen::Index k) {
    const Eigen::Index n = data.rows(), d = data.cols();
    if (n < 2) throw Error(Errc::TooFewPoints, std::to_string(n) + " point(s)");
    if (k < 1 || k > d) throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + ", dims = " + std::to_string(d));

    const Eigen::MatrixXd centered = data.template cast<double>().rowwise() - data.template cast<double>().colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::MatrixXd basis = svd.matrixV().leftCols(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index at;
        basis.col(c).cwiseAbs().maxCoeff(&at);
        if (basis(at, c) < 0) basis.col(c) *= -1.0;
    }

    Embedding out;
    out.method = ReduceMethod::pca;
    out.points = centered * basis;
    for (Eigen::Index c = 0; c < k; ++c)
        out.explained_variance.push_back(c < s.size() ? s[c] * s[c] / double(n - 1) : 0.0);
    return out;
}

inline Embedding pca_project(const FeatureMatrix& features, Eigen::Index k) { return pca_project(features.values, k); }

/// Classical (Torgerson) MDS: B = -1/2 J (D o D) J, coordinates from the top-k
/// eigenpairs. Non-positive eigenvalues among the top k give zero columns.
Embedding classical_mds(const DistanceMatrix& distances, Eigen::Index k);

/// Deterministic standard-normal stream: 64-bit LCG feeding Box-Muller.
class SeededNormal {
public:
    explicit SeededNormal(std::uint64_t seed) : state_(seed) {}
    double uniform();  // (0, 1]
    double operator()();

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

struct TsneOptions {
    Eigen::Index k = 2;
    double perplexity = 30;
    std::uint64_t seed = 42;
    int iterations = 1000;
    double learning_rate = 200;
    double exaggeration = 12;
    int exaggeration_iterations = 250;
    int momentum_switch = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
};

/// Row-conditional Gaussian affinities p_{j|i} with per-row bandwidth found by
/// bisection so that the row entropy matches log2(perplexity).
struct ConditionalAffinities {
    Eigen::MatrixXd p;     // rows sum to 1, zero diagonal
    Eigen::VectorXd beta;  // precision 1 / (2 sigma^2) per row
};

ConditionalAffinities conditional_affinities(const Eigen::MatrixXd& squared_distances, double perplexity);

/// KL(P || Q) for a joint P and embedding Y under Student-t affinities.
double tsne_cost(const Eigen::MatrixXd& joint_p, const Eigen::MatrixXd& y);

struct TsneResult {
    Embedding embedding;
    /// (iteration, KL divergence) sampled every 50 iterations and at the end.
    std::vector<std::pair<int, double>> cost_trace;
};

/// Exact t-SNE with early exaggeration, momentum and per-parameter gains.
TsneResult tsne_run(const Eigen::MatrixXd& data, const TsneOptions& options);

inline Embedding tsne(const FeatureMatrix& features, Eigen::Index k, double perplexity, std::uint64_t seed,
                      int iterations) {
    TsneOptions o;
    o.k = k;
    o.perplexity = perplexity;
    o.seed = seed;
    o.iterations = iterations;
    return tsne_run(features.values, o).embedding;
}

struct SmoothingConfig {
    double alpha = 0.05;
};

/// One-pole low-pass along rows: y_0 = x_0, y_t = alpha x_t + (1 - alpha) y_{t-1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> lpf_smooth(
    const Eigen::MatrixBase<Derived>& x, const SmoothingConfig& cfg) {
    using Scalar = typename Derived::Scalar;
    if (!(cfg.alpha > 0 && cfg.alpha <= 1)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1]");
    if (x.rows() < 1) throw Error(Errc::InvalidArgument, "lpf_smooth needs at least one frame");
    const Scalar a = Scalar(cfg.alpha);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> y = x;
    if (a == Scalar(1)) return y;
    for (Eigen::Index t = 1; t < x.rows(); ++t) y.row(t) = y.row(t - 1) + a * (x.row(t) - y.row(t - 1));
    return y;
}

inline FeatureMatrix lpf_smooth(const FeatureMatrix& features, const SmoothingConfig& cfg) {
    FeatureMatrix out = features;
    out.values = lpf_smooth(features.values, cfg);
    return out;
}

}  // namespace mirviz
