#include <chrono>
#include <random>

#include <Eigen/SVD>

#include "doctest.h"
#include "mirviz/linalg.hpp"
#include "mirviz/reduce.hpp"
#include "test_util.hpp"

using namespace mirviz;
using testutil::error_code;

namespace {

Eigen::MatrixXd pairwise(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd d(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
    return d;
}

// RMS residual after optimal rotation/reflection + translation of a onto b.
double procrustes_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
    const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ac.transpose() * bc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
    return std::sqrt((ac * r - bc).squaredNorm() / double(a.rows()));
}

Eigen::MatrixXd rank3_data(unsigned seed) {
    return testutil::random_matrix(50, 3, seed) * testutil::random_matrix(3, 8, seed + 1) * 4.0 +
           Eigen::VectorXd::Ones(50) * testutil::random_matrix(1, 8, seed + 2);
}

Eigen::MatrixXd clusters(unsigned seed, std::vector<int>& label) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> g(0.0, 0.5);
    Eigen::MatrixXd x(60, 10);
    label.assign(60, 0);
    for (int i = 0; i < 60; ++i) {
        label[std::size_t(i)] = i / 20;
        for (int c = 0; c < 10; ++c) x(i, c) = g(gen) + (c == label[std::size_t(i)] ? 10.0 : 0.0);
    }
    return x;
}

double neighbour_purity(const Eigen::MatrixXd& y, const std::vector<int>& label) {
    int same = 0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        Eigen::Index best = -1;
        double best_d = 1e300;
        for (Eigen::Index j = 0; j < y.rows(); ++j) {
            if (i == j) continue;
            const double d = (y.row(i) - y.row(j)).squaredNorm();
            if (d < best_d) best_d = d, best = j;
        }
        same += label[std::size_t(i)] == label[std::size_t(best)];
    }
    return double(same) / double(y.rows());
}

}  // namespace

TEST_CASE("PCA of exact rank-3 data reconstructs from 3 components") {
    const Eigen::MatrixXd x = rank3_data(10);
    const auto e = pca_project(x, 3);
    CHECK(e.method == ReduceMethod::pca);
    REQUIRE(e.points.cols() == 3);
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd w = e.points.colPivHouseholderQr().solve(xc);
    CHECK((e.points * w - xc).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(e.points.colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("PCA explained variances match a covariance eigen-oracle") {
    for (unsigned seed : {3u, 21u}) {
        const Eigen::MatrixXd x = testutil::random_matrix(50, 8, seed);
        const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
        const Eigen::MatrixXd cov = xc.transpose() * xc / 49.0;
        const auto eig = jacobi_eigen(cov);  // ascending
        const auto e = pca_project(x, 8);
        REQUIRE(e.explained_variance.size() == 8);
        for (int i = 0; i < 8; ++i) {
            CHECK(std::abs(e.explained_variance[std::size_t(i)] - eig.values[7 - i]) < 1e-6);
            if (i) CHECK(e.explained_variance[std::size_t(i)] <= e.explained_variance[std::size_t(i - 1)]);
        }
    }
}

TEST_CASE("PCA sign convention, contraction and errors") {
    const Eigen::MatrixXd x = testutil::random_matrix(30, 5, 4);
    const auto e = pca_project(x, 2);
    const Eigen::MatrixXd dx = pairwise(x), de = pairwise(e.points);
    CHECK(((de - dx).array() <= 1e-12).all());
    // loadings are recoverable as the least-squares map from centered data to scores
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd v = xc.colPivHouseholderQr().solve(e.points);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index idx = 0;
        v.col(c).cwiseAbs().maxCoeff(&idx);
        CHECK(v(idx, c) > 0);
    }
    Eigen::MatrixXd two(2, 4);
    two << 1, 2, 3, 4, 2, 0, 3, 9;
    const auto t = pca_project(two, 1);
    CHECK(std::abs(std::abs(t.points(0, 0) - t.points(1, 0)) - (two.row(0) - two.row(1)).norm()) < 1e-9);
    CHECK(error_code([] { pca_project(Eigen::MatrixXd::Ones(1, 3), 1); }) == Errc::TooFewPoints);
    CHECK(error_code([] { pca_project(Eigen::MatrixXd::Ones(5, 3), 4); }) == Errc::KTooLarge);
}

TEST_CASE("classical MDS recovers a planar configuration") {
    const Eigen::MatrixXd pts = testutil::random_matrix(20, 2, 17) * 5.0;
    const auto e = classical_mds(DistanceMatrix{pairwise(pts), Metric::euclidean}, 2);
    CHECK(e.method == ReduceMethod::mds);
    CHECK(procrustes_error(e.points, pts) < 1e-6);
}

TEST_CASE("MDS special cases") {
    const auto zero = classical_mds(DistanceMatrix{Eigen::MatrixXd::Zero(4, 4), Metric::euclidean}, 2);
    CHECK(zero.points.isZero(1e-12));
    Eigen::MatrixXd tri = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    const auto t = classical_mds(DistanceMatrix{tri, Metric::euclidean}, 2);
    const Eigen::MatrixXd d = pairwise(t.points);
    CHECK(std::abs(d(0, 1) - 1) < 1e-9);
    CHECK(std::abs(d(0, 2) - 1) < 1e-9);
    CHECK(std::abs(d(1, 2) - 1) < 1e-9);
    Eigen::MatrixXd asym = tri;
    asym(0, 1) = 2;
    CHECK(error_code([&] { classical_mds(DistanceMatrix{asym, Metric::euclidean}, 2); }) == Errc::NotSymmetric);
    Eigen::MatrixXd diag = tri;
    diag(1, 1) = 0.5;
    CHECK(error_code([&] { classical_mds(DistanceMatrix{diag, Metric::euclidean}, 2); }) == Errc::BadDiagonal);
}

TEST_CASE("MDS of PCA distances reproduces the PCA configuration") {
    const auto p = pca_project(testutil::random_matrix(15, 6, 8), 3);
    const auto m = classical_mds(DistanceMatrix{pairwise(p.points), Metric::euclidean}, 3);
    CHECK(procrustes_error(m.points, p.points) < 1e-6);
}

TEST_CASE("MDS reports non-Euclidean distances") {
    Eigen::MatrixXd d(4, 4);
    d << 0, 1, 1, 3, 1, 0, 1, 1, 1, 1, 0, 1, 3, 1, 1, 0;  // violates the triangle inequality
    CHECK(classical_mds(DistanceMatrix{d, Metric::euclidean}, 2).negative_eigenvalues > 0);
}

TEST_CASE("seeded normal stream is reproducible and roughly standard") {
    SeededNormal a(42), b(42), c(43);
    double sum = 0, sq = 0;
    bool differs = false;
    for (int i = 0; i < 20000; ++i) {
        const double x = a();
        CHECK(x == b());
        differs |= x != c();
        sum += x;
        sq += x * x;
    }
    CHECK(differs);
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(std::abs(sq / 20000 - 1) < 0.05);
}

TEST_CASE("bandwidth search hits the target perplexity for every point") {
    std::vector<int> label;
    const Eigen::MatrixXd x = clusters(5, label);
    Eigen::MatrixXd sq(60, 60);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) sq(i, j) = (x.row(i) - x.row(j)).squaredNorm();
    for (double perp : {5.0, 15.0}) {
        const auto c = conditional_affinities(sq, perp);
        for (int i = 0; i < 60; ++i) {
            CHECK(c.p(i, i) == 0.0);
            CHECK(std::abs(c.p.row(i).sum() - 1) < 1e-9);
            CHECK(c.p.row(i).minCoeff() >= 0.0);
            double h = 0;
            for (int j = 0; j < 60; ++j)
                if (c.p(i, j) > 0) h -= c.p(i, j) * std::log2(c.p(i, j));
            CHECK(std::abs(std::exp2(h) - perp) < 1e-3);
        }
    }
}

TEST_CASE("t-SNE separates clusters, is deterministic and improves on its post-exaggeration cost") {
    std::vector<int> label;
    const Eigen::MatrixXd x = clusters(6, label);
    TsneOptions o;
    o.perplexity = 15;
    const auto start = std::chrono::steady_clock::now();
    const auto a = tsne_run(x, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 30.0);
    const auto b = tsne_run(x, o);
    CHECK(a.embedding.points == b.embedding.points);
    CHECK(a.embedding.seed == std::optional<std::uint64_t>(42));
    CHECK(neighbour_purity(a.embedding.points, label) >= 0.9);
    double at_250 = -1;
    for (const auto& [it, kl] : a.cost_trace)
        if (it == 250) at_250 = kl;
    REQUIRE(at_250 >= 0);
    CHECK(a.cost_trace.back().first == 1000);
    CHECK(a.cost_trace.back().second <= at_250);

    o.seed = 7;
    CHECK(tsne_run(x, o).embedding.points != a.embedding.points);
}

TEST_CASE("t-SNE errors") {
    const Eigen::MatrixXd x = testutil::random_matrix(20, 3, 1);
    TsneOptions o;
    o.perplexity = 30;
    CHECK(error_code([&] { tsne_run(x, o); }) == Errc::PerplexityTooLarge);
    o.perplexity = 5;
    o.k = 4;
    CHECK(error_code([&] { tsne_run(x, o); }) == Errc::InvalidArgument);
    CHECK(error_code([&] { tsne_run(Eigen::MatrixXd::Ones(1, 3), TsneOptions{}); }) == Errc::TooFewPoints);
}

TEST_CASE("LPF smoothing") {
    // step from rest: x_{-1} = 0, x_t = 1 for t >= 0
    for (double alpha : {0.05, 0.3, 0.9}) {
        Eigen::MatrixXd step(201, 1);
        step << 0, Eigen::VectorXd::Ones(200);
        const auto y = lpf_smooth(step, SmoothingConfig{alpha});
        for (int t = 0; t < 200; ++t) CHECK(std::abs(y(t + 1, 0) - (1 - std::pow(1 - alpha, t + 1))) < 1e-12);
    }
    const Eigen::MatrixXd x = testutil::random_matrix(40, 3, 9);
    CHECK(lpf_smooth(x, SmoothingConfig{1.0}) == x);
    CHECK((lpf_smooth(Eigen::MatrixXd::Constant(10, 2, 3.5), SmoothingConfig{0.2}).array() == 3.5).all());
    const Eigen::MatrixXd s = lpf_smooth(x, SmoothingConfig{0.1});
    for (int c = 0; c < 3; ++c) {
        CHECK(s.col(c).maxCoeff() <= x.col(c).maxCoeff());
        CHECK(s.col(c).minCoeff() >= x.col(c).minCoeff());
    }
}
