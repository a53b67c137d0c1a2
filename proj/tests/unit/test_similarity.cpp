#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mirviz/linalg.hpp"
#include "mirviz/similarity.hpp"
#include "test_util.hpp"

using namespace mirviz;
using testutil::error_code;

namespace {

Eigen::VectorXd pc_vector(std::initializer_list<int> classes, double value) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(12);
    for (int c : classes) v[c] = value;
    return v;
}

double det3(const Eigen::Matrix3d& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// Smallest root of the characteristic polynomial of a symmetric 3x3 (trigonometric form).
double min_eigenvalue_3x3(const Eigen::Matrix3d& a) {
    const double q = a.trace() / 3;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) + 2 * p1;
    const double p = std::sqrt(p2 / 6);
    const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
    const double r = std::clamp(det3(b) / 2, -1.0, 1.0);
    const double phi = std::acos(r) / 3;
    return q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
}

bool has_triple(const ValidityReport& r, Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    for (const auto& t : r.triangle_violations)
        if (t[0] == i && t[1] == j && t[2] == k) return true;
    return false;
}

}  // namespace

TEST_CASE("distance example: silence and doubled triad are equally far in euclidean space") {
    const auto pr = pc_vector({0, 4, 7}, 0.5), p1 = pc_vector({}, 0), p2 = pc_vector({0, 4, 7}, 1.0);
    const double d1 = distance(p1, pr, Metric::euclidean), d2 = distance(p2, pr, Metric::euclidean);
    CHECK(std::abs(d1 - d2) < 1e-12);
    CHECK(std::abs(d1 - std::sqrt(0.75)) < 1e-12);
    CHECK(distance(p2, pr, Metric::correlation) == doctest::Approx(0.0).scale(1e-15));
    CHECK(distance(p1, pr, Metric::correlation) == 1.0);
    CHECK(distance(p2, pr, Metric::correlation) < distance(p1, pr, Metric::correlation));
    CHECK(distance(p1, pr, Metric::cosine) == 1.0);
}

TEST_CASE("distance identity, symmetry and errors") {
    const Eigen::MatrixXd m = testutil::random_matrix(30, 6, 2);
    for (auto metric : {Metric::euclidean, Metric::cosine, Metric::correlation}) {
        for (int i = 0; i < 29; ++i) {
            const Eigen::VectorXd x = m.row(i), y = m.row(i + 1);
            CHECK(distance(x, x, metric) == doctest::Approx(0.0).scale(1e-12));
            CHECK(distance(x, y, metric) == distance(y, x, metric));
            CHECK(distance(x, y, metric) >= 0.0);
        }
    }
    for (int i = 0; i + 2 < 30; ++i) {
        const Eigen::VectorXd x = m.row(i), y = m.row(i + 1), z = m.row(i + 2);
        CHECK(distance(x, z, Metric::euclidean) <=
              distance(x, y, Metric::euclidean) + distance(y, z, Metric::euclidean) + 1e-12);
    }
    CHECK(error_code([] { distance(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4), Metric::cosine); }) ==
          Errc::LengthMismatch);
    CHECK(error_code([] { distance(Eigen::VectorXd(), Eigen::VectorXd(), Metric::cosine); }) == Errc::EmptyVector);
}

TEST_CASE("self-similarity equals a brute-force double loop") {
    const Eigen::MatrixXd x = testutil::random_matrix(10, 4, 7);
    for (auto metric : {Metric::euclidean, Metric::cosine, Metric::correlation}) {
        const auto d = self_similarity(x, metric);
        CHECK(d.metric == metric);
        for (int i = 0; i < 10; ++i) {
            CHECK(d.values(i, i) == 0.0);
            for (int j = 0; j < 10; ++j) {
                CHECK(d.values(i, j) == d.values(j, i));
                double oracle = 0;
                if (metric == Metric::euclidean) {
                    for (int c = 0; c < 4; ++c) oracle += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
                    oracle = std::sqrt(oracle);
                } else {
                    double mi = 0, mj = 0;
                    if (metric == Metric::correlation) {
                        for (int c = 0; c < 4; ++c) mi += x(i, c) / 4, mj += x(j, c) / 4;
                    }
                    double num = 0, ni = 0, nj = 0;
                    for (int c = 0; c < 4; ++c) {
                        num += (x(i, c) - mi) * (x(j, c) - mj);
                        ni += (x(i, c) - mi) * (x(i, c) - mi);
                        nj += (x(j, c) - mj) * (x(j, c) - mj);
                    }
                    oracle = i == j ? 0.0 : std::max(0.0, 1 - num / std::sqrt(ni * nj));
                }
                CHECK(std::abs(d.values(i, j) - oracle) < 1e-12);
            }
        }
    }
}

TEST_CASE("self-similarity: identical frames, dimension order, too few frames") {
    Eigen::MatrixXd x = testutil::random_matrix(6, 5, 3);
    x.row(4) = x.row(1);
    const auto d = self_similarity(x, Metric::cosine);
    CHECK(d.values(1, 4) == doctest::Approx(0.0).scale(1e-15));
    Eigen::MatrixXd permuted(6, 5);
    const int perm[5] = {3, 0, 4, 2, 1};
    for (int c = 0; c < 5; ++c) permuted.col(c) = x.col(perm[c]);
    for (auto metric : {Metric::euclidean, Metric::cosine, Metric::correlation})
        CHECK((self_similarity(permuted, metric).values - self_similarity(x, metric).values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(error_code([] { self_similarity(Eigen::MatrixXd::Ones(1, 3), Metric::euclidean); }) == Errc::TooFewFrames);
}

TEST_CASE("Jacobi eigenvalues agree with a library solver") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd a = testutil::random_matrix(7, 7, seed);
        const Eigen::MatrixXd s = a + a.transpose();
        const auto j = jacobi_eigen(s);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(s);
        CHECK((j.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((s * j.vectors - j.vectors * j.values.asDiagonal()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("identity correlation matrix is valid") {
    const auto r = validate_correlation_matrix(Eigen::MatrixXd::Identity(4, 4));
    CHECK(r.valid());
    CHECK(r.min_eigenvalue == doctest::Approx(1.0));
    CHECK(r.triangle_violations.empty());
    CHECK(r.angles(0, 1) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("the non-PSD example matrix is flagged") {
    Eigen::Matrix3d m;
    m << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
    CHECK(det3(m) == doctest::Approx(-2.888).epsilon(1e-12));
    const auto r = validate_correlation_matrix(m);
    CHECK(r.symmetric);
    CHECK(r.unit_diagonal);
    CHECK(r.entries_in_range);
    CHECK_FALSE(r.psd);
    CHECK_FALSE(r.valid());
    CHECK(r.min_eigenvalue < 0);
    CHECK(r.min_eigenvalue == doctest::Approx(min_eigenvalue_3x3(m)).epsilon(1e-12));
    CHECK(has_triple(r, 0, 1, 2));
    CHECK(std::acos(0.9) * 2 == doctest::Approx(0.902).epsilon(1e-3));
    CHECK(r.angles(0, 2) == doctest::Approx(2.691).epsilon(1e-3));
}

TEST_CASE("Gram matrices of unit vectors are valid") {
    std::mt19937 gen(12);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + trial % 5;
        Eigen::MatrixXd v(n, 4);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < 4; ++c) v(i, c) = g(gen);
            v.row(i).normalize();
        }
        const Eigen::MatrixXd gram = v * v.transpose();
        const auto r = validate_correlation_matrix(gram);
        CHECK(r.psd);
        CHECK(r.triangle_violations.empty());
        CHECK(r.valid());
    }
}

TEST_CASE("structural checks") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(0, 1) = 0.3;
    CHECK_FALSE(validate_correlation_matrix(m).symmetric);
    m = Eigen::MatrixXd::Identity(3, 3);
    m(1, 1) = 0.5;
    CHECK_FALSE(validate_correlation_matrix(m).unit_diagonal);
    m = Eigen::MatrixXd::Identity(3, 3);
    m(0, 2) = m(2, 0) = 1.5;
    CHECK_FALSE(validate_correlation_matrix(m).entries_in_range);
    CHECK(error_code([] { validate_correlation_matrix(Eigen::MatrixXd::Ones(2, 3)); }) == Errc::NotSquare);
}
