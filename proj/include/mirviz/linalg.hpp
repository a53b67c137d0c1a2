#pragma once

#include <cmath>

#include <Eigen/Core>

namespace mirviz {

template <typename Scalar>
struct SymmetricEigen {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;             // ascending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns match values
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Only the upper
/// triangle is read. Sweeps stop once the off-diagonal mass drops below
/// tol * ||A||_F or after max_sweeps.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                      int max_sweeps = 100,
                                                      typename Derived::Scalar tol = typename Derived::Scalar(1e-15)) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = input.rows();

    Matrix a = input.template triangularView<Eigen::Upper>();
    a.template triangularView<Eigen::StrictlyLower>() = a.transpose();
    Matrix v = Matrix::Identity(n, n);
    const Scalar scale = a.norm();

    auto off_diagonal = [&] {
        Scalar s = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(Scalar(2) * s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_diagonal() > tol * scale; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == Scalar(0)) continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
                const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    // Selection sort into ascending order keeps the eigenvector columns aligned.
    SymmetricEigen<Scalar> out{a.diagonal(), v};
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index m;
        out.values.tail(n - i).minCoeff(&m);
        m += i;
        if (m != i) {
            std::swap(out.values[i], out.values[m]);
            out.vectors.col(i).swap(out.vectors.col(m));
        }
    }
    return out;
}

}  // namespace mirviz
