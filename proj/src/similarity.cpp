#include "mirviz/similarity.hpp"

#include "mirviz/linalg.hpp"

namespace mirviz {

Metric parse_metric(const std::string& name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "cosine") return Metric::cosine;
    if (name == "correlation") return Metric::correlation;
    throw Error(Errc::InvalidArgument, "unknown metric '" + name + "'");
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::euclidean: return "euclidean";
        case Metric::cosine: return "cosine";
        case Metric::correlation: return "correlation";
    }
    return "euclidean";
}

ValidityReport validate_correlation_matrix(const Eigen::MatrixXd& r, double tol) {
    if (r.rows() != r.cols()) throw Error(Errc::NotSquare);
    const Eigen::Index n = r.rows();
    if (n < 2) throw Error(Errc::InvalidArgument, "need at least 2 variables");

    ValidityReport rep;
    rep.symmetric = (r - r.transpose()).cwiseAbs().maxCoeff() <= tol;
    rep.unit_diagonal = (r.diagonal().array() - 1.0).abs().maxCoeff() <= tol;
    rep.entries_in_range = r.allFinite() && r.cwiseAbs().maxCoeff() <= 1.0 + tol;

    const Eigen::MatrixXd sym = 0.5 * (r + r.transpose());
    rep.min_eigenvalue = jacobi_eigen(sym).values.minCoeff();
    rep.psd = rep.min_eigenvalue >= -tol;

    rep.angles = sym.unaryExpr([](double v) { return std::acos(std::clamp(v, -1.0, 1.0)); });
    const auto& th = rep.angles;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i + 1; k < n; ++k)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                if (th(i, k) > th(i, j) + th(j, k) + tol || th(i, k) < std::abs(th(i, j) - th(j, k)) - tol)
                    rep.triangle_violations.push_back({i, j, k});
            }
    return rep;
}

}  // namespace mirviz
