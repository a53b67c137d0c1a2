#include "mirviz/reduce.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace mirviz {

std::string to_string(ReduceMethod method) {
    switch (method) {
        case ReduceMethod::pca: return "pca";
        case ReduceMethod::mds: return "mds";
        case ReduceMethod::tsne: return "tsne";
    }
    return "pca";
}

Embedding classical_mds(const DistanceMatrix& distances, Eigen::Index k) {
    const Eigen::MatrixXd& d = distances.values;
    if (d.rows() != d.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
    const Eigen::Index n = d.rows();
    if (n < 1) throw Error(Errc::TooFewPoints);
    if (k < 1 || k > n) throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + ", n = " + std::to_string(n));

    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) throw Error(Errc::NotSymmetric);
    if (d.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error(Errc::BadDiagonal);

    const Eigen::MatrixXd sq = d.cwiseAbs2();
    const Eigen::VectorXd row_mean = sq.rowwise().mean();
    const Eigen::RowVectorXd col_mean = sq.colwise().mean();
    const double grand = sq.mean();
    Eigen::MatrixXd b = sq;
    b.colwise() -= row_mean;
    b.rowwise() -= col_mean;
    b.array() += grand;
    b *= -0.5;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
    const double lambda_scale = std::max(lambda.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double floor = 1e-12 * lambda_scale;

    Embedding out;
    out.method = ReduceMethod::mds;
    out.points = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index src = n - 1 - c;
        if (!(lambda[src] > floor)) continue;
        Eigen::VectorXd col = eig.eigenvectors().col(src) * std::sqrt(lambda[src]);
        Eigen::Index at;
        col.cwiseAbs().maxCoeff(&at);
        if (col[at] < 0) col = -col;
        out.points.col(c) = col;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (lambda[i] < -1e-9 * lambda_scale) ++out.negative_eigenvalues;
    return out;
}

double SeededNormal::uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return double((state_ >> 11) + 1) * 0x1.0p-53;
}

double SeededNormal::operator()() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

ConditionalAffinities conditional_affinities(const Eigen::MatrixXd& squared_distances, double perplexity) {
    const Eigen::Index n = squared_distances.rows();
    const double target = std::log2(perplexity);
    ConditionalAffinities out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Ones(n)};

    Eigen::VectorXd shifted(n), row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d_min = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) d_min = std::min(d_min, squared_distances(i, j));
        shifted = squared_distances.row(i).transpose().array() - d_min;

        double beta = 1.0;
        double beta_lo = -std::numeric_limits<double>::infinity();
        double beta_hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 50; ++step) {
            double sum = 0, weighted = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-beta * shifted[j]);
                sum += row[j];
                weighted += row[j] * shifted[j];
            }
            const double entropy_bits = (std::log(sum) + beta * weighted / sum) / std::numbers::ln2;
            const double diff = entropy_bits - target;
            // 1e-5 bits keeps the perplexity itself within 1e-3 up to perplexity ~140
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
            } else {
                beta_hi = beta;
                beta = std::isinf(beta_lo) ? beta / 2.0 : 0.5 * (beta + beta_lo);
            }
        }
        for (Eigen::Index j = 0; j < n; ++j) row[j] = j == i ? 0.0 : std::exp(-beta * shifted[j]);
        out.p.row(i) = row.transpose() / row.sum();
        out.beta[i] = beta;
    }
    return out;
}

namespace {

Eigen::MatrixXd student_t_kernel(const Eigen::MatrixXd& y) {
    const Eigen::Index n = y.rows();
    Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
    return num;
}

Eigen::MatrixXd pairwise_squared_distances(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
    return d;
}

}  // namespace

double tsne_cost(const Eigen::MatrixXd& joint_p, const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd num = student_t_kernel(y);
    const double sum_q = num.sum();
    double kl = 0;
    for (Eigen::Index i = 0; i < joint_p.rows(); ++i)
        for (Eigen::Index j = 0; j < joint_p.cols(); ++j) {
            const double p = joint_p(i, j);
            if (i == j || p <= 0) continue;
            const double q = std::max(num(i, j) / sum_q, std::numeric_limits<double>::min());
            kl += p * std::log(p / q);
        }
    return kl;
}

TsneResult tsne_run(const Eigen::MatrixXd& data, const TsneOptions& o) {
    const Eigen::Index n = data.rows();
    if (n < 2) throw Error(Errc::TooFewPoints, std::to_string(n) + " point(s)");
    if (o.k != 2 && o.k != 3) throw Error(Errc::InvalidArgument, "t-SNE supports k = 2 or 3");
    if (!(o.perplexity > 0)) throw Error(Errc::InvalidArgument, "perplexity must be positive");
    if (double(n) < 3.0 * o.perplexity)
        throw Error(Errc::PerplexityTooLarge, "need at least 3 * perplexity points");

    const auto conditional = conditional_affinities(pairwise_squared_distances(data), o.perplexity);
    Eigen::MatrixXd p = conditional.p + conditional.p.transpose();
    p /= p.sum();

    SeededNormal normal(o.seed);
    Eigen::MatrixXd y(n, o.k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < o.k; ++c) y(i, c) = 1e-4 * normal();

    Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, o.k);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, o.k);
    Eigen::MatrixXd grad(n, o.k);

    TsneResult result;
    for (int iter = 0; iter < o.iterations; ++iter) {
        const double exaggeration = iter < o.exaggeration_iterations ? o.exaggeration : 1.0;
        const double momentum = iter < o.momentum_switch ? o.initial_momentum : o.final_momentum;

        const Eigen::MatrixXd num = student_t_kernel(y);
        const double sum_q = num.sum();
        grad.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double coeff = (exaggeration * p(i, j) - num(i, j) / sum_q) * num(i, j);
                grad.row(i) += 4.0 * coeff * (y.row(i) - y.row(j));
            }

        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index c = 0; c < o.k; ++c) {
                const bool same_sign = (grad(i, c) > 0) == (update(i, c) > 0);
                gains(i, c) = std::max(0.01, same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2);
            }
        update = momentum * update - o.learning_rate * gains.cwiseProduct(grad);
        y += update;
        y.rowwise() -= y.colwise().mean();

        const int done = iter + 1;
        if (done % 50 == 0 || done == o.iterations) result.cost_trace.emplace_back(done, tsne_cost(p, y));
    }

    result.embedding.method = ReduceMethod::tsne;
    result.embedding.points = std::move(y);
    result.embedding.seed = o.seed;
    return result;
}

}  // namespace mirviz
