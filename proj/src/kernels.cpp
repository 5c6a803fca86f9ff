#include "geoharm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace geoharm {

void validate(const PointSet& ps) {
    if (ps.count() < 1 || ps.dim() < 1) {
        throw InputError("point set must have at least one point and one dimension");
    }
    if (!ps.points.allFinite()) {
        throw InputError("point set contains non-finite coordinates");
    }
}

void validate(const KernelSpec& spec) {
    if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
        throw ParameterError("kernel bandwidth epsilon must be positive and finite");
    }
}

Eigen::MatrixXd pairwise_sq_distances(const PointSet& ps) {
    validate(ps);
    const Eigen::Index n = ps.count();
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (ps.points.row(i) - ps.points.row(j)).squaredNorm();
            d2(i, j) = v;
            d2(j, i) = v;
        }
    }
    return d2;
}

DistanceMatrix pairwise_distances(const PointSet& ps) {
    Eigen::MatrixXd d = pairwise_sq_distances(ps).cwiseSqrt();
    return DistanceMatrix(std::move(d));
}

Eigen::MatrixXd kernel_matrix_from_sq(const Eigen::MatrixXd& sq_dist, const KernelSpec& spec) {
    validate(spec);
    return (-sq_dist / (2.0 * spec.epsilon)).array().exp();
}

Eigen::MatrixXd kernel_matrix(const DistanceMatrix& dist, const KernelSpec& spec) {
    validate(spec);
    return (-dist.d.cwiseProduct(dist.d) / (2.0 * spec.epsilon)).array().exp();
}

double kernel_value(double distance, const KernelSpec& spec) {
    return std::exp(-(distance * distance) / (2.0 * spec.epsilon));
}

Eigen::VectorXd cross_kernel(const PointSet& train, const Eigen::VectorXd& query,
                             const KernelSpec& spec) {
    validate(spec);
    validate(train);
    if (spec.distance_mode != DistanceMode::euclidean) {
        throw ParameterError("cross_kernel requires euclidean mode; "
                             "use cross_kernel_from_distances with a precomputed row");
    }
    if (query.size() != train.dim()) {
        throw InputError("query dimension does not match training set");
    }
    if (!query.allFinite()) {
        throw InputError("query contains non-finite coordinates");
    }
    const Eigen::Index n = train.count();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (train.points.row(i).transpose() - query).squaredNorm();
        k(i) = std::exp(-d2 / (2.0 * spec.epsilon));
    }
    return k;
}

Eigen::VectorXd cross_kernel_from_distances(const Eigen::VectorXd& dist_row,
                                            const KernelSpec& spec) {
    validate(spec);
    if (!dist_row.allFinite() || (dist_row.array() < 0).any()) {
        throw InputError("distance row must be finite and nonnegative");
    }
    return (-dist_row.cwiseProduct(dist_row) / (2.0 * spec.epsilon)).array().exp();
}

double median_pairwise_distance(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    if (n < 2) {
        throw InputError("median pairwise distance requires at least two points");
    }
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d.push_back((points.row(i) - points.row(j)).norm());
        }
    }
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size();
    return (m % 2 == 1) ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

double default_epsilon(const PointSet& ps) {
    const double med = median_pairwise_distance(ps.points);
    return med * med / 2.0;
}

} // namespace geoharm
