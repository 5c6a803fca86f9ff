#pragma once

#include <Eigen/Core>

#include "geoharm/errors.hpp"

namespace geoharm {

/// A set of N points in n-dimensional ambient space, one point per row.
struct PointSet {
    Eigen::MatrixXd points; // N x n

    PointSet() = default;
    explicit PointSet(Eigen::MatrixXd pts) : points(std::move(pts)) {}

    Eigen::Index count() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
    Eigen::RowVectorXd row(Eigen::Index i) const { return points.row(i); }
};

/// Throws InputError unless the point set has N >= 1, n >= 1 and all
/// coordinates finite.
void validate(const PointSet& ps);

enum class DistanceMode {
    euclidean,  ///< distances computed from ambient coordinates
    precomputed ///< caller supplies a DistanceMatrix (e.g. geodesic)
};

/// Squared-exponential kernel specification, K(x,y) = exp(-d(x,y)^2 / (2 eps)).
struct KernelSpec {
    double epsilon = 1.0;
    DistanceMode distance_mode = DistanceMode::euclidean;
};

/// Throws ParameterError unless epsilon is positive and finite.
void validate(const KernelSpec& spec);

/// Symmetric matrix of pairwise distances with zero diagonal. The triangle
/// inequality is not enforced: precomputed mode may carry geodesic
/// approximations.
struct DistanceMatrix {
    Eigen::MatrixXd d;

    DistanceMatrix() = default;
    explicit DistanceMatrix(Eigen::MatrixXd m) : d(std::move(m)) {}

    Eigen::Index size() const { return d.rows(); }
};

/// Euclidean pairwise distances, d_ij = |x_i - x_j|_2. Symmetric by
/// construction (upper triangle mirrored), exact zero diagonal.
DistanceMatrix pairwise_distances(const PointSet& ps);

/// Squared Euclidean pairwise distances. Preferred internally: the kernel
/// consumes d^2 directly, avoiding a sqrt/square round trip near zero.
Eigen::MatrixXd pairwise_sq_distances(const PointSet& ps);

/// K_ij = exp(-d_ij^2 / (2 eps)). Unit diagonal and bit-exact symmetry
/// follow from the zero diagonal and symmetry of the input distances.
Eigen::MatrixXd kernel_matrix(const DistanceMatrix& dist, const KernelSpec& spec);

/// Kernel matrix from squared distances (no intermediate sqrt).
Eigen::MatrixXd kernel_matrix_from_sq(const Eigen::MatrixXd& sq_dist, const KernelSpec& spec);

/// Kernel row k(x*, X) for a query point against the training set.
/// Requires euclidean mode; precomputed mode callers supply a distance row
/// to cross_kernel_from_distances instead.
Eigen::VectorXd cross_kernel(const PointSet& train, const Eigen::VectorXd& query,
                             const KernelSpec& spec);

/// Kernel row from a caller-supplied distance row (precomputed mode).
Eigen::VectorXd cross_kernel_from_distances(const Eigen::VectorXd& dist_row,
                                            const KernelSpec& spec);

/// Scalar kernel value for one distance.
double kernel_value(double distance, const KernelSpec& spec);

/// Median of the N(N-1)/2 pairwise distances (average of the two middle
/// elements for even counts). Requires N >= 2.
double median_pairwise_distance(const Eigen::MatrixXd& points);

/// Default bandwidth heuristic: square of the median pairwise distance
/// divided by two.
double default_epsilon(const PointSet& ps);

} // namespace geoharm
