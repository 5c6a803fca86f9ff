#pragma once

#include <Eigen/Core>

#include "geoharm/kernels.hpp"
#include "geoharm/spectral.hpp"

namespace geoharm {

/// Configuration for the alpha-normalized diffusion-maps pipeline. The
/// normalization exponent alpha here is unrelated to the regularization
/// alpha of the spectral module; alpha = 1 recovers Laplace-Beltrami
/// geometry regardless of sampling density.
struct DiffusionSpec {
    KernelSpec kernel;
    double alpha = 1.0; // in [0, 1]
    int n_coords = 1;   // nontrivial embedding coordinates, >= 1 and < N
};

void validate(const DiffusionSpec& spec);

/// Fitted diffusion map: the full normalization pipeline outputs plus the
/// training-point embedding. Immutable after fit.
///
/// phi holds eigenvectors of the symmetric kernel M^(alpha); psi = phi / sqrt(d_alpha)
/// are the eigenfunctions of the Markov operator P^(alpha). Column j of coords
/// (j = 0 .. n_coords-1) is lambda_{j+1} * psi_{j+1} at the training points; the
/// trivial pair (lambda_0 = 1, constant psi_0) carries no geometry and is excluded.
struct DiffusionModel {
    PointSet train;
    double epsilon = 0.0;
    double alpha = 1.0;
    int n_coords = 0;
    Eigen::VectorXd q;        // Q_eps(x_i): kernel row sums
    Eigen::VectorXd d_alpha;  // d^(alpha)(x_i): renormalized-kernel row sums
    Eigen::VectorXd lambdas;  // eigenvalues of M^(alpha), descending, lambda_0 ~ 1
    Eigen::MatrixXd phi;      // eigenvectors of M^(alpha) (columns)
    Eigen::MatrixXd psi;      // psi_n = phi_n / sqrt(d_alpha), componentwise
    Eigen::MatrixXd coords;   // N x n_coords embedding
};

/// Runs the discrete pipeline K -> Q_eps -> K^(alpha) -> d^(alpha) -> M^(alpha),
/// eigendecomposes M^(alpha) and assembles the embedding. Eigenvector signs are
/// fixed so each psi column's largest-magnitude entry is positive (smallest
/// index on ties), making runs reproducible.
DiffusionModel fit_dmaps(const PointSet& ps, const DiffusionSpec& spec);

/// First j_max embedding columns (trivial pair excluded).
Eigen::MatrixXd embed(const DiffusionModel& model, int j_max);

/// Out-of-sample evaluation of the leading eigenfunctions at one query point.
///
/// psi(n) extends the Markov eigenfunction via the Nystrom formula
///   psi_n(x*) = (1/lambda_n) sum_i p^(alpha)(x*, x_i) psi_n(x_i),
/// with Q_eps(x*) and d^(alpha)(x*) accumulated over the training set exactly
/// as during fitting. phi(n) = sqrt(d^(alpha)(x*)) * psi(n) is the matching
/// extension of the symmetric-kernel eigenvector, i.e. the Nystrom extension
/// through the M^(alpha) kernel; it is the form that enters conditional-KL
/// posterior evaluation.
struct NystromExtension {
    Eigen::VectorXd psi;  // psi_n(x*), n = 0 .. r-1 (trivial pair included)
    Eigen::VectorXd phi;  // phi_n(x*) = sqrt(d_alpha_star) * psi_n(x*)
    double q_star = 0.0;
    double d_alpha_star = 0.0;
};

NystromExtension extend_eigenfunctions(const DiffusionModel& model,
                                       const Eigen::VectorXd& query, int r,
                                       double lambda_min_tol = 1e-12);

/// psi_j(x*) for the nontrivial coordinates j = 1 .. n_coords.
Eigen::VectorXd nystrom_extend(const DiffusionModel& model, const Eigen::VectorXd& query,
                               double lambda_min_tol = 1e-12);

/// Embedding coordinates lambda_j * psi_j(x*) of a query point, matching the
/// columns of DiffusionModel::coords.
Eigen::VectorXd nystrom_embed(const DiffusionModel& model, const Eigen::VectorXd& query,
                              double lambda_min_tol = 1e-12);

} // namespace geoharm
