#pragma once

#include <Eigen/Core>
#include <vector>

#include "geoharm/errors.hpp"

namespace geoharm {

/// Eigendecomposition of a symmetric PSD matrix: descending eigenvalues and
/// orthonormal eigenvector columns. The shared spectral core behind the
/// geometric-harmonics and GP solve families.
struct EigenSystem {
    Eigen::VectorXd sigma; // sigma(0) >= sigma(1) >= ... >= 0
    Eigen::MatrixXd V;     // column i is the eigenvector of sigma(i)

    Eigen::Index size() const { return sigma.size(); }
};

/// Regularized-solve family, written as per-eigenvalue filter weights.
///
/// truncate: hard spectral cutoff, w_i = 1/sigma_i when sigma_i >= alpha
///   (inclusive threshold), 0 otherwise. Zero eigenvalues are never inverted.
/// ridge:    w_i = 1/(sigma_i + n_factor * alpha^2), matching the dense solve
///   (A + n alpha^2 I)^{-1} b.
/// paper_d:  diagnostic-only filter D_ii = sigma_i^2/(sigma_i^2 + alpha^2).
///   This form appears in the literature as an alternative ridge display but
///   is inconsistent with the dense solve above; it is exposed to reproduce
///   filter-shape plots and rejected by regularized_solve.
struct RegularizationSpec {
    enum class Mode { truncate, ridge, paper_d };

    Mode mode = Mode::ridge;
    double alpha = 0.0;
    int n_factor = 1;

    static RegularizationSpec truncate(double alpha) {
        return {Mode::truncate, alpha, 1};
    }
    static RegularizationSpec ridge(double alpha, int n_factor) {
        return {Mode::ridge, alpha, n_factor};
    }
    static RegularizationSpec paper_diagnostic(double alpha) {
        return {Mode::paper_d, alpha, 1};
    }
};

void validate(const RegularizationSpec& reg);

/// Dense symmetric PSD eigendecomposition.
///
/// The input must be symmetric within 1e-12 relative to its largest entry.
/// Eigenvalues in [-clamp_tol * sigma_max, 0) are clamped to zero; anything
/// below that threshold raises ConditioningError (matrix not PSD).
EigenSystem eig_sym_psd(const Eigen::MatrixXd& A, double clamp_tol = 1e-12);

/// Per-eigenvalue solve weights for the given regularization.
Eigen::VectorXd filter_weights(const EigenSystem& es, const RegularizationSpec& reg);

/// y = V diag(w) V^T b with w from filter_weights. For ridge mode this equals
/// the dense solve of (A + n alpha^2 I) y = b. paper_d mode is rejected.
Eigen::VectorXd regularized_solve(const EigenSystem& es, const Eigen::VectorXd& b,
                                  const RegularizationSpec& reg);

/// One row per eigenvalue, ordered by descending sigma.
struct FilterTableRow {
    double sigma;
    double w_gh;  // truncate(alpha)
    double w_gpr; // ridge(alpha, n_factor)
};

/// Side-by-side truncation and ridge filter weights for one alpha.
std::vector<FilterTableRow> filter_table(const EigenSystem& es, double alpha, int n_factor);

} // namespace geoharm
