#pragma once

#include <Eigen/Core>
#include <vector>

#include "geoharm/spectral.hpp"

namespace geoharm {

/// Geometric Harmonics regressor: truncated spectral expansion of a function
/// in the eigenbasis of the training kernel matrix A = k(X, X).
///
/// The retained set is S_delta = { j : sigma_j > delta * sigma_0 } with strict
/// inequality; zero eigenvalues are never retained, even at delta = 0.
/// Coefficients are stored per output column so one decomposition serves
/// multi-output prediction (e.g. lifting all ambient coordinates).
struct GhModel {
    EigenSystem es;
    double delta = 0.0;
    std::vector<Eigen::Index> retained; // indices into es.sigma, ascending
    Eigen::MatrixXd coeffs;             // |S_delta| x m projections <v_j, f>
    Eigen::MatrixXd f_train;            // N x m training values
};

/// Fits the truncated expansion. Throws DegenerateError when S_delta is empty
/// (delta >= 1, or a zero matrix).
GhModel fit_gh(const EigenSystem& es, const Eigen::MatrixXd& f, double delta);

GhModel fit_gh(const EigenSystem& es, const Eigen::VectorXd& f, double delta);

/// mu*_GH = sum_{j in S_delta} (v_j . kstar) (1/sigma_j) <v_j, f>, per output.
Eigen::VectorXd gh_predict(const GhModel& model, const Eigen::VectorXd& kstar);

/// Scalar convenience for single-output models.
double gh_predict1(const GhModel& model, const Eigen::VectorXd& kstar);

/// Error estimate Sigma*_GH = k(x*,x*) - khat(x*,x*), where khat approximates
/// the kernel section k(x*, .) through the retained eigenpairs. Depends only
/// on point locations, never on the trained function values.
double gh_error(const GhModel& model, const Eigen::VectorXd& kstar, double kss);

struct ExtendabilityResult {
    bool extendable = false;
    double captured_fraction = 0.0;
};

/// (eta, delta)-extendability: the squared projections onto S_delta must
/// capture at least a (1 - eta) fraction of |f|^2. The classical statement
/// displays unsquared projections, but Parseval forces squares for the two
/// sides to be dimensionally comparable; squared projections are used here.
ExtendabilityResult extendability_check(const EigenSystem& es, const Eigen::VectorXd& f,
                                        double eta, double delta);

} // namespace geoharm
