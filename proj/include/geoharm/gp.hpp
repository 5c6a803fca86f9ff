#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <random>

#include "geoharm/kernels.hpp"
#include "geoharm/spectral.hpp"

namespace geoharm {

/// Gaussian process configuration. noise_variance plays the role of the
/// squared ridge regularizer in the spectral-filter view; jitter is a small
/// diagonal shift applied only when noise_variance is exactly zero, to keep
/// the factorization alive on numerically singular kernels.
struct GpSpec {
    KernelSpec kernel;
    double noise_variance = 0.0;
    double jitter = 1e-10;

    double effective_noise() const {
        return noise_variance > 0.0 ? noise_variance : jitter;
    }
};

void validate(const GpSpec& spec);

/// Fitted GP posterior over one or more output columns sharing a kernel.
/// The Cholesky factor of (K + sigma^2 I) is cached, giving O(N) means and
/// O(N^2) variances per query. Immutable after fit; queries are pure.
class GpPosterior {
public:
    GpPosterior(PointSet train, Eigen::MatrixXd f, GpSpec spec);

    const PointSet& train() const { return train_; }
    const Eigen::MatrixXd& f_train() const { return f_; }
    const GpSpec& spec() const { return spec_; }
    Eigen::Index n_outputs() const { return f_.cols(); }
    Eigen::Index n_train() const { return train_.count(); }
    double log_det() const { return log_det_; }

    /// Posterior mean vector (one entry per output column) at a query point.
    Eigen::VectorXd mean(const Eigen::VectorXd& query) const;

    /// Posterior mean from a caller-supplied kernel row (precomputed mode).
    Eigen::VectorXd mean_from_kstar(const Eigen::VectorXd& kstar) const;

    /// Posterior variance at a query point (output-independent).
    double variance(const Eigen::VectorXd& query) const;

    double variance_from_kstar(const Eigen::VectorXd& kstar, double kss) const;

    /// Applies (K + sigma^2 I)^{-1} to a right-hand side.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

private:
    PointSet train_;
    Eigen::MatrixXd f_;
    GpSpec spec_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd alpha_; // (K + sigma^2 I)^{-1} f
    double log_det_ = 0.0;
};

GpPosterior fit_gp(const PointSet& ps, const Eigen::VectorXd& f, const GpSpec& spec);
GpPosterior fit_gp(const PointSet& ps, const Eigen::MatrixXd& f, const GpSpec& spec);

/// mu*_GP = k(x*, X) (K + sigma^2 I)^{-1} f for a single-output posterior.
double gp_mean(const GpPosterior& post, const Eigen::VectorXd& query);

/// Sigma* = k(x*,x*) - k(x*,X)(K + sigma^2 I)^{-1} k(X,x*). Depends only on
/// point locations, never on the trained function values.
double gp_variance(const GpPosterior& post, const Eigen::VectorXd& query);

/// Standard Gaussian log evidence of a single-output posterior,
/// -(f' (K+s^2 I)^{-1} f + logdet(K+s^2 I) + N log 2 pi) / 2.
double log_marginal_likelihood(const GpPosterior& post);

/// Draws of the truncated Karhunen-Loeve expansion sum_{n<r} sqrt(sigma_n) v_n xi_n
/// with xi_n iid standard normal; one sample per row. Deterministic given the
/// generator state (modes are drawn in ascending n within each sample).
Eigen::MatrixXd sample_kl(const EigenSystem& es, int r, std::mt19937_64& rng, int n_samples);

/// Karhunen-Loeve coefficient vector conditioned on noisy observations
/// Y = f(X) + eta, truncated to the top r eigenpairs.
///
/// mu_xi = Lambda^{1/2} Phi (M + sigma^2 I)^{-1} y and
/// C_xi  = I - Lambda^{1/2} Phi (M + sigma^2 I)^{-1} Phi' Lambda^{1/2},
/// with Phi the r x N matrix of eigenvector values. Conditioning contracts
/// the identity prior, so C_xi eigenvalues lie in [0, 1].
struct ConditionalKlModel {
    Eigen::VectorXd lambdas;  // top r eigenvalues
    Eigen::MatrixXd Phi;      // r x N eigenvector values phi_n(x_j)
    Eigen::VectorXd mu_xi;    // conditioned mean, length r
    Eigen::MatrixXd C_xi;     // conditioned covariance, r x r
    double sigma2 = 0.0;      // effective observation noise used in the solve
};

ConditionalKlModel conditional_kl(const EigenSystem& es, int r, const Eigen::VectorXd& y,
                                  double sigma2, double jitter = 1e-10);

/// Posterior mean of the conditioned field at the training points,
/// E[f~(x_j)] = Phi' Lambda^{1/2} mu_xi.
Eigen::VectorXd kl_training_mean(const ConditionalKlModel& model);

/// Posterior mean at an out-of-sample point from the Nystrom-extended
/// eigenvector values phi_star (see dmaps::extend_eigenfunctions):
/// E[f~(x*)] = sum_n sqrt(lambda_n) mu_xi_n phi_n(x*). With r = N this equals
/// GP regression with the same kernel matrix, on and off the training set.
double kl_posterior_mean(const ConditionalKlModel& model, const Eigen::VectorXd& phi_star);

/// Grid search over noise_variance maximizing the log marginal likelihood.
/// Ties keep the smallest grid value.
struct NoiseSelection {
    double noise_variance = 0.0;
    double log_evidence = 0.0;
    std::vector<double> evidence; // one entry per grid value
};

NoiseSelection select_noise_by_evidence(const PointSet& ps, const Eigen::VectorXd& f,
                                        const KernelSpec& kernel,
                                        const std::vector<double>& grid);

} // namespace geoharm
