#include "geoharm/gp.hpp"

#include <cmath>
#include <numbers>

namespace geoharm {

void validate(const GpSpec& spec) {
    validate(spec.kernel);
    if (spec.noise_variance < 0.0 || !std::isfinite(spec.noise_variance)) {
        throw ParameterError("noise_variance must be finite and >= 0");
    }
    if (spec.jitter < 0.0 || spec.jitter > 1e-6) {
        throw ParameterError("jitter must lie in [0, 1e-6]");
    }
}

GpPosterior::GpPosterior(PointSet train, Eigen::MatrixXd f, GpSpec spec)
    : train_(std::move(train)), f_(std::move(f)), spec_(std::move(spec)) {
    validate(train_);
    validate(spec_);
    if (f_.rows() != train_.count()) {
        throw InputError("training values length does not match point count");
    }
    if (spec_.kernel.distance_mode != DistanceMode::euclidean) {
        throw ParameterError("fit_gp supports euclidean mode only");
    }

    Eigen::MatrixXd K = kernel_matrix_from_sq(pairwise_sq_distances(train_), spec_.kernel);
    K.diagonal().array() += spec_.effective_noise();
    llt_.compute(K);
    if (llt_.info() != Eigen::Success) {
        throw ConditioningError(
            "Cholesky factorization of (K + sigma^2 I) failed; raise jitter or noise_variance");
    }
    alpha_ = llt_.solve(f_);
    log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Eigen::VectorXd GpPosterior::mean(const Eigen::VectorXd& query) const {
    return mean_from_kstar(cross_kernel(train_, query, spec_.kernel));
}

Eigen::VectorXd GpPosterior::mean_from_kstar(const Eigen::VectorXd& kstar) const {
    if (kstar.size() != train_.count()) {
        throw InputError("kstar length does not match training set");
    }
    return alpha_.transpose() * kstar;
}

double GpPosterior::variance(const Eigen::VectorXd& query) const {
    // k(x*, x*) = 1 for the squared-exponential kernel.
    return variance_from_kstar(cross_kernel(train_, query, spec_.kernel), 1.0);
}

double GpPosterior::variance_from_kstar(const Eigen::VectorXd& kstar, double kss) const {
    if (kstar.size() != train_.count()) {
        throw InputError("kstar length does not match training set");
    }
    return kss - kstar.dot(llt_.solve(kstar));
}

Eigen::VectorXd GpPosterior::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != train_.count()) {
        throw InputError("right-hand side length does not match training set");
    }
    return llt_.solve(rhs);
}

GpPosterior fit_gp(const PointSet& ps, const Eigen::VectorXd& f, const GpSpec& spec) {
    return GpPosterior(ps, Eigen::MatrixXd(f), spec);
}

GpPosterior fit_gp(const PointSet& ps, const Eigen::MatrixXd& f, const GpSpec& spec) {
    return GpPosterior(ps, f, spec);
}

double gp_mean(const GpPosterior& post, const Eigen::VectorXd& query) {
    if (post.n_outputs() != 1) {
        throw InputError("gp_mean requires a single-output posterior");
    }
    return post.mean(query)(0);
}

double gp_variance(const GpPosterior& post, const Eigen::VectorXd& query) {
    return post.variance(query);
}

double log_marginal_likelihood(const GpPosterior& post) {
    if (post.n_outputs() != 1) {
        throw InputError("log_marginal_likelihood requires a single-output posterior");
    }
    const Eigen::VectorXd f = post.f_train().col(0);
    const double quad = f.dot(post.solve(f));
    const double n = static_cast<double>(post.n_train());
    return -0.5 * (quad + post.log_det() + n * std::log(2.0 * std::numbers::pi));
}

Eigen::MatrixXd sample_kl(const EigenSystem& es, int r, std::mt19937_64& rng, int n_samples) {
    if (n_samples < 1) {
        throw ParameterError("n_samples must be >= 1");
    }
    int n_positive = 0;
    for (Eigen::Index i = 0; i < es.size(); ++i) {
        if (es.sigma(i) > 0.0) ++n_positive;
    }
    if (r < 1 || r > n_positive) {
        throw ParameterError("sample_kl: r exceeds the positive spectrum");
    }

    Eigen::MatrixXd scaled(es.V.rows(), r);
    for (int j = 0; j < r; ++j) {
        scaled.col(j) = std::sqrt(es.sigma(j)) * es.V.col(j);
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(n_samples, es.V.rows());
    for (int s = 0; s < n_samples; ++s) {
        for (int j = 0; j < r; ++j) {
            samples.row(s) += normal(rng) * scaled.col(j).transpose();
        }
    }
    return samples;
}

ConditionalKlModel conditional_kl(const EigenSystem& es, int r, const Eigen::VectorXd& y,
                                  double sigma2, double jitter) {
    if (sigma2 < 0.0 || !std::isfinite(sigma2)) {
        throw ParameterError("sigma2 must be finite and >= 0");
    }
    if (r < 1 || r > es.size()) {
        throw ParameterError("conditional_kl: r out of range");
    }
    if (y.size() != es.size()) {
        throw InputError("observation length does not match eigensystem");
    }

    const Eigen::Index n = es.size();
    const double sigma_min = es.sigma(n - 1);
    const double sigma_max = es.sigma(0);
    double s2 = sigma2;
    if (s2 == 0.0 && sigma_min <= 1e-12 * std::max(sigma_max, 1e-300)) {
        s2 = jitter; // M numerically singular without observation noise
    }
    if (sigma_min + s2 <= 0.0) {
        throw ConditioningError("(M + sigma^2 I) is singular; supply noise or jitter");
    }

    // (M + s2 I)^{-1} applied through the eigensystem; Phi = V_r^T picks the
    // leading block, so mu and C reduce to weighted projections.
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = 1.0 / (es.sigma(i) + s2);
    }

    ConditionalKlModel model;
    model.sigma2 = s2;
    model.lambdas = es.sigma.head(r);
    model.Phi = es.V.leftCols(r).transpose();

    const Eigen::VectorXd proj = es.V.transpose() * y; // V^T y, full spectrum
    model.mu_xi.resize(r);
    for (int i = 0; i < r; ++i) {
        model.mu_xi(i) = std::sqrt(es.sigma(i)) * w(i) * proj(i);
    }
    model.C_xi = Eigen::MatrixXd::Identity(r, r);
    for (int i = 0; i < r; ++i) {
        model.C_xi(i, i) -= es.sigma(i) * w(i);
    }
    return model;
}

Eigen::VectorXd kl_training_mean(const ConditionalKlModel& model) {
    const int r = static_cast<int>(model.mu_xi.size());
    Eigen::VectorXd weighted(r);
    for (int i = 0; i < r; ++i) {
        weighted(i) = std::sqrt(model.lambdas(i)) * model.mu_xi(i);
    }
    return model.Phi.transpose() * weighted;
}

double kl_posterior_mean(const ConditionalKlModel& model, const Eigen::VectorXd& phi_star) {
    if (phi_star.size() != model.mu_xi.size()) {
        throw InputError("phi_star length does not match the retained eigenpairs");
    }
    double value = 0.0;
    for (Eigen::Index i = 0; i < phi_star.size(); ++i) {
        value += std::sqrt(model.lambdas(i)) * model.mu_xi(i) * phi_star(i);
    }
    return value;
}

NoiseSelection select_noise_by_evidence(const PointSet& ps, const Eigen::VectorXd& f,
                                        const KernelSpec& kernel,
                                        const std::vector<double>& grid) {
    if (grid.empty()) {
        throw ParameterError("noise grid must be nonempty");
    }
    NoiseSelection sel;
    sel.evidence.reserve(grid.size());
    bool have_best = false;
    for (const double s2 : grid) {
        GpSpec spec;
        spec.kernel = kernel;
        spec.noise_variance = s2;
        double lml;
        try {
            lml = log_marginal_likelihood(fit_gp(ps, f, spec));
        } catch (const ConditioningError&) {
            lml = -std::numeric_limits<double>::infinity();
        }
        sel.evidence.push_back(lml);
        if (!have_best || lml > sel.log_evidence) {
            have_best = true;
            sel.log_evidence = lml;
            sel.noise_variance = s2;
        }
    }
    return sel;
}

} // namespace geoharm
