#include "geoharm/dmaps.hpp"

#include <cmath>

namespace geoharm {

namespace {

constexpr double kDegenerateSum = 1e-300;

// pow with exact identity at alpha = 0 and alpha = 1.
double pow_alpha(double x, double alpha) {
    if (alpha == 0.0) return 1.0;
    if (alpha == 1.0) return x;
    return std::pow(x, alpha);
}

} // namespace

void validate(const DiffusionSpec& spec) {
    validate(spec.kernel);
    if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) {
        throw ParameterError("diffusion normalization alpha must lie in [0, 1]");
    }
    if (spec.n_coords < 1) {
        throw ParameterError("n_coords must be >= 1");
    }
}

DiffusionModel fit_dmaps(const PointSet& ps, const DiffusionSpec& spec) {
    validate(ps);
    validate(spec);
    if (spec.kernel.distance_mode != DistanceMode::euclidean) {
        throw ParameterError("fit_dmaps supports euclidean mode only");
    }
    const Eigen::Index n = ps.count();
    if (n < 2) {
        throw InputError("fit_dmaps requires at least two points");
    }
    if (spec.n_coords >= n) {
        throw ParameterError("n_coords must be smaller than the point count");
    }

    DiffusionModel model;
    model.train = ps;
    model.epsilon = spec.kernel.epsilon;
    model.alpha = spec.alpha;
    model.n_coords = spec.n_coords;

    const Eigen::MatrixXd K = kernel_matrix_from_sq(pairwise_sq_distances(ps), spec.kernel);
    model.q = K.rowwise().sum();
    if (model.q.minCoeff() <= kDegenerateSum) {
        throw DegenerateError("kernel row sum vanished; bandwidth too small for the data");
    }

    Eigen::VectorXd qa(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        qa(i) = pow_alpha(model.q(i), spec.alpha);
    }

    // K^(alpha)_ij = K_ij / (q_i^a q_j^a), mirrored so symmetry is bit-exact.
    Eigen::MatrixXd Ka(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = K(i, j) / (qa(i) * qa(j));
            Ka(i, j) = v;
            Ka(j, i) = v;
        }
    }
    model.d_alpha = Ka.rowwise().sum();
    if (model.d_alpha.minCoeff() <= kDegenerateSum) {
        throw DegenerateError("renormalized kernel row sum vanished; bandwidth too small");
    }

    Eigen::VectorXd inv_sqrt_d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        inv_sqrt_d(i) = 1.0 / std::sqrt(model.d_alpha(i));
    }

    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = Ka(i, j) * (inv_sqrt_d(i) * inv_sqrt_d(j));
            M(i, j) = v;
            M(j, i) = v;
        }
    }

    EigenSystem es = eig_sym_psd(M);
    model.lambdas = es.sigma;
    model.phi = es.V;
    model.psi.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        model.psi.col(c) = model.phi.col(c).cwiseProduct(inv_sqrt_d);
    }

    // Sign convention: largest-magnitude psi entry positive, smallest index on
    // ties. Applied to phi and psi together so the pair stays consistent.
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = std::abs(model.psi(i, c));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        if (model.psi(arg, c) < 0.0) {
            model.psi.col(c) = -model.psi.col(c);
            model.phi.col(c) = -model.phi.col(c);
        }
    }

    model.coords.resize(n, spec.n_coords);
    for (int j = 1; j <= spec.n_coords; ++j) {
        model.coords.col(j - 1) = model.lambdas(j) * model.psi.col(j);
    }
    return model;
}

Eigen::MatrixXd embed(const DiffusionModel& model, int j_max) {
    if (j_max < 1 || j_max > model.n_coords) {
        throw ParameterError("embed: j_max out of range");
    }
    return model.coords.leftCols(j_max);
}

NystromExtension extend_eigenfunctions(const DiffusionModel& model,
                                       const Eigen::VectorXd& query, int r,
                                       double lambda_min_tol) {
    if (query.size() != model.train.dim()) {
        throw InputError("query dimension does not match training set");
    }
    if (r < 1 || r > model.train.count()) {
        throw ParameterError("extend_eigenfunctions: r out of range");
    }

    KernelSpec kspec;
    kspec.epsilon = model.epsilon;
    const Eigen::VectorXd k_star = cross_kernel(model.train, query, kspec);
    const double q_star = k_star.sum();
    if (q_star <= kDegenerateSum) {
        throw DegenerateError("query kernel mass vanished; too far from the training set");
    }

    const Eigen::Index n = model.train.count();
    const double qa_star = pow_alpha(q_star, model.alpha);
    Eigen::VectorXd ka_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ka_star(i) = k_star(i) / (qa_star * pow_alpha(model.q(i), model.alpha));
    }
    const double d_star = ka_star.sum();
    if (d_star <= kDegenerateSum) {
        throw DegenerateError("query renormalized kernel mass vanished");
    }
    const Eigen::VectorXd p_star = ka_star / d_star;

    NystromExtension ext;
    ext.q_star = q_star;
    ext.d_alpha_star = d_star;
    ext.psi.resize(r);
    ext.phi.resize(r);
    const double sqrt_d = std::sqrt(d_star);
    for (int j = 0; j < r; ++j) {
        if (model.lambdas(j) <= lambda_min_tol) {
            throw ExtensionError("eigenvalue " + std::to_string(model.lambdas(j)) +
                                 " too small for Nystrom extension");
        }
        ext.psi(j) = p_star.dot(model.psi.col(j)) / model.lambdas(j);
        ext.phi(j) = sqrt_d * ext.psi(j);
    }
    return ext;
}

Eigen::VectorXd nystrom_extend(const DiffusionModel& model, const Eigen::VectorXd& query,
                               double lambda_min_tol) {
    const NystromExtension ext =
        extend_eigenfunctions(model, query, model.n_coords + 1, lambda_min_tol);
    return ext.psi.segment(1, model.n_coords);
}

Eigen::VectorXd nystrom_embed(const DiffusionModel& model, const Eigen::VectorXd& query,
                              double lambda_min_tol) {
    const Eigen::VectorXd psi = nystrom_extend(model, query, lambda_min_tol);
    Eigen::VectorXd y(model.n_coords);
    for (int j = 1; j <= model.n_coords; ++j) {
        y(j - 1) = model.lambdas(j) * psi(j - 1);
    }
    return y;
}

} // namespace geoharm
