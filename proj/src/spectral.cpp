#include "geoharm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace geoharm {

void validate(const RegularizationSpec& reg) {
    if (!(reg.alpha >= 0.0) || !std::isfinite(reg.alpha)) {
        throw ParameterError("regularization alpha must be finite and >= 0");
    }
    if (reg.n_factor < 1) {
        throw ParameterError("regularization n_factor must be a positive integer");
    }
}

EigenSystem eig_sym_psd(const Eigen::MatrixXd& A, double clamp_tol) {
    if (A.rows() != A.cols()) {
        throw InputError("eig_sym_psd requires a square matrix");
    }
    if (!A.allFinite()) {
        throw InputError("eig_sym_psd input contains non-finite entries");
    }
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw InputError("eig_sym_psd input is asymmetric beyond tolerance");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success) {
        throw ConditioningError("symmetric eigendecomposition failed to converge");
    }

    const Eigen::Index n = A.rows();
    EigenSystem es;
    es.sigma.resize(n);
    es.V.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        es.sigma(i) = solver.eigenvalues()(n - 1 - i);
        es.V.col(i) = solver.eigenvectors().col(n - 1 - i);
    }

    const double sigma_max = std::max(es.sigma(0), 0.0);
    const double neg_tol = clamp_tol * std::max(sigma_max, 1e-300);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (es.sigma(i) < -neg_tol) {
            throw ConditioningError("matrix is not positive semi-definite: eigenvalue " +
                                    std::to_string(es.sigma(i)) + " below -" +
                                    std::to_string(neg_tol));
        }
        if (es.sigma(i) < 0.0) {
            es.sigma(i) = 0.0;
        }
    }
    return es;
}

Eigen::VectorXd filter_weights(const EigenSystem& es, const RegularizationSpec& reg) {
    validate(reg);
    const Eigen::Index n = es.size();
    Eigen::VectorXd w(n);
    switch (reg.mode) {
    case RegularizationSpec::Mode::truncate:
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = es.sigma(i);
            w(i) = (s > 0.0 && s >= reg.alpha) ? 1.0 / s : 0.0;
        }
        break;
    case RegularizationSpec::Mode::ridge: {
        const double shift = static_cast<double>(reg.n_factor) * reg.alpha * reg.alpha;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double denom = es.sigma(i) + shift;
            if (denom <= 0.0) {
                throw ConditioningError("ridge filter: zero eigenvalue with zero regularizer");
            }
            w(i) = 1.0 / denom;
        }
        break;
    }
    case RegularizationSpec::Mode::paper_d:
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s2 = es.sigma(i) * es.sigma(i);
            const double denom = s2 + reg.alpha * reg.alpha;
            w(i) = denom > 0.0 ? s2 / denom : 0.0;
        }
        break;
    }
    return w;
}

Eigen::VectorXd regularized_solve(const EigenSystem& es, const Eigen::VectorXd& b,
                                  const RegularizationSpec& reg) {
    if (reg.mode == RegularizationSpec::Mode::paper_d) {
        throw ParameterError("paper_d is a diagnostic filter, not a solve mode");
    }
    if (b.size() != es.size()) {
        throw InputError("right-hand side length does not match eigensystem");
    }
    const Eigen::VectorXd w = filter_weights(es, reg);
    return es.V * (w.cwiseProduct(es.V.transpose() * b));
}

std::vector<FilterTableRow> filter_table(const EigenSystem& es, double alpha, int n_factor) {
    if (!(alpha > 0.0)) {
        throw ParameterError("filter_table requires alpha > 0");
    }
    const Eigen::VectorXd w_gh = filter_weights(es, RegularizationSpec::truncate(alpha));
    const Eigen::VectorXd w_gpr = filter_weights(es, RegularizationSpec::ridge(alpha, n_factor));
    std::vector<FilterTableRow> rows;
    rows.reserve(static_cast<std::size_t>(es.size()));
    for (Eigen::Index i = 0; i < es.size(); ++i) {
        rows.push_back({es.sigma(i), w_gh(i), w_gpr(i)});
    }
    return rows;
}

} // namespace geoharm
