#include "geoharm/gh.hpp"

#include <cmath>

namespace geoharm {

GhModel fit_gh(const EigenSystem& es, const Eigen::MatrixXd& f, double delta) {
    if (delta < 0.0 || !std::isfinite(delta)) {
        throw ParameterError("gh truncation delta must be finite and >= 0");
    }
    if (f.rows() != es.size()) {
        throw InputError("function values length does not match eigensystem");
    }
    if (f.cols() < 1) {
        throw InputError("fit_gh requires at least one output column");
    }

    GhModel model;
    model.es = es;
    model.delta = delta;
    const double sigma0 = es.sigma.size() > 0 ? es.sigma(0) : 0.0;
    for (Eigen::Index j = 0; j < es.size(); ++j) {
        if (es.sigma(j) > delta * sigma0 && es.sigma(j) > 0.0) {
            model.retained.push_back(j);
        }
    }
    if (model.retained.empty()) {
        throw DegenerateError("empty retained set: delta too large or zero spectrum");
    }

    model.coeffs.resize(static_cast<Eigen::Index>(model.retained.size()), f.cols());
    for (std::size_t k = 0; k < model.retained.size(); ++k) {
        model.coeffs.row(static_cast<Eigen::Index>(k)) =
            es.V.col(model.retained[k]).transpose() * f;
    }
    model.f_train = f;
    return model;
}

GhModel fit_gh(const EigenSystem& es, const Eigen::VectorXd& f, double delta) {
    return fit_gh(es, Eigen::MatrixXd(f), delta);
}

Eigen::VectorXd gh_predict(const GhModel& model, const Eigen::VectorXd& kstar) {
    if (kstar.size() != model.es.size()) {
        throw InputError("kstar length does not match training set");
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(model.coeffs.cols());
    for (std::size_t k = 0; k < model.retained.size(); ++k) {
        const Eigen::Index j = model.retained[k];
        const double proj = model.es.V.col(j).dot(kstar);
        mu += (proj / model.es.sigma(j)) *
              model.coeffs.row(static_cast<Eigen::Index>(k)).transpose();
    }
    return mu;
}

double gh_predict1(const GhModel& model, const Eigen::VectorXd& kstar) {
    if (model.coeffs.cols() != 1) {
        throw InputError("gh_predict1 requires a single-output model");
    }
    return gh_predict(model, kstar)(0);
}

double gh_error(const GhModel& model, const Eigen::VectorXd& kstar, double kss) {
    if (kstar.size() != model.es.size()) {
        throw InputError("kstar length does not match training set");
    }
    double khat = 0.0;
    for (const Eigen::Index j : model.retained) {
        const double proj = model.es.V.col(j).dot(kstar);
        khat += proj * proj / model.es.sigma(j);
    }
    return kss - khat;
}

ExtendabilityResult extendability_check(const EigenSystem& es, const Eigen::VectorXd& f,
                                        double eta, double delta) {
    if (!(eta > 0.0)) {
        throw ParameterError("eta must be positive");
    }
    if (delta < 0.0) {
        throw ParameterError("delta must be >= 0");
    }
    if (f.size() != es.size()) {
        throw InputError("function values length does not match eigensystem");
    }
    const double norm2 = f.squaredNorm();
    if (norm2 == 0.0) {
        throw InputError("extendability fraction undefined for the zero function");
    }
    const double sigma0 = es.sigma.size() > 0 ? es.sigma(0) : 0.0;
    double captured = 0.0;
    for (Eigen::Index j = 0; j < es.size(); ++j) {
        if (es.sigma(j) > delta * sigma0 && es.sigma(j) > 0.0) {
            const double proj = es.V.col(j).dot(f);
            captured += proj * proj;
        }
    }
    ExtendabilityResult result;
    result.captured_fraction = captured / norm2;
    result.extendable = result.captured_fraction >= 1.0 - eta;
    return result;
}

} // namespace geoharm
