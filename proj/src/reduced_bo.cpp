#include "geoharm/reduced_bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

#include "geoharm/dmaps.hpp"
#include "geoharm/stats.hpp"

namespace geoharm {

namespace {

constexpr double kDomainFloor = 1e-6;

void validate_objective(const CanyonObjective& obj) {
    if (!(obj.k1 > 0.0) || !(obj.k2 > 0.0)) {
        throw ParameterError("canyon constants K1, K2 must be positive");
    }
}

Eigen::Vector2d project_to_domain(Eigen::Vector2d x) {
    if (!in_domain(x)) {
        x(0) = std::max(x(0), kDomainFloor);
    }
    return x;
}

// Exact-duplicate grouping: unique rows plus the row -> unique-index map.
struct DedupResult {
    Eigen::MatrixXd unique;
    std::vector<Eigen::Index> index; // per input row
};

DedupResult dedup_rows(const Eigen::MatrixXd& X) {
    DedupResult out;
    std::map<std::pair<double, double>, Eigen::Index> seen;
    std::vector<Eigen::Index> uniques;
    out.index.resize(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const std::pair<double, double> key{X(i, 0), X(i, 1)};
        auto [it, inserted] = seen.try_emplace(key, static_cast<Eigen::Index>(uniques.size()));
        if (inserted) {
            uniques.push_back(i);
        }
        out.index[static_cast<std::size_t>(i)] = it->second;
    }
    out.unique.resize(static_cast<Eigen::Index>(uniques.size()), X.cols());
    for (std::size_t k = 0; k < uniques.size(); ++k) {
        out.unique.row(static_cast<Eigen::Index>(k)) = X.row(uniques[k]);
    }
    return out;
}

double max_nearest_neighbor_distance(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            nn = std::min(nn, (points.row(i) - points.row(j)).norm());
        }
        worst = std::max(worst, nn);
    }
    return worst;
}

struct Embedding {
    DiffusionModel model;
    Eigen::MatrixXd coords; // one row per input point (duplicates share values)
    double epsilon = 0.0;
};

// 1-D diffusion embedding of the iterate cloud. Exact duplicates are embedded
// once and share their representative's coordinate: the map x -> psi(x) is a
// function of the point, and letting the eigensolver break duplicate ties at
// machine precision would scramble rank statistics downstream. The bandwidth
// is the median heuristic with a connectivity floor so a newly explored point
// extending the arc cannot disconnect the kernel graph.
Embedding embed_cloud(const Eigen::MatrixXd& X, double alpha) {
    const DedupResult dd = dedup_rows(X);
    if (dd.unique.rows() < 2) {
        throw DegenerateError("embedding degenerate: all iterates identical");
    }
    const double med = median_pairwise_distance(dd.unique);
    const double nn = max_nearest_neighbor_distance(dd.unique);
    Embedding emb;
    emb.epsilon = std::max(med * med / 2.0, 2.0 * nn * nn);
    if (!(emb.epsilon > 0.0)) {
        throw DegenerateError("embedding degenerate: zero bandwidth");
    }

    DiffusionSpec spec;
    spec.kernel.epsilon = emb.epsilon;
    spec.alpha = alpha;
    spec.n_coords = 1;
    emb.model = fit_dmaps(PointSet(dd.unique), spec);

    emb.coords.resize(X.rows(), 1);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        emb.coords(i, 0) = emb.model.coords(dd.index[static_cast<std::size_t>(i)], 0);
    }
    return emb;
}

Eigen::VectorXd angles_of(const Eigen::MatrixXd& X) {
    Eigen::VectorXd theta(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        theta(i) = std::atan2(X(i, 1), X(i, 0));
    }
    return theta;
}

double min_distance_to_rows(const Eigen::MatrixXd& Y, const Eigen::VectorXd& y) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        best = std::min(best, (Y.row(i).transpose() - y).norm());
    }
    return best;
}

struct SurrogateBundle {
    GpPosterior surrogate;
    double f_offset;
    double epsilon;
};

SurrogateBundle fit_surrogate(const Eigen::MatrixXd& Y, const Eigen::VectorXd& f, double epsilon,
                              double noise) {
    GpSpec spec;
    spec.kernel.epsilon = epsilon;
    spec.noise_variance = noise;
    const double fbar = f.mean();
    return {fit_gp(PointSet(Y), Eigen::VectorXd(f.array() - fbar), spec), fbar, epsilon};
}

// Shared inner loop driving one BO iteration once y_star and the lifted
// candidate are known: project, relax, evaluate, append.
struct StepOutcome {
    Eigen::Vector2d x_appended;
    double f_value;
};

StepOutcome relax_evaluate_append(const CanyonObjective& obj, const Eigen::Vector2d& candidate,
                                  const RelaxParams& relax_params, BoState& state) {
    const Eigen::Vector2d start = project_to_domain(candidate);
    Eigen::MatrixXd one(1, 2);
    one.row(0) = start.transpose();
    const RelaxResult rr = relax(obj, PointSet(one), relax_params);
    const Eigen::Vector2d x_new = rr.points.points.row(0).transpose();
    const double f_new = objective_eval(obj, x_new);

    state.X.points.conservativeResize(state.X.points.rows() + 1, 2);
    state.X.points.row(state.X.points.rows() - 1) = x_new.transpose();
    state.f_vals.conservativeResize(state.f_vals.size() + 1);
    state.f_vals(state.f_vals.size() - 1) = f_new;
    if (f_new < state.incumbent_value) {
        state.incumbent_value = f_new;
        state.incumbent_point = x_new;
    }
    return {x_new, f_new};
}

BoState seed_state(const CanyonObjective& obj, const BoConfig& config, std::mt19937_64& rng) {
    const MhResult mh = mh_sample(obj, config.x0, config.n0, config.mh, rng);
    const RelaxResult rel = relax(obj, mh.samples, config.relax);

    BoState state;
    state.X = rel.points;
    state.mh_acceptance = mh.acceptance_rate;
    state.f_vals.resize(state.X.count());
    state.incumbent_value = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < state.X.count(); ++i) {
        state.f_vals(i) = objective_eval(obj, state.X.points.row(i).transpose());
        if (state.f_vals(i) < state.incumbent_value) {
            state.incumbent_value = state.f_vals(i);
            state.incumbent_point = state.X.points.row(i).transpose();
        }
    }
    return state;
}

} // namespace

bool in_domain(const Eigen::Vector2d& x) {
    return x(0) > 0.0 && x.allFinite();
}

double objective_eval(const CanyonObjective& obj, const Eigen::Vector2d& x) {
    validate_objective(obj);
    if (!in_domain(x)) {
        throw DomainError("objective evaluated outside the open right half-plane");
    }
    const double angle_term = std::atan(x(1) / x(0)) - std::numbers::pi / 4.0;
    const double radial_term = x.squaredNorm() - 1.0;
    return obj.k1 * angle_term * angle_term + obj.k2 * radial_term * radial_term;
}

Eigen::Vector2d objective_grad(const CanyonObjective& obj, const Eigen::Vector2d& x) {
    validate_objective(obj);
    if (!in_domain(x)) {
        throw DomainError("gradient requested outside the open right half-plane");
    }
    const double r2 = x.squaredNorm();
    const double a = std::atan(x(1) / x(0)) - std::numbers::pi / 4.0;
    Eigen::Vector2d g;
    g(0) = obj.k1 * 2.0 * a * (-x(1) / r2) + obj.k2 * 4.0 * (r2 - 1.0) * x(0);
    g(1) = obj.k1 * 2.0 * a * (x(0) / r2) + obj.k2 * 4.0 * (r2 - 1.0) * x(1);
    return g;
}

MhResult mh_sample(const CanyonObjective& obj, const Eigen::Vector2d& x0, int count,
                   const MhParams& params, std::mt19937_64& rng) {
    if (count < 1) {
        throw ParameterError("mh_sample count must be >= 1");
    }
    if (params.beta < 0.0 || params.step < 0.0 || params.burn_in < 0) {
        throw ParameterError("mh parameters must be nonnegative");
    }
    if (!in_domain(x0)) {
        throw DomainError("mh_sample start point outside the domain");
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Eigen::Vector2d x = x0;
    double fx = objective_eval(obj, x);
    const int total = params.burn_in + count;
    int accepted = 0;
    Eigen::MatrixXd samples(count, 2);
    for (int i = 0; i < total; ++i) {
        Eigen::Vector2d prop;
        prop(0) = x(0) + params.step * normal(rng);
        prop(1) = x(1) + params.step * normal(rng);
        if (in_domain(prop)) {
            const double fp = objective_eval(obj, prop);
            const double u = uniform(rng);
            if (std::log(u) < -params.beta * (fp - fx)) {
                x = prop;
                fx = fp;
                ++accepted;
            }
        }
        if (i >= params.burn_in) {
            samples.row(i - params.burn_in) = x.transpose();
        }
    }
    MhResult result;
    result.samples = PointSet(std::move(samples));
    result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
    return result;
}

RelaxResult relax(const CanyonObjective& obj, const PointSet& points, const RelaxParams& params) {
    if (params.steps < 0 || !(params.lr > 0.0)) {
        throw ParameterError("relax requires steps >= 0 and lr > 0");
    }
    validate(points);
    RelaxResult result;
    result.points = points;
    result.stuck.assign(static_cast<std::size_t>(points.count()), 0);

    for (Eigen::Index i = 0; i < points.count(); ++i) {
        Eigen::Vector2d x = points.points.row(i).transpose();
        if (!in_domain(x)) {
            throw DomainError("relax input point outside the domain");
        }
        double fx = objective_eval(obj, x);
        for (int step = 0; step < params.steps; ++step) {
            const Eigen::Vector2d g = objective_grad(obj, x);
            double s = params.lr;
            bool moved = false;
            for (int h = 0; h <= 20; ++h) {
                const Eigen::Vector2d cand = x - s * g;
                if (in_domain(cand)) {
                    const double fc = objective_eval(obj, cand);
                    if (fc <= fx) {
                        x = cand;
                        fx = fc;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if (!moved) {
                result.stuck[static_cast<std::size_t>(i)] = 1;
                break; // keep the last valid position
            }
        }
        result.points.points.row(i) = x.transpose();
    }
    return result;
}

double acquisition(double g, double sigma, double dist_to_samples, double m0, double kappa,
                   double tau) {
    if (!(m0 > 0.0)) {
        throw DegenerateError("acquisition: m0 = 0, all embeddings identical");
    }
    return g - kappa * sigma + tau * dist_to_samples / m0;
}

GridMinResult minimize_acquisition(const GpPosterior& surrogate, const Eigen::MatrixXd& Y,
                                   double m0, const AcquisitionParams& params, double f_offset) {
    const Eigen::Index d = Y.cols();
    if (d != 1 && d != 2) {
        throw ParameterError("minimize_acquisition supports 1- or 2-dimensional embeddings");
    }
    if (params.grid_points < 2) {
        throw ParameterError("minimize_acquisition requires at least two grid points");
    }
    if (!(m0 > 0.0)) {
        throw DegenerateError("acquisition: m0 = 0, all embeddings identical");
    }

    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double mn = Y.col(k).minCoeff();
        const double mx = Y.col(k).maxCoeff();
        if (!(mx > mn)) {
            throw DegenerateError("acquisition grid degenerate: zero range in dimension " +
                                  std::to_string(k));
        }
        const double range = mx - mn;
        lo(k) = mn - params.inflate * range;
        hi(k) = mx + params.inflate * range;
    }

    const int g = params.grid_points;
    const auto coord = [&](Eigen::Index k, int idx) {
        return lo(k) + (hi(k) - lo(k)) * static_cast<double>(idx) / static_cast<double>(g - 1);
    };

    GridMinResult best;
    best.acq_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd y(d);
    const auto consider = [&](const Eigen::VectorXd& point) {
        const Eigen::VectorXd mu = surrogate.mean(point);
        const double var = surrogate.variance(point);
        const double sigma = std::sqrt(std::max(var, 0.0));
        const double dist = min_distance_to_rows(Y, point);
        const double a =
            acquisition(f_offset + mu(0), sigma, dist, m0, params.kappa, params.tau);
        ++best.evals;
        if (a < best.acq_value) { // strict: ties keep the first (smallest) point
            best.acq_value = a;
            best.y_star = point;
        }
    };

    if (d == 1) {
        for (int i = 0; i < g; ++i) {
            y(0) = coord(0, i);
            consider(y);
        }
    } else {
        for (int i = 0; i < g; ++i) {
            y(0) = coord(0, i);
            for (int j = 0; j < g; ++j) {
                y(1) = coord(1, j);
                consider(y);
            }
        }
    }
    return best;
}

LiftResult lift(const Eigen::MatrixXd& Y, const PointSet& X, const Eigen::VectorXd& y_star,
                const GpSpec& lift_spec) {
    if (Y.rows() != X.count()) {
        throw InputError("lift: embedding and ambient sets differ in size");
    }
    if (Y.rows() < 2) {
        throw InputError("lift requires at least two points");
    }
    const Eigen::RowVectorXd center = X.points.colwise().mean();
    const Eigen::MatrixXd residuals = X.points.rowwise() - center;
    const GpPosterior post = fit_gp(PointSet(Y), residuals, lift_spec);

    LiftResult result;
    result.x = post.mean(y_star) + center.transpose();
    const double sigma = std::sqrt(std::max(post.variance(y_star), 0.0));
    result.sigma = Eigen::VectorXd::Constant(X.dim(), sigma);
    return result;
}

void validate(const BoConfig& config) {
    if (config.n0 < 2) {
        throw ParameterError("n0 must be >= 2");
    }
    if (config.n_max < config.n0) {
        throw ParameterError("n_max must be >= n0");
    }
    if (config.kappa < 0.0 || config.tau < 0.0) {
        throw ParameterError("kappa and tau must be >= 0");
    }
    if (config.refit_every < 1) {
        throw ParameterError("refit_every must be >= 1");
    }
    if (!(config.relax.lr > 0.0)) {
        throw ParameterError("relax learning rate must be positive");
    }
    if (config.surrogate_noise < 0.0) {
        throw ParameterError("surrogate_noise must be >= 0");
    }
    if (config.grid_points < 2) {
        throw ParameterError("grid_points must be >= 2");
    }
}

BoState run_reduced_bo(const CanyonObjective& obj, const BoConfig& config) {
    validate(config);
    validate_objective(obj);
    if (config.embed_dim != 1) {
        throw ParameterError("run_reduced_bo supports embed_dim = 1 (grid acquisition)");
    }

    std::mt19937_64 rng(config.seed);
    BoState state = seed_state(obj, config, rng);

    AcquisitionParams acq;
    acq.kappa = config.kappa;
    acq.tau = config.tau;
    acq.grid_points = config.grid_points;
    acq.inflate = config.grid_inflate;

    Embedding emb;
    double rho = 0.0;
    bool have_embedding = false;

    for (int ell = config.n0; ell < config.n_max; ++ell) {
        const int it = ell - config.n0;
        BoIterationRecord rec;
        rec.iteration = ell;
        try {
            rec.refit = (it % config.refit_every == 0) || !have_embedding;
            if (rec.refit) {
                emb = embed_cloud(state.X.points, config.dmaps_alpha);
                have_embedding = true;
                rho = spearman_rho(emb.coords.col(0), angles_of(state.X.points));
            }
            rec.spearman_rho = rho;
            rec.epsilon_dmaps = emb.epsilon;

            const double m0 = median_pairwise_distance(emb.coords);
            if (!(m0 > 0.0)) {
                throw DegenerateError("median embedding distance is zero");
            }
            rec.m0 = m0;
            const double eps_gp = m0 * m0 / 2.0;
            rec.epsilon_surrogate = eps_gp;

            const SurrogateBundle sb =
                fit_surrogate(emb.coords, state.f_vals, eps_gp, config.surrogate_noise);
            const GridMinResult gm =
                minimize_acquisition(sb.surrogate, emb.coords, m0, acq, sb.f_offset);
            rec.y_star = gm.y_star;
            rec.acq_evals = gm.evals;

            GpSpec lift_spec;
            lift_spec.kernel.epsilon = eps_gp;
            lift_spec.noise_variance = config.surrogate_noise;
            const LiftResult lifted = lift(emb.coords, state.X, gm.y_star, lift_spec);
            rec.x_lifted = lifted.x;
            rec.lift_sigma = lifted.sigma;

            const StepOutcome out = relax_evaluate_append(
                obj, Eigen::Vector2d(lifted.x(0), lifted.x(1)), config.relax, state);
            rec.x_appended = out.x_appended;
            rec.f_value = out.f_value;
            rec.incumbent_value = state.incumbent_value;

            if (!rec.refit || config.refit_every > 1) {
                // Keep the embedding rows aligned with X between refits.
                const Eigen::VectorXd y_new = nystrom_embed(emb.model, out.x_appended);
                emb.coords.conservativeResize(emb.coords.rows() + 1, 1);
                emb.coords(emb.coords.rows() - 1, 0) = y_new(0);
            }
            state.trace.push_back(std::move(rec));
        } catch (const DegenerateError& e) {
            state.aborted = true;
            state.abort_reason = e.what();
            break;
        }
    }

    if (have_embedding) {
        state.Y = emb.coords.topRows(state.X.count());
        state.m0 = state.Y.rows() >= 2 ? median_pairwise_distance(state.Y) : 0.0;
    }
    return state;
}

BoState run_plain_bo(const CanyonObjective& obj, const BoConfig& config) {
    validate(config);
    validate_objective(obj);

    std::mt19937_64 rng(config.seed);
    BoState state = seed_state(obj, config, rng);

    AcquisitionParams acq;
    acq.kappa = config.kappa;
    acq.tau = config.tau;
    acq.grid_points = config.grid_points;
    acq.inflate = config.grid_inflate;

    for (int ell = config.n0; ell < config.n_max; ++ell) {
        BoIterationRecord rec;
        rec.iteration = ell;
        rec.refit = true; // identity embedding tracks X exactly
        try {
            const Eigen::MatrixXd& Y = state.X.points;
            const double m0 = median_pairwise_distance(Y);
            if (!(m0 > 0.0)) {
                throw DegenerateError("median iterate distance is zero");
            }
            rec.m0 = m0;
            const double eps_gp = m0 * m0 / 2.0;
            rec.epsilon_surrogate = eps_gp;

            const SurrogateBundle sb =
                fit_surrogate(Y, state.f_vals, eps_gp, config.surrogate_noise);
            const GridMinResult gm = minimize_acquisition(sb.surrogate, Y, m0, acq, sb.f_offset);
            rec.y_star = gm.y_star;
            rec.acq_evals = gm.evals;

            // phi = identity: the candidate is the acquisition argmin itself.
            rec.x_lifted = gm.y_star;
            rec.lift_sigma = Eigen::VectorXd::Zero(2);

            const StepOutcome out = relax_evaluate_append(
                obj, Eigen::Vector2d(gm.y_star(0), gm.y_star(1)), config.relax, state);
            rec.x_appended = out.x_appended;
            rec.f_value = out.f_value;
            rec.incumbent_value = state.incumbent_value;
            state.trace.push_back(std::move(rec));
        } catch (const DegenerateError& e) {
            state.aborted = true;
            state.abort_reason = e.what();
            break;
        }
    }

    state.Y = state.X.points;
    state.m0 = state.Y.rows() >= 2 ? median_pairwise_distance(state.Y) : 0.0;
    return state;
}

} // namespace geoharm
