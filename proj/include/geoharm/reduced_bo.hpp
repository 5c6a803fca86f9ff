#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geoharm/gp.hpp"
#include "geoharm/kernels.hpp"

namespace geoharm {

/// Canyon-shaped objective on the open right half-plane:
/// f(x) = K1 (arctan(x2/x1) - pi/4)^2 + K2 (x1^2 + x2^2 - 1)^2.
/// The global minimum sits at (sqrt(2)/2, sqrt(2)/2). The K2 wall makes the
/// descent dynamics collapse quickly onto the unit-circle arc, leaving the
/// angular direction as the slow manifold.
struct CanyonObjective {
    double k1 = 10.0;
    double k2 = 50.0;
};

bool in_domain(const Eigen::Vector2d& x);

double objective_eval(const CanyonObjective& obj, const Eigen::Vector2d& x);

Eigen::Vector2d objective_grad(const CanyonObjective& obj, const Eigen::Vector2d& x);

/// Metropolis-Hastings proposal parameters. Proposals are isotropic Gaussian
/// with standard deviation `step`; the chain targets exp(-beta f).
struct MhParams {
    double beta = 0.5;
    double step = 0.3;
    int burn_in = 100;
};

struct MhResult {
    PointSet samples;
    double acceptance_rate = 0.0;
};

/// Seeded Metropolis-Hastings chain around x0. Out-of-domain proposals are
/// rejected without consuming an acceptance draw; each iteration consumes
/// exactly two normals plus, for in-domain proposals, one uniform.
MhResult mh_sample(const CanyonObjective& obj, const Eigen::Vector2d& x0, int count,
                   const MhParams& params, std::mt19937_64& rng);

struct RelaxParams {
    int steps = 20;
    double lr = 1e-3;
};

struct RelaxResult {
    PointSet points;
    std::vector<std::uint8_t> stuck; // 1 when backtracking was exhausted
};

/// Fixed-step gradient descent with backtracking halving (max 20) on steps
/// that leave the domain or increase f. A point whose backtracking is
/// exhausted keeps its last valid position and is flagged stuck.
RelaxResult relax(const CanyonObjective& obj, const PointSet& points, const RelaxParams& params);

/// alpha(y) = g - kappa sigma + tau dist/m0. Throws DegenerateError when
/// m0 = 0 (all embeddings identical).
double acquisition(double g, double sigma, double dist_to_samples, double m0, double kappa,
                   double tau);

struct AcquisitionParams {
    double kappa = 1.96;
    double tau = 3.0;
    int grid_points = 401;   // per dimension
    double inflate = 0.25;   // range extension on each side
};

struct GridMinResult {
    Eigen::VectorXd y_star;
    double acq_value = 0.0;
    long evals = 0;
};

/// Deterministic dense-grid minimization of the acquisition over the sample
/// bounding box inflated by `inflate` per side. Supports d = 1 (G points) and
/// d = 2 (G x G points); ties keep the lexicographically smallest grid point.
/// `f_offset` is added to the surrogate mean (centered-output fitting).
GridMinResult minimize_acquisition(const GpPosterior& surrogate, const Eigen::MatrixXd& Y,
                                   double m0, const AcquisitionParams& params,
                                   double f_offset = 0.0);

struct LiftResult {
    Eigen::VectorXd x;     // posterior mean per ambient coordinate
    Eigen::VectorXd sigma; // posterior std (shared kernel: equal entries)
};

/// Lifts an embedding point back to ambient space with one GP per ambient
/// coordinate (a single multi-output posterior sharing the factorization).
/// Outputs are centered on their column means before fitting, so far
/// extrapolation decays to the sample centroid rather than to the origin.
LiftResult lift(const Eigen::MatrixXd& Y, const PointSet& X, const Eigen::VectorXd& y_star,
                const GpSpec& lift_spec);

enum class LiftMode { gp_regression };

struct BoConfig {
    int n0 = 50;
    int n_max = 80;
    double kappa = 1.96;
    double tau = 3.0;
    MhParams mh;
    RelaxParams relax;
    int embed_dim = 1;
    LiftMode lift_mode = LiftMode::gp_regression;
    int refit_every = 1;
    std::uint64_t seed = 0;
    Eigen::Vector2d x0{1.0, 0.0};
    int grid_points = 401;
    double grid_inflate = 0.25;
    double surrogate_noise = 1e-8; // observation noise of surrogate and lift GPs
    double dmaps_alpha = 1.0;
};

void validate(const BoConfig& config);

struct BoIterationRecord {
    int iteration = 0;              // overall sample index of the new point
    Eigen::VectorXd y_star;         // acquisition argmin in the embedding
    Eigen::VectorXd x_lifted;       // lifted ambient point (pre-relaxation)
    Eigen::VectorXd lift_sigma;     // per-coordinate lift uncertainty
    Eigen::Vector2d x_appended;     // evaluated, appended point
    double f_value = 0.0;
    double incumbent_value = 0.0;
    double spearman_rho = 0.0;      // embedding coordinate vs angle, last refit
    bool refit = false;
    double m0 = 0.0;
    double epsilon_dmaps = 0.0;
    double epsilon_surrogate = 0.0;
    long acq_evals = 0;
};

struct BoState {
    PointSet X;                 // all ambient iterates
    Eigen::VectorXd f_vals;
    Eigen::MatrixXd Y;          // embedding of X at the last refit
    double m0 = 0.0;
    Eigen::Vector2d incumbent_point{0.0, 0.0};
    double incumbent_value = 0.0;
    double mh_acceptance = 0.0;
    std::vector<BoIterationRecord> trace;
    bool aborted = false;
    std::string abort_reason;
};

/// Appendix-style reduced Bayesian optimization: MH seeding, gradient
/// relaxation, 1-D diffusion embedding, GP surrogate with the distance-
/// penalized acquisition, GP lifting, relax-and-append. Deterministic given
/// the seed. A degenerate-embedding error aborts with the partial trace.
BoState run_reduced_bo(const CanyonObjective& obj, const BoConfig& config);

/// Same loop with the identity embedding (d = n = 2): the surrogate and the
/// acquisition grid live in ambient space and lifting is the identity.
BoState run_plain_bo(const CanyonObjective& obj, const BoConfig& config);

} // namespace geoharm
