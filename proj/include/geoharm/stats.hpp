#pragma once

#include <Eigen/Core>

namespace geoharm {

/// Average ranks (1-based); tied values share the mean of their rank range.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& values);

/// Spearman rank correlation with average-rank tie handling. Returns 0 when
/// either input is constant.
double spearman_rho(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace geoharm
