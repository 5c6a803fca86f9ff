#include "geoharm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "geoharm/errors.hpp"

namespace geoharm {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& values) {
    const Eigen::Index n = values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return values(i) < values(j); });

    Eigen::VectorXd ranks(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && values(order[static_cast<std::size_t>(j + 1)]) ==
                                values(order[static_cast<std::size_t>(i)])) {
            ++j;
        }
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k) {
            ranks(order[static_cast<std::size_t>(k)]) = shared;
        }
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw InputError("spearman_rho requires equal-length inputs");
    }
    if (a.size() < 2) {
        throw InputError("spearman_rho requires at least two observations");
    }
    const Eigen::VectorXd ra = average_ranks(a);
    const Eigen::VectorXd rb = average_ranks(b);
    const Eigen::VectorXd da = ra.array() - ra.mean();
    const Eigen::VectorXd db = rb.array() - rb.mean();
    const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (denom == 0.0) {
        return 0.0;
    }
    return da.dot(db) / denom;
}

} // namespace geoharm
