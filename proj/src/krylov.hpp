#pragma once

#include <Eigen/Dense>

#include <functional>

namespace fle::detail {

struct GmresResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, const Eigen::VectorXd& rhs,
                  double tolerance, int restart, int max_iterations);

} // namespace fle::detail
