#include "krylov.hpp"

#include <cmath>
#include <vector>

namespace fle::detail {

GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, const Eigen::VectorXd& rhs,
                  double tolerance, int restart, int max_iterations) {
    const Eigen::Index n = rhs.size();
    GmresResult result;
    result.x = Eigen::VectorXd::Zero(n);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        result.converged = true;
        return result;
    }

    while (result.iterations < max_iterations) {
        Eigen::VectorXd r = rhs - apply(result.x);
        double beta = r.norm();
        result.relative_residual = beta / rhs_norm;
        if (result.relative_residual <= tolerance) {
            result.converged = true;
            return result;
        }
        const int m = restart;
        Eigen::MatrixXd V(n, m + 1);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        std::vector<double> cs(m), sn(m);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
        g(0) = beta;
        V.col(0) = r / beta;
        int k = 0;
        for (; k < m && result.iterations < max_iterations; ++k, ++result.iterations) {
            Eigen::VectorXd w = apply(V.col(k));
            for (int i = 0; i <= k; ++i) {
                H(i, k) = w.dot(V.col(i));
                w -= H(i, k) * V.col(i);
            }
            H(k + 1, k) = w.norm();
            if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            cs[k] = H(k, k) / denom;
            sn[k] = H(k + 1, k) / denom;
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g(k + 1) = -sn[k] * g(k);
            g(k) = cs[k] * g(k);
            if (std::abs(g(k + 1)) / rhs_norm <= tolerance) {
                ++k;
                ++result.iterations;
                break;
            }
        }
        const Eigen::VectorXd y =
            H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        result.x += V.leftCols(k) * y;
    }
    result.relative_residual = (rhs - apply(result.x)).norm() / rhs_norm;
    result.converged = result.relative_residual <= tolerance;
    return result;
}

} // namespace fle::detail
