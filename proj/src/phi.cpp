#include "fle/phi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace fle {

void validate(const PhiPoint& point, const ModelDomain& domain, double separation) {
    const int m = point.m();
    if (m < 1 || static_cast<int>(point.x.size()) != m) throw InvalidArgument("PhiPoint needs m >= 1 weights and centres");
    if (!(point.b0 >= 0.0)) throw InvalidArgument("b0 must be nonnegative");
    for (int i = 0; i < m; ++i) {
        if (!(point.b(i) > 0.0)) throw InvalidArgument("weights b_i must be positive");
        if (!domain.is_interior(point.x[static_cast<std::size_t>(i)])) throw InvalidArgument("centres must be interior");
        for (int k = 0; k < i; ++k)
            if ((point.x[static_cast<std::size_t>(i)] - point.x[static_cast<std::size_t>(k)]).norm() <= separation)
                throw InvalidArgument("centres coincide");
    }
}

double phi_value(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts) {
    validate(point, g.domain());
    const int m = point.m();
    double quad = 0.0, logs = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& xi = point.x[static_cast<std::size_t>(i)];
        quad += point.b(i) * point.b(i) * g.robin(xi);
        for (int k = 0; k < m; ++k)
            if (k != i) quad -= point.b(i) * point.b(k) * g.green(xi, point.x[static_cast<std::size_t>(k)]);
        logs += std::log(point.b(i));
    }
    return consts.c1 * quad - consts.c2 * point.b0 * logs;
}

Vector phi_grad(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts) {
    validate(point, g.domain());
    const int m = point.m(), N = g.domain().dim();
    Vector grad = Vector::Zero(m * (1 + N));
    for (int i = 0; i < m; ++i) {
        const auto& xi = point.x[static_cast<std::size_t>(i)];
        const double bi = point.b(i);
        double db = 2.0 * bi * g.robin(xi);
        Point dx = bi * bi * g.robin_grad(xi);
        for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            const auto& xk = point.x[static_cast<std::size_t>(k)];
            db -= 2.0 * point.b(k) * g.green(xi, xk);
            // G is symmetric, so x_i enters both G(x_i,x_k) and G(x_k,x_i)
            dx -= 2.0 * bi * point.b(k) * g.green_grad(xi, xk);
        }
        grad(i) = consts.c1 * db - consts.c2 * point.b0 / bi;
        grad.segment(m + i * N, N) = consts.c1 * dx;
    }
    return grad;
}

Vector pack(const PhiPoint& point) {
    const int m = point.m();
    const int N = m > 0 ? static_cast<int>(point.x[0].size()) : 0;
    Vector z(m * (1 + N));
    z.head(m) = point.b;
    for (int i = 0; i < m; ++i) z.segment(m + i * N, N) = point.x[static_cast<std::size_t>(i)];
    return z;
}

PhiPoint unpack(const Vector& z, int m, int N, double b0) {
    PhiPoint p{z.head(m), {}, b0};
    for (int i = 0; i < m; ++i) p.x.push_back(z.segment(m + i * N, N));
    return p;
}

namespace {

bool admissible(const PhiPoint& p, const ModelDomain& d, double separation, double b_floor) {
    for (int i = 0; i < p.m(); ++i) {
        if (!(p.b(i) > b_floor)) return false;
        const auto& xi = p.x[static_cast<std::size_t>(i)];
        // the difference stencils of the gradient must stay inside the domain
        if (d.boundary_distance(xi) <= 2e-4 * d.diameter()) return false;
        for (int k = 0; k < i; ++k)
            if ((xi - p.x[static_cast<std::size_t>(k)]).norm() <= separation) return false;
    }
    return true;
}

Eigen::MatrixXd difference_hessian(const PhiPoint& p, const GreenFunction& g, const SharpConstants& consts) {
    const int m = p.m(), N = g.domain().dim();
    const Vector z = pack(p);
    const auto n = z.size();
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double step = 1e-5 * (j < m ? std::max(1.0, std::abs(z(j))) : g.domain().diameter());
        Vector zp = z, zm = z;
        zp(j) += step;
        zm(j) -= step;
        H.col(j) = (phi_grad(unpack(zp, m, N, p.b0), g, consts) - phi_grad(unpack(zm, m, N, p.b0), g, consts)) /
                   (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

Inertia inertia_of(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    const double tol = 1e-8 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    Inertia in;
    for (double v : eig.eigenvalues()) {
        if (v < -tol) ++in.negative;
        else if (v > tol) ++in.positive;
        else ++in.zero;
    }
    return in;
}

} // namespace

PhiCriticalResult phi_critical(const PhiPoint& initial, const GreenFunction& g, const SharpConstants& consts,
                               const PhiCriticalOptions& options) {
    const ModelDomain& d = g.domain();
    const double separation = options.separation >= 0.0 ? options.separation : 1e-3 * d.diameter();
    validate(initial, d, separation);
    const int m = initial.m(), N = d.dim();
    const double b_floor = options.b_floor * initial.b.maxCoeff();

    PhiPoint p = initial;
    Vector grad = phi_grad(p, g, consts);
    for (int it = 0; it <= options.max_iterations; ++it) {
        const double ginf = grad.lpNorm<Eigen::Infinity>();
        if (ginf < options.tolerance) {
            PhiCriticalResult r{p, it, ginf, difference_hessian(p, g, consts), {}};
            r.inertia = inertia_of(r.hessian);
            return r;
        }
        if (it == options.max_iterations) break;

        const Eigen::MatrixXd H = difference_hessian(p, g, consts);
        Vector step = H.colPivHouseholderQr().solve(-grad);
        if (!step.allFinite()) step = -grad;

        const Vector z = pack(p);
        const double merit = grad.squaredNorm();
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            const PhiPoint trial = unpack(z + alpha * step, m, N, p.b0);
            if (!admissible(trial, d, separation, 0.0)) continue;
            const Vector trial_grad = phi_grad(trial, g, consts);
            if (trial_grad.squaredNorm() <= (1.0 - 1e-4 * alpha) * merit) {
                p = trial;
                grad = trial_grad;
                accepted = true;
                break;
            }
        }
        if (accepted && p.b.minCoeff() < b_floor)
            throw NumericalFailure("phi_critical: weights collapse toward b = 0, no interior critical point");
        if (!accepted) {
            throw NumericalFailure("phi_critical: line search failed (step leaves the admissible set)");
        }
    }
    throw NumericalFailure("phi_critical: no convergence after " + std::to_string(options.max_iterations) + " iterations");
}

double MatrixM::relative_min_eigenvalue() const {
    const double norm = eigenvalues.cwiseAbs().maxCoeff();
    return norm > 0.0 ? eigenvalues(0) / norm : 0.0;
}

MatrixM matrix_m(const std::vector<Point>& x, const GreenFunction& g) {
    const auto m = static_cast<Eigen::Index>(x.size());
    MatrixM M{Eigen::MatrixXd(m, m), {}};
    for (Eigen::Index i = 0; i < m; ++i) {
        M.matrix(i, i) = g.robin(x[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < i; ++k) {
            if ((x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(k)]).norm() == 0.0)
                throw InvalidArgument("matrix_m needs distinct points");
            M.matrix(i, k) = M.matrix(k, i) = -g.green(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(k)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M.matrix, Eigen::EigenvaluesOnly);
    M.eigenvalues = eig.eigenvalues();
    return M;
}

Eigen::MatrixXd con_residual(const PhiPoint& point, const GreenFunction& g, RobinConvention convention) {
    validate(point, g.domain());
    const int m = point.m(), N = g.domain().dim();
    const double factor = convention == RobinConvention::FirstSlot ? 0.5 : 1.0;
    Eigen::MatrixXd r(m, N);
    for (int i = 0; i < m; ++i) {
        const auto& xi = point.x[static_cast<std::size_t>(i)];
        Point row = point.b(i) * factor * g.robin_grad(xi);
        for (int k = 0; k < m; ++k)
            if (k != i) row -= point.b(k) * g.green_grad(xi, point.x[static_cast<std::size_t>(k)]);
        r.row(i) = row.transpose();
    }
    return r;
}

Vector con2_residual(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts) {
    validate(point, g.domain());
    const int m = point.m();
    Vector r(m);
    for (int i = 0; i < m; ++i) {
        const auto& xi = point.x[static_cast<std::size_t>(i)];
        double v = point.b(i) * point.b(i) * g.robin(xi);
        for (int k = 0; k < m; ++k)
            if (k != i) v -= point.b(i) * point.b(k) * g.green(xi, point.x[static_cast<std::size_t>(k)]);
        r(i) = v - consts.c2 / (2.0 * consts.c1) * point.b0;
    }
    return r;
}

} // namespace fle
