#pragma once

#include "fle/greens.hpp"

#include <vector>

namespace fle {

/// Argument of the reduced energy: weights b_i > 0, centres x_i in Omega,
/// and the limiting ratio b0 >= 0.
struct PhiPoint {
    Vector b;
    std::vector<Point> x;
    double b0 = 0.0;

    int m() const { return static_cast<int>(b.size()); }
};

/// Throws InvalidArgument unless b > 0, the x_i are interior and pairwise
/// separated by more than `separation`.
void validate(const PhiPoint& point, const ModelDomain& domain, double separation = 0.0);

/// Phi_m = c1 (sum b_i^2 H(x_i,x_i) - sum_{i != k} b_i b_k G(x_i,x_k)) - c2 b0 log(b_1 ... b_m)
double phi_value(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts);

/// Gradient ordered as (d/db_1 .. d/db_m, d/dx_1 (N entries), .., d/dx_m).
Vector phi_grad(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts);

/// Flattening used by phi_grad.
Vector pack(const PhiPoint& point);
PhiPoint unpack(const Vector& z, int m, int N, double b0);

struct PhiCriticalOptions {
    double tolerance = 1e-10;  // on the sup norm of the gradient
    int max_iterations = 200;
    double separation = -1.0;  // default 1e-3 diam(Omega)
    double b_floor = 1e-3;     // collapse threshold relative to the largest initial weight
};

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;
};

struct PhiCriticalResult {
    PhiPoint point;
    int iterations = 0;
    double grad_inf = 0.0;
    Eigen::MatrixXd hessian;
    Inertia inertia;
};

/// Damped Newton on grad Phi = 0: difference Hessian of the analytic
/// gradient, Armijo backtracking on |grad Phi|^2, steps kept admissible.
/// Throws NumericalFailure on non-convergence, weight collapse or peak collision.
PhiCriticalResult phi_critical(const PhiPoint& initial, const GreenFunction& g, const SharpConstants& consts,
                               const PhiCriticalOptions& options = {});

/// m_ii = H(x_i,x_i), m_ij = -G(x_i,x_j).
struct MatrixM {
    Eigen::MatrixXd matrix;
    Vector eigenvalues; // ascending
    /// smallest eigenvalue divided by the spectral norm
    double relative_min_eigenvalue() const;
};

MatrixM matrix_m(const std::vector<Point>& x, const GreenFunction& g);

/// Reading of dH/dx_j(x,x) in the location condition.  FirstSlot uses the
/// partial derivative in the first argument, (1/2) grad of the Robin map,
/// which makes the condition equivalent to grad_x Phi = 0.  Diagonal uses the
/// full gradient of x -> H(x,x).
enum class RobinConvention { FirstSlot, Diagonal };

/// Location condition: b_i dH/dx(x_i,x_i) - sum_{k != i} b_k dG/dx(x_i,x_k), one row per peak.
Eigen::MatrixXd con_residual(const PhiPoint& point, const GreenFunction& g,
                             RobinConvention convention = RobinConvention::FirstSlot);

/// Weight condition: b_i^2 H(x_i,x_i) - sum_{k != i} b_i b_k G(x_i,x_k) - (c2/(2 c1)) b0.
Vector con2_residual(const PhiPoint& point, const GreenFunction& g, const SharpConstants& consts);

} // namespace fle
