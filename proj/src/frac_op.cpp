#include "fle/frac_op.hpp"

#include "dst.hpp"
#include "krylov.hpp"

#include <cmath>

namespace fle {

namespace {

// (b^e - a^e) / e, continuous through e = 0.
double power_difference(double a, double b, double e) {
    if (std::abs(e) < 1e-12) return std::log(b / a);
    return std::pow(a, e) * std::expm1(e * std::log(b / a)) / e;
}

// Kernel moments over one element at distance m >= 1 cells (unit spacing):
//   I0(m) = int_0^1 (1 - t)(m + t)^{-1-2s} dt,  I1(m) = int_0^1 t (m + t)^{-1-2s} dt.
struct ElementMoments {
    double lower;
    double upper;
};

ElementMoments element_moments(double m, double s) {
    const double zeroth = power_difference(m, m + 1.0, -2.0 * s); // int (m+t)^{-1-2s}
    const double first = power_difference(m, m + 1.0, 1.0 - 2.0 * s) - m * zeroth; // int t (m+t)^{-1-2s}
    return {zeroth - first, first};
}

} // namespace

SpectralField apply_spectral(const SpectralField& a, double s) {
    SpectralField out = a;
    for (Eigen::Index m = 0; m < a.coeffs.size(); ++m)
        out.coeffs(m) *= std::pow((*a.modes)[static_cast<std::size_t>(m)].eigenvalue, s);
    return out;
}

SpectralField solve_spectral(const SpectralField& rhs, double s) {
    SpectralField out = rhs;
    for (Eigen::Index m = 0; m < rhs.coeffs.size(); ++m)
        out.coeffs(m) /= std::pow((*rhs.modes)[static_cast<std::size_t>(m)].eigenvalue, s);
    return out;
}

RestrictedMatrix assemble_restricted(const ModelDomain& domain, double s) {
    if (domain.kind != DomainKind::Interval)
        throw InvalidArgument("the restricted operator is only assembled on intervals");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("order s must lie in (0,1)");
    const int n = domain.grid_n;
    const double h = domain.spacing();
    const double scale = singular_integral_constant(1, s) * std::pow(h, -2.0 * s);

    // Toeplitz stencil: weight[k] multiplies u_{i +- k}.
    Vector weight = Vector::Zero(n);
    const double cell = 1.0 / (2.0 - 2.0 * s);
    weight(0) = 1.0 / s + 2.0 * cell;
    for (int k = 1; k < n; ++k) {
        const ElementMoments right = element_moments(k, s);
        double w = right.lower;
        if (k >= 2) w += element_moments(k - 1, s).upper;
        if (k == 1) w += cell;
        weight(k) = -w;
    }

    RestrictedMatrix A{domain, s, Eigen::MatrixXd(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A.matrix(i, j) = scale * weight(std::abs(i - j));
    A.matrix = 0.5 * (A.matrix + A.matrix.transpose()).eval();
    return A;
}

RestrictedMatrix assemble_restricted(const ModelDomain& domain, const PhysicalParams& params) {
    if (params.N != 1) throw InvalidArgument("the restricted operator is assembled in one dimension only");
    return assemble_restricted(domain, params.s);
}

GridField solve_restricted(const RestrictedMatrix& A, const GridField& rhs) {
    if (!(rhs.domain == A.domain)) throw InvalidArgument("right-hand side lives on a different grid");
    Eigen::LLT<Eigen::MatrixXd> llt(A.matrix);
    if (llt.info() != Eigen::Success) throw NumericalFailure("restricted matrix is not positive definite");
    return GridField(A.domain, llt.solve(rhs.values));
}

double FractionalOperator::energy(const Vector& u) const {
    return domain().cell_volume() * u.dot(apply(u));
}

double FractionalOperator::norm(const Vector& u) const {
    return std::sqrt(std::max(energy(u), 0.0));
}

SpectralOperator::SpectralOperator(ModelDomain domain, double s) : domain_(domain), s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("order s must lie in (0,1)");
    const int n = domain_.grid_n;
    symbol_.resize(domain_.size());
    for (Eigen::Index flat = 0; flat < domain_.size(); ++flat) {
        const int k = static_cast<int>(flat % n) + 1;
        const int l = static_cast<int>(flat / n) + 1;
        symbol_(flat) = std::pow(eigenpair(domain_, {k, l}).eigenvalue, s_);
    }
    // analysis * synthesis scaling of the unnormalised DST-I pair, per axis 1/(2(n+1))
    const double pair_scale = std::pow(0.5 / (n + 1), domain_.dim());
    analysis_ = Vector::Constant(domain_.size(), pair_scale);
    synthesis_ = Vector::Ones(domain_.size());
}

Vector SpectralOperator::diagonal_transform(const Vector& u, const Vector& multiplier) const {
    const int n = domain_.grid_n;
    const int n1 = domain_.dim() == 1 ? 1 : n;
    Vector y(u.size()), out(u.size());
    detail::dst1(u.data(), y.data(), n, n1);
    y = y.cwiseProduct(multiplier).cwiseProduct(analysis_).cwiseProduct(synthesis_);
    detail::dst1(y.data(), out.data(), n, n1);
    return out;
}

Vector SpectralOperator::apply(const Vector& u) const {
    return diagonal_transform(u, symbol_);
}

Vector SpectralOperator::solve(const Vector& rhs) const {
    return diagonal_transform(rhs, symbol_.cwiseInverse());
}

Vector SpectralOperator::solve_linearized(const Vector& d, const Vector& rhs) const {
    auto op = [&](const Vector& x) -> Vector { return x - solve(d.cwiseProduct(x)); };
    auto result = detail::gmres(op, rhs, 1e-13, 150, 3000);
    if (result.relative_residual > 1e-8)
        throw NumericalFailure("GMRES failed on the linearized operator (relative residual " +
                               std::to_string(result.relative_residual) + ")");
    return result.x;
}

RestrictedOperator::RestrictedOperator(RestrictedMatrix matrix) : matrix_(std::move(matrix)), cholesky_(matrix_.matrix) {
    if (cholesky_.info() != Eigen::Success) throw NumericalFailure("restricted matrix is not positive definite");
}

Vector RestrictedOperator::apply(const Vector& u) const {
    return matrix_.matrix * u;
}

Vector RestrictedOperator::solve(const Vector& rhs) const {
    return cholesky_.solve(rhs);
}

Vector RestrictedOperator::solve_linearized(const Vector& d, const Vector& rhs) const {
    Eigen::MatrixXd shifted = matrix_.matrix;
    shifted.diagonal() -= d;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    return lu.solve(matrix_.matrix * rhs);
}

std::shared_ptr<const FractionalOperator> make_operator(const ModelDomain& domain, Flavor flavor, double s) {
    if (flavor == Flavor::Spectral) return std::make_shared<SpectralOperator>(domain, s);
    return std::make_shared<RestrictedOperator>(assemble_restricted(domain, s));
}

std::shared_ptr<const FractionalOperator> make_operator(const ModelDomain& domain, const PhysicalParams& params) {
    if (params.flavor == Flavor::Restricted && params.N != 1)
        throw InvalidArgument("the restricted operator is assembled in one dimension only");
    if (domain.dim() != params.N) throw InvalidArgument("domain dimension does not match N");
    return make_operator(domain, params.flavor, params.s);
}

} // namespace fle
