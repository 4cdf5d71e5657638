#pragma once

#include "fle/params.hpp"
#include "fle/spectral_basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <memory>

namespace fle {

/// Multiplies coefficient k by lambda_k^s.
SpectralField apply_spectral(const SpectralField& a, double s);
/// Divides coefficient k by lambda_k^s.
SpectralField solve_spectral(const SpectralField& rhs, double s);

/// Collocation of the singular-integral operator on an interval, for
/// continuous piecewise-linear fields extended by zero outside the interval.
///
/// Row i integrates the kernel exactly against the piecewise-linear
/// interpolant on every element outside [x_{i-1}, x_{i+1}]; on that cell the
/// field is replaced by its local quadratic, whose odd part cancels in the
/// principal value and whose even part is integrated analytically.  The zero
/// exterior enters through u(x_i) times the exact kernel mass of |r| > h.
/// On a uniform grid the result is a symmetric Toeplitz matrix.
struct RestrictedMatrix {
    ModelDomain domain;
    double s = 0.5;
    Eigen::MatrixXd matrix;
};

/// The restricted operator is defined for every s in (0,1) on an interval;
/// the N > 2s requirement of the nonlinear problem is not imposed here.
RestrictedMatrix assemble_restricted(const ModelDomain& domain, double s);
RestrictedMatrix assemble_restricted(const ModelDomain& domain, const PhysicalParams& params);

/// Dense Cholesky solve; throws NumericalFailure if the matrix is not SPD.
GridField solve_restricted(const RestrictedMatrix& A, const GridField& rhs);

/// Grid-level view of either flavor, as used by the nonlinear solver and the
/// projected-bubble construction.
class FractionalOperator {
public:
    virtual ~FractionalOperator() = default;

    virtual const ModelDomain& domain() const = 0;
    virtual Flavor flavor() const = 0;
    virtual double order() const = 0;

    virtual Vector apply(const Vector& u) const = 0;
    virtual Vector solve(const Vector& rhs) const = 0;

    /// Solves (I - A^{-1} diag(d)) x = rhs, the Jacobian of u - A^{-1} g(u).
    virtual Vector solve_linearized(const Vector& d, const Vector& rhs) const = 0;

    /// Discrete quadratic form h^d <A u, u>.
    double energy(const Vector& u) const;
    /// Flavor norm sqrt(energy).
    double norm(const Vector& u) const;
};

class SpectralOperator final : public FractionalOperator {
public:
    SpectralOperator(ModelDomain domain, double s);

    const ModelDomain& domain() const override { return domain_; }
    Flavor flavor() const override { return Flavor::Spectral; }
    double order() const override { return s_; }

    Vector apply(const Vector& u) const override;
    Vector solve(const Vector& rhs) const override;
    Vector solve_linearized(const Vector& d, const Vector& rhs) const override;

private:
    Vector diagonal_transform(const Vector& u, const Vector& multiplier) const;

    ModelDomain domain_;
    double s_;
    Vector symbol_;   // lambda_k^s on the transform layout
    Vector analysis_; // forward DST scaling
    Vector synthesis_;
};

class RestrictedOperator final : public FractionalOperator {
public:
    explicit RestrictedOperator(RestrictedMatrix matrix);

    const ModelDomain& domain() const override { return matrix_.domain; }
    Flavor flavor() const override { return Flavor::Restricted; }
    double order() const override { return matrix_.s; }

    Vector apply(const Vector& u) const override;
    Vector solve(const Vector& rhs) const override;
    Vector solve_linearized(const Vector& d, const Vector& rhs) const override;

    const RestrictedMatrix& matrix() const { return matrix_; }

private:
    RestrictedMatrix matrix_;
    Eigen::LLT<Eigen::MatrixXd> cholesky_;
};

std::shared_ptr<const FractionalOperator> make_operator(const ModelDomain& domain, Flavor flavor, double s);
std::shared_ptr<const FractionalOperator> make_operator(const ModelDomain& domain, const PhysicalParams& params);

} // namespace fle
