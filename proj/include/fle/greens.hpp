#pragma once

#include "fle/params.hpp"
#include "fle/spectral_basis.hpp"

#include <iosfwd>
#include <vector>

namespace fle {

/// Green's function of (-Delta)^s with zero Dirichlet data, split as
///   G(x,y) = gamma_{N,s} |x-y|^{2s-N} - H(x,y).
///
/// Spectral flavor (interval or rectangle): subordination of the Dirichlet
/// heat kernel, G = Gamma(s)^{-1} int_0^inf t^{s-1} K_Omega(t,x,y) dt.  Below
/// t = T the kernel is the image sum of free Gaussians, whose t-integrals are
/// incomplete Gamma functions; above T the eigen-expansion converges like
/// exp(-lambda_k T).  The free-space part integrates to gamma_{N,s}|x-y|^{2s-N}
/// exactly, so H is assembled from smooth terms only and is finite at x = y.
///
/// Restricted flavor (interval): the closed-form ball kernel
///   G = kappa |x-y|^{2s-1} int_0^{r0} t^{s-1} (1+t)^{-1/2} dt,
///   r0 = (1-x^2)(1-y^2)/|x-y|^2 on (-1,1), kappa = 1/(4^s Gamma(s)^2),
/// transported to (a, a+L) by the affine scaling G -> (L/2)^{2s-1} G.
class GreenFunction {
public:
    /// N is taken from the domain.  The regular part needs N > 2s; G alone is
    /// available for every s in (0,1) in the restricted flavor.
    GreenFunction(ModelDomain domain, Flavor flavor, double s);
    GreenFunction(ModelDomain domain, const PhysicalParams& params);

    const ModelDomain& domain() const { return domain_; }
    Flavor flavor() const { return flavor_; }
    double order() const { return s_; }

    /// gamma_{N,s} |x-y|^{2s-N}
    double singular(const Point& x, const Point& y) const;
    /// G(x,y); +inf at x = y when N > 2s.
    double green(const Point& x, const Point& y) const;
    /// H(x,y), evaluated without forming the singular difference.
    double regular(const Point& x, const Point& y) const;
    /// Robin function H(x,x).
    double robin(const Point& x) const { return regular(x, x); }

    /// Gradient of the Robin map x -> H(x,x) by centered differences.
    Point robin_grad(const Point& x) const;
    /// Same, with an explicit difference step.
    Point robin_grad(const Point& x, double step) const;
    /// Partial gradient of H in its first slot by centered differences.
    Point regular_grad(const Point& x, const Point& y) const;
    /// Gradient of G in its first slot (analytic singular part minus regular_grad).
    Point green_grad(const Point& x, const Point& y) const;

    /// Default difference step 1e-4 diam(Omega).
    double fd_step() const { return 1e-4 * domain_.diameter(); }

private:
    double spectral_regular(const Point& x, const Point& y) const;
    double restricted_green(const Point& x, const Point& y) const;
    double restricted_regular(const Point& x, const Point& y) const;
    void require_interior(const Point& x) const;

    ModelDomain domain_;
    Flavor flavor_;
    double s_;
    int N_;
    double gamma_ = 0.0; // gamma_{N,s}, zero when N <= 2s

    // spectral flavor
    double split_time_ = 0.0;
    int image_range_ = 3;
    std::vector<Mode> tail_modes_;
    std::vector<double> tail_weights_; // lambda^{-s} Gamma(s, lambda T)
};

/// G and H sampled for probe points y (rows) against the domain grid (columns),
/// plus the Robin function and its gradient on the grid.
struct GreenTable {
    Flavor flavor = Flavor::Spectral;
    ModelDomain domain;
    double s = 0.25;
    std::vector<Point> probes;
    Eigen::MatrixXd G; // probes x nodes; +inf where a node coincides with a probe
    Eigen::MatrixXd H;
    Vector robin;
    Eigen::MatrixXd robin_grad; // nodes x dim
};

/// Equispaced interior probes: `count` per axis at a + j L/(count+1).
std::vector<Point> default_probes(const ModelDomain& domain, int count = 33);

GreenTable make_green_table(const GreenFunction& g, const std::vector<Point>& probes, unsigned threads = 0);

/// CSV with header flavor,x,y,G,H (coordinates joined by ';' in two dimensions).
void write_csv(std::ostream& out, const GreenTable& table);

/// G(., y) on the grid.  A node that coincides with y carries the cell
/// average of G instead of the (infinite) point value.
GridField green(const GreenFunction& g, const Point& y);
GridField green(const ModelDomain& domain, const PhysicalParams& params, const Point& y);

double regular_part(const ModelDomain& domain, const PhysicalParams& params, const Point& x, const Point& y);
Point robin_grad(const ModelDomain& domain, const PhysicalParams& params, const Point& x);

} // namespace fle
