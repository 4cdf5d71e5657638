#pragma once

#include "fle/frac_op.hpp"
#include "fle/params.hpp"
#include "fle/spectral_basis.hpp"

#include <functional>

namespace fle {

/// w_{lambda,xi}(x) = alpha_{N,s} (lambda / (lambda^2 + |x - xi|^2))^{(N-2s)/2}
struct BubbleParams {
    double lambda = 1.0;
    Point xi;
};

double bubble_eval(const BubbleParams& bp, const Point& x, const SharpConstants& consts);

/// Inversion in the sphere of radius mu about the origin:
///   (mu/|x|)^{N-2s} w_{lambda,0}(mu^2 x/|x|^2) = w_{mu^2/lambda,0}(x).
/// Requires xi = 0.
BubbleParams kelvin(const BubbleParams& bp, double lambda_sphere);

/// Left-hand side of the inversion identity evaluated pointwise.
double kelvin_transform(const BubbleParams& bp, double lambda_sphere, const Point& x, const SharpConstants& consts);

/// int_{R^N} w_{lambda,0}^q by radial quadrature with an analytic tail.
double bubble_power_integral(const SharpConstants& consts, double q, double lambda = 1.0);

/// A radial function on R^N (N = 1, 2) with its natural length scale.  The
/// quadrature window is [0, window]; beyond it the integrands are continued
/// by the power law fitted at window/2 and window.
struct RadialProfile {
    std::function<double(double)> u;
    double scale = 1.0;
    double window = 100.0;
};

/// Pointwise (-Delta)^s u at radius r, from the second-difference form
///   (c_{N,s}/2) int (2u(x) - u(x+z) - u(x-z)) |z|^{-N-2s} dz.
double fractional_laplacian(const RadialProfile& f, int N, double s, double r);

struct SobolevReport {
    double ratio = 0;         // ||u||_{p+1} / ||(-Delta)^{s/2} u||_2
    double lp_norm = 0;       // ||u||_{p+1}
    double energy = 0;        // int u (-Delta)^s u
    double tail_fraction = 0; // largest appended-tail share of either integral
};

/// Throws InvalidArgument when an appended tail exceeds 1% of its integral.
SobolevReport sobolev_ratio(const RadialProfile& f, const PhysicalParams& params);
SobolevReport sobolev_ratio(const RadialProfile& f, int N, double s);

/// Radial profile of w_{lambda,0} with a window suited to its decay.
RadialProfile bubble_profile(const SharpConstants& consts, double lambda = 1.0);

/// Solution of (-Delta)^s Pw = w^p in Omega with zero exterior/boundary data,
/// from the pointwise-sampled right side.
struct ProjectedBubble {
    GridField pw;
    GridField w;
    /// false when lambda is not small against dist(xi, boundary); the
    /// expansion Pw = w - c1 lambda^{(N-2s)/2} H(., xi) + o(.) is then not meaningful
    bool expansion_regime = true;
};

ProjectedBubble project_bubble(const BubbleParams& bp, const FractionalOperator& op, const SharpConstants& consts);
ProjectedBubble project_bubble(const BubbleParams& bp, const ModelDomain& domain, const PhysicalParams& params);

} // namespace fle
