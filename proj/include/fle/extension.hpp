#pragma once

#include "fle/params.hpp"
#include "fle/spectral_basis.hpp"

#include <functional>
#include <vector>

namespace fle {

using Trace = std::function<double(const Point&)>;

/// s-harmonic extension to the upper half-space,
///   U(x,t) = p_{N,s} int t^{2s} (|x-y|^2 + t^2)^{-(N+2s)/2} u(y) dy,
/// for N = 1, 2.  `feature` is a point where u concentrates (the quadrature
/// is split at its image); t = 0 returns u(x).
double poisson_extend(const Trace& u, const Point& x, double t, const SharpConstants& consts,
                      const Point& feature = Point());

/// Kernel mass p_{N,s} int t^{2s}(|y|^2+t^2)^{-(N+2s)/2} dy by quadrature in y.
double poisson_kernel_mass(double t, const SharpConstants& consts);

struct DtnResult {
    double value = 0;              // extrapolated -kappa_s lim t^{1-2s} dU/dt
    std::vector<double> t;         // sample heights used
    std::vector<double> samples;   // -kappa_s t^{1-2s} dU/dt at those heights
    bool refined = false;          // true if the first ladder was rejected
};

/// Estimates the weighted normal derivative at t0, t0/2, t0/4 and removes
/// the t^{2-2s} and t^2 error terms.  A non-monotone ladder is retried once
/// at t0/4; a second failure throws NumericalFailure.  The customary choice
/// is t0 = 1e-2 times the local length scale of u.
DtnResult dtn_check(const Trace& u, const Point& x, const SharpConstants& consts, double t0,
                    const Point& feature = Point());

struct EnvelopeSample {
    double radius = 0;
    double min_ratio = 0; // min over the half-sphere of W / (alpha lambda^{(N-2s)/2} |z|^{-(N-2s)})
    double max_ratio = 0;
    bool holds = false;
};

struct EnvelopeReport {
    double lambda = 1;
    double eta = 0.5;
    std::vector<EnvelopeSample> samples;
    /// smallest tested radius from which the envelope holds at every larger
    /// tested radius; +inf if it fails at the outermost radius
    double r_star = 0;
};

/// Radii lambda 2^{k/2}, k = 0, 1, .. up to r_max, each sampled on
/// `angles` directions of the quarter circle (W is even in x).
EnvelopeReport decay_envelope(double lambda, double r_max, double eta, const SharpConstants& consts, int angles = 9);

} // namespace fle
