#pragma once

#include "fle/bubbles.hpp"
#include "fle/frac_op.hpp"
#include "fle/greens.hpp"
#include "fle/nonlinear_solver.hpp"
#include "fle/params.hpp"
#include "fle/phi.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fle {

/// One concentration point.  lambda is the Gauss-Newton fit of the projected
/// bubble (started from the amplitude value); amplitude_lambda is
/// (alpha / u(x))^{2/(N-2s)} read off the interpolated peak height.
struct Peak {
    double lambda = 0.0;
    double amplitude_lambda = 0.0;
    Point x;
    Point fitted_x;
};

struct PeakDecomposition {
    int m = 0;
    std::vector<Peak> peaks; // tallest first
    /// ||u - sum Pw_i|| / ||u|| in the flavor norm
    double residual_fraction = 0.0;
    /// (lambda_i / lambda_1)^{(N-2s)/2}
    Vector b;
    bool collision = false;
    bool bubble_regime = true;
    std::string label;
    int fit_iterations = 0;
};

struct PeakOptions {
    double threshold = 0.2;       // local maxima below threshold * max u are ignored
    double d_floor = -1.0;        // collision distance, default 10 h
    int max_fit_iterations = 100;
    /// Bubble regime: residual fraction below regime_fraction and every fitted
    /// lambda_i at most regime_scale * dist(x_i, boundary).
    double regime_fraction = 0.75;
    double regime_scale = 0.1;
};

/// Throws InvalidArgument on a non-positive field and NumericalFailure when
/// no strict local maximum exists.
PeakDecomposition extract_peaks(const GridField& u, const FractionalOperator& op, const SharpConstants& consts,
                                const PeakOptions& options = {});

/// Sum of projected bubbles, used to seed multi-peak branches.
GridField bubble_seed(const FractionalOperator& op, const SharpConstants& consts, const std::vector<BubbleParams>& bubbles);

/// Piecewise-linear (bilinear) interpolation with zero boundary values.
double interpolate(const GridField& u, const Point& x);

struct RateFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int count = 0;
};

/// Least-squares slope of log lambda against log eps over the last `window`
/// points.  Throws InvalidArgument with fewer than `window` points.
RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& lambda, int window = 5);

struct PohozaevResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0; // |lhs - rhs| / |rhs|
};

/// Symmetry generator paired with u in the local identity.
enum class Generator { Dilation, Translation };

/// Trace form of the local identity on the ball B(center, r):
///   lhs = -int_B (A u v - D v u),  rhs = (q - 1) int_B u^q v,  q = p - eps,
/// with v the generator applied to u and D v its weighted normal derivative.
/// For the dilation v = (x - center).grad u + (2s/(q-1)) u and
/// D v = (x - center).grad(Au) + (2s + 2s/(q-1)) Au; for a translation v and
/// D v are the derivatives of u and Au along `axis`.  Derivatives are fourth
/// order differences.  Throws InvalidArgument if the ball comes within two
/// cells of the boundary.
PohozaevResult pohozaev_residual(const GridField& u, const FractionalOperator& op, const PhysicalParams& params,
                                 const Point& center, double r, Generator generator = Generator::Dilation,
                                 int axis = 0);

/// max_i |lambda_i^eps - 1|
double lambda_eps_distance(const PeakDecomposition& peaks, double eps);

/// sup over points of |lambda_1^{-(N-2s)/2} u(x) - c1 sum b_i G(x, x_i)| / (c1 sum b_i G(x, x_i)).
double green_limit_error(const GridField& u, const PeakDecomposition& peaks, const GreenFunction& g,
                         const SharpConstants& consts, const std::vector<Point>& points);

/// Smallest C with u <= C sum_i w_{lambda_i, x_i} at every node.
double pointwise_bound_constant(const GridField& u, const PeakDecomposition& peaks, const SharpConstants& consts);

struct SweepEntry {
    double eps = 0.0;
    double max_u = 0.0;
    int newton_iters = 0;
    double residual_inf = 0.0;
    double energy = 0.0;
    double energy_check = 0.0;
    PeakDecomposition peaks;
    double rate = 0.0;     // slope over the bubble-regime entries so far (NaN below two)
    double b0 = 0.0;       // lambda_1^{-(N-2s)} eps
    double lambda_eps = 0.0;
    double green_limit = 0.0;
    PohozaevResult pohozaev;
    double con2 = 0.0;      // sup norm of the weight condition at (b, x, b0)
    double grad_phi = 0.0;  // sup norm of grad Phi_m at (b, x, b0)
    double bound_constant = 0.0;
};

struct SweepRecord {
    PhysicalParams params;
    ModelDomain domain;
    std::vector<SweepEntry> entries; // eps strictly decreasing
    std::string stop_reason;
    std::vector<Point> green_points;
};

struct SweepOptions {
    ContinuationSchedule schedule;
    NewtonOptions newton;
    PeakOptions peaks;
    std::optional<GridField> init;
    /// Points for the Green-limit comparison, default a + L {0.1, 0.25, 0.75, 0.9}.
    std::vector<Point> green_points;
    /// Points closer than r_test to a peak are skipped (default 0.1 diam).
    double r_test = -1.0;
    /// Radius of the identity ball around the tallest peak, as a fraction of
    /// its distance to the boundary.
    double pohozaev_fraction = 0.5;
    unsigned threads = 0;
};

/// Continuation plus every per-entry diagnostic.  Unless the schedule brings
/// its own peak scale, the resolution floor applies to the fitted lambda_1.
/// Diagnostics are computed in parallel; the record does not depend on the
/// thread count.
SweepRecord run_sweep(const ModelDomain& domain, const PhysicalParams& params, const SweepOptions& options = {});

/// Bubble-regime entries only (residual fraction below the regime threshold).
std::vector<const SweepEntry*> bubble_entries(const SweepRecord& sweep);

RateFit rate_fit(const SweepRecord& sweep, int window = 5);

struct LambdaEpsReport {
    std::vector<double> distance;
    double final = 0.0;
    bool decreasing = false;
};
LambdaEpsReport lambda_eps_check(const SweepRecord& sweep);

struct GreenLimitReport {
    std::vector<double> error;
    double final = 0.0;
    bool decreasing = false;
};
GreenLimitReport green_limit_check(const SweepRecord& sweep);

struct PhiCriticalityReport {
    double b0 = 0.0;                // mean of lambda_1^{-(N-2s)} eps over the last three entries
    std::vector<double> grad_phi;   // per entry
    std::vector<double> con2;       // per entry
    bool shrinking = false;         // con2 decreasing along the sweep
    /// Single peak: |lambda_1^{N-2s} - eps c2 / (2 c1 H(x_1,x_1))| relative, at the last entry.
    double closed_form_error = 0.0;
};
/// Throws NumericalFailure when the last three b0 estimates are not monotone
/// or fewer than three bubble-regime entries exist.
PhiCriticalityReport phi_criticality_check(const SweepRecord& sweep, const GreenFunction& g,
                                           const SharpConstants& consts);

/// True when every element is strictly below its predecessor.
bool strictly_decreasing(const std::vector<double>& v);

} // namespace fle
