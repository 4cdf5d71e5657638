#pragma once

#include "fle/frac_op.hpp"
#include "fle/params.hpp"
#include "fle/spectral_basis.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fle {

/// An accepted (or attempted) solution of (-Delta)^s u = u^{p-eps}.
struct SolveResult {
    PhysicalParams params;
    GridField u;
    double eps = 0.0;
    int newton_iters = 0;
    double residual_inf = 0.0; // max |A u - u^{p-eps}|
    double energy = 0.0;       // h^d <A u, u>
    bool positive = false;
    /// Newton residual after each iteration, fixed-point form.
    std::vector<double> residual_history;

    double max_u() const { return u.values.maxCoeff(); }
};

struct NewtonOptions {
    /// Accept when max |A u - u^q| < tolerance * max u^q.
    double tolerance = 1e-9;
    int max_iterations = 60;
    int max_halvings = 30;
    /// Before Newton, run the stabilised fixed-point iteration
    /// u <- M(u)^{q/(q-1)} A^{-1} u^q, M = <Au,u>/<u^q,u>, until the relative
    /// fixed-point residual is below this value (0 disables).
    double pre_iteration_tolerance = 0.0;
    int max_pre_iterations = 2000;
};

/// Principal eigenfunction of the discrete operator (inverse iteration),
/// positive, scaled so that <A u, u> = int u^{p+1-eps}.
GridField nehari_init(const FractionalOperator& op, const PhysicalParams& params);

/// Stabilised fixed-point iteration (Petviashvili); converges to the ground
/// state from any positive start.  Returns the final iterate.
GridField petviashvili(const FractionalOperator& op, const PhysicalParams& params, const GridField& init,
                       double tolerance, int max_iterations);

/// Damped Newton on u - A^{-1} u^{p-eps} = 0.  Steps that lose positivity or
/// fail to decrease the residual are halved.  Throws NumericalFailure on
/// divergence.
SolveResult newton_solve(const FractionalOperator& op, const PhysicalParams& params, const GridField& init,
                         const NewtonOptions& options = {});

/// eps values for continuation.  With an explicit list the values are used
/// as given; otherwise eps_k = eps_start ratio^k until eps_min.  In both
/// cases the run stops once the peak scale drops below min_cells grid
/// spacings; the entry that crossed the floor is discarded.
struct ContinuationSchedule {
    double eps_start = 1.0;
    double ratio = 0.8;
    double eps_min = 1e-4;
    double min_cells = 5.0;
    std::vector<double> explicit_eps;
    /// Smallest eps decrement tried after repeated halving.
    double min_step = 1e-6;
    /// Peak scale of an accepted solution; default (alpha / max u)^{2/(N-2s)}.
    std::function<double(const SolveResult&)> peak_scale;
};

struct ContinuationResult {
    std::vector<SolveResult> accepted;
    /// Smallest eps reached; equals accepted.back().eps when nonempty.
    double frontier = 0.0;
    /// Why the continuation stopped.
    std::string stop_reason;
};

/// Continuation in eps.  The first solve starts from init (default: the
/// Nehari-scaled eigenfunction) with the fixed-point pre-iteration enabled
/// down to 1e-4 unless options set it; later ones from a tangent predictor built
/// on the previous solution.  A failed step halves the eps decrement.  The
/// callback, if given, sees every accepted result.
ContinuationResult solve_subcritical(const FractionalOperator& op, const PhysicalParams& params,
                                     const std::optional<GridField>& init, const ContinuationSchedule& schedule,
                                     const NewtonOptions& options = {},
                                     const std::function<void(const SolveResult&)>& on_accept = {});

/// |<A u, u> - int u^{p+1-eps}| / <A u, u>.
double energy_check(const SolveResult& result);
double energy_check(const FractionalOperator& op, const PhysicalParams& params, const GridField& u);

/// Peak scale lambda = (alpha / max u)^{2/(N-2s)}.
double amplitude_scale(double max_u, const SharpConstants& consts);

} // namespace fle
