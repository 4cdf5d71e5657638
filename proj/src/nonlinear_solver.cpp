#include "fle/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fle {

namespace {

Vector power(const Vector& u, double q) {
    return u.array().pow(q).matrix();
}

double inf_norm(const Vector& v) {
    return v.lpNorm<Eigen::Infinity>();
}

bool all_positive(const Vector& u) {
    return (u.array() > 0.0).all();
}

void check_operator(const FractionalOperator& op, const PhysicalParams& params) {
    if (op.flavor() != params.flavor) throw InvalidArgument("operator flavor does not match params");
    if (std::abs(op.order() - params.s) > 1e-15) throw InvalidArgument("operator order does not match params");
    if (!(params.eps > 0.0)) throw InvalidArgument("the solver needs eps > 0");
    if (!(params.power() > 1.0)) throw InvalidArgument("the solver needs p - eps > 1");
}

} // namespace

double amplitude_scale(double max_u, const SharpConstants& consts) {
    return std::pow(consts.alpha_Ns / max_u, 2.0 / consts.decay());
}

GridField nehari_init(const FractionalOperator& op, const PhysicalParams& params) {
    const auto& domain = op.domain();
    Vector u = sample(domain, [&](const Point& x) {
                   double v = 1.0;
                   for (int a = 0; a < domain.dim(); ++a)
                       v *= std::sin(std::numbers::pi * (x(a) - domain.origin[a]) / domain.lengths[a]);
                   return v;
               }).values;
    for (int it = 0; it < 200; ++it) {
        Vector next = op.solve(u);
        next /= next.norm();
        const double change = (next - u).norm();
        u = next;
        if (change < 1e-13) break;
    }
    if (u.sum() < 0.0) u = -u;
    if (!all_positive(u)) throw NumericalFailure("principal eigenfunction is not positive");
    const double h = domain.cell_volume();
    const double q = params.power();
    const double lhs = h * u.dot(op.apply(u));
    const double rhs = h * power(u, q + 1.0).sum();
    const double t = std::pow(lhs / rhs, 1.0 / (q - 1.0));
    return GridField(domain, t * u);
}

GridField petviashvili(const FractionalOperator& op, const PhysicalParams& params, const GridField& init,
                       double tolerance, int max_iterations) {
    check_operator(op, params);
    if (!all_positive(init.values)) throw InvalidArgument("initial field must be positive");
    const double q = params.power();
    const double gamma = q / (q - 1.0);
    Vector u = init.values;
    for (int it = 0; it < max_iterations; ++it) {
        const Vector uq = power(u, q);
        const Vector v = op.solve(uq);
        const double M = u.dot(op.apply(u)) / uq.dot(u);
        const Vector next = std::pow(M, gamma) * v;
        const double change = (next - u).norm() / next.norm();
        u = next;
        if (!all_positive(u)) throw NumericalFailure("fixed-point iteration lost positivity");
        if (change < tolerance) return GridField(op.domain(), u);
    }
    throw NumericalFailure("fixed-point iteration did not reach its tolerance");
}

SolveResult newton_solve(const FractionalOperator& op, const PhysicalParams& params, const GridField& init,
                         const NewtonOptions& options) {
    check_operator(op, params);
    if (!(init.domain == op.domain())) throw InvalidArgument("initial field lives on another grid");
    if (!all_positive(init.values)) throw InvalidArgument("initial field must be positive");
    const double q = params.power();

    SolveResult res;
    res.params = params;
    res.eps = params.eps;
    Vector u = init.values;
    if (options.pre_iteration_tolerance > 0.0)
        u = petviashvili(op, params, init, options.pre_iteration_tolerance, options.max_pre_iterations).values;
    auto fixed_point = [&](const Vector& v) -> Vector { return v - op.solve(power(v, q)); };
    Vector F = fixed_point(u);
    double r = F.norm();
    auto converged = [&](const Vector& v) {
        const Vector g = power(v, q);
        return inf_norm(op.apply(v) - g) < options.tolerance * inf_norm(g);
    };

    int it = 0;
    while (!converged(u)) {
        if (it == options.max_iterations) {
            std::ostringstream msg;
            msg << "Newton did not converge in " << it << " iterations at eps = " << params.eps << " (residual " << r << ")";
            throw NumericalFailure(msg.str());
        }
        const Vector d = q * power(u, q - 1.0);
        const Vector step = op.solve_linearized(d, -F);
        double alpha = 1.0;
        bool accepted = false;
        for (int k = 0; k <= options.max_halvings; ++k, alpha *= 0.5) {
            const Vector trial = u + alpha * step;
            if (!all_positive(trial)) continue;
            const Vector Ft = fixed_point(trial);
            const double rt = Ft.norm();
            if (rt <= (1.0 - 1e-4 * alpha) * r || (alpha == 1.0 && rt < 1e-12 * u.norm())) {
                u = trial;
                F = Ft;
                r = rt;
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) {
            std::ostringstream msg;
            msg << "Newton line search failed at eps = " << params.eps << " after " << it << " iterations";
            throw NumericalFailure(msg.str());
        }
        res.residual_history.push_back(r);
    }
    res.u = GridField(op.domain(), u);
    res.newton_iters = it;
    res.residual_inf = inf_norm(op.apply(u) - power(u, q));
    res.energy = op.energy(u);
    res.positive = all_positive(u);
    return res;
}

double energy_check(const FractionalOperator& op, const PhysicalParams& params, const GridField& u) {
    const double e = op.energy(u.values);
    const double h = u.domain.cell_volume();
    return std::abs(e - h * power(u.values, params.power() + 1.0).sum()) / e;
}

double energy_check(const SolveResult& result) {
    const double h = result.u.domain.cell_volume();
    return std::abs(result.energy - h * power(result.u.values, result.params.power() + 1.0).sum()) / result.energy;
}

ContinuationResult solve_subcritical(const FractionalOperator& op, const PhysicalParams& params,
                                     const std::optional<GridField>& init, const ContinuationSchedule& schedule,
                                     const NewtonOptions& options,
                                     const std::function<void(const SolveResult&)>& on_accept) {
    const auto consts = sharp_constants(params);
    const double h = op.domain().spacing();
    const bool explicit_list = !schedule.explicit_eps.empty();
    if (explicit_list) {
        for (std::size_t i = 0; i < schedule.explicit_eps.size(); ++i) {
            if (!(schedule.explicit_eps[i] > 0.0)) throw InvalidArgument("every eps in the schedule must be positive");
            if (i && !(schedule.explicit_eps[i] < schedule.explicit_eps[i - 1]))
                throw InvalidArgument("the eps schedule must be strictly decreasing");
        }
    } else if (!(schedule.eps_start > 0.0 && schedule.ratio > 0.0 && schedule.ratio < 1.0)) {
        throw InvalidArgument("need eps_start > 0 and ratio in (0,1)");
    }

    auto scale = [&](const SolveResult& r) {
        return schedule.peak_scale ? schedule.peak_scale(r) : amplitude_scale(r.max_u(), consts);
    };
    std::vector<double> scales;

    ContinuationResult out;
    PhysicalParams pk = params;
    pk.eps = explicit_list ? schedule.explicit_eps.front() : schedule.eps_start;
    GridField start = init ? *init : nehari_init(op, pk);
    NewtonOptions first = options;
    if (first.pre_iteration_tolerance == 0.0) first.pre_iteration_tolerance = 1e-4;
    try {
        out.accepted.push_back(newton_solve(op, pk, start, first));
        scales.push_back(scale(out.accepted.back()));
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(std::string("continuation could not start: ") + e.what());
    }
    if (on_accept) on_accept(out.accepted.back());

    std::size_t next_index = 1;
    double step = pk.eps * (1.0 - schedule.ratio);
    while (true) {
        const SolveResult& prev = out.accepted.back();
        if (scales.back() < schedule.min_cells * h) {
            out.stop_reason = "peak scale below resolution floor";
            break;
        }
        double target;
        if (explicit_list) {
            if (next_index >= schedule.explicit_eps.size()) {
                out.stop_reason = "schedule exhausted";
                break;
            }
            target = schedule.explicit_eps[next_index];
            step = std::min(step, prev.eps - target);
        } else {
            target = prev.eps * schedule.ratio;
            if (target < schedule.eps_min) {
                out.stop_reason = "eps floor reached";
                break;
            }
            step = std::min(prev.eps - target, step);
        }
        bool done = false;
        while (!done) {
            if (step < schedule.min_step) {
                out.stop_reason = "continuation frontier: step below minimum";
                break;
            }
            const double eps_try = prev.eps - step;
            pk.eps = eps_try;
            // tangent predictor: J du/deps = -A^{-1}(u^q log u)
            PhysicalParams pprev = params;
            pprev.eps = prev.eps;
            const Vector& u = prev.u.values;
            const double q = pprev.power();
            const Vector uq = power(u, q);
            const Vector dF = op.solve(uq.cwiseProduct(u.array().log().matrix()));
            Vector guess = u;
            try {
                const Vector du = op.solve_linearized(q * power(u, q - 1.0), -dF);
                guess = u - step * du;
                if (!all_positive(guess)) guess = u;
            } catch (const NumericalFailure&) {
                guess = u;
            }
            try {
                SolveResult r = newton_solve(op, pk, GridField(op.domain(), guess), options);
                if (!r.positive) throw NumericalFailure("lost positivity");
                out.accepted.push_back(std::move(r));
                scales.push_back(scale(out.accepted.back()));
                if (on_accept) on_accept(out.accepted.back());
                done = true;
            } catch (const NumericalFailure&) {
                step *= 0.5;
            }
        }
        if (!done) break;
        if (explicit_list && std::abs(out.accepted.back().eps - schedule.explicit_eps[next_index]) < 1e-15) {
            ++next_index;
            step = out.accepted.back().eps * (1.0 - schedule.ratio);
        } else if (!explicit_list) {
            step = out.accepted.back().eps * (1.0 - schedule.ratio);
        }
    }
    // drop the last entry if it fell below the resolution floor
    if (out.accepted.size() > 1 && scales.back() < schedule.min_cells * h) out.accepted.pop_back();
    out.frontier = out.accepted.back().eps;
    return out;
}

} // namespace fle
