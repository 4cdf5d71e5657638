#include "fle/blowup_lab.hpp"

#include "fle/bubbles.hpp"
#include "fle/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fle {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Node value with zero boundary: i, j are 0-based node indices, -1 and n are
// boundary positions.
double node_value(const GridField& u, Eigen::Index i, Eigen::Index j = 0) {
    const Eigen::Index n = u.domain.grid_n;
    if (i < 0 || i >= n) return 0.0;
    if (u.domain.dim() == 1) return u.values(i);
    if (j < 0 || j >= n) return 0.0;
    return u.values(i + n * j);
}

struct GridIndex {
    Eigen::Index i = 0, j = 0;
};

GridIndex split(const ModelDomain& d, Eigen::Index flat) {
    return {flat % d.grid_n, d.dim() == 2 ? flat / d.grid_n : 0};
}

// w^p of one bubble on the grid with derivatives in (log lambda, xi).
void bubble_rhs(const ModelDomain& d, const SharpConstants& k, double lambda, const Point& xi, Vector& f,
                Eigen::MatrixXd* jac, Eigen::Index col) {
    const double e = 0.5 * (k.N + 2.0 * k.s);
    const double scale = std::pow(k.alpha_Ns, k.p());
    for (Eigen::Index a = 0; a < d.size(); ++a) {
        const Point x = d.node(a);
        const double rho2 = (x - xi).squaredNorm();
        const double den = lambda * lambda + rho2;
        const double v = scale * std::pow(lambda / den, e);
        f(a) += v;
        if (jac) {
            (*jac)(a, col) = e * (1.0 - 2.0 * lambda * lambda / den) * v;
            for (int c = 0; c < d.dim(); ++c) (*jac)(a, col + 1 + c) = e * 2.0 * (x(c) - xi(c)) / den * v;
        }
    }
}

struct FitState {
    std::vector<double> lambda;
    std::vector<Point> x;
};

FitState unpack_fit(const Vector& theta, int m, int N) {
    FitState s;
    for (int i = 0; i < m; ++i) {
        s.lambda.push_back(std::exp(theta(i * (N + 1))));
        s.x.push_back(theta.segment(i * (N + 1) + 1, N));
    }
    return s;
}

double fourth_order_derivative(const GridField& u, Eigen::Index i, Eigen::Index j, int axis) {
    const double h = u.domain.spacing(axis);
    auto at = [&](int k) { return axis == 0 ? node_value(u, i + k, j) : node_value(u, i, j + k); };
    return (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
}

} // namespace

GridField bubble_seed(const FractionalOperator& op, const SharpConstants& consts, const std::vector<BubbleParams>& bubbles) {
    if (bubbles.empty()) throw InvalidArgument("bubble_seed needs at least one bubble");
    GridField out(op.domain());
    for (const auto& bp : bubbles) out.values += project_bubble(bp, op, consts).pw.values;
    return out;
}

double interpolate(const GridField& u, const Point& x) {
    const ModelDomain& d = u.domain;
    if (x.size() != d.dim()) throw InvalidArgument("point dimension does not match the grid");
    double t[2] = {0.0, 0.0};
    Eigen::Index base[2] = {0, 0};
    for (int a = 0; a < d.dim(); ++a) {
        const double r = (x(a) - d.origin[a]) / d.spacing(a);
        if (r < 0.0 || r > d.grid_n + 1) return 0.0;
        const double fl = std::min(std::floor(r), static_cast<double>(d.grid_n));
        base[a] = static_cast<Eigen::Index>(fl) - 1; // node index of the left neighbour
        t[a] = r - fl;
    }
    if (d.dim() == 1) return (1.0 - t[0]) * node_value(u, base[0]) + t[0] * node_value(u, base[0] + 1);
    return (1.0 - t[0]) * (1.0 - t[1]) * node_value(u, base[0], base[1]) +
           t[0] * (1.0 - t[1]) * node_value(u, base[0] + 1, base[1]) +
           (1.0 - t[0]) * t[1] * node_value(u, base[0], base[1] + 1) + t[0] * t[1] * node_value(u, base[0] + 1, base[1] + 1);
}

PeakDecomposition extract_peaks(const GridField& u, const FractionalOperator& op, const SharpConstants& consts,
                                const PeakOptions& options) {
    const ModelDomain& d = u.domain;
    if (!(d == op.domain())) throw InvalidArgument("field and operator live on different grids");
    if (d.dim() != consts.N) throw InvalidArgument("domain dimension does not match the constants");
    if (!(u.values.array() > 0.0).all()) throw InvalidArgument("extract_peaks needs a positive field");
    const int N = d.dim();
    const double a = 0.5 * consts.decay();
    const double umax = u.values.maxCoeff();
    const double d_floor = options.d_floor > 0.0 ? options.d_floor : 10.0 * d.spacing();

    struct Candidate {
        double height;
        Point x;
    };
    std::vector<Candidate> found;
    for (Eigen::Index flat = 0; flat < d.size(); ++flat) {
        const double v = u.values(flat);
        if (v < options.threshold * umax) continue;
        const auto [i, j] = split(d, flat);
        // strictness is judged against interior neighbours only, so a flat
        // field has no maximum next to the boundary either
        bool is_max = true, strict = false;
        const Eigen::Index n = d.grid_n;
        for (int di = -1; di <= 1 && is_max; ++di) {
            for (int dj = (N == 2 ? -1 : 0); dj <= (N == 2 ? 1 : 0); ++dj) {
                if (di == 0 && dj == 0) continue;
                const double w = node_value(u, i + di, j + dj);
                if (w > v) {
                    is_max = false;
                    break;
                }
                const bool interior = i + di >= 0 && i + di < n && (N == 1 || (j + dj >= 0 && j + dj < n));
                if (w < v && interior) strict = true;
            }
        }
        if (!is_max || !strict) continue;
        // sub-grid refinement: vertex of the parabola through log u along each axis
        Point x = d.node(flat);
        double log_peak = std::log(v);
        for (int axis = 0; axis < N; ++axis) {
            const double l = axis == 0 ? node_value(u, i - 1, j) : node_value(u, i, j - 1);
            const double r = axis == 0 ? node_value(u, i + 1, j) : node_value(u, i, j + 1);
            if (l <= 0.0 || r <= 0.0) continue;
            const double ll = std::log(l), lr = std::log(r), lc = std::log(v);
            const double curv = ll - 2.0 * lc + lr;
            if (!(curv < 0.0)) continue;
            const double off = std::clamp(0.5 * (ll - lr) / curv, -0.5, 0.5);
            x(axis) += off * d.spacing(axis);
            log_peak += -0.25 * (ll - lr) * off;
        }
        found.push_back({std::exp(log_peak), x});
    }
    if (found.empty()) throw NumericalFailure("no strict local maximum: flat field");
    std::stable_sort(found.begin(), found.end(), [](const Candidate& p, const Candidate& q) { return p.height > q.height; });

    PeakDecomposition out;
    std::vector<Candidate> kept;
    for (const auto& c : found) {
        bool close = false;
        for (const auto& k : kept) close = close || (k.x - c.x).norm() < d_floor;
        if (close) out.collision = true;
        else kept.push_back(c);
    }
    const int m = static_cast<int>(kept.size());
    out.m = m;

    // Levenberg-Marquardt/Gauss-Newton on the flavor norm of u - sum Pw_i.
    // With F = sum w_i^p on the grid, A(u - A^{-1}F) = Au - F, so the
    // objective is h (u - A^{-1}F).(Au - F).
    const int P = m * (N + 1);
    Vector theta(P);
    for (int i = 0; i < m; ++i) {
        const double lam = std::pow(consts.alpha_Ns / kept[static_cast<std::size_t>(i)].height, 1.0 / a);
        theta(i * (N + 1)) = std::log(lam);
        theta.segment(i * (N + 1) + 1, N) = kept[static_cast<std::size_t>(i)].x;
    }
    const double h = d.cell_volume();
    const Vector Au = op.apply(u.values);
    const double norm2 = h * u.values.dot(Au);
    auto objective = [&](const Vector& th, Vector* residual, Eigen::MatrixXd* dF) {
        const FitState s = unpack_fit(th, m, N);
        Vector F = Vector::Zero(d.size());
        for (int i = 0; i < m; ++i)
            bubble_rhs(d, consts, s.lambda[static_cast<std::size_t>(i)], s.x[static_cast<std::size_t>(i)], F, dF, i * (N + 1));
        const Vector r = u.values - op.solve(F);
        if (residual) *residual = r;
        return h * r.dot(Au - F);
    };
    auto admissible = [&](const Vector& th) {
        const FitState s = unpack_fit(th, m, N);
        for (const auto& x : s.x)
            if (!d.is_interior(x)) return false;
        return true;
    };
    Vector r;
    Eigen::MatrixXd dF(d.size(), P);
    double E = objective(theta, &r, &dF);
    double mu = 1e-3;
    int it = 0;
    for (; it < options.max_fit_iterations; ++it) {
        Eigen::MatrixXd J(d.size(), P);
        for (int c = 0; c < P; ++c) J.col(c) = op.solve(dF.col(c));
        Eigen::MatrixXd normal = dF.transpose() * J;
        normal = 0.5 * (normal + normal.transpose()).eval();
        const Vector grad = dF.transpose() * r;
        bool improved = false;
        Vector delta;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += mu * normal.diagonal().cwiseMax(1e-300);
            delta = damped.ldlt().solve(grad);
            const Vector trial = theta + delta;
            if (admissible(trial)) {
                Vector rt;
                Eigen::MatrixXd dFt(d.size(), P);
                const double Et = objective(trial, &rt, &dFt);
                if (Et < E) {
                    theta = trial;
                    const double drop = E - Et;
                    E = Et;
                    r = rt;
                    dF = dFt;
                    mu = std::max(mu / 3.0, 1e-12);
                    improved = true;
                    if (drop <= 1e-14 * norm2) tries = 1000;
                    break;
                }
            }
            mu *= 4.0;
        }
        if (!improved || delta.lpNorm<Eigen::Infinity>() < 1e-11) break;
    }
    out.fit_iterations = it;
    out.residual_fraction = std::sqrt(std::max(E, 0.0) / norm2);
    const FitState s = unpack_fit(theta, m, N);
    for (int i = 0; i < m; ++i) {
        Peak pk;
        pk.lambda = s.lambda[static_cast<std::size_t>(i)];
        pk.amplitude_lambda = std::pow(consts.alpha_Ns / kept[static_cast<std::size_t>(i)].height, 1.0 / a);
        pk.x = kept[static_cast<std::size_t>(i)].x;
        pk.fitted_x = s.x[static_cast<std::size_t>(i)];
        out.peaks.push_back(pk);
    }
    out.b.resize(m);
    for (int i = 0; i < m; ++i) out.b(i) = std::pow(out.peaks[static_cast<std::size_t>(i)].lambda / out.peaks[0].lambda, a);
    out.bubble_regime = out.residual_fraction < options.regime_fraction;
    for (const auto& pk : out.peaks)
        out.bubble_regime = out.bubble_regime && pk.lambda <= options.regime_scale * d.boundary_distance(pk.x);
    out.label = out.bubble_regime ? "bubble regime" : "no bubble regime";
    return out;
}

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& lambda, int window) {
    if (eps.size() != lambda.size()) throw InvalidArgument("rate_fit: size mismatch");
    if (window < 2 || static_cast<int>(eps.size()) < window)
        throw InvalidArgument("rate_fit: too few entries (" + std::to_string(eps.size()) + " < " + std::to_string(window) + ")");
    const std::size_t start = eps.size() - static_cast<std::size_t>(window);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = start; i < eps.size(); ++i) {
        mx += std::log(eps[i]);
        my += std::log(lambda[i]);
    }
    mx /= window;
    my /= window;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < eps.size(); ++i) {
        const double dx = std::log(eps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(lambda[i]) - my);
    }
    RateFit fit;
    fit.count = window;
    fit.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = start; i < eps.size(); ++i) {
        const double res = std::log(lambda[i]) - my - fit.slope * (std::log(eps[i]) - mx);
        ss += res * res;
    }
    fit.stderr_ = window > 2 ? std::sqrt(ss / (window - 2) / sxx) : 0.0;
    return fit;
}

PohozaevResult pohozaev_residual(const GridField& u, const FractionalOperator& op, const PhysicalParams& params,
                                 const Point& center, double r, Generator generator, int axis) {
    const ModelDomain& d = u.domain;
    if (!(d == op.domain())) throw InvalidArgument("field and operator live on different grids");
    if (center.size() != d.dim() || !d.is_interior(center)) throw InvalidArgument("ball centre must be interior");
    if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
    if (d.boundary_distance(center) < r + 2.0 * d.spacing()) throw InvalidArgument("ball touches the boundary");
    if (axis < 0 || axis >= d.dim()) throw InvalidArgument("translation axis out of range");
    const double q = params.power();
    const double c = 2.0 * params.s / (q - 1.0);
    const GridField Au(d, op.apply(u.values));
    const double h = d.cell_volume();
    double lhs = 0.0, rhs = 0.0;
    for (Eigen::Index flat = 0; flat < d.size(); ++flat) {
        const Point x = d.node(flat);
        if ((x - center).norm() > r) continue;
        const auto [i, j] = split(d, flat);
        double v, Dv;
        if (generator == Generator::Dilation) {
            v = c * u.values(flat);
            Dv = (2.0 * params.s + c) * Au.values(flat);
            for (int k = 0; k < d.dim(); ++k) {
                v += (x(k) - center(k)) * fourth_order_derivative(u, i, j, k);
                Dv += (x(k) - center(k)) * fourth_order_derivative(Au, i, j, k);
            }
        } else {
            v = fourth_order_derivative(u, i, j, axis);
            Dv = fourth_order_derivative(Au, i, j, axis);
        }
        lhs -= h * (Au.values(flat) * v - Dv * u.values(flat));
        rhs += h * (q - 1.0) * std::pow(u.values(flat), q) * v;
    }
    return {lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs)};
}

double lambda_eps_distance(const PeakDecomposition& peaks, double eps) {
    double worst = 0.0;
    for (const auto& p : peaks.peaks) worst = std::max(worst, std::abs(std::pow(p.lambda, eps) - 1.0));
    return worst;
}

double green_limit_error(const GridField& u, const PeakDecomposition& peaks, const GreenFunction& g,
                         const SharpConstants& consts, const std::vector<Point>& points) {
    if (peaks.peaks.empty()) throw InvalidArgument("green_limit_error needs at least one peak");
    const double a = 0.5 * consts.decay();
    const double scale = std::pow(peaks.peaks[0].lambda, -a);
    double worst = 0.0;
    for (const auto& x : points) {
        double model = 0.0;
        for (int i = 0; i < peaks.m; ++i) model += peaks.b(i) * g.green(x, peaks.peaks[static_cast<std::size_t>(i)].x);
        model *= consts.c1;
        worst = std::max(worst, std::abs(scale * interpolate(u, x) - model) / model);
    }
    return worst;
}

double pointwise_bound_constant(const GridField& u, const PeakDecomposition& peaks, const SharpConstants& consts) {
    double C = 0.0;
    for (Eigen::Index flat = 0; flat < u.domain.size(); ++flat) {
        const Point x = u.domain.node(flat);
        double envelope = 0.0;
        for (const auto& p : peaks.peaks) envelope += bubble_eval({p.lambda, p.x}, x, consts);
        C = std::max(C, u.values(flat) / envelope);
    }
    return C;
}

std::vector<const SweepEntry*> bubble_entries(const SweepRecord& sweep) {
    std::vector<const SweepEntry*> out;
    for (const auto& e : sweep.entries)
        if (e.peaks.bubble_regime) out.push_back(&e);
    return out;
}

SweepRecord run_sweep(const ModelDomain& domain, const PhysicalParams& params, const SweepOptions& options) {
    const auto op = make_operator(domain, params);
    const auto consts = sharp_constants(params);
    const GreenFunction g(domain, params);

    SweepRecord rec;
    rec.params = params;
    rec.domain = domain;
    rec.green_points = options.green_points;
    if (rec.green_points.empty()) {
        for (double f : {0.1, 0.25, 0.75, 0.9}) {
            Point x(domain.dim());
            for (int a = 0; a < domain.dim(); ++a) x(a) = domain.origin[a] + f * domain.lengths[a];
            rec.green_points.push_back(x);
        }
    }
    const double r_test = options.r_test > 0.0 ? options.r_test : 0.1 * domain.diameter();

    // The resolution floor is applied to the fitted bubble scale; the
    // decompositions are kept for the diagnostics below.
    std::vector<PeakDecomposition> decompositions;
    ContinuationSchedule schedule = options.schedule;
    if (!schedule.peak_scale) {
        schedule.peak_scale = [&](const SolveResult& r) {
            decompositions.push_back(extract_peaks(r.u, *op, consts, options.peaks));
            return decompositions.back().peaks.front().lambda;
        };
    }
    const auto run = solve_subcritical(*op, params, options.init, schedule, options.newton);
    rec.stop_reason = run.stop_reason;
    rec.entries.resize(run.accepted.size());
    parallel_for(run.accepted.size(), options.threads, [&](std::size_t k) {
        const SolveResult& r = run.accepted[k];
        SweepEntry& e = rec.entries[k];
        e.eps = r.eps;
        e.max_u = r.max_u();
        e.newton_iters = r.newton_iters;
        e.residual_inf = r.residual_inf;
        e.energy = r.energy;
        e.energy_check = energy_check(r);
        e.peaks = k < decompositions.size() ? decompositions[k] : extract_peaks(r.u, *op, consts, options.peaks);
        const Peak& top = e.peaks.peaks.front();
        e.b0 = std::pow(top.lambda, -consts.decay()) * r.eps;
        e.lambda_eps = lambda_eps_distance(e.peaks, r.eps);
        std::vector<Point> pts;
        for (const auto& x : rec.green_points) {
            bool far = true;
            for (const auto& p : e.peaks.peaks) far = far && (x - p.x).norm() >= r_test;
            if (far) pts.push_back(x);
        }
        e.green_limit = pts.empty() ? nan : green_limit_error(r.u, e.peaks, g, consts, pts);
        try {
            const double radius = options.pohozaev_fraction * domain.boundary_distance(top.x);
            e.pohozaev = pohozaev_residual(r.u, *op, r.params, top.x, radius);
        } catch (const InvalidArgument&) {
            e.pohozaev = {nan, nan, nan};
        }
        PhiPoint pp{e.peaks.b, {}, e.b0};
        for (const auto& p : e.peaks.peaks) pp.x.push_back(p.x);
        e.con2 = con2_residual(pp, g, consts).lpNorm<Eigen::Infinity>();
        e.grad_phi = phi_grad(pp, g, consts).lpNorm<Eigen::Infinity>();
        e.bound_constant = pointwise_bound_constant(r.u, e.peaks, consts);
    });
    std::vector<double> eps, lam;
    for (auto& e : rec.entries) {
        if (e.peaks.bubble_regime) {
            eps.push_back(e.eps);
            lam.push_back(e.peaks.peaks.front().lambda);
        }
        e.rate = eps.size() >= 2 ? rate_fit(eps, lam, static_cast<int>(std::min<std::size_t>(5, eps.size()))).slope : nan;
    }
    return rec;
}

RateFit rate_fit(const SweepRecord& sweep, int window) {
    std::vector<double> eps, lam;
    for (const auto* e : bubble_entries(sweep)) {
        eps.push_back(e->eps);
        lam.push_back(e->peaks.peaks.front().lambda);
    }
    return rate_fit(eps, lam, window);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

LambdaEpsReport lambda_eps_check(const SweepRecord& sweep) {
    LambdaEpsReport rep;
    for (const auto* e : bubble_entries(sweep)) rep.distance.push_back(e->lambda_eps);
    if (rep.distance.empty()) throw InvalidArgument("lambda_eps_check: no bubble-regime entries");
    rep.final = rep.distance.back();
    rep.decreasing = strictly_decreasing(rep.distance);
    return rep;
}

GreenLimitReport green_limit_check(const SweepRecord& sweep) {
    GreenLimitReport rep;
    for (const auto* e : bubble_entries(sweep)) rep.error.push_back(e->green_limit);
    if (rep.error.empty()) throw InvalidArgument("green_limit_check: no bubble-regime entries");
    rep.final = rep.error.back();
    rep.decreasing = strictly_decreasing(rep.error);
    return rep;
}

PhiCriticalityReport phi_criticality_check(const SweepRecord& sweep, const GreenFunction& g,
                                           const SharpConstants& consts) {
    const auto entries = bubble_entries(sweep);
    if (entries.size() < 3) throw NumericalFailure("phi_criticality_check: fewer than three bubble-regime entries");
    PhiCriticalityReport rep;
    for (const auto* e : entries) {
        rep.grad_phi.push_back(e->grad_phi);
        rep.con2.push_back(e->con2);
    }
    const std::size_t n = entries.size();
    const double t0 = entries[n - 3]->b0, t1 = entries[n - 2]->b0, t2 = entries[n - 1]->b0;
    if (!((t1 - t0) * (t2 - t1) >= 0.0)) throw NumericalFailure("b0 extrapolation unstable: non-monotone tail");
    rep.b0 = (t0 + t1 + t2) / 3.0;
    rep.shrinking = strictly_decreasing(rep.con2);
    const SweepEntry& last = *entries.back();
    if (last.peaks.m == 1) {
        const Peak& p = last.peaks.peaks.front();
        const double predicted = last.eps * consts.c2 / (2.0 * consts.c1 * g.robin(p.x));
        const double measured = std::pow(p.lambda, consts.decay());
        rep.closed_form_error = std::abs(measured - predicted) / predicted;
    } else {
        rep.closed_form_error = nan;
    }
    return rep;
}

} // namespace fle
