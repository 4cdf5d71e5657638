#include "fle/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fle {

namespace {

Json number(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json point(const Point& x) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(number(x(i)));
    return a;
}

Json vec(const Vector& v) {
    return point(v);
}

Json vec(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json to_json(const PhysicalParams& params) {
    return Json{{"N", params.N}, {"s", params.s}, {"eps", params.eps}, {"flavor", to_string(params.flavor)},
                {"p", params.p()}};
}

Json to_json(const ModelDomain& domain) {
    Json j{{"kind", domain.kind == DomainKind::Interval ? "interval" : "rectangle"}, {"grid_n", domain.grid_n}};
    if (domain.dim() == 1) {
        j["origin"] = domain.origin[0];
        j["length"] = domain.lengths[0];
    } else {
        j["origin"] = Json::array({domain.origin[0], domain.origin[1]});
        j["lengths"] = Json::array({domain.lengths[0], domain.lengths[1]});
    }
    return j;
}

Json to_json(const SharpConstants& k) {
    return Json{{"N", k.N},
                {"s", k.s},
                {"p", k.p()},
                {"c_Ns", k.c_Ns},
                {"kappa_s", k.kappa_s},
                {"p_Ns", k.p_Ns},
                {"gamma_Ns", k.gamma_Ns},
                {"alpha_Ns", k.alpha_Ns},
                {"S_Ns", k.S_Ns},
                {"c1", k.c1},
                {"c2", k.c2},
                {"c3", k.c3},
                {"int_w_p_plus_1", k.bubble_mass_p1}};
}

Json to_json(const SolveResult& r) {
    return Json{{"params", to_json(r.params)},
                {"domain", to_json(r.u.domain)},
                {"eps", r.eps},
                {"newton_iters", r.newton_iters},
                {"residual_inf", number(r.residual_inf)},
                {"energy", number(r.energy)},
                {"energy_check", number(energy_check(r))},
                {"positive", r.positive},
                {"max_u", number(r.max_u())},
                {"residual_history", vec(r.residual_history)}};
}

Json to_json(const PeakDecomposition& d) {
    Json peaks = Json::array();
    for (const auto& p : d.peaks)
        peaks.push_back(Json{{"lambda", number(p.lambda)},
                             {"amplitude_lambda", number(p.amplitude_lambda)},
                             {"x", point(p.x)},
                             {"fitted_x", point(p.fitted_x)}});
    return Json{{"m", d.m},
                {"peaks", peaks},
                {"residual_fraction", number(d.residual_fraction)},
                {"b", vec(d.b)},
                {"collision", d.collision},
                {"label", d.label},
                {"fit_iterations", d.fit_iterations}};
}

Json to_json(const SweepEntry& e) {
    return Json{{"eps", e.eps},
                {"max_u", number(e.max_u)},
                {"newton_iters", e.newton_iters},
                {"residual_inf", number(e.residual_inf)},
                {"energy", number(e.energy)},
                {"energy_check", number(e.energy_check)},
                {"peaks", to_json(e.peaks)},
                {"rate", number(e.rate)},
                {"b0", number(e.b0)},
                {"lambda_eps_distance", number(e.lambda_eps)},
                {"green_limit_error", number(e.green_limit)},
                {"pohozaev", Json{{"lhs", number(e.pohozaev.lhs)}, {"rhs", number(e.pohozaev.rhs)}, {"gap", number(e.pohozaev.gap)}}},
                {"con2_residual", number(e.con2)},
                {"grad_phi", number(e.grad_phi)},
                {"bound_constant", number(e.bound_constant)}};
}

Json to_json(const SweepRecord& sweep) {
    Json entries = Json::array();
    for (const auto& e : sweep.entries) entries.push_back(to_json(e));
    Json pts = Json::array();
    for (const auto& x : sweep.green_points) pts.push_back(point(x));
    return Json{{"params", to_json(sweep.params)},
                {"domain", to_json(sweep.domain)},
                {"stop_reason", sweep.stop_reason},
                {"green_points", pts},
                {"entries", entries}};
}

Json to_json(const PhiCriticalResult& r) {
    Json xs = Json::array();
    for (const auto& x : r.point.x) xs.push_back(point(x));
    return Json{{"m", r.point.m()},
                {"b", vec(r.point.b)},
                {"x", xs},
                {"b0", r.point.b0},
                {"iterations", r.iterations},
                {"grad_inf", number(r.grad_inf)},
                {"inertia", Json{{"negative", r.inertia.negative}, {"zero", r.inertia.zero}, {"positive", r.inertia.positive}}}};
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

void write_field_csv(std::ostream& out, const GridField& u) {
    const ModelDomain& d = u.domain;
    out << (d.dim() == 1 ? "x,u\r\n" : "x,y,u\r\n");
    for (Eigen::Index a = 0; a < d.size(); ++a) {
        const Point x = d.node(a);
        for (int c = 0; c < d.dim(); ++c) out << format_double(x(c)) << ',';
        out << format_double(u.values(a)) << "\r\n";
    }
}

void write_sweep_csv(std::ostream& out, const SweepRecord& sweep) {
    out << "eps,max_u,lambda_1,x_1,residual_fraction,rate,con2_residual\r\n";
    for (const auto& e : sweep.entries) {
        const Peak& p = e.peaks.peaks.front();
        std::string x;
        for (Eigen::Index c = 0; c < p.x.size(); ++c) x += (c ? ";" : "") + format_double(p.x(c));
        out << format_double(e.eps) << ',' << format_double(e.max_u) << ',' << format_double(p.lambda) << ','
            << x << ',' << format_double(e.peaks.residual_fraction) << ','
            << (std::isfinite(e.rate) ? format_double(e.rate) : "") << ',' << format_double(e.con2) << "\r\n";
    }
}

} // namespace fle
