#include "fle/nonlinear_solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace fle;

namespace {

Vector pw(const Vector& u, double q) { return u.array().pow(q).matrix(); }

// Plain fixed-point iteration u <- A^{-1} u^q, projected back onto the Nehari
// set <Au,u> = int u^{q+1} after every step.
Vector nehari_fixed_point(const FractionalOperator& op, double q, Vector u) {
    for (int it = 0; it < 20000; ++it) {
        Vector v = op.solve(pw(u, q));
        const double t = std::pow(v.dot(op.apply(v)) / pw(v, q + 1).sum(), 1.0 / (q - 1.0));
        v *= t;
        const double change = (v - u).lpNorm<Eigen::Infinity>();
        u = v;
        if (change < 1e-13) break;
    }
    return u;
}

} // namespace

TEST_CASE("single solve at eps = 1 against the fixed-point oracle") {
    const auto params = make_params(1, 0.25, 1.0, Flavor::Spectral);
    const auto domain = ModelDomain::interval(1.0, 256);
    const auto op = make_operator(domain, params);
    ContinuationSchedule sch;
    sch.explicit_eps = {1.0};
    const auto run = solve_subcritical(*op, params, std::nullopt, sch);
    REQUIRE(run.accepted.size() == 1);
    const auto& r = run.accepted.front();
    CHECK(r.positive);
    CHECK(r.residual_inf < 1e-9 * pw(r.u.values, params.power()).lpNorm<Eigen::Infinity>());
    CHECK(energy_check(r) < 1e-8);

    const Vector oracle = nehari_fixed_point(*op, params.power(), nehari_init(*op, params).values);
    CHECK((oracle - r.u.values).lpNorm<Eigen::Infinity>() < 1e-8 * r.max_u());

    // reflection symmetry of the solution on a symmetric domain
    const Vector& u = r.u.values;
    CHECK((u - u.reverse()).lpNorm<Eigen::Infinity>() < 1e-8 * r.max_u());
}

TEST_CASE("energy check negative controls") {
    const auto params = make_params(1, 0.25, 0.5, Flavor::Spectral);
    const auto domain = ModelDomain::interval(1.0, 256);
    const auto op = make_operator(domain, params);
    ContinuationSchedule sch;
    sch.explicit_eps = {0.5};
    const auto r = solve_subcritical(*op, params, std::nullopt, sch).accepted.front();
    const double q = params.power();
    for (double t : {0.5, 0.9, 1.2}) {
        const GridField scaled(domain, t * r.u.values);
        CHECK(energy_check(*op, params, scaled) == doctest::Approx(std::abs(1.0 - std::pow(t, q - 1.0))).epsilon(1e-6));
    }
    // the L^2-normalised eigenfunction is far from the Nehari set
    GridField phi = nehari_init(*op, params);
    phi.values /= std::sqrt(domain.cell_volume()) * phi.values.norm();
    CHECK(energy_check(*op, params, phi) > 0.1);
}

TEST_CASE("continuation: monotone amplitude, quadratic convergence, mesh robustness") {
    const auto params = make_params(1, 0.25, 1.0, Flavor::Spectral);
    const auto fine = ModelDomain::interval(1.0, 16384);
    const auto op = make_operator(fine, params);
    ContinuationSchedule sch;
    sch.min_cells = 0.0;
    sch.eps_min = 0.02;
    const auto run = solve_subcritical(*op, params, std::nullopt, sch);
    REQUIRE(run.accepted.size() >= 15);
    CHECK(run.accepted.back().eps < 0.03);
    double worst_c = 0.0;
    for (std::size_t i = 0; i < run.accepted.size(); ++i) {
        const auto& r = run.accepted[i];
        CHECK(r.positive);
        CHECK(r.residual_inf < 1e-9 * pw(r.u.values, r.params.power()).lpNorm<Eigen::Infinity>());
        CHECK(energy_check(r) < 1e-8);
        if (i) CHECK(r.eps < run.accepted[i - 1].eps);
        if (i) CHECK(r.max_u() > run.accepted[i - 1].max_u());
        const auto& h = r.residual_history;
        if (h.size() >= 2 && h.back() > 1e-13 * r.u.values.norm())
            worst_c = std::max(worst_c, h[h.size() - 1] / (h[h.size() - 2] * h[h.size() - 2]));
    }
    MESSAGE("largest observed quadratic-convergence constant: " << worst_c);
    CHECK(worst_c < 100.0);

    // resolved part of the schedule on two grids
    const auto coarse = ModelDomain::interval(1.0, 1024);
    const auto coarse_op = make_operator(coarse, params);
    const auto c1 = solve_subcritical(*coarse_op, params, std::nullopt, ContinuationSchedule{});
    const double eps_last = c1.accepted.back().eps;
    const auto doubled = ModelDomain::interval(1.0, 2048);
    const auto d_op = make_operator(doubled, params);
    ContinuationSchedule to_last;
    for (const auto& r : c1.accepted) to_last.explicit_eps.push_back(r.eps);
    to_last.min_cells = 0.0;
    const auto c2 = solve_subcritical(*d_op, params, std::nullopt, to_last);
    REQUIRE(c2.accepted.back().eps == eps_last);
    CHECK(std::abs(c2.accepted.back().max_u() / c1.accepted.back().max_u() - 1.0) < 0.01);
}

TEST_CASE("both flavors on (-1,1)") {
    const auto domain = ModelDomain::interval(2.0, 256, -1.0);
    Vector spectral, restricted;
    for (Flavor f : {Flavor::Spectral, Flavor::Restricted}) {
        const auto params = make_params(1, 0.25, 0.5, f);
        const auto op = make_operator(domain, params);
        ContinuationSchedule sch;
        sch.explicit_eps = {1.0, 0.8, 0.64, 0.5};
        sch.min_cells = 0.0;
        const auto run = solve_subcritical(*op, params, std::nullopt, sch);
        REQUIRE(run.accepted.back().eps == 0.5);
        const auto& r = run.accepted.back();
        CHECK(r.positive);
        CHECK(r.residual_inf < 1e-9 * pw(r.u.values, params.power()).lpNorm<Eigen::Infinity>());
        (f == Flavor::Spectral ? spectral : restricted) = r.u.values;
    }
    CHECK((spectral - restricted).lpNorm<Eigen::Infinity>() > 1e-2);
}

TEST_CASE("solver input validation") {
    const auto params = make_params(1, 0.25, 0.5, Flavor::Spectral);
    const auto domain = ModelDomain::interval(1.0, 64);
    const auto op = make_operator(domain, params);
    CHECK_THROWS_AS(newton_solve(*op, params, GridField(domain, Vector::Constant(64, -1.0))), InvalidArgument);
    auto zero = params;
    zero.eps = 0.0;
    CHECK_THROWS_AS(newton_solve(*op, zero, nehari_init(*op, params)), InvalidArgument);
    ContinuationSchedule bad;
    bad.explicit_eps = {0.5, 0.6};
    CHECK_THROWS_AS(solve_subcritical(*op, params, std::nullopt, bad), InvalidArgument);
    const auto restricted = make_operator(domain, make_params(1, 0.25, 0.5, Flavor::Restricted));
    CHECK_THROWS_AS(newton_solve(*restricted, params, nehari_init(*op, params)), InvalidArgument);
}
