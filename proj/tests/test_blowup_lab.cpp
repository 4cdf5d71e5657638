#include "fle/blowup_lab.hpp"
#include "fle/bubbles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fle;

namespace {

Point pt(double x) { return Point::Constant(1, x); }

struct Setup {
    PhysicalParams params = make_params(1, 0.25, 0.5, Flavor::Spectral);
    ModelDomain domain = ModelDomain::interval(1.0, 1024);
    std::shared_ptr<const FractionalOperator> op = make_operator(domain, params);
    SharpConstants consts = sharp_constants(params);
};

} // namespace

TEST_CASE("extract_peaks recovers a synthetic projected bubble") {
    Setup S;
    const double h = S.domain.spacing();
    for (auto [lambda, xi] : {std::pair{0.01, 0.4321}, std::pair{0.02, 0.5}, std::pair{0.005, 0.61}}) {
        CAPTURE(lambda);
        const GridField u = bubble_seed(*S.op, S.consts, {{lambda, pt(xi)}});
        const auto d = extract_peaks(u, *S.op, S.consts);
        REQUIRE(d.m == 1);
        CHECK(d.peaks[0].lambda == doctest::Approx(lambda).epsilon(0.01));
        CHECK(std::abs(d.peaks[0].x(0) - xi) < 0.5 * h);
        CHECK(std::abs(d.peaks[0].fitted_x(0) - xi) < 0.5 * h);
        CHECK(d.residual_fraction < 1e-3);
        CHECK(d.bubble_regime);
        CHECK(d.b(0) == 1.0);
    }
}

TEST_CASE("extract_peaks separates two bubbles") {
    Setup S;
    const GridField u = bubble_seed(*S.op, S.consts, {{0.01, pt(0.3)}, {0.02, pt(0.71)}});
    const auto d = extract_peaks(u, *S.op, S.consts);
    REQUIRE(d.m == 2);
    CHECK_FALSE(d.collision);
    CHECK(d.residual_fraction < 0.02);
    // tallest first: the narrower bubble
    CHECK(d.peaks[0].lambda == doctest::Approx(0.01).epsilon(0.01));
    CHECK(d.peaks[1].lambda == doctest::Approx(0.02).epsilon(0.01));
    CHECK(std::abs(d.peaks[0].x(0) - 0.3) < S.domain.spacing());
    CHECK(std::abs(d.peaks[1].x(0) - 0.71) < S.domain.spacing());
    CHECK(d.b(1) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(0.01));
}

TEST_CASE("extract_peaks controls") {
    Setup S;
    // principal eigenfunction: one maximum, no bubble structure
    GridField phi = sample(S.domain, [](const Point& x) { return std::sin(M_PI * x(0)); });
    const auto d = extract_peaks(phi, *S.op, S.consts);
    CHECK(d.m == 1);
    MESSAGE("eigenfunction residual fraction " << d.residual_fraction);
    CHECK(d.residual_fraction > 0.3);
    CHECK(d.peaks[0].lambda > 0.1 * 0.5);
    CHECK_FALSE(d.bubble_regime);
    CHECK(d.label == "no bubble regime");

    CHECK_THROWS_AS(extract_peaks(GridField(S.domain, Vector::Constant(S.domain.size(), 1.0)), *S.op, S.consts),
                    NumericalFailure);
    GridField negative = phi;
    negative.values(3) = -1.0;
    CHECK_THROWS_AS(extract_peaks(negative, *S.op, S.consts), InvalidArgument);

    const double h = S.domain.spacing();
    const GridField close = bubble_seed(*S.op, S.consts, {{0.001, pt(0.5)}, {0.001, pt(0.5 + 5 * h)}});
    CHECK(extract_peaks(close, *S.op, S.consts).collision);
}

TEST_CASE("rate fit") {
    std::vector<double> eps, lam, flat;
    for (int k = 0; k < 8; ++k) {
        eps.push_back(std::pow(0.8, k));
        lam.push_back(eps.back() * eps.back());
        flat.push_back(0.3);
    }
    const auto fit = rate_fit(eps, lam);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.stderr_ < 1e-10);
    CHECK(fit.count == 5);
    CHECK(std::abs(rate_fit(eps, flat).slope) < 1e-12);
    CHECK_THROWS_AS(rate_fit({1.0, 0.5}, {1.0, 0.25}), InvalidArgument);
}

TEST_CASE("lambda^eps distance") {
    PeakDecomposition d;
    d.m = 1;
    d.peaks.push_back({0.5, 0.5, pt(0.5), pt(0.5)});
    CHECK(lambda_eps_distance(d, 0.1) == doctest::Approx(1.0 - std::pow(0.5, 0.1)).epsilon(1e-14));
    CHECK(lambda_eps_distance(d, 0.1) == doctest::Approx(0.067).epsilon(0.01));
    CHECK(lambda_eps_distance(d, 0.05) < lambda_eps_distance(d, 0.1));
    // model rate lambda = eps^{1/(N-2s)}
    std::vector<double> dist;
    for (double e : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        d.peaks[0].lambda = e * e;
        dist.push_back(lambda_eps_distance(d, e));
    }
    CHECK(strictly_decreasing(dist));
}

TEST_CASE("Green limit of a synthetic field") {
    Setup S;
    const GreenFunction g(S.domain, S.params);
    const double lambda = 1e-3, a = 0.25;
    const Point x0 = pt(0.5);
    GridField G = green(g, x0);
    G.values *= std::pow(lambda, a) * S.consts.c1;
    PeakDecomposition d;
    d.m = 1;
    d.peaks.push_back({lambda, lambda, x0, x0});
    d.b = Vector::Ones(1);
    const std::vector<Point> pts{pt(0.1), pt(0.25), pt(0.75), pt(0.9)};
    CHECK(green_limit_error(G, d, g, S.consts, pts) < 1e-5);
    GridField off = G;
    off.values *= 1.05;
    CHECK(green_limit_error(off, d, g, S.consts, pts) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("pointwise bound constant of an exact bubble") {
    Setup S;
    const BubbleParams bp{0.01, pt(0.5)};
    const GridField w = sample(S.domain, [&](const Point& x) { return bubble_eval(bp, x, S.consts); });
    PeakDecomposition d;
    d.m = 1;
    d.peaks.push_back({bp.lambda, bp.lambda, bp.xi, bp.xi});
    CHECK(pointwise_bound_constant(w, d, S.consts) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("local identity on an accepted solution") {
    Setup S;
    S.domain = ModelDomain::interval(1.0, 2048);
    S.op = make_operator(S.domain, S.params);
    ContinuationSchedule sch;
    sch.explicit_eps = {1.0, 0.8, 0.64, 0.5};
    sch.min_cells = 0.0;
    const auto r = solve_subcritical(*S.op, S.params, std::nullopt, sch).accepted.back();
    const auto dil = pohozaev_residual(r.u, *S.op, r.params, S.domain.center(), 0.25);
    CHECK(dil.gap < 0.02);
    CHECK(std::abs(dil.rhs) > 1e-6);
    // translation generator on a symmetric solution and centred ball: both sides vanish
    const auto tr = pohozaev_residual(r.u, *S.op, r.params, S.domain.center(), 0.25, Generator::Translation);
    CHECK(std::abs(tr.lhs) < 1e-8 * std::abs(dil.rhs) + 1e-12);
    CHECK(std::abs(tr.rhs) < 1e-8 * std::abs(dil.rhs) + 1e-12);
    CHECK_THROWS_AS(pohozaev_residual(r.u, *S.op, r.params, S.domain.center(), 0.5), InvalidArgument);
}

TEST_CASE("short sweep: record invariants and thread independence") {
    const auto params = make_params(1, 0.25, 1.0, Flavor::Spectral);
    const auto domain = ModelDomain::interval(1.0, 1024);
    SweepOptions o;
    o.threads = 1;
    const auto a = run_sweep(domain, params, o);
    o.threads = 3;
    const auto b = run_sweep(domain, params, o);
    REQUIRE(a.entries.size() >= 3);
    REQUIRE(a.entries.size() == b.entries.size());
    const double h = domain.spacing();
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto& e = a.entries[i];
        CHECK(e.eps == b.entries[i].eps);
        CHECK(e.peaks.residual_fraction == b.entries[i].peaks.residual_fraction);
        CHECK(e.green_limit == b.entries[i].green_limit);
        if (i) CHECK(e.eps < a.entries[i - 1].eps);
        if (i) CHECK(e.peaks.residual_fraction < a.entries[i - 1].peaks.residual_fraction);
        CHECK(e.peaks.m == 1);
        CHECK(std::abs(e.peaks.peaks[0].x(0) - 0.5) < 2 * h);
        CHECK(e.pohozaev.gap < 0.02);
        CHECK(e.energy_check < 1e-8);
        CHECK(e.peaks.peaks[0].lambda >= 5 * h);
    }
    const auto lam = lambda_eps_check(a);
    CHECK(lam.decreasing);
    const GreenFunction g(domain, params);
    const auto phi = phi_criticality_check(a, g, sharp_constants(params));
    CHECK(std::isfinite(phi.b0));
    CHECK(phi.b0 > 0.0);
    CHECK(std::isfinite(phi.closed_form_error));
}
