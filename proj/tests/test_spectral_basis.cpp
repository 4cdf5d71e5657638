#include "fle/spectral_basis.hpp"
#include "fle/params.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fle;

namespace {

Point pt(double x) { return Point::Constant(1, x); }

Point pt(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

// Band-limited random field: a random sine series with K modes per axis.
GridField random_band_limited(const ModelDomain& d, int K, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    auto modes = std::make_shared<const std::vector<Mode>>(mode_table(d, K));
    SpectralField a{d, modes, Vector(static_cast<Eigen::Index>(modes->size()))};
    for (Eigen::Index m = 0; m < a.coeffs.size(); ++m) a.coeffs(m) = normal(rng);
    return sample(d, [&](const Point& x) { return evaluate(a, x); });
}

} // namespace

TEST_CASE("eigenpairs") {
    const auto I = ModelDomain::interval(1.0, 31);
    const auto e1 = eigenpair(I, {1, 1});
    CHECK(e1.eigenvalue == doctest::Approx(M_PI * M_PI).epsilon(1e-15));
    CHECK(e1(pt(0.5)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(eigenpair(I, {2, 1})(pt(0.5))) < 1e-15);
    const auto R = ModelDomain::rectangle(1.0, 1.0, 15);
    CHECK(eigenpair(R, {1, 1}).eigenvalue == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-15));
    CHECK_THROWS_AS(eigenpair(I, {0, 1}), InvalidArgument);
}

TEST_CASE("grid layout") {
    const auto I = ModelDomain::interval(2.0, 3, -1.0);
    CHECK(I.node(0)(0) == doctest::Approx(-0.5));
    CHECK(I.node(2)(0) == doctest::Approx(0.5));
    CHECK(I.spacing() == doctest::Approx(0.5));
    CHECK(I.boundary_distance(pt(0.5)) == doctest::Approx(0.5));
    const auto R = ModelDomain::rectangle(1.0, 2.0, 3);
    CHECK(R.size() == 9);
    CHECK(R.node(1)(0) == doctest::Approx(0.5));
    CHECK(R.node(3)(1) == doctest::Approx(1.0));
}

TEST_CASE("mode table ordering") {
    const auto R = ModelDomain::rectangle(1.0, 1.0, 8);
    const auto modes = mode_table(R, 4);
    REQUIRE(modes.size() == 16);
    for (std::size_t i = 1; i < modes.size(); ++i) CHECK(modes[i - 1].eigenvalue <= modes[i].eigenvalue);
    // (1,2) and (2,1) tie; lexicographic order puts (1,2) first
    CHECK(modes[1].index == std::array<int, 2>{1, 2});
    CHECK(modes[2].index == std::array<int, 2>{2, 1});
    CHECK_THROWS_AS(mode_table(R, 9), InvalidArgument);
}

TEST_CASE("analysis of a sampled eigenfunction is a unit vector") {
    const auto I = ModelDomain::interval(1.0, 63);
    const auto phi3 = eigenpair(I, {3, 1});
    const auto a = analyze(sample(I, [&](const Point& x) { return phi3(x); }));
    for (Eigen::Index m = 0; m < a.coeffs.size(); ++m) CHECK(std::abs(a.coeffs(m) - (m == 2 ? 1.0 : 0.0)) < 1e-12);

    const auto R = ModelDomain::rectangle(1.0, 2.0, 15);
    const auto phi = eigenpair(R, {2, 3});
    const auto b = analyze(sample(R, [&](const Point& x) { return phi(x); }));
    for (Eigen::Index m = 0; m < b.coeffs.size(); ++m) {
        const bool hit = (*b.modes)[static_cast<std::size_t>(m)].index == std::array<int, 2>{2, 3};
        CHECK(std::abs(b.coeffs(m) - (hit ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("zero field and bounds") {
    const auto I = ModelDomain::interval(1.0, 16);
    const auto a = analyze(GridField(I), 8);
    CHECK(a.coeffs.size() == 8);
    CHECK(a.coeffs.norm() == 0.0);
    CHECK_THROWS_AS(analyze(GridField(I), 17), InvalidArgument);
}

TEST_CASE("round trip, Parseval and orthonormality") {
    for (const auto& d : {ModelDomain::interval(1.0, 127), ModelDomain::interval(3.0, 100, -1.0),
                          ModelDomain::rectangle(1.0, 1.5, 24)}) {
        const auto f = random_band_limited(d, d.dim() == 1 ? 20 : 6, 7);
        const auto a = analyze(f);
        const auto g = synthesize(a);
        CHECK((g.values - f.values).lpNorm<Eigen::Infinity>() < 1e-12 * f.values.lpNorm<Eigen::Infinity>());
        CHECK(std::abs(inner(f, f) - a.coeffs.squaredNorm()) < 1e-10 * a.coeffs.squaredNorm());
        const auto p = sample(d, [&](const Point& x) { return eigenpair(d, {1, 2})(x); });
        const auto q = sample(d, [&](const Point& x) { return eigenpair(d, {2, 1})(x); });
        CHECK(std::abs(inner(p, p) - 1.0) < 1e-10);
        if (d.dim() == 2) CHECK(std::abs(inner(p, q)) < 1e-10);
    }
}

TEST_CASE("series evaluation matches synthesis at nodes") {
    const auto d = ModelDomain::rectangle(1.0, 1.0, 12);
    const auto f = random_band_limited(d, 5, 3);
    const auto a = analyze(f, 5);
    for (Eigen::Index j = 0; j < d.size(); j += 7) CHECK(evaluate(a, d.node(j)) == doctest::Approx(f.values(j)).epsilon(1e-12));
    CHECK(std::abs(evaluate(a, pt(0.0, 0.3))) < 1e-14);
}
