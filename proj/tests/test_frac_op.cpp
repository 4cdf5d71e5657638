#include "fle/frac_op.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace fle;

namespace {

Vector random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

// (-Delta)^s (1-x^2)_+^s on (-1,1), one dimension.
double torsion_constant(double s) {
    return std::pow(4.0, s) * boost::math::tgamma(1.0 + s) * boost::math::tgamma(0.5 + s) / std::sqrt(M_PI);
}

} // namespace

TEST_CASE("spectral multiplier") {
    const auto I = ModelDomain::interval(1.0, 32);
    auto modes = std::make_shared<const std::vector<Mode>>(mode_table(I, 32));
    SpectralField e1{I, modes, Vector::Zero(32)};
    e1.coeffs(0) = 1.0;
    CHECK(apply_spectral(e1, 0.5).coeffs(0) == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(apply_spectral(SpectralField{I, modes, Vector::Zero(32)}, 0.3).coeffs.norm() == 0.0);

    SpectralField a{I, modes, random_vector(32, 1)};
    const auto twice = apply_spectral(apply_spectral(a, 0.15), 0.15);
    CHECK((twice.coeffs - apply_spectral(a, 0.3).coeffs).lpNorm<Eigen::Infinity>() < 1e-12 * twice.coeffs.lpNorm<Eigen::Infinity>());
    const auto back = apply_spectral(solve_spectral(a, 0.7), 0.7);
    CHECK((back.coeffs - a.coeffs).lpNorm<Eigen::Infinity>() < 1e-12 * a.coeffs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("spectral operator on the grid") {
    for (const auto& d : {ModelDomain::interval(1.0, 200), ModelDomain::rectangle(1.0, 2.0, 20)}) {
        SpectralOperator A(d, 0.3);
        const Vector u = random_vector(d.size(), 2), v = random_vector(d.size(), 3);
        CHECK(std::abs(A.apply(u).dot(v) - u.dot(A.apply(v))) < 1e-10 * A.apply(u).norm() * v.norm());
        CHECK((A.solve(A.apply(u)) - u).lpNorm<Eigen::Infinity>() < 1e-12 * u.lpNorm<Eigen::Infinity>());
        const auto phi = sample(d, [&](const Point& x) { return eigenpair(d, {1, 2})(x); });
        const double lambda = std::pow(eigenpair(d, {1, 2}).eigenvalue, 0.3);
        CHECK((A.apply(phi.values) - lambda * phi.values).lpNorm<Eigen::Infinity>() < 1e-11 * lambda);
        CHECK(A.energy(u) > 0.0);
    }
}

TEST_CASE("linearized solve, both flavors") {
    const auto d = ModelDomain::interval(2.0, 120, -1.0);
    for (Flavor f : {Flavor::Spectral, Flavor::Restricted}) {
        const auto A = make_operator(d, f, 0.25);
        const Vector x = random_vector(d.size(), 5);
        const Vector dg = 0.5 * random_vector(d.size(), 6).cwiseAbs();
        const Vector rhs = x - A->solve(dg.cwiseProduct(x));
        CHECK((A->solve_linearized(dg, rhs) - x).lpNorm<Eigen::Infinity>() < 1e-9 * x.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("restricted matrix structure") {
    const auto d = ModelDomain::interval(2.0, 128, -1.0);
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        CAPTURE(s);
        const auto A = assemble_restricted(d, s);
        CHECK((A.matrix - A.matrix.transpose()).lpNorm<Eigen::Infinity>() < 1e-12 * A.matrix.lpNorm<Eigen::Infinity>());
        const Vector row_sums = A.matrix * Vector::Ones(d.size());
        CHECK(row_sums.minCoeff() > 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A.matrix);
        CHECK(eig.eigenvalues()(0) > 0.0);
        CHECK((A.matrix * Vector::Zero(d.size())).norm() == 0.0);
    }
    CHECK_THROWS_AS(assemble_restricted(ModelDomain::rectangle(1, 1, 8), 0.5), InvalidArgument);
}

TEST_CASE("restricted operator reproduces the s-torsion profile") {
    const auto d = ModelDomain::interval(2.0, 256, -1.0);
    for (double s : {0.25, 0.5, 0.75}) {
        CAPTURE(s);
        const auto A = assemble_restricted(d, s);
        const auto u = sample(d, [&](const Point& x) { return std::pow(1.0 - x(0) * x(0), s); });
        const Vector Au = A.matrix * u.values;
        const double c = torsion_constant(s);
        // the profile is only C^s at the boundary; compare on |x| <= 0.9
        for (Eigen::Index j = 0; j < d.size(); ++j)
            if (std::abs(d.node(j)(0)) <= 0.9) CHECK(std::abs(Au(j) - c) < 0.02 * c);

        const auto v = solve_restricted(A, GridField(d, Vector::Ones(d.size())));
        for (Eigen::Index j = 0; j < d.size(); ++j) {
            const double x = d.node(j)(0);
            if (std::abs(x) > 0.9) continue;
            CHECK(std::abs(v.values(j) - std::pow(1.0 - x * x, s) / c) < 0.02 * std::pow(1.0 - x * x, s) / c);
        }
    }
}

TEST_CASE("restricted solve round trip") {
    const auto d = ModelDomain::interval(2.0, 100, -1.0);
    const auto A = assemble_restricted(d, 0.3);
    const Vector v = random_vector(d.size(), 9);
    const auto u = solve_restricted(A, GridField(d, A.matrix * v));
    CHECK((u.values - v).lpNorm<Eigen::Infinity>() < 1e-9 * v.lpNorm<Eigen::Infinity>());
    CHECK(solve_restricted(A, GridField(d)).values.norm() == 0.0);
}

TEST_CASE("principal eigenvalue of the half-Laplacian on (-1,1)") {
    // tabulated value 1.1577738836977...
    std::vector<double> lambda;
    for (int n : {128, 256, 512}) {
        const auto A = assemble_restricted(ModelDomain::interval(2.0, n, -1.0), 0.5);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A.matrix, Eigen::EigenvaluesOnly);
        lambda.push_back(eig.eigenvalues()(0));
    }
    for (double l : lambda) CHECK(std::abs(l - 1.1577738836977) < 0.02 * 1.1577738836977);
    // Aitken-free Richardson with the observed ratio of successive differences
    const double ratio = (lambda[1] - lambda[0]) / (lambda[2] - lambda[1]);
    CHECK(ratio > 1.0);
    const double extrapolated = lambda[2] + (lambda[2] - lambda[1]) / (ratio - 1.0);
    CHECK(std::abs(extrapolated - 1.1577738836977) < 0.005);
}
