#include "fle/params.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>

using namespace fle;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Direct Gamma-formula evaluation in 50-digit arithmetic, written from the
// textbook forms rather than the log-Gamma reductions used by the library.
struct BigConstants {
    Big c, kappa, p, gamma, alpha, S;
};

BigConstants big_constants(int N, double s_in) {
    const Big s = s_in, n = N;
    const Big pi_val = boost::math::constants::pi<Big>();
    const Big g_plus = boost::multiprecision::tgamma((n + 2 * s) / 2);
    const Big g_minus = boost::multiprecision::tgamma((n - 2 * s) / 2);
    const Big g_half_n = boost::multiprecision::tgamma(n / 2);
    const Big sphere = 2 * pow(pi_val, n / 2) / g_half_n;
    BigConstants b;
    b.c = pow(Big(2), 2 * s) * s * g_plus / (pow(pi_val, n / 2) * boost::multiprecision::tgamma(1 - s));
    b.kappa = boost::multiprecision::tgamma(s) / (pow(Big(2), 1 - 2 * s) * boost::multiprecision::tgamma(1 - s));
    b.p = g_plus / (pow(pi_val, n / 2) * boost::multiprecision::tgamma(s));
    b.gamma = pow(Big(2), 1 - 2 * s) * g_minus / (sphere * g_half_n * boost::multiprecision::tgamma(s));
    b.alpha = pow(Big(2), (n - 2 * s) / 2) * pow(g_plus / g_minus, (n - 2 * s) / (4 * s));
    b.S = pow(Big(2), -s) * pow(pi_val, -s / 2) * sqrt(g_minus / g_plus) *
          pow(boost::multiprecision::tgamma(n) / g_half_n, s / n);
    return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// int_{R^N} w_{1,0}^q by radial quadrature on (0, inf).
double bubble_power_integral(int N, double s, double alpha, double q) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double e = q * (N - 2.0 * s) / 2.0;
    auto f = [&](double r) { return std::pow(r, N - 1) * std::pow(alpha, q) * std::pow(1.0 + r * r, -e); };
    const double radial = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    return (N == 1 ? 2.0 : 2.0 * M_PI) * radial;
}

} // namespace

TEST_CASE("critical exponent and validation") {
    CHECK(make_params(1, 0.25, 0.0, Flavor::Spectral).p() == doctest::Approx(3.0).epsilon(1e-15));
    const auto p2 = make_params(2, 0.5, 0.1, Flavor::Spectral);
    CHECK(p2.p() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p2.power() == doctest::Approx(2.9).epsilon(1e-15));
    CHECK_THROWS_AS(make_params(1, 0.5, 0.0, Flavor::Spectral), InvalidArgument);
    CHECK_THROWS_AS(make_params(1, 0.25, 2.0, Flavor::Spectral), InvalidArgument);
    CHECK_THROWS_AS(make_params(1, 0.25, -0.1, Flavor::Spectral), InvalidArgument);
    CHECK_THROWS_AS(make_params(0, 0.25, 0.0, Flavor::Spectral), InvalidArgument);
    CHECK_THROWS_AS(make_params(2, 1.0, 0.0, Flavor::Spectral), InvalidArgument);
    CHECK_NOTHROW(make_params(1, 0.25, 1.999, Flavor::Restricted));
    CHECK(parse_flavor("restricted") == Flavor::Restricted);
    CHECK_THROWS_AS(parse_flavor("local"), InvalidArgument);
}

TEST_CASE("sharp constants against 50-digit evaluation") {
    for (int N : {1, 2, 3}) {
        for (double s : {0.1, 0.25, 0.4, 0.5, 0.75, 0.9}) {
            if (!(N > 2 * s)) continue;
            CAPTURE(N);
            CAPTURE(s);
            const auto k = sharp_constants(N, s);
            const auto b = big_constants(N, s);
            CHECK(rel(k.c_Ns, b.c.convert_to<double>()) < 1e-12);
            CHECK(rel(k.kappa_s, b.kappa.convert_to<double>()) < 1e-12);
            CHECK(rel(k.p_Ns, b.p.convert_to<double>()) < 1e-12);
            CHECK(rel(k.gamma_Ns, b.gamma.convert_to<double>()) < 1e-12);
            CHECK(rel(k.alpha_Ns, b.alpha.convert_to<double>()) < 1e-12);
            CHECK(rel(k.S_Ns, b.S.convert_to<double>()) < 1e-12);
        }
    }
}

TEST_CASE("named constant values") {
    CHECK(sharp_constants(2, 0.5).kappa_s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(singular_integral_constant(1, 0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
    CHECK(sharp_constants(1, 0.25).alpha_Ns == doctest::Approx(0.6913673390).epsilon(1e-9));
}

TEST_CASE("bubble integrals by quadrature") {
    for (int N : {1, 2}) {
        for (double s : {0.15, 0.25, 0.35, 0.45}) {
            CAPTURE(N);
            CAPTURE(s);
            const auto k = sharp_constants(N, s);
            const double p = k.p();
            const double mass_p = bubble_power_integral(N, s, k.alpha_Ns, p);
            const double mass_p1 = bubble_power_integral(N, s, k.alpha_Ns, p + 1.0);
            CHECK(rel(k.c1, mass_p) < 1e-8);
            CHECK(rel(k.bubble_mass_p1, mass_p1) < 1e-8);
            CHECK(rel(k.c2 * mass_p, (N - 2.0 * s) / N * mass_p1) < 1e-8);
            CHECK(k.c3 == k.c1 * k.gamma_Ns);
        }
    }
}

TEST_CASE("constants are pure functions") {
    const auto a = sharp_constants(1, 0.3);
    const auto b = sharp_constants(make_params(1, 0.3, 0.2, Flavor::Restricted));
    CHECK(a.c1 == b.c1);
    CHECK(a.S_Ns == b.S_Ns);
    CHECK(a.alpha_Ns == b.alpha_Ns);
}

TEST_CASE("bubble Sobolev quotient equals the sharp constant") {
    // For w_{1,0} the Euler-Lagrange equation gives ||w||^2 = int w^{p+1}.
    for (double s : {0.2, 0.25, 0.4}) {
        const auto k = sharp_constants(1, s);
        const double ratio = std::pow(k.bubble_mass_p1, 1.0 / (k.p() + 1.0) - 0.5);
        CHECK(rel(ratio, k.S_Ns) < 1e-12);
    }
}
