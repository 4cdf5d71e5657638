#include "fle/params.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace fle {

namespace {

using boost::math::lgamma;
constexpr double pi = std::numbers::pi;

void check_order(int N, double s) {
    if (N < 1) throw InvalidArgument("dimension N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("order s must lie in (0,1)");
    if (!(N > 2.0 * s)) throw InvalidArgument("N > 2s is required");
}

// int_{R^N} (1 + |y|^2)^{-a} dy via the Beta function.
double radial_power_integral(int N, double a) {
    return 0.5 * sphere_area(N) * boost::math::beta(0.5 * N, a - 0.5 * N);
}

} // namespace

std::string to_string(Flavor flavor) {
    return flavor == Flavor::Spectral ? "spectral" : "restricted";
}

Flavor parse_flavor(const std::string& name) {
    if (name == "spectral") return Flavor::Spectral;
    if (name == "restricted") return Flavor::Restricted;
    throw InvalidArgument("unknown operator flavor '" + name + "'");
}

PhysicalParams make_params(int N, double s, double eps, Flavor flavor) {
    check_order(N, s);
    PhysicalParams params{N, s, eps, flavor};
    if (!(eps >= 0.0)) throw InvalidArgument("eps must be >= 0");
    // p - 1 = 4s/(N-2s); the nonlinearity must stay superlinear.
    if (!(eps < params.p() - 1.0)) throw InvalidArgument("eps must be below p - 1 = 4s/(N-2s)");
    return params;
}

double sphere_area(int N) {
    return 2.0 * std::exp(0.5 * N * std::log(pi) - lgamma(0.5 * N));
}

double singular_integral_constant(int N, double s) {
    const double log_c = 2.0 * s * std::log(2.0) + std::log(s) + lgamma(0.5 * (N + 2.0 * s)) -
                         0.5 * N * std::log(pi) - lgamma(1.0 - s);
    return std::exp(log_c);
}

SharpConstants sharp_constants(int N, double s) {
    check_order(N, s);
    SharpConstants k;
    k.N = N;
    k.s = s;
    const double n = N;
    const double log_pi = std::log(pi);
    const double log2 = std::log(2.0);
    const double lg_plus = lgamma(0.5 * (n + 2.0 * s));
    const double lg_minus = lgamma(0.5 * (n - 2.0 * s));

    k.c_Ns = singular_integral_constant(N, s);
    k.kappa_s = std::exp(lgamma(s) - (1.0 - 2.0 * s) * log2 - lgamma(1.0 - s));
    k.p_Ns = std::exp(lg_plus - 0.5 * n * log_pi - lgamma(s));
    k.gamma_Ns = std::exp((1.0 - 2.0 * s) * log2 + lg_minus - lgamma(0.5 * n) - lgamma(s)) / sphere_area(N);
    k.alpha_Ns = std::exp(0.5 * (n - 2.0 * s) * log2 + (n - 2.0 * s) / (4.0 * s) * (lg_plus - lg_minus));
    k.S_Ns = std::exp(-s * log2 - 0.5 * s * log_pi + 0.5 * (lg_minus - lg_plus) +
                      s / n * (lgamma(n) - lgamma(0.5 * n)));

    // w_{1,0}^q = alpha^q (1+|y|^2)^{-q(N-2s)/2}; q = p gives exponent (N+2s)/2, q = p+1 gives N.
    const double p = k.p();
    k.c1 = std::pow(k.alpha_Ns, p) * radial_power_integral(N, 0.5 * (n + 2.0 * s));
    k.bubble_mass_p1 = std::pow(k.alpha_Ns, p + 1.0) * radial_power_integral(N, n);
    k.c2 = (n - 2.0 * s) / n * k.bubble_mass_p1 / k.c1;
    k.c3 = k.c1 * k.gamma_Ns;
    return k;
}

SharpConstants sharp_constants(const PhysicalParams& params) {
    return sharp_constants(params.N, params.s);
}

} // namespace fle
