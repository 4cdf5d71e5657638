#include "fle/bubbles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace fle {

namespace {

constexpr double pi = std::numbers::pi;

double gk(const std::function<double(double)>& f, double a, double b, unsigned depth = 10) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, 1e-12);
}

// int_0^b f over dyadic pieces [b 2^{-k-1}, b 2^{-k}]; resolves the z^{1-2s}
// behaviour of second differences without sampling where they cancel to noise.
double dyadic_to_zero(const std::function<double(double)>& f, double b, int pieces = 40) {
    double sum = 0.0, hi = b;
    for (int k = 0; k < pieces; ++k) {
        const double lo = 0.5 * hi;
        sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0);
        hi = lo;
    }
    return sum;
}

// int_a^b f over doubling pieces starting at a > 0.
double doubling(const std::function<double(double)>& f, double a, double b, unsigned depth = 6) {
    double sum = 0.0;
    for (double lo = a; lo < b;) {
        const double hi = std::min(2.0 * lo, b);
        sum += gk(f, lo, hi, depth);
        lo = hi;
    }
    return sum;
}

double power_tail(const std::function<double(double)>& F, double R) {
    const double outer = F(R);
    if (outer == 0.0) return 0.0;
    const double q = std::log2(F(0.5 * R) / outer);
    if (!(q > 1.0)) return std::numeric_limits<double>::infinity();
    return outer * R / (q - 1.0);
}

} // namespace

double bubble_eval(const BubbleParams& bp, const Point& x, const SharpConstants& consts) {
    if (!(bp.lambda > 0.0)) throw InvalidArgument("bubble scale lambda must be positive");
    const double r2 = (x - bp.xi).squaredNorm();
    return consts.alpha_Ns * std::pow(bp.lambda / (bp.lambda * bp.lambda + r2), 0.5 * consts.decay());
}

BubbleParams kelvin(const BubbleParams& bp, double lambda_sphere) {
    if (bp.xi.size() > 0 && bp.xi.norm() != 0.0) throw InvalidArgument("Kelvin transform needs a bubble centred at 0");
    if (!(lambda_sphere > 0.0) || !(bp.lambda > 0.0)) throw InvalidArgument("radii must be positive");
    return {lambda_sphere * lambda_sphere / bp.lambda, bp.xi};
}

double kelvin_transform(const BubbleParams& bp, double lambda_sphere, const Point& x, const SharpConstants& consts) {
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) throw InvalidArgument("Kelvin transform is singular at the origin");
    const Point image = (lambda_sphere * lambda_sphere / r2) * x;
    return std::pow(lambda_sphere / std::sqrt(r2), consts.decay()) * bubble_eval(bp, image, consts);
}

double bubble_power_integral(const SharpConstants& consts, double q, double lambda) {
    const int N = consts.N;
    const double e = 0.5 * q * consts.decay();
    if (!(2.0 * e > N)) throw InvalidArgument("w^q is not integrable");
    auto f = [&](double r) { return std::pow(r, N - 1) * std::pow(lambda * lambda + r * r, -e); };
    // integrand below 1e-16 of its scale beyond R
    const double R = lambda * std::min(1e8, std::pow(10.0, 16.0 / (2.0 * e - N + 1.0)));
    double radial = gk(f, 0.0, lambda) + doubling(f, lambda, R);
    // int_R^inf r^{N-1}(r^2+lambda^2)^{-e} dr by the binomial series in (lambda/R)^2
    double tail = 0.0, coeff = 1.0; // coeff = binom(-e, j)
    for (int j = 0; j < 12; ++j) {
        if (j > 0) coeff *= (-e - (j - 1)) / j;
        tail += coeff * std::pow(lambda, 2.0 * j) * std::pow(R, N - 2.0 * e - 2.0 * j) / (2.0 * e + 2.0 * j - N);
    }
    radial += tail;
    const double sphere = N == 1 ? 2.0 : sphere_area(N);
    return sphere * std::pow(consts.alpha_Ns, q) * std::pow(lambda, e) * radial;
}

double fractional_laplacian(const RadialProfile& f, int N, double s, double r) {
    if (N != 1 && N != 2) throw InvalidArgument("radial fractional Laplacian is implemented for N = 1, 2");
    const double c = singular_integral_constant(N, s);
    const double l = f.scale;
    const double ur = f.u(r);
    const double far_start = r + 20.0 * l;
    if (N == 1) {
        auto second = [&](double z) { return (2.0 * ur - f.u(r + z) - f.u(std::abs(r - z))) * std::pow(z, -1.0 - 2.0 * s); };
        auto shifted = [&](double z) { return (f.u(r + z) + f.u(std::abs(r - z))) * std::pow(z, -1.0 - 2.0 * s); };
        double near = dyadic_to_zero(second, l);
        double mid = 0.0;
        if (r > 2.0 * l) mid = gk(shifted, l, r - l) + gk(shifted, r - l, r + l) + gk(shifted, r + l, far_start);
        else mid = gk(shifted, l, far_start);
        boost::math::quadrature::exp_sinh<double> es;
        const double far = es.integrate(shifted, far_start, std::numeric_limits<double>::infinity());
        return c * (near + 2.0 * ur * std::pow(l, -2.0 * s) / (2.0 * s) - mid - far);
    }
    // N = 2, x = (r, 0): mean over directions of the second difference
    auto ring = [&](double rho) {
        auto g = [&](double th) { return f.u(std::sqrt(std::max(0.0, r * r + rho * rho + 2.0 * r * rho * std::cos(th)))); };
        return 2.0 * (r > 0.0 ? gk(g, 0.0, pi, 6) : pi * g(0.0));
    };
    auto second = [&](double rho) { return (2.0 * pi * ur - ring(rho)) * std::pow(rho, -1.0 - 2.0 * s); };
    auto shifted = [&](double rho) { return ring(rho) * std::pow(rho, -1.0 - 2.0 * s); };
    const double near = dyadic_to_zero(second, l, 30);
    double mid;
    if (r > 2.0 * l) mid = gk(shifted, l, r - l, 6) + gk(shifted, r - l, r + l, 6) + gk(shifted, r + l, far_start, 6);
    else mid = gk(shifted, l, far_start, 6);
    const double far = doubling(shifted, far_start, 1e4 * far_start, 4) +
                       power_tail([&](double rho) { return shifted(rho); }, 1e4 * far_start);
    return c * (near + 2.0 * pi * ur * std::pow(l, -2.0 * s) / (2.0 * s) - mid - far);
}

SobolevReport sobolev_ratio(const RadialProfile& f, int N, double s) {
    if (N != 1 && N != 2) throw InvalidArgument("sobolev_ratio is implemented for N = 1, 2");
    if (!(N > 2.0 * s)) throw InvalidArgument("N > 2s is required");
    const double p = (N + 2.0 * s) / (N - 2.0 * s);
    const double sphere = N == 1 ? 2.0 : 2.0 * pi;
    const double R = f.window;
    const double l = f.scale;

    auto lp = [&](double r) { return std::pow(r, N - 1) * std::pow(std::abs(f.u(r)), p + 1.0); };
    auto en = [&](double r) { return std::pow(r, N - 1) * f.u(r) * fractional_laplacian(f, N, s, r); };

    // the energy integrand is itself a quadrature; fixed 61-point rules on
    // doubling pieces keep the outer level from refining on inner noise
    const double lp_body = gk(lp, 0.0, l) + doubling(lp, l, R);
    const double en_body = gk(en, 0.0, 0.5 * l, 0) + gk(en, 0.5 * l, l, 0) + doubling(en, l, R, 0);
    const double lp_tail = power_tail(lp, R);
    const double en_tail = power_tail(en, R);

    SobolevReport out;
    const double lp_total = sphere * (lp_body + lp_tail);
    out.energy = sphere * (en_body + en_tail);
    out.tail_fraction = std::max(std::abs(lp_tail / (lp_body + lp_tail)), std::abs(en_tail / (en_body + en_tail)));
    if (!(out.tail_fraction <= 0.01))
        throw InvalidArgument("sobolev_ratio: window too small, appended tail is " +
                              std::to_string(100.0 * out.tail_fraction) + "% of the integral");
    if (!(out.energy > 0.0)) throw NumericalFailure("sobolev_ratio: nonpositive energy");
    out.lp_norm = std::pow(lp_total, 1.0 / (p + 1.0));
    out.ratio = out.lp_norm / std::sqrt(out.energy);
    return out;
}

SobolevReport sobolev_ratio(const RadialProfile& f, const PhysicalParams& params) {
    return sobolev_ratio(f, params.N, params.s);
}

RadialProfile bubble_profile(const SharpConstants& consts, double lambda) {
    BubbleParams bp{lambda, Point::Zero(1)};
    const SharpConstants k = consts;
    return {[bp, k](double r) { return bubble_eval(bp, Point::Constant(1, r), k); }, lambda, 2000.0 * lambda};
}

ProjectedBubble project_bubble(const BubbleParams& bp, const FractionalOperator& op, const SharpConstants& consts) {
    const ModelDomain& d = op.domain();
    if (bp.xi.size() != d.dim() || !d.is_interior(bp.xi)) throw InvalidArgument("bubble centre must be interior");
    if (d.dim() != consts.N) throw InvalidArgument("domain dimension does not match the constants");
    const double p = consts.p();
    ProjectedBubble out{GridField(d), sample(d, [&](const Point& x) { return bubble_eval(bp, x, consts); }), true};
    const Vector rhs = out.w.values.array().pow(p).matrix();
    out.pw.values = op.solve(rhs);
    out.expansion_regime = bp.lambda <= 0.1 * d.boundary_distance(bp.xi);
    return out;
}

ProjectedBubble project_bubble(const BubbleParams& bp, const ModelDomain& domain, const PhysicalParams& params) {
    const auto op = make_operator(domain, params);
    return project_bubble(bp, *op, sharp_constants(params));
}

} // namespace fle
