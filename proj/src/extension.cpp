#include "fle/extension.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fle {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = 0.5 * std::numbers::pi;

// Angular integrand: receives cos(phi), sin(phi) and tan(phi) computed
// accurately near phi = +-pi/2.
using AngleIntegrand = std::function<double(double c, double s, double tn)>;

double integrate_piece(const AngleIntegrand& f, double a, double b) {
    if (b <= a) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(12);
    const double tol = 1e-13;
    if (b == half_pi) {
        // delta = pi/2 - phi
        auto g = [&](double d) {
            const double c = std::sin(d), s = std::cos(d);
            return c == 0.0 ? 0.0 : f(c, s, s / c);
        };
        return ts.integrate(g, 0.0, half_pi - a, tol);
    }
    if (a == -half_pi) {
        auto g = [&](double d) {
            const double c = std::sin(d), s = -std::cos(d);
            return c == 0.0 ? 0.0 : f(c, s, s / c);
        };
        return ts.integrate(g, 0.0, b + half_pi, tol);
    }
    auto g = [&](double phi) { return f(std::cos(phi), std::sin(phi), std::tan(phi)); };
    return ts.integrate(g, a, b, tol);
}

double integrate_angles(const AngleIntegrand& f, std::vector<double> breaks) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += integrate_piece(f, breaks[i], breaks[i + 1]);
    return sum;
}

double circle_mean(const std::function<double(double)>& g, double theta_f) {
    // periodic integrand: the trapezoid rule converges geometrically; start at the feature direction
    return boost::math::quadrature::trapezoidal([&](double th) { return g(theta_f + th); }, 0.0, 2.0 * pi, 1e-12, 14);
}

void check_dimension(const Point& x, const SharpConstants& consts) {
    if (consts.N != 1 && consts.N != 2) throw InvalidArgument("the half-space extension is implemented for N = 1, 2");
    if (x.size() != consts.N) throw InvalidArgument("point dimension does not match N");
}

// Breakpoint in phi where the ray from x at height t passes over the feature.
double feature_angle(const Point& x, double t, const Point& feature) {
    if (feature.size() == 0) return 0.0;
    return std::atan((feature - x).norm() / t);
}

} // namespace

double poisson_extend(const Trace& u, const Point& x, double t, const SharpConstants& consts, const Point& feature) {
    check_dimension(x, consts);
    if (t < 0.0) throw InvalidArgument("extension height must be nonnegative");
    if (t == 0.0) return u(x);
    const double s = consts.s;
    if (consts.N == 1) {
        // y = x + t tan(phi): kernel dy becomes cos^{2s-1}(phi) dphi
        auto f = [&](double c, double, double tn) {
            return std::pow(c, 2.0 * s - 1.0) * u(Point::Constant(1, x(0) + t * tn));
        };
        std::vector<double> breaks{-half_pi, 0.0, half_pi};
        if (feature.size()) breaks.push_back(std::atan((feature(0) - x(0)) / t));
        return consts.p_Ns * integrate_angles(f, breaks);
    }
    // N = 2: y = x + t tan(phi) e_theta, kernel dy = sin(phi) cos^{2s-1}(phi) dphi dtheta
    const double theta_f = feature.size() ? std::atan2(feature(1) - x(1), feature(0) - x(0)) : 0.0;
    auto f = [&](double c, double sn, double tn) {
        const double rho = t * tn;
        const double ring = circle_mean(
            [&](double th) {
                Point y = x;
                y(0) += rho * std::cos(th);
                y(1) += rho * std::sin(th);
                return u(y);
            },
            theta_f);
        return sn * std::pow(c, 2.0 * s - 1.0) * ring;
    };
    return consts.p_Ns * integrate_angles(f, {0.0, feature_angle(x, t, feature), half_pi});
}

double poisson_kernel_mass(double t, const SharpConstants& consts) {
    if (!(t > 0.0)) throw InvalidArgument("kernel mass needs t > 0");
    const double s = consts.s;
    const int N = consts.N;
    boost::math::quadrature::exp_sinh<double> es;
    const double inf = std::numeric_limits<double>::infinity();
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto k = [&](double r) { return std::pow(r, N - 1) * std::pow(t, 2.0 * s) * std::pow(r * r + t * t, -0.5 * (N + 2.0 * s)); };
    const double radial = GK::integrate(k, 0.0, t, 10, 1e-14) + es.integrate(k, t, inf, 1e-14);
    const double sphere = N == 1 ? 2.0 : sphere_area(N);
    return consts.p_Ns * sphere * radial;
}

namespace {

// -kappa_s t^{1-2s} dU/dt at one height.  With w = (y-x)/t and the mass of
// the t-derivative of the kernel being zero,
//   t^{1-2s} dU/dt = p t^{-2s} int [2s - (N+2s)/(1+|w|^2)] (1+|w|^2)^{-(N+2s)/2} (u(x+tw) - u(x)) dw.
double weighted_normal_derivative(const Trace& u, const Point& x, double t, const SharpConstants& consts,
                                  const Point& feature) {
    const double s = consts.s;
    const int N = consts.N;
    const double ux = u(x);
    double integral;
    if (N == 1) {
        auto f = [&](double c, double, double tn) {
            const double second = u(Point::Constant(1, x(0) + t * tn)) + u(Point::Constant(1, x(0) - t * tn)) - 2.0 * ux;
            return std::pow(c, 2.0 * s - 1.0) * (2.0 * s - (1.0 + 2.0 * s) * c * c) * second;
        };
        integral = integrate_angles(f, {0.0, feature_angle(x, t, feature), half_pi});
    } else {
        const double theta_f = feature.size() ? std::atan2(feature(1) - x(1), feature(0) - x(0)) : 0.0;
        auto f = [&](double c, double sn, double tn) {
            const double rho = t * tn;
            const double ring = circle_mean(
                [&](double th) {
                    Point y = x;
                    y(0) += rho * std::cos(th);
                    y(1) += rho * std::sin(th);
                    return u(y) - ux;
                },
                theta_f);
            return sn * std::pow(c, 2.0 * s - 1.0) * (2.0 * s - (2.0 + 2.0 * s) * c * c) * ring;
        };
        integral = integrate_angles(f, {0.0, feature_angle(x, t, feature), half_pi});
    }
    return -consts.kappa_s * consts.p_Ns * std::pow(t, -2.0 * s) * integral;
}

bool monotone(const std::vector<double>& v) {
    const double d1 = v[1] - v[0], d2 = v[2] - v[1];
    return d1 * d2 > 0.0 || (d1 == 0.0 && d2 == 0.0);
}

} // namespace

DtnResult dtn_check(const Trace& u, const Point& x, const SharpConstants& consts, double t0, const Point& feature) {
    check_dimension(x, consts);
    if (!(t0 > 0.0)) throw InvalidArgument("dtn_check needs t0 > 0");
    const double s = consts.s;
    DtnResult out;
    for (int attempt = 0; attempt < 2; ++attempt) {
        out.t = {t0, 0.5 * t0, 0.25 * t0};
        out.samples.clear();
        for (double t : out.t) out.samples.push_back(weighted_normal_derivative(u, x, t, consts, feature));
        if (monotone(out.samples)) {
            // v(t) = L + A t^{2-2s} + B t^2
            Eigen::Matrix3d M;
            Eigen::Vector3d rhs;
            for (int i = 0; i < 3; ++i) {
                M(i, 0) = 1.0;
                M(i, 1) = std::pow(out.t[static_cast<std::size_t>(i)], 2.0 - 2.0 * s);
                M(i, 2) = std::pow(out.t[static_cast<std::size_t>(i)], 2.0);
                rhs(i) = out.samples[static_cast<std::size_t>(i)];
            }
            out.value = M.fullPivLu().solve(rhs)(0);
            return out;
        }
        out.refined = true;
        t0 *= 0.25;
    }
    throw NumericalFailure("dtn_check: non-monotone extrapolation ladder after refinement");
}

EnvelopeReport decay_envelope(double lambda, double r_max, double eta, const SharpConstants& consts, int angles) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0,1)");
    if (!(lambda > 0.0) || !(r_max >= lambda)) throw InvalidArgument("need 0 < lambda <= r_max");
    if (angles < 2) throw InvalidArgument("need at least two directions");
    const int N = consts.N;
    const double a = 0.5 * consts.decay();
    const Point origin = Point::Zero(N);
    auto w = [&](const Point& y) { return consts.alpha_Ns * std::pow(lambda / (lambda * lambda + y.squaredNorm()), a); };

    EnvelopeReport rep{lambda, eta, {}, 0.0};
    for (int k = 0;; ++k) {
        const double r = lambda * std::pow(2.0, 0.5 * k);
        if (r > r_max * (1.0 + 1e-12)) break;
        const double reference = consts.alpha_Ns * std::pow(lambda, a) * std::pow(r, -2.0 * a);
        EnvelopeSample smp{r, std::numeric_limits<double>::infinity(), 0.0, false};
        for (int j = 0; j < angles; ++j) {
            const double th = half_pi * j / (angles - 1);
            Point x = origin;
            x(0) = r * std::cos(th);
            const double t = j == angles - 1 ? r : r * std::sin(th);
            if (j == angles - 1) x(0) = 0.0;
            const double ratio = poisson_extend(w, x, t, consts, origin) / reference;
            smp.min_ratio = std::min(smp.min_ratio, ratio);
            smp.max_ratio = std::max(smp.max_ratio, ratio);
        }
        smp.holds = smp.min_ratio >= 1.0 - eta && smp.max_ratio <= 1.0 + eta;
        rep.samples.push_back(smp);
    }
    rep.r_star = std::numeric_limits<double>::infinity();
    for (auto it = rep.samples.rbegin(); it != rep.samples.rend() && it->holds; ++it) rep.r_star = it->radius;
    return rep;
}

} // namespace fle
