#include "fle/greens.hpp"

#include "fle/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fle {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-740) underflows; eigen-terms beyond this are exactly zero in double.
constexpr double kTailCutoff = 740.0;

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

} // namespace

GreenFunction::GreenFunction(ModelDomain domain, Flavor flavor, double s)
    : domain_(domain), flavor_(flavor), s_(s), N_(domain.dim()) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("order s must lie in (0,1)");
    if (N_ > 2.0 * s) gamma_ = sharp_constants(N_, s).gamma_Ns;

    if (flavor_ == Flavor::Restricted) {
        if (domain_.kind != DomainKind::Interval)
            throw InvalidArgument("the restricted Green function is available on intervals only");
        return;
    }
    if (!(N_ > 2.0 * s)) throw InvalidArgument("the spectral Green function needs N > 2s");

    const double shortest = std::min(domain_.lengths[0], N_ == 2 ? domain_.lengths[1] : domain_.lengths[0]);
    split_time_ = 0.1 * shortest * shortest;
    std::array<int, 2> kmax{1, 1};
    for (int a = 0; a < N_; ++a)
        kmax[a] = static_cast<int>(std::ceil(domain_.lengths[a] / pi * std::sqrt(kTailCutoff / split_time_)));
    for (int k = 1; k <= kmax[0]; ++k) {
        for (int l = 1; l <= kmax[1]; ++l) {
            const auto e = eigenpair(domain_, {k, l});
            if (e.eigenvalue * split_time_ > kTailCutoff) continue;
            tail_modes_.push_back({e.index, e.eigenvalue});
            tail_weights_.push_back(std::pow(e.eigenvalue, -s_) * boost::math::tgamma(s_, e.eigenvalue * split_time_));
        }
    }
}

GreenFunction::GreenFunction(ModelDomain domain, const PhysicalParams& params)
    : GreenFunction(std::move(domain), params.flavor, params.s) {
    if (params.N != domain_.dim()) throw InvalidArgument("domain dimension does not match N");
}

void GreenFunction::require_interior(const Point& x) const {
    if (!domain_.is_interior(x)) throw InvalidArgument("Green function evaluated at a non-interior point");
}

double GreenFunction::singular(const Point& x, const Point& y) const {
    if (gamma_ == 0.0) throw InvalidArgument("the singular part gamma|x-y|^{2s-N} needs N > 2s");
    const double r = (x - y).norm();
    return r == 0.0 ? kInf : gamma_ * std::pow(r, 2.0 * s_ - N_);
}

double GreenFunction::green(const Point& x, const Point& y) const {
    require_interior(x);
    require_interior(y);
    if (flavor_ == Flavor::Restricted && gamma_ == 0.0) return restricted_green(x, y);
    if (x == y) return kInf;
    if (flavor_ == Flavor::Restricted) return restricted_green(x, y);
    return singular(x, y) - spectral_regular(x, y);
}

double GreenFunction::regular(const Point& x, const Point& y) const {
    require_interior(x);
    require_interior(y);
    if (gamma_ == 0.0) throw InvalidArgument("the regular part needs N > 2s");
    return flavor_ == Flavor::Spectral ? spectral_regular(x, y) : restricted_regular(x, y);
}

double GreenFunction::spectral_regular(const Point& x, const Point& y) const {
    const double a = 0.5 * N_ - s_;
    const double T = split_time_;
    const double norm = std::pow(4.0 * pi, -0.5 * N_);

    // large-time free part: int_T^inf t^{s-1} (4 pi t)^{-N/2} e^{-r^2/4t} dt
    const double r2 = (x - y).squaredNorm();
    double free_tail;
    if (r2 == 0.0) {
        free_tail = norm * std::pow(T, -a) / a;
    } else {
        const double z = 0.25 * r2 / T;
        free_tail = norm * std::pow(0.25 * r2, -a) * boost::math::tgamma_lower(a, z);
    }

    // small-time images: sum over reflections of y, excluding y itself
    Point xl(N_), yl(N_);
    for (int d = 0; d < N_; ++d) {
        xl(d) = x(d) - domain_.origin[d];
        yl(d) = y(d) - domain_.origin[d];
    }
    const int M = image_range_;
    const int images_per_axis = 2 * (2 * M + 1);
    std::array<std::vector<double>, 2> offset, sign;
    for (int d = 0; d < N_; ++d) {
        const double L = domain_.lengths[d];
        for (int m = -M; m <= M; ++m) {
            offset[d].push_back(xl(d) - (2.0 * m * L + yl(d)));
            sign[d].push_back(1.0);
            offset[d].push_back(xl(d) - (2.0 * m * L - yl(d)));
            sign[d].push_back(-1.0);
        }
    }
    const int identity = 2 * M; // m = 0, direct copy
    double images = 0.0;
    const int ny = N_ == 2 ? images_per_axis : 1;
    for (int i = 0; i < images_per_axis; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (i == identity && (N_ == 1 || j == identity)) continue;
            double d2 = offset[0][static_cast<std::size_t>(i)] * offset[0][static_cast<std::size_t>(i)];
            double sg = sign[0][static_cast<std::size_t>(i)];
            if (N_ == 2) {
                d2 += offset[1][static_cast<std::size_t>(j)] * offset[1][static_cast<std::size_t>(j)];
                sg *= sign[1][static_cast<std::size_t>(j)];
            }
            const double z = 0.25 * d2 / T;
            if (z > kTailCutoff) continue;
            images += sg * norm * std::pow(0.25 * d2, -a) * boost::math::tgamma(a, z);
        }
    }

    // large-time eigen part
    double eigen = 0.0;
    for (std::size_t m = 0; m < tail_modes_.size(); ++m) {
        double prod = 1.0;
        for (int d = 0; d < N_; ++d) {
            const double L = domain_.lengths[d];
            const double k = tail_modes_[m].index[static_cast<std::size_t>(d)] * pi / L;
            prod *= (2.0 / L) * std::sin(k * xl(d)) * std::sin(k * yl(d));
        }
        eigen += tail_weights_[m] * prod;
    }
    return (free_tail - images - eigen) / boost::math::tgamma(s_);
}

namespace {

struct UnitInterval {
    double x, y, scale;
};

// Affine map of (a, a+L) onto (-1,1); the kernel picks up (L/2)^{2s-1}.
UnitInterval to_unit(const ModelDomain& d, double x, double y, double s) {
    const double R = 0.5 * d.lengths[0];
    const double c = d.origin[0] + R;
    return {(x - c) / R, (y - c) / R, std::pow(R, 2.0 * s - 1.0)};
}

} // namespace

double GreenFunction::restricted_green(const Point& x, const Point& y) const {
    const auto u = to_unit(domain_, x(0), y(0), s_);
    const double kappa = std::exp(-s_ * std::log(4.0) - 2.0 * boost::math::lgamma(s_));
    const double d = std::abs(u.x - u.y);
    const double P = (1.0 - u.x * u.x) * (1.0 - u.y * u.y);
    if (d == 0.0) return kInf;
    if (s_ < 0.5) {
        // int_0^{r0} t^{s-1}(1+t)^{-1/2} dt = B_w(s, 1/2 - s), w = r0/(1+r0)
        const double w = P / (P + d * d);
        return u.scale * kappa * std::pow(d, 2.0 * s_ - 1.0) * boost::math::beta(s_, 0.5 - s_, w);
    }
    // t = r0 v^{1/s}: the integral becomes (r0^s/s) int_0^1 (1 + r0 v^{1/s})^{-1/2} dv
    const double r0 = P / (d * d);
    auto f = [&](double v) { return 1.0 / std::sqrt(1.0 + r0 * std::pow(v, 1.0 / s_)); };
    const double v1 = std::min(1.0, std::pow(r0, -s_));
    double integral = gk(f, 0.0, v1);
    if (v1 < 1.0) integral += gk(f, v1, 1.0);
    return u.scale * kappa * std::pow(P, s_) / (s_ * d) * integral;
}

double GreenFunction::restricted_regular(const Point& x, const Point& y) const {
    const auto u = to_unit(domain_, x(0), y(0), s_);
    const double kappa = std::exp(-s_ * std::log(4.0) - 2.0 * boost::math::lgamma(s_));
    const double d = std::abs(u.x - u.y);
    const double P = (1.0 - u.x * u.x) * (1.0 - u.y * u.y);
    if (d == 0.0) return u.scale * kappa * std::pow(P, s_ - 0.5) / (0.5 - s_);
    // int_{r0}^inf t^{s-1}(1+t)^{-1/2} dt = B_z(1/2 - s, s), z = 1/(1+r0)
    const double z = d * d / (P + d * d);
    return u.scale * kappa * std::pow(d, 2.0 * s_ - 1.0) * boost::math::beta(0.5 - s_, s_, z);
}

Point GreenFunction::robin_grad(const Point& x) const { return robin_grad(x, fd_step()); }

Point GreenFunction::robin_grad(const Point& x, double step) const {
    Point g(N_);
    for (int d = 0; d < N_; ++d) {
        Point xp = x, xm = x;
        xp(d) += step;
        xm(d) -= step;
        g(d) = (robin(xp) - robin(xm)) / (2.0 * step);
    }
    return g;
}

Point GreenFunction::regular_grad(const Point& x, const Point& y) const {
    const double step = fd_step();
    Point g(N_);
    for (int d = 0; d < N_; ++d) {
        Point xp = x, xm = x;
        xp(d) += step;
        xm(d) -= step;
        g(d) = (regular(xp, y) - regular(xm, y)) / (2.0 * step);
    }
    return g;
}

Point GreenFunction::green_grad(const Point& x, const Point& y) const {
    const Point r = x - y;
    const double rn = r.norm();
    if (rn == 0.0) throw InvalidArgument("Green gradient requested at coincident points");
    return gamma_ * (2.0 * s_ - N_) * std::pow(rn, 2.0 * s_ - N_ - 2.0) * r - regular_grad(x, y);
}

std::vector<Point> default_probes(const ModelDomain& domain, int count) {
    std::vector<Point> probes;
    const int ny = domain.dim() == 2 ? count : 1;
    for (int j = 1; j <= ny; ++j) {
        for (int i = 1; i <= count; ++i) {
            Point p(domain.dim());
            p(0) = domain.origin[0] + i * domain.lengths[0] / (count + 1);
            if (domain.dim() == 2) p(1) = domain.origin[1] + j * domain.lengths[1] / (count + 1);
            probes.push_back(p);
        }
    }
    return probes;
}

GreenTable make_green_table(const GreenFunction& g, const std::vector<Point>& probes, unsigned threads) {
    const ModelDomain& d = g.domain();
    GreenTable t{g.flavor(), d, g.order(), probes, {}, {}, {}, {}};
    const auto P = static_cast<Eigen::Index>(probes.size());
    t.G.resize(P, d.size());
    t.H.resize(P, d.size());
    t.robin.resize(d.size());
    t.robin_grad.resize(d.size(), d.dim());
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < d.size(); ++j) {
            const Point x = d.node(j);
            t.H(row, j) = g.regular(x, probes[i]);
            t.G(row, j) = x == probes[i] ? kInf : g.singular(x, probes[i]) - t.H(row, j);
        }
    });
    parallel_for(static_cast<std::size_t>(d.size()), threads, [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        const Point x = d.node(col);
        t.robin(col) = g.robin(x);
        // the difference stencil must stay inside the domain
        const double step = std::min(g.fd_step(), 0.5 * d.boundary_distance(x));
        t.robin_grad.row(col) = g.robin_grad(x, step).transpose();
    });
    return t;
}

void write_csv(std::ostream& out, const GreenTable& table) {
    auto coord = [](const Point& p) {
        std::ostringstream s;
        s << std::setprecision(17);
        for (Eigen::Index i = 0; i < p.size(); ++i) s << (i ? ";" : "") << p(i);
        return s.str();
    };
    out << "flavor,x,y,G,H\r\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < table.probes.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const std::string y = coord(table.probes[i]);
        for (Eigen::Index j = 0; j < table.domain.size(); ++j)
            out << to_string(table.flavor) << ',' << coord(table.domain.node(j)) << ',' << y << ',' << table.G(row, j)
                << ',' << table.H(row, j) << "\r\n";
    }
}

GridField green(const GreenFunction& g, const Point& y) {
    const ModelDomain& d = g.domain();
    GridField out(d);
    for (Eigen::Index j = 0; j < d.size(); ++j) {
        const Point x = d.node(j);
        if ((x - y).norm() > 1e-12 * d.diameter()) {
            out.values(j) = g.green(x, y);
            continue;
        }
        // cell average around the coincident node
        const double s = g.order();
        if (d.dim() == 1 && !(1.0 > 2.0 * s)) {
            const double h = d.spacing();
            boost::math::quadrature::tanh_sinh<double> ts;
            auto f = [&](double t) { return g.green(Point::Constant(1, y(0) + t), y); };
            out.values(j) = (ts.integrate(f, -0.5 * h, 0.0) + ts.integrate(f, 0.0, 0.5 * h)) / h;
        } else if (d.dim() == 1) {
            const double h = d.spacing();
            const double gamma = sharp_constants(1, s).gamma_Ns;
            out.values(j) = gamma * std::pow(0.5 * h, 2.0 * s - 1.0) / (2.0 * s) - g.regular(y, y);
        } else {
            const double hx = 0.5 * d.spacing(0), hy = 0.5 * d.spacing(1);
            const double gamma = sharp_constants(2, s).gamma_Ns;
            const double theta_c = std::atan2(hy, hx);
            const double avg =
                (gk([&](double th) { return std::pow(hx / std::cos(th), 2.0 * s); }, 0.0, theta_c) +
                 gk([&](double th) { return std::pow(hy / std::sin(th), 2.0 * s); }, theta_c, 0.5 * pi)) /
                (2.0 * s * hx * hy);
            out.values(j) = gamma * avg - g.regular(y, y);
        }
    }
    return out;
}

GridField green(const ModelDomain& domain, const PhysicalParams& params, const Point& y) {
    return green(GreenFunction(domain, params), y);
}

double regular_part(const ModelDomain& domain, const PhysicalParams& params, const Point& x, const Point& y) {
    return GreenFunction(domain, params).regular(x, y);
}

Point robin_grad(const ModelDomain& domain, const PhysicalParams& params, const Point& x) {
    return GreenFunction(domain, params).robin_grad(x);
}

} // namespace fle
