#include "fle/spectral_basis.hpp"

#include "dst.hpp"
#include "fle/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fle {

namespace {
constexpr double pi = std::numbers::pi;
}

ModelDomain ModelDomain::interval(double length, int grid_n, double origin) {
    if (!(length > 0.0)) throw InvalidArgument("interval length must be positive");
    if (grid_n < 1) throw InvalidArgument("grid_n must be positive");
    ModelDomain d;
    d.kind = DomainKind::Interval;
    d.lengths = {length, 1.0};
    d.origin = {origin, 0.0};
    d.grid_n = grid_n;
    return d;
}

ModelDomain ModelDomain::rectangle(double length_x, double length_y, int grid_n) {
    if (!(length_x > 0.0 && length_y > 0.0)) throw InvalidArgument("rectangle lengths must be positive");
    if (grid_n < 1) throw InvalidArgument("grid_n must be positive");
    ModelDomain d;
    d.kind = DomainKind::Rectangle;
    d.lengths = {length_x, length_y};
    d.grid_n = grid_n;
    return d;
}

Eigen::Index ModelDomain::size() const {
    const Eigen::Index n = grid_n;
    return kind == DomainKind::Interval ? n : n * n;
}

double ModelDomain::cell_volume() const {
    return kind == DomainKind::Interval ? spacing(0) : spacing(0) * spacing(1);
}

double ModelDomain::diameter() const {
    return kind == DomainKind::Interval ? lengths[0] : std::hypot(lengths[0], lengths[1]);
}

Point ModelDomain::node(Eigen::Index flat) const {
    Point x(dim());
    const Eigen::Index n = grid_n;
    x(0) = origin[0] + static_cast<double>(flat % n + 1) * spacing(0);
    if (dim() == 2) x(1) = origin[1] + static_cast<double>(flat / n + 1) * spacing(1);
    return x;
}

Point ModelDomain::center() const {
    Point x(dim());
    for (int a = 0; a < dim(); ++a) x(a) = origin[a] + 0.5 * lengths[a];
    return x;
}

double ModelDomain::boundary_distance(const Point& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim(); ++a) d = std::min({d, x(a) - origin[a], origin[a] + lengths[a] - x(a)});
    return d;
}

bool ModelDomain::is_interior(const Point& x) const {
    return x.size() == dim() && boundary_distance(x) > 0.0;
}

bool operator==(const ModelDomain& a, const ModelDomain& b) {
    return a.kind == b.kind && a.lengths == b.lengths && a.origin == b.origin && a.grid_n == b.grid_n;
}

double Eigenpair::operator()(const Point& x) const {
    double v = 1.0;
    for (int a = 0; a < domain.dim(); ++a) {
        const double L = domain.lengths[a];
        v *= std::sqrt(2.0 / L) * std::sin(index[a] * pi * (x(a) - domain.origin[a]) / L);
    }
    return v;
}

Eigenpair eigenpair(const ModelDomain& domain, std::array<int, 2> index) {
    Eigenpair e{domain, index, 0.0};
    for (int a = 0; a < domain.dim(); ++a) {
        if (index[a] < 1) throw InvalidArgument("eigenpair index must be >= 1 per axis");
        const double k = index[a] * pi / domain.lengths[a];
        e.eigenvalue += k * k;
    }
    if (domain.dim() == 1) e.index[1] = 1;
    return e;
}

std::vector<Mode> mode_table(const ModelDomain& domain, int K) {
    if (K < 1 || K > domain.grid_n) throw InvalidArgument("mode count K must lie in [1, grid_n]");
    std::vector<Mode> modes;
    if (domain.dim() == 1) {
        modes.reserve(K);
        for (int k = 1; k <= K; ++k) modes.push_back({{k, 1}, eigenpair(domain, {k, 1}).eigenvalue});
        return modes;
    }
    modes.reserve(static_cast<std::size_t>(K) * K);
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= K; ++l) modes.push_back({{k, l}, eigenpair(domain, {k, l}).eigenvalue});
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
        return a.index < b.index;
    });
    return modes;
}

GridField::GridField(ModelDomain d, Vector v) : domain(d), values(std::move(v)) {
    if (values.size() != domain.size()) throw InvalidArgument("grid field length does not match the domain grid");
}

int SpectralField::modes_per_axis() const {
    const auto count = static_cast<double>(coeffs.size());
    return domain.dim() == 1 ? static_cast<int>(coeffs.size()) : static_cast<int>(std::lround(std::sqrt(count)));
}

GridField sample(const ModelDomain& domain, const std::function<double(const Point&)>& f) {
    GridField g(domain);
    for (Eigen::Index j = 0; j < domain.size(); ++j) g.values(j) = f(domain.node(j));
    return g;
}

// With a_k = h^d sum_j f_j phi_k(x_j) the sampled eigenfunctions are exactly
// orthonormal, so synthesize(analyze(f)) = f for K = grid_n.
SpectralField analyze(const GridField& f, int K) {
    const ModelDomain& d = f.domain;
    if (K < 0) K = d.grid_n;
    auto modes = std::make_shared<const std::vector<Mode>>(mode_table(d, K));
    const int n = d.grid_n;
    Vector y(d.size());
    double scale = 1.0;
    for (int a = 0; a < d.dim(); ++a) scale *= d.spacing(a) * std::sqrt(2.0 / d.lengths[a]) * 0.5;
    detail::dst1(f.values.data(), y.data(), n, d.dim() == 1 ? 1 : n);

    SpectralField out{d, modes, Vector(static_cast<Eigen::Index>(modes->size()))};
    for (std::size_t m = 0; m < modes->size(); ++m) {
        const auto& idx = (*modes)[m].index;
        const Eigen::Index flat = (idx[0] - 1) + (d.dim() == 2 ? static_cast<Eigen::Index>(idx[1] - 1) * n : 0);
        out.coeffs(static_cast<Eigen::Index>(m)) = scale * y(flat);
    }
    return out;
}

GridField synthesize(const SpectralField& a) {
    const ModelDomain& d = a.domain;
    const int n = d.grid_n;
    Vector padded = Vector::Zero(d.size());
    for (std::size_t m = 0; m < a.modes->size(); ++m) {
        const auto& idx = (*a.modes)[m].index;
        const Eigen::Index flat = (idx[0] - 1) + (d.dim() == 2 ? static_cast<Eigen::Index>(idx[1] - 1) * n : 0);
        padded(flat) = a.coeffs(static_cast<Eigen::Index>(m));
    }
    double scale = 1.0;
    for (int ax = 0; ax < d.dim(); ++ax) scale *= std::sqrt(2.0 / d.lengths[ax]) * 0.5;
    GridField out(d);
    detail::dst1(padded.data(), out.values.data(), n, d.dim() == 1 ? 1 : n);
    out.values *= scale;
    return out;
}

double evaluate(const SpectralField& a, const Point& x) {
    double v = 0.0;
    for (std::size_t m = 0; m < a.modes->size(); ++m)
        v += a.coeffs(static_cast<Eigen::Index>(m)) * eigenpair(a.domain, (*a.modes)[m].index)(x);
    return v;
}

double inner(const GridField& f, const GridField& g) {
    if (!(f.domain == g.domain)) throw InvalidArgument("fields live on different grids");
    return f.domain.cell_volume() * f.values.dot(g.values);
}

} // namespace fle
