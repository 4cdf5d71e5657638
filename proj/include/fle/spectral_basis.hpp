#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace fle {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;

enum class DomainKind { Interval, Rectangle };

/// Interval (a, a+L) or rectangle (a1, a1+L1) x (a2, a2+L2) carrying a uniform
/// interior grid x_j = a + j L/(n+1), j = 1..n per axis.  Boundary values are
/// implicitly zero.
struct ModelDomain {
    DomainKind kind = DomainKind::Interval;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<double, 2> origin{0.0, 0.0};
    int grid_n = 64;

    static ModelDomain interval(double length, int grid_n, double origin = 0.0);
    static ModelDomain rectangle(double length_x, double length_y, int grid_n);

    int dim() const { return kind == DomainKind::Interval ? 1 : 2; }
    Eigen::Index size() const;
    double spacing(int axis = 0) const { return lengths[axis] / (grid_n + 1); }
    double cell_volume() const;
    double diameter() const;
    Point node(Eigen::Index flat) const;
    Point center() const;
    bool is_interior(const Point& x) const;
    double boundary_distance(const Point& x) const;
};

bool operator==(const ModelDomain& a, const ModelDomain& b);

struct Mode {
    std::array<int, 2> index{1, 1};
    double eigenvalue = 0.0;
};

/// Dirichlet eigenpair: lambda = sum (k pi / L)^2, phi = prod sqrt(2/L) sin(k pi (x-a)/L).
struct Eigenpair {
    ModelDomain domain;
    std::array<int, 2> index{1, 1};
    double eigenvalue = 0.0;

    double operator()(const Point& x) const;
};

Eigenpair eigenpair(const ModelDomain& domain, std::array<int, 2> index);

/// The first K modes per axis, ascending in eigenvalue, ties broken
/// lexicographically on the multi-index.
std::vector<Mode> mode_table(const ModelDomain& domain, int K);

struct GridField {
    ModelDomain domain;
    Vector values;

    GridField() = default;
    GridField(ModelDomain d, Vector v);
    explicit GridField(const ModelDomain& d) : GridField(d, Vector::Zero(d.size())) {}
};

struct SpectralField {
    ModelDomain domain;
    std::shared_ptr<const std::vector<Mode>> modes;
    Vector coeffs;

    int modes_per_axis() const;
};

GridField sample(const ModelDomain& domain, const std::function<double(const Point&)>& f);

/// Discrete sine transform onto the eigenbasis.  K defaults to grid_n.
SpectralField analyze(const GridField& f, int K = -1);
GridField synthesize(const SpectralField& a);

/// Evaluates the sine series at an arbitrary point of the closed domain.
double evaluate(const SpectralField& a, const Point& x);

/// Discrete L^2 inner product h^d sum f_j g_j.
double inner(const GridField& f, const GridField& g);

} // namespace fle
