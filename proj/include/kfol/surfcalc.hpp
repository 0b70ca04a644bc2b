// Finite-difference surface calculus on structured 2D grids.
//
// Direction 0 is never periodic (the radial direction of the polar chart);
// direction 1 is periodic for the polar chart and open for local parametric
// patches. Interior stencils are second-order central differences, open edges
// use second-order one-sided stencils.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kfol/hypgeo.hpp"

namespace kfol {

class SingularImmersion : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class DegenerateMetric : public GeometryError {
public:
    using GeometryError::GeometryError;
};

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using ScalarField = std::vector<double>;

struct Grid {
    int n0 = 0;
    int n1 = 0;
    double h0 = 0.0;
    double h1 = 0.0;
    bool periodic1 = true;

    int size() const { return n0 * n1; }
    int index(int i, int j) const { return i * n1 + j; }
    /// Nodes at least `collar` away from an open edge.
    bool interior(int i, int j, int collar) const;
};

/// Nodes two or more steps away from every open edge. Diagnostics built from
/// differences of differenced fields are reported on this set.
inline constexpr int kDiagnosticCollar = 2;

enum class Deriv { D0, D1, D00, D11, D01 };

/// Weighted node list of one finite-difference stencil.
struct Taps {
    std::array<int, 12> idx{};
    std::array<double, 12> w{};
    int count = 0;

    void add(int i, double weight);
};

Taps stencil(const Grid& grid, int i, int j, Deriv d);

/// Derivative stencils have weights summing to zero, so the sum is taken over
/// differences from the first tap; constants then differentiate to exactly 0.
template <class T>
T apply_stencil(const Taps& taps, const std::vector<T>& field) {
    const T& ref = field[taps.idx[0]];
    T acc = taps.w[1] * (field[taps.idx[1]] - ref);
    for (int k = 2; k < taps.count; ++k) acc = acc + taps.w[k] * (field[taps.idx[k]] - ref);
    return acc;
}

template <class T>
T derivative(const Grid& grid, const std::vector<T>& field, int i, int j, Deriv d) {
    return apply_stencil(stencil(grid, i, j, d), field);
}

/// Polar chart b(rho, theta) on the base plane {x3 = 0}.
struct BasePlaneChart {
    double rho_min = 0.1;
    double rho_max = 1.0;
    int n_rho = 64;
    int n_theta = 64;

    BasePlaneChart() = default;
    BasePlaneChart(double rho_min, double rho_max, int n_rho, int n_theta);

    Grid grid() const;
    double h_rho() const { return (rho_max - rho_min) / (n_rho - 1); }
    double h_theta() const { return 2.0 * M_PI / n_theta; }
    double rho(int i) const { return rho_min + i * h_rho(); }
    double theta(int j) const { return j * h_theta(); }
    int size() const { return n_rho * n_theta; }
    /// Largest grid spacing.
    double h_max() const { return std::max(h_rho(), h_theta()); }
};

MinkVector base_point(double rho, double theta);
MinkVector fermi_point(double rho, double theta, double u);

/// Signed distance u from the base plane plus polar coordinates of the foot.
struct FermiCoords {
    double rho;
    double theta;
    double u;
};
FermiCoords fermi_coords(const MinkVector& p);

struct FermiGraph {
    BasePlaneChart chart;
    ScalarField u;

    FermiGraph(const BasePlaneChart& chart, ScalarField u);
    static FermiGraph from_function(const BasePlaneChart& chart,
                                    const std::function<double(double, double)>& u);
};

struct ImmersionField {
    Grid grid;
    std::vector<MinkVector> points;
    std::vector<MinkVector> normals;
    std::vector<MinkVector> d0;  // tangent along direction 0
    std::vector<MinkVector> d1;  // tangent along direction 1
};

struct MetricField {
    Grid grid;
    std::vector<Mat2> g;
};

struct ShapeField {
    Grid grid;
    std::vector<Mat2> A;
};

/// Tangents by finite differences of the node points; the unit normal is the
/// Minkowski-orthogonal complement of point and tangents, oriented so that
/// <N, orient> > 0 at each node.
ImmersionField immersion_from_points(const Grid& grid, std::vector<MinkVector> points,
                                     const std::vector<MinkVector>& orient);

/// Immersion of a Fermi graph, normal on the positive-u side.
ImmersionField immerse(const FermiGraph& graph);

MetricField induced_metric(const ImmersionField& imm);

/// Weingarten operator A = g^{-1} h with h_ij = <d_i N, d_j Phi>, so that
/// A X = nabla_X N and equidistants of the base plane have A > 0.
ShapeField shape_operator(const ImmersionField& imm, const MetricField& g);

/// Second-derivative route h_ij = -<N, d_ij Phi>. Agrees with
/// shape_operator to second order; kept as an independent check.
ShapeField shape_operator_second_derivative(const ImmersionField& imm, const MetricField& g);

ScalarField gaussian_curvature(const ShapeField& A);

/// Gauss curvature of the metric by the Brioschi formula.
ScalarField intrinsic_curvature(const MetricField& g);

/// Christoffel symbols of g at every node: gamma[n][c](a, b) = Gamma^c_ab.
using Christoffel = std::array<Mat2, 2>;
std::vector<Christoffel> christoffel_symbols(const MetricField& g);

/// Covariant Hessian of f, one index raised by g.
std::vector<Mat2> hessian_endomorphism(const MetricField& g, const ScalarField& f);
std::vector<Mat2> hessian_endomorphism(const MetricField& g, const std::vector<Christoffel>& gamma,
                                       const ScalarField& f);

/// Components g^{ij} d_j f in chart coordinates.
std::vector<Vec2> surface_gradient(const MetricField& g, const ScalarField& f);

/// Laplace-Beltrami operator in divergence form (1/sqrt g) d_a(sqrt g g^{ab} d_b f).
ScalarField laplace_beltrami_divergence(const MetricField& g, const ScalarField& f);

/// Trapezoidal in direction 0, periodic rectangle rule in direction 1.
double area(const ImmersionField& imm, const MetricField& g);

double max_abs_asymmetry(const MetricField& g, const ShapeField& A);

}  // namespace kfol
