// Curvature continuation of a k-surface patch.
//
// Each stage solves the linear elliptic problem
//     Tr(A^{-1} Hess f) + Tr(A - A^{-1}) f = rhs
// for the normal speed f, then advances A, g, the immersion Phi and the
// normal N by
//     dA/dt = f Id - Hess f - f A^2,      dg/dt = f (gA + (gA)^T),
//     dPhi/dt = f N,                      dN/dt = f Phi - grad f.
// Differentiating det A along the first equation gives
//     d/dt det A = -det A * rhs,
// so rhs = -1 grows the curvature as k0 e^t and rhs = -1/det A as k0 + t.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "kfol/equiflow.hpp"
#include "kfol/surfcalc.hpp"

namespace kfol {

class SolverAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolvabilityError : public SolverAbort {
public:
    using SolverAbort::SolverAbort;
};

enum class ForcingMode {
    PaperLiteral,   // rhs = -1, det A(t) = k0 e^t
    DetNormalized,  // rhs = -1/det A, det A(t) = k0 + t
};

/// Which determinant law the per-step assertion checks.
enum class DetLaw { FromMode, KPlusT, KExpT, Off };

struct SolverConfig {
    double dt = 1e-2;
    double tol_solve = 1e-9;
    double tol_det = 1e-4;
    int max_steps = 100000;
    DetLaw det_law = DetLaw::FromMode;
};

double det_law_value(DetLaw law, ForcingMode mode, double k0, double t);
/// Continuation time needed to move det A from k0 to k_target.
double time_to_reach(ForcingMode mode, double k0, double k_target);

/// Tr(A - A^{-1}); rejects det A outside (0, 1) or non-positive A.
double trace_coefficient(const Mat2& A);
/// (k - 1)(lambda^2 + k) / (lambda k) with lambda the smaller eigenvalue.
double trace_coefficient_closed_form(const Mat2& A);

struct EllipticOperator {
    Grid grid;
    Eigen::SparseMatrix<double> matrix;  // identity rows on Dirichlet nodes
    std::vector<bool> dirichlet;
    ScalarField zeroth;  // Tr(A - A^{-1}) per node
};

/// Dirichlet in direction 0 at both open edges, periodic in direction 1.
EllipticOperator assemble_operator(const MetricField& g, const ShapeField& A);
EllipticOperator assemble_operator(const MetricField& g, const std::vector<Christoffel>& gamma,
                                   const ShapeField& A);

/// Interior rows -1 or -1/det A; Dirichlet rows carry the boundary values.
ScalarField forcing_rhs(const EllipticOperator& op, const ShapeField& A, ForcingMode mode,
                        const ScalarField& boundary_values);

/// Boundary values of the homogeneous solution, rhs / Tr(A - A^{-1}) per node.
ScalarField homogeneous_boundary_values(const ShapeField& A, ForcingMode mode);

ScalarField solve_f(const EllipticOperator& op, const ScalarField& rhs, double tol_solve);

struct ContinuationState {
    BasePlaneChart chart;
    double t = 0.0;
    std::vector<MinkVector> points;
    std::vector<MinkVector> normals;
    MetricField g;
    ShapeField A;
    ScalarField f;
    double k0 = 0.0;
    ForcingMode mode = ForcingMode::DetNormalized;

    /// Closed-form leaf at distance arctanh(sqrt k0) from the base plane.
    static ContinuationState fuchsian(const BasePlaneChart& chart, double k0, ForcingMode mode);
    /// Geometry computed from a Fermi graph. When rescale_to is set, A is
    /// rescaled per node to det A = *rescale_to.
    static ContinuationState from_graph(const FermiGraph& graph, ForcingMode mode,
                                        std::optional<double> rescale_to = std::nullopt);

    /// Immersion with tangents recomputed from the current points.
    ImmersionField immersion() const;
};

struct ConsistencyReport {
    double a_gap = 0.0;           // |A - shape_operator(points)| on diagnostic nodes
    double g_gap = 0.0;           // |g - induced_metric(points)| on diagnostic nodes
    double det_min = 0.0;
    double det_max = 0.0;
    double det_dispersion = 0.0;  // det_max - det_min
    double det_law_gap = 0.0;     // max |det A - law(t)|
    double f_min = 0.0;
    double f_max = 0.0;
};

/// Diagnostic nodes: two or more nodes away from the Dirichlet rings.
ConsistencyReport consistency_report(const ContinuationState& s, DetLaw law = DetLaw::FromMode);

/// One fourth-order step with an elliptic solve per stage. Throws SolverAbort
/// if det A leaves (0, 1), the solve fails, or the tracked determinant
/// tolerance is exceeded.
ContinuationState step(const ContinuationState& s, double dt, const SolverConfig& cfg);

struct Checkpoint {
    double k;
    ContinuationState state;
};

/// Steps until det A reaches k_target, stopping exactly at each requested
/// checkpoint curvature along the way.
struct ContinuationResult {
    ContinuationState state;
    std::vector<Checkpoint> checkpoints;
    int steps = 0;
    double max_dispersion = 0.0;
};

ContinuationResult continue_to(const ContinuationState& s, double k_target, const SolverConfig& cfg,
                               const std::vector<double>& checkpoints = {});

}  // namespace kfol
