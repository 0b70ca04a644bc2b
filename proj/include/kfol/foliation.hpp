// Leaf-level analytics: distances to the core, nesting, areas and volumes,
// the weak curvature bound on wedge equidistants, and curvature sweeps.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "kfol/continuation.hpp"
#include "kfol/hypgeo.hpp"
#include "kfol/surfcalc.hpp"

namespace kfol {

/// arctanh(sqrt k), the distance of the Fuchsian k-leaf from its core plane.
double fuchsian_exact_distance(double k);

/// Constant graph u = arctanh(sqrt k) over the chart.
FermiGraph fuchsian_leaf(const BasePlaneChart& chart, double k);

using Core = std::variant<GeodesicPlane, WedgeCore>;

/// The base plane {x3 = 0} with normal +x3.
Core plane_core();

struct DistanceRange {
    double min;
    double max;
};

/// Distance of the leaf to the core over the diagnostic nodes.
DistanceRange leaf_core_distance(const std::vector<MinkVector>& points, const Grid& grid, const Core& core);

/// Volume between two graphs over the chart, summed per node from the
/// antiderivative u/2 + sinh(2u)/4 of cosh^2 u. Throws GeometryError if the
/// reference lies above the leaf anywhere.
double volume_between(const FermiGraph& leaf, const FermiGraph& reference);
/// Volume between the leaf and the base plane.
double volume_to_core(const FermiGraph& leaf);

/// Fermi graph over the chart of a leaf given as node points. Node labels are
/// inverted by fixed-point iteration with bilinear interpolation; targets
/// outside the sampled footprint are clamped to the nearest label.
FermiGraph resample_to_graph(const BasePlaneChart& chart, const std::vector<MinkVector>& points);

struct NestingResult {
    bool nested;
    double margin;  // min over nodes of u_outer - u_inner
};

/// True iff inner lies strictly below outer at every node.
NestingResult nesting_check(const FermiGraph& inner, const FermiGraph& outer);

struct LeafRecord {
    double k = 0.0;
    double t = 0.0;
    double det_min = 0.0;
    double det_max = 0.0;
    double dist_min = 0.0;
    double dist_max = 0.0;
    double area = 0.0;
    double volume_to_core = 0.0;
    double ball_gap = 0.0;  // max over nodes of 1 - |ball image|
    bool failed = false;
    std::string error;
};

/// Record of a leaf given by its graph; det A and the area come from the
/// finite-difference geometry of the graph.
LeafRecord leaf_record(const FermiGraph& leaf, double k, double t, const Core& core);
/// Record of a continued state; det A is the evolved one.
LeafRecord leaf_record(const ContinuationState& s, double k, const Core& core);

struct WedgeSampling {
    double spacing = 1e-3;    // parameter step of the local patches
    int n_s = 3;              // samples along the ridge
    int n_r = 3;              // samples across each band
    int n_phi = 3;            // samples across the tube
};

struct WedgeCheck {
    double min_det;
    double band_error;  // max |det - tanh^2 d| on the bands
    double tube_error;  // max |det - 1| on the tube
    int samples;
    bool pass;
};

/// Samples the distance-d surface of the wedge piece by piece and computes
/// det A by finite differences on small local patches. Passes iff the
/// minimum is at least tanh^2 d - tol.
WedgeCheck wedge_equidistant_curvature_check(const WedgeCore& w, double d, const WedgeSampling& sampling = {},
                                             double tol = 1e-6);

enum class SweepPath { Exact, Continued };

struct FoliationTable {
    Core core;
    std::vector<LeafRecord> rows;
};

/// One row per k. The exact path builds the Fuchsian leaves directly; the
/// continued path marches a single run from the first k through the rest.
/// Only the plane core admits graphs over the chart.
FoliationTable convergence_sweep(const std::vector<double>& ks, const Core& core, const BasePlaneChart& chart,
                                 SweepPath path, ForcingMode mode = ForcingMode::DetNormalized,
                                 const SolverConfig& cfg = {});

}  // namespace kfol
