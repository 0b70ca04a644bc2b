#include "kfol/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfol {

namespace {

double cosh2_antiderivative(double u) { return 0.5 * u + 0.25 * std::sinh(2.0 * u); }

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

// Trapezoid weight in rho times the rectangle weight in theta, without the
// sinh(rho) factor.
double chart_weight(const BasePlaneChart& c, int i) {
    const double w = (i == 0 || i == c.n_rho - 1) ? 0.5 : 1.0;
    return w * c.h_rho() * c.h_theta();
}

void require_same_chart(const BasePlaneChart& a, const BasePlaneChart& b) {
    if (a.n_rho != b.n_rho || a.n_theta != b.n_theta || a.rho_min != b.rho_min || a.rho_max != b.rho_max)
        throw std::invalid_argument("graphs live on different charts");
}

double ball_gap(const std::vector<MinkVector>& points) {
    double gap = 0.0;
    for (const MinkVector& p : points) {
        const auto y = to_ball(p);
        gap = std::max(gap, 1.0 - std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]));
    }
    return gap;
}

// det A at the centre of a 5x5 parametric patch.
double patch_det(double h, const std::function<MinkVector(double, double)>& point,
                 const std::function<MinkVector(double, double)>& normal, double x0, double x1) {
    const Grid grid{5, 5, h, h, false};
    std::vector<MinkVector> pts(25), orient(25);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double a = x0 + (i - 2) * h, b = x1 + (j - 2) * h;
            pts[grid.index(i, j)] = point(a, b);
            orient[grid.index(i, j)] = normal(a, b);
        }
    const ImmersionField imm = immersion_from_points(grid, std::move(pts), orient);
    const MetricField g = induced_metric(imm);
    const ShapeField A = shape_operator(imm, g);
    return A.A[grid.index(2, 2)].determinant();
}

std::vector<double> samples(double lo, double hi, int n) {
    std::vector<double> out;
    if (n == 1) return {0.5 * (lo + hi)};
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

}  // namespace

double fuchsian_exact_distance(double k) {
    if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("fuchsian_exact_distance: k must lie in (0, 1)");
    return std::atanh(std::sqrt(k));
}

FermiGraph fuchsian_leaf(const BasePlaneChart& chart, double k) {
    return FermiGraph(chart, ScalarField(chart.size(), fuchsian_exact_distance(k)));
}

Core plane_core() { return GeodesicPlane(kE3); }

DistanceRange leaf_core_distance(const std::vector<MinkVector>& points, const Grid& grid, const Core& core) {
    DistanceRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            if (!grid.interior(i, j, kDiagnosticCollar)) continue;
            const MinkVector& p = points[grid.index(i, j)];
            const double d = std::visit(
                [&](const auto& c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, GeodesicPlane>) return dist_to_plane(p, c);
                    else return dist_to_wedge(p, c);
                },
                core);
            r.min = std::min(r.min, d);
            r.max = std::max(r.max, d);
        }
    return r;
}

double volume_between(const FermiGraph& leaf, const FermiGraph& reference) {
    require_same_chart(leaf.chart, reference.chart);
    const BasePlaneChart& c = leaf.chart;
    double vol = 0.0;
    for (int i = 0; i < c.n_rho; ++i) {
        const double w = chart_weight(c, i) * std::sinh(c.rho(i));
        for (int j = 0; j < c.n_theta; ++j) {
            const int k = i * c.n_theta + j;
            const double top = leaf.u[k], bottom = reference.u[k];
            if (bottom > top + 1e-12)
                throw GeometryError("volume_between: reference lies above the leaf at node " + std::to_string(k));
            vol += w * (cosh2_antiderivative(top) - cosh2_antiderivative(bottom));
        }
    }
    return vol;
}

double volume_to_core(const FermiGraph& leaf) {
    return volume_between(leaf, FermiGraph(leaf.chart, ScalarField(leaf.chart.size(), 0.0)));
}

FermiGraph resample_to_graph(const BasePlaneChart& chart, const std::vector<MinkVector>& points) {
    const int nr = chart.n_rho, nt = chart.n_theta;
    if (static_cast<int>(points.size()) != chart.size())
        throw std::invalid_argument("resample_to_graph: point count does not match the chart");
    // Per label: foot displacement and height.
    std::vector<double> drho(points.size()), dtheta(points.size()), u(points.size());
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const int k = i * nt + j;
            const FermiCoords fc = fermi_coords(points[k]);
            drho[k] = fc.rho - chart.rho(i);
            dtheta[k] = wrap_angle(fc.theta - chart.theta(j));
            u[k] = fc.u;
        }
    auto interp = [&](const std::vector<double>& f, double a, double b) {
        const int i0 = std::clamp(static_cast<int>(std::floor(a)), 0, nr - 2);
        const double fa = a - i0;
        const double bf = std::floor(b);
        const double fb = b - bf;
        const int j0 = ((static_cast<int>(bf) % nt) + nt) % nt;
        const int j1 = (j0 + 1) % nt;
        auto at = [&](int i, int j) { return f[i * nt + j]; };
        return (1 - fa) * ((1 - fb) * at(i0, j0) + fb * at(i0, j1)) +
               fa * ((1 - fb) * at(i0 + 1, j0) + fb * at(i0 + 1, j1));
    };
    ScalarField out(points.size());
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const double rho_t = chart.rho(i), theta_t = chart.theta(j);
            double a = i, b = j;
            bool converged = false;
            for (int it = 0; it < 100; ++it) {
                const double a_new = std::clamp((rho_t - interp(drho, a, b) - chart.rho_min) / chart.h_rho(), 0.0,
                                                static_cast<double>(nr - 1));
                const double b_new = (theta_t - interp(dtheta, a, b)) / chart.h_theta();
                const double step = std::max(std::abs(a_new - a), std::abs(b_new - b));
                a = a_new;
                b = b_new;
                if (step < 1e-13) {
                    converged = true;
                    break;
                }
            }
            if (!converged) throw GeometryError("resample_to_graph: label inversion did not converge");
            out[i * nt + j] = interp(u, a, b);
        }
    return FermiGraph(chart, std::move(out));
}

NestingResult nesting_check(const FermiGraph& inner, const FermiGraph& outer) {
    require_same_chart(inner.chart, outer.chart);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inner.u.size(); ++k) margin = std::min(margin, outer.u[k] - inner.u[k]);
    return {margin > 0.0, margin};
}

LeafRecord leaf_record(const FermiGraph& leaf, double k, double t, const Core& core) {
    const ImmersionField imm = immerse(leaf);
    const MetricField g = induced_metric(imm);
    const ShapeField A = shape_operator(imm, g);
    LeafRecord r;
    r.k = k;
    r.t = t;
    r.det_min = std::numeric_limits<double>::infinity();
    r.det_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < imm.grid.n0; ++i)
        for (int j = 0; j < imm.grid.n1; ++j) {
            if (!imm.grid.interior(i, j, kDiagnosticCollar)) continue;
            const double det = A.A[imm.grid.index(i, j)].determinant();
            r.det_min = std::min(r.det_min, det);
            r.det_max = std::max(r.det_max, det);
        }
    const DistanceRange d = leaf_core_distance(imm.points, imm.grid, core);
    r.dist_min = d.min;
    r.dist_max = d.max;
    r.area = area(imm, g);
    r.volume_to_core = std::holds_alternative<GeodesicPlane>(core) ? volume_to_core(leaf) : std::nan("");
    r.ball_gap = ball_gap(imm.points);
    return r;
}

LeafRecord leaf_record(const ContinuationState& s, double k, const Core& core) {
    const ImmersionField imm = s.immersion();
    const ConsistencyReport rep = consistency_report(s, DetLaw::Off);
    LeafRecord r;
    r.k = k;
    r.t = s.t;
    r.det_min = rep.det_min;
    r.det_max = rep.det_max;
    const DistanceRange d = leaf_core_distance(s.points, imm.grid, core);
    r.dist_min = d.min;
    r.dist_max = d.max;
    r.area = area(imm, induced_metric(imm));
    r.volume_to_core = std::holds_alternative<GeodesicPlane>(core)
                           ? volume_to_core(resample_to_graph(s.chart, s.points))
                           : std::nan("");
    r.ball_gap = ball_gap(s.points);
    return r;
}

WedgeCheck wedge_equidistant_curvature_check(const WedgeCore& w, double d, const WedgeSampling& sampling,
                                             double tol) {
    if (!(d > 0.0)) throw std::invalid_argument("wedge_equidistant_curvature_check: d must be positive");
    const double h = sampling.spacing;
    const double band = std::tanh(d) * std::tanh(d);
    const double ch = std::cosh(d), sh = std::sinh(d);
    WedgeCheck out{std::numeric_limits<double>::infinity(), 0.0, 0.0, 0, false};
    auto record = [&](double det, double expected, double& err) {
        out.min_det = std::min(out.min_det, det);
        err = std::max(err, std::abs(det - expected));
        ++out.samples;
    };
    const std::vector<double> ss = samples(-0.5, 0.5, sampling.n_s);

    // Planar bands: distance-d equidistants of the two faces.
    struct Face {
        const MinkVector& v;
        const MinkVector& dir;
    };
    for (const Face face : {Face{w.planeA.normal, w.faceA_dir}, Face{w.planeB.normal, w.faceB_dir}}) {
        auto q = [&](double s, double r) { return std::cosh(r) * w.ridge.at(s) + std::sinh(r) * face.dir; };
        auto point = [&](double s, double r) { return ch * q(s, r) + sh * face.v; };
        auto normal = [&](double s, double r) { return sh * q(s, r) + ch * face.v; };
        for (double s : ss)
            for (double r : samples(0.1, 1.0, sampling.n_r)) record(patch_det(h, point, normal, s, r), band, out.band_error);
    }

    // Ridge tube between the two face normals.
    const double half = 0.5 * w.bend_angle;
    if (half > 4.0 * h) {
        auto point = [&](double s, double phi) { return ch * w.ridge.at(s) + sh * wedge_sector_direction(w, phi); };
        auto normal = [&](double s, double phi) { return sh * w.ridge.at(s) + ch * wedge_sector_direction(w, phi); };
        for (double s : ss)
            for (double phi : samples(-0.8 * half, 0.8 * half, sampling.n_phi))
                record(patch_det(h, point, normal, s, phi), 1.0, out.tube_error);
    }
    out.pass = out.min_det >= band - tol;
    return out;
}

FoliationTable convergence_sweep(const std::vector<double>& ks, const Core& core, const BasePlaneChart& chart,
                                 SweepPath path, ForcingMode mode, const SolverConfig& cfg) {
    if (ks.empty()) throw std::invalid_argument("convergence_sweep: empty k list");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(ks[i] > 0.0 && ks[i] < 1.0)) throw std::invalid_argument("convergence_sweep: k must lie in (0, 1)");
        if (i > 0 && !(ks[i] > ks[i - 1])) throw std::invalid_argument("convergence_sweep: k list must increase");
    }
    if (!std::holds_alternative<GeodesicPlane>(core))
        throw std::invalid_argument("convergence_sweep: leaves are graphs over the plane core only");

    FoliationTable table{core, {}};
    if (path == SweepPath::Exact) {
        for (double k : ks) table.rows.push_back(leaf_record(fuchsian_leaf(chart, k), k, 0.0, core));
        return table;
    }

    const ContinuationState start = ContinuationState::fuchsian(chart, ks.front(), mode);
    table.rows.push_back(leaf_record(start, ks.front(), core));
    if (ks.size() == 1) return table;
    // One run; on abort the remaining rows are marked failed.
    ContinuationState s = start;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        try {
            s = continue_to(s, ks[i], cfg).state;
            table.rows.push_back(leaf_record(s, ks[i], core));
        } catch (const SolverAbort& e) {
            for (std::size_t m = i; m < ks.size(); ++m) {
                LeafRecord r;
                r.k = ks[m];
                r.failed = true;
                r.error = e.what();
                table.rows.push_back(r);
            }
            break;
        }
    }
    return table;
}

}  // namespace kfol
