#include "kfol/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SparseLU>

namespace kfol {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

}  // namespace

double det_law_value(DetLaw law, ForcingMode mode, double k0, double t) {
    if (law == DetLaw::FromMode) law = mode == ForcingMode::DetNormalized ? DetLaw::KPlusT : DetLaw::KExpT;
    switch (law) {
        case DetLaw::KPlusT: return k0 + t;
        case DetLaw::KExpT: return k0 * std::exp(t);
        default: return std::nan("");
    }
}

double time_to_reach(ForcingMode mode, double k0, double k_target) {
    return mode == ForcingMode::DetNormalized ? k_target - k0 : std::log(k_target / k0);
}

double trace_coefficient(const Mat2& A) {
    const double det = A.determinant();
    const double tr = A.trace();
    if (!(det > 0.0 && det < 1.0)) throw SolvabilityError("trace_coefficient: det A = " + fmt_double(det) + " outside (0, 1)");
    if (!(tr > 0.0)) throw SolvabilityError("trace_coefficient: A is not positive");
    // Tr(A^{-1}) = Tr(A) / det(A) for 2x2 matrices.
    return tr - tr / det;
}

double trace_coefficient_closed_form(const Mat2& A) {
    const double k = A.determinant();
    const double tr = A.trace();
    const double disc = std::max(tr * tr - 4.0 * k, 0.0);
    const double lambda = 0.5 * (tr - std::sqrt(disc));
    return (k - 1.0) * (lambda * lambda + k) / (lambda * k);
}

EllipticOperator assemble_operator(const MetricField& g, const ShapeField& A) {
    return assemble_operator(g, christoffel_symbols(g), A);
}

EllipticOperator assemble_operator(const MetricField& g, const std::vector<Christoffel>& gamma,
                                   const ShapeField& A) {
    const Grid& grid = g.grid;
    const int n = grid.size();
    EllipticOperator op{grid, Eigen::SparseMatrix<double>(n, n), std::vector<bool>(n, false), ScalarField(n)};
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 10);
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int row = grid.index(i, j);
            const double c = trace_coefficient(A.A[row]);
            if (!(c < 0.0))
                throw SolvabilityError("assemble_operator: zeroth-order coefficient is not negative at node " +
                                       std::to_string(row));
            op.zeroth[row] = c;
            if (i == 0 || i == grid.n0 - 1) {
                op.dirichlet[row] = true;
                triplets.emplace_back(row, row, 1.0);
                continue;
            }
            // Tr(A^{-1} g^{-1} Hess f) = sum_ab W_ab (d_ab f - Gamma^c_ab d_c f), W = (gA)^{-1}
            const Mat2 W = (g.g[row] * A.A[row]).inverse();
            const double b0 = (W.cwiseProduct(gamma[row][0])).sum();
            const double b1 = (W.cwiseProduct(gamma[row][1])).sum();
            auto push = [&](Deriv d, double coef) {
                const Taps t = stencil(grid, i, j, d);
                for (int k = 0; k < t.count; ++k) triplets.emplace_back(row, t.idx[k], coef * t.w[k]);
            };
            push(Deriv::D00, W(0, 0));
            push(Deriv::D11, W(1, 1));
            push(Deriv::D01, W(0, 1) + W(1, 0));
            push(Deriv::D0, -b0);
            push(Deriv::D1, -b1);
            triplets.emplace_back(row, row, c);
        }
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    return op;
}

ScalarField homogeneous_boundary_values(const ShapeField& A, ForcingMode mode) {
    ScalarField out(A.A.size());
    for (std::size_t k = 0; k < A.A.size(); ++k) {
        const double det = A.A[k].determinant();
        const double rhs = mode == ForcingMode::DetNormalized ? -1.0 / det : -1.0;
        out[k] = rhs / trace_coefficient(A.A[k]);
    }
    return out;
}

ScalarField forcing_rhs(const EllipticOperator& op, const ShapeField& A, ForcingMode mode,
                        const ScalarField& boundary_values) {
    ScalarField rhs(op.dirichlet.size());
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (op.dirichlet[k])
            rhs[k] = boundary_values[k];
        else
            rhs[k] = mode == ForcingMode::DetNormalized ? -1.0 / A.A[k].determinant() : -1.0;
    }
    return rhs;
}

ScalarField solve_f(const EllipticOperator& op, const ScalarField& rhs, double tol_solve) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(op.matrix);
    if (lu.info() != Eigen::Success) throw SolverAbort("solve_f: factorization failed: " + lu.lastErrorMessage());
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw SolverAbort("solve_f: back substitution failed");
    const double residual = (op.matrix * x - b).cwiseAbs().maxCoeff();
    if (!(residual <= tol_solve))
        throw SolverAbort("solve_f: residual " + fmt_double(residual) + " exceeds " + fmt_double(tol_solve));
    return ScalarField(x.data(), x.data() + x.size());
}

ContinuationState ContinuationState::fuchsian(const BasePlaneChart& chart, double k0, ForcingMode mode) {
    if (!(k0 > 0.0 && k0 < 1.0)) throw std::invalid_argument("fuchsian: k0 must lie in (0, 1)");
    const double d = std::atanh(std::sqrt(k0));
    const int n = chart.size();
    ContinuationState s;
    s.chart = chart;
    s.k0 = k0;
    s.mode = mode;
    s.points.resize(n);
    s.normals.resize(n);
    s.g = MetricField{chart.grid(), std::vector<Mat2>(n)};
    s.A = ShapeField{chart.grid(), std::vector<Mat2>(n, std::sqrt(k0) * Mat2::Identity())};
    s.f.assign(n, 0.0);
    const double c2 = std::cosh(d) * std::cosh(d);
    for (int i = 0; i < chart.n_rho; ++i)
        for (int j = 0; j < chart.n_theta; ++j) {
            const int k = i * chart.n_theta + j;
            const MinkVector b = base_point(chart.rho(i), chart.theta(j));
            const FlowResult fr = normal_flow(b, kE3, d);
            s.points[k] = fr.point;
            s.normals[k] = fr.normal;
            const double sh = std::sinh(chart.rho(i));
            s.g.g[k] = c2 * Eigen::Vector2d(1.0, sh * sh).asDiagonal();
        }
    return s;
}

ContinuationState ContinuationState::from_graph(const FermiGraph& graph, ForcingMode mode,
                                                std::optional<double> rescale_to) {
    const ImmersionField imm = immerse(graph);
    ContinuationState s;
    s.chart = graph.chart;
    s.mode = mode;
    s.points = imm.points;
    s.normals = imm.normals;
    s.g = induced_metric(imm);
    s.A = shape_operator(imm, s.g);
    s.f.assign(imm.points.size(), 0.0);
    if (rescale_to) {
        for (Mat2& a : s.A.A) {
            const double det = a.determinant();
            if (!(det > 0.0)) throw SolverAbort("from_graph: leaf is not convex");
            a *= std::sqrt(*rescale_to / det);
        }
        s.k0 = *rescale_to;
    } else {
        double sum = 0.0;
        for (const Mat2& a : s.A.A) sum += a.determinant();
        s.k0 = sum / static_cast<double>(s.A.A.size());
    }
    return s;
}

ImmersionField ContinuationState::immersion() const {
    return immersion_from_points(chart.grid(), points, normals);
}

ConsistencyReport consistency_report(const ContinuationState& s, DetLaw law) {
    const ImmersionField imm = s.immersion();
    const MetricField g = induced_metric(imm);
    const ShapeField A = shape_operator(imm, g);
    const Grid grid = s.chart.grid();
    ConsistencyReport r;
    r.det_min = 1e300;
    r.det_max = -1e300;
    const double law_value = det_law_value(law, s.mode, s.k0, s.t);
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            if (!grid.interior(i, j, kDiagnosticCollar)) continue;
            const int k = grid.index(i, j);
            r.a_gap = std::max(r.a_gap, (A.A[k] - s.A.A[k]).cwiseAbs().maxCoeff());
            r.g_gap = std::max(r.g_gap, (g.g[k] - s.g.g[k]).cwiseAbs().maxCoeff());
            const double det = s.A.A[k].determinant();
            r.det_min = std::min(r.det_min, det);
            r.det_max = std::max(r.det_max, det);
            if (law != DetLaw::Off) r.det_law_gap = std::max(r.det_law_gap, std::abs(det - law_value));
        }
    r.det_dispersion = r.det_max - r.det_min;
    const auto [fmin, fmax] = std::minmax_element(s.f.begin(), s.f.end());
    r.f_min = *fmin;
    r.f_max = *fmax;
    return r;
}

namespace {

struct Rates {
    std::vector<Mat2> dA;
    std::vector<Mat2> dg;
    std::vector<MinkVector> dP;
    std::vector<MinkVector> dN;
    ScalarField f;
};

Rates rates(const ContinuationState& y, const SolverConfig& cfg) {
    const Grid grid = y.chart.grid();
    const int n = grid.size();
    const std::vector<Christoffel> gamma = christoffel_symbols(y.g);
    const EllipticOperator op = assemble_operator(y.g, gamma, y.A);
    const ScalarField rhs = forcing_rhs(op, y.A, y.mode, homogeneous_boundary_values(y.A, y.mode));
    Rates r;
    r.f = solve_f(op, rhs, cfg.tol_solve);
    const std::vector<Mat2> hess = hessian_endomorphism(y.g, gamma, r.f);
    const std::vector<Vec2> grad = surface_gradient(y.g, r.f);
    r.dA.resize(n);
    r.dg.resize(n);
    r.dP.resize(n);
    r.dN.resize(n);
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const double f = r.f[k];
            // Dirichlet rings follow the homogeneous reference family, so the
            // one-sided Hessian of the boundary data never feeds back into A.
            const bool ring = i == 0 || i == grid.n0 - 1;
            r.dA[k] = normal_deformation_rhs(y.A.A[k], f, ring ? Mat2::Zero() : hess[k]);
            r.dg[k] = metric_deformation_rhs(y.g.g[k], y.A.A[k], f);
            const MinkVector t0 = derivative(grid, y.points, i, j, Deriv::D0);
            const MinkVector t1 = derivative(grid, y.points, i, j, Deriv::D1);
            r.dP[k] = f * y.normals[k];
            r.dN[k] = f * y.points[k] - (grad[k](0) * t0 + grad[k](1) * t1);
        }
    return r;
}

// y + sum_i w_i * rates_i, followed by projection back onto the constraints.
ContinuationState combine(const ContinuationState& y, double dt, std::initializer_list<std::pair<double, const Rates*>> terms) {
    ContinuationState out = y;
    for (const auto& [w, r] : terms) {
        const double s = w * dt;
        for (std::size_t k = 0; k < out.points.size(); ++k) {
            out.A.A[k] += s * r->dA[k];
            out.g.g[k] += s * r->dg[k];
            out.points[k] += s * r->dP[k];
            out.normals[k] += s * r->dN[k];
        }
    }
    for (std::size_t k = 0; k < out.points.size(); ++k) {
        out.points[k] = project_to_hyperboloid(out.points[k]);
        out.normals[k] = project_to_unit_normal(out.normals[k], out.points[k]);
    }
    out.t = y.t + dt;
    return out;
}

void check_state(const ContinuationState& s, const SolverConfig& cfg) {
    for (std::size_t k = 0; k < s.A.A.size(); ++k) {
        const double det = s.A.A[k].determinant();
        if (!(det > 0.0 && det < 1.0))
            throw SolverAbort("step: det A = " + fmt_double(det) + " left (0, 1) at node " + std::to_string(k) +
                              ", t = " + fmt_double(s.t));
    }
    if (cfg.det_law == DetLaw::Off) return;
    const ConsistencyReport r = consistency_report(s, cfg.det_law);
    if (r.det_law_gap > cfg.tol_det)
        throw SolverAbort("step: determinant law violated at t = " + fmt_double(s.t) + ": max |det A - law| = " +
                          fmt_double(r.det_law_gap) + " > " + fmt_double(cfg.tol_det));
    if (r.det_dispersion > cfg.tol_det)
        throw SolverAbort("step: det-A dispersion " + fmt_double(r.det_dispersion) + " > " +
                          fmt_double(cfg.tol_det) + " at t = " + fmt_double(s.t));
}

}  // namespace

ContinuationState step(const ContinuationState& s, double dt, const SolverConfig& cfg) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const Rates k1 = rates(s, cfg);
    const ContinuationState y2 = combine(s, 0.5 * dt, {{1.0, &k1}});
    const Rates k2 = rates(y2, cfg);
    const ContinuationState y3 = combine(s, 0.5 * dt, {{1.0, &k2}});
    const Rates k3 = rates(y3, cfg);
    const ContinuationState y4 = combine(s, dt, {{1.0, &k3}});
    const Rates k4 = rates(y4, cfg);
    ContinuationState out = combine(s, dt, {{1.0 / 6, &k1}, {2.0 / 6, &k2}, {2.0 / 6, &k3}, {1.0 / 6, &k4}});
    out.f = k1.f;
    check_state(out, cfg);
    return out;
}

ContinuationResult continue_to(const ContinuationState& s, double k_target, const SolverConfig& cfg,
                               const std::vector<double>& checkpoints) {
    if (!(k_target > 0.0 && k_target < 1.0)) throw std::invalid_argument("continue_to: k_target must lie in (0, 1)");
    if (k_target < s.k0) throw std::invalid_argument("continue_to: k_target is below the starting curvature");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("continue_to: dt must be positive");
    const double t_end = time_to_reach(s.mode, s.k0, k_target);
    std::vector<std::pair<double, double>> stops;  // (t, k)
    for (double kc : checkpoints) {
        if (kc < s.k0 || kc > k_target) throw std::invalid_argument("continue_to: checkpoint outside the run");
        stops.emplace_back(time_to_reach(s.mode, s.k0, kc), kc);
    }
    std::sort(stops.begin(), stops.end());
    stops.emplace_back(t_end, k_target);

    ContinuationResult res{s, {}, 0, 0.0};
    const double eps = 1e-12;
    for (std::size_t n = 0; n < stops.size(); ++n) {
        const auto [t_stop, k_stop] = stops[n];
        while (res.state.t < t_stop - eps) {
            if (res.steps >= cfg.max_steps) throw SolverAbort("continue_to: max_steps exceeded");
            const double h = std::min(cfg.dt, t_stop - res.state.t);
            res.state = step(res.state, h, cfg);
            ++res.steps;
            const ConsistencyReport r = consistency_report(res.state, DetLaw::Off);
            res.max_dispersion = std::max(res.max_dispersion, r.det_dispersion);
        }
        res.state.t = std::max(res.state.t, t_stop);
        if (n + 1 < stops.size()) res.checkpoints.push_back({k_stop, res.state});
    }
    if (res.steps > 0) {
        const ConsistencyReport r = consistency_report(res.state, DetLaw::Off);
        const double worst = std::max(std::abs(r.det_min - k_target), std::abs(r.det_max - k_target));
        if (worst > cfg.tol_det)
            throw SolverAbort("continue_to: final |det A - k_target| = " + fmt_double(worst) + " > " +
                              fmt_double(cfg.tol_det));
    }
    return res;
}

}  // namespace kfol
