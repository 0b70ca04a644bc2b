#include "kfol/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "kfol/continuation.hpp"
#include "kfol/foliation.hpp"
#include "kfol/surfcalc.hpp"

namespace kfol {

namespace oracle {

std::vector<double> rk4_scalar_riccati(double lambda0, double t_max, double h) {
    const int n = static_cast<int>(std::llround(t_max / h));
    auto rhs = [](double x) { return 1.0 - x * x; };
    std::vector<double> out{lambda0};
    out.reserve(n + 1);
    double x = lambda0;
    for (int i = 0; i < n; ++i) {
        const double k1 = rhs(x);
        const double k2 = rhs(x + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h * k2);
        const double k4 = rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        out.push_back(x);
    }
    return out;
}

Mat2 rk4_matrix_riccati(const Mat2& A0, double t_max, double h) {
    const int n = static_cast<int>(std::llround(t_max / h));
    auto rhs = [](const Mat2& A) -> Mat2 { return Mat2::Identity() - A * A; };
    Mat2 A = A0;
    for (int i = 0; i < n; ++i) {
        const Mat2 k1 = rhs(A);
        const Mat2 k2 = rhs(A + 0.5 * h * k1);
        const Mat2 k3 = rhs(A + 0.5 * h * k2);
        const Mat2 k4 = rhs(A + h * k3);
        A += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return A;
}

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double evolved_det(double lambda1, double lambda2, double t) {
    return evolve_eigen(classify_branch(lambda1), t) * evolve_eigen(classify_branch(lambda2), t);
}

}  // namespace oracle

bool Criterion::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Check at_most(std::string name, double measured, double bound) {
    return {std::move(name), measured, bound, measured <= bound};
}

Check at_least(std::string name, double measured, double bound) {
    return {std::move(name), measured, bound, measured >= bound};
}

Check above(std::string name, double measured, double bound) {
    return {std::move(name), measured, bound, measured > bound};
}

Check aborted(const std::string& what) {
    std::fprintf(stderr, "aborted: %s\n", what.c_str());
    return {"completed", 0.0, 1.0, false};
}

// Runs body, timing it; any exception becomes a failed check.
Criterion run(int id, std::string title, const std::function<void(std::vector<Check>&)>& body,
              double budget_s = 0.0) {
    Criterion c{id, std::move(title), {}, 0.0};
    const auto t0 = Clock::now();
    try {
        body(c.checks);
    } catch (const std::exception& e) {
        c.checks.push_back(aborted(e.what()));
    }
    c.seconds = seconds_since(t0);
    if (budget_s > 0.0) c.checks.push_back(at_most("runtime_s", c.seconds, budget_s));
    return c;
}

// Largest entry of A - s Id and of det A - s^2 over all nodes.
struct GraphError {
    double a;
    double det;
};

GraphError constant_graph_error(int n, double d) {
    const BasePlaneChart chart(0.1, 1.0, n, n);
    const FermiGraph graph(chart, ScalarField(chart.size(), d));
    const ImmersionField imm = immerse(graph);
    const MetricField g = induced_metric(imm);
    const ShapeField A = shape_operator(imm, g);
    const double s = std::tanh(d);
    GraphError e{0.0, 0.0};
    for (const Mat2& a : A.A) {
        e.a = std::max(e.a, (a - s * Mat2::Identity()).cwiseAbs().maxCoeff());
        e.det = std::max(e.det, std::abs(a.determinant() - s * s));
    }
    return e;
}

struct GaussError {
    double err;
    double h;
};

// Max |K_int - (det A - 1)| on the annulus trimmed by an eighth of its width
// at each end.
GaussError gauss_error(int n) {
    const BasePlaneChart chart(0.1, 1.0, n, n);
    const FermiGraph graph = FermiGraph::from_function(
        chart, [](double rho, double theta) { return 0.3 + 0.05 * std::cos(theta) * (rho - 0.1); });
    const ImmersionField imm = immerse(graph);
    const MetricField g = induced_metric(imm);
    const ShapeField A = shape_operator(imm, g);
    const ScalarField K = intrinsic_curvature(g);
    const double width = chart.rho_max - chart.rho_min;
    const double lo = chart.rho_min + width / 8, hi = chart.rho_max - width / 8;
    double err = 0.0;
    for (int i = 0; i < chart.n_rho; ++i) {
        if (chart.rho(i) < lo - 1e-12 || chart.rho(i) > hi + 1e-12) continue;
        for (int j = 0; j < chart.n_theta; ++j) {
            const int k = i * chart.n_theta + j;
            err = std::max(err, std::abs(K[k] - (A.A[k].determinant() - 1.0)));
        }
    }
    return {err, chart.h_max()};
}

double min_increment(const std::vector<double>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) m = std::min(m, v[i] - v[i - 1]);
    return m;
}

constexpr int kGrid = 64;

BasePlaneChart desk_chart() { return BasePlaneChart(0.1, 1.0, kGrid, kGrid); }

double perturbation_bump(double rho) {
    const double s = std::sin(M_PI * (rho - 0.1) / 0.9);
    return s * s * s * s;
}

}  // namespace

Criterion criterion_riccati_closed_form() {
    return run(1, "Riccati closed forms against RK4", [](std::vector<Check>& out) {
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> lam(0.0, 3.0);
        const double h = 1e-3, t_max = 2.0;
        double worst = 0.0;
        for (int s = 0; s < 100; ++s) {
            double l0 = 3.0 - lam(rng);  // (0, 3]
            const RiccatiBranch b = classify_branch(l0);
            const std::vector<double> path = oracle::rk4_scalar_riccati(l0, t_max, h);
            for (std::size_t i = 0; i < path.size(); ++i)
                worst = std::max(worst, std::abs(evolve_eigen(b, i * h) - path[i]));
        }
        out.push_back(at_most("riccati_closed_vs_rk4", worst, 1e-8));

        // Matrix flow with a non-Euclidean metric.
        std::uniform_real_distribution<double> u(0.2, 2.5);
        double worst_m = 0.0;
        for (int s = 0; s < 20; ++s) {
            const Mat2 g = Eigen::Vector2d(u(rng), u(rng)).asDiagonal();
            const double a = u(rng), c = u(rng), b = 0.1 * (u(rng) - 1.35);
            Mat2 S;
            S << a, b, b, c;
            const Mat2 A0 = g.inverse() * S;  // gA0 = S symmetric
            const Mat2 exact = evolve_shape(A0, g, t_max);
            worst_m = std::max(worst_m, (exact - oracle::rk4_matrix_riccati(A0, t_max, h)).cwiseAbs().maxCoeff());
        }
        out.push_back(at_most("matrix_riccati_closed_vs_rk4", worst_m, 1e-8));
    }, 10.0);
}

Criterion criterion_curvature_bound() {
    return run(2, "Curvature bound domination", [](std::vector<Check>& out) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double excess = -std::numeric_limits<double>::infinity();
        double monotone = std::numeric_limits<double>::infinity();
        double far = 0.0;
        for (int s = 0; s < 10000; ++s) {
            double k = unit(rng);
            while (k <= 0.0) k = unit(rng);
            const double rk = std::sqrt(k);
            const double a = rk * (1.0 - unit(rng));             // (0, sqrt k]
            const double l1 = a + (rk - a) * unit(rng);           // [a, sqrt k]
            const double l2 = k / l1;
            const CurvatureBoundParams p(a, k);
            double prev = -1.0;
            for (int i = 0; i <= 50; ++i) {
                const double t = 0.1 * i;
                const double b = curvature_bound(p, t);
                excess = std::max(excess, oracle::evolved_det(l1, l2, t) - b);
                if (i > 0) monotone = std::min(monotone, b - prev);
                prev = b;
            }
            far = std::max(far, std::abs(1.0 - curvature_bound(p, 20.0)));
        }
        out.push_back(at_most("evolved_det_minus_bound", excess, 1e-12));
        out.push_back(at_least("bound_min_increment", monotone, 0.0));
        out.push_back(at_most("bound_gap_to_one_at_t20", far, 1e-6));
    }, 30.0);
}

Criterion criterion_phi_derivative() {
    return run(3, "phi derivative identity", [](std::vector<Check>& out) {
        double worst = 0.0, smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                const double c = 0.1 + 2.9 * i / 49.0;
                const double t = 3.0 * j / 49.0;
                const double exact = phi(c, t).dt;
                const double fd = oracle::central_difference([c](double x) { return phi(c, x).value; }, t, 1e-5);
                worst = std::max(worst, std::abs(exact - fd));
                smallest = std::min(smallest, exact);
            }
        out.push_back(at_most("phi_dt_vs_central_difference", worst, 1e-6));
        out.push_back(above("phi_dt_min", smallest, 0.0));
    });
}

Criterion criterion_discrete_geometry() {
    return run(4, "Discrete shape operator of an equidistant", [](std::vector<Check>& out) {
        const double d = std::atanh(0.5);
        const GraphError coarse = constant_graph_error(64, d);
        const GraphError fine = constant_graph_error(128, d);
        out.push_back(at_most("shape_operator_error_64", coarse.a, 1e-3));
        out.push_back(at_most("det_error_64", coarse.det, 1e-3));
        out.push_back(at_least("shape_operator_order", std::log2(coarse.a / fine.a), 1.9));
    });
}

Criterion criterion_gauss_equation() {
    return run(5, "Gauss equation cross-check", [](std::vector<Check>& out) {
        const GaussError coarse = gauss_error(64);
        const GaussError fine = gauss_error(128);
        constexpr double C = 1.0;
        out.push_back(at_most("gauss_error_64", coarse.err, C * coarse.h * coarse.h));
        out.push_back(at_most("gauss_error_128", fine.err, C * fine.h * fine.h));
        out.push_back(at_least("gauss_order", std::log(coarse.err / fine.err) / std::log(coarse.h / fine.h), 1.9));
    });
}

Criterion criterion_trace_identity() {
    return run(6, "Trace identity", [](std::vector<Check>& out) {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0, largest = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 1000; ++s) {
            const double k = 0.01 + 0.98 * unit(rng);
            const double l1 = std::sqrt(k) * (0.05 + 0.95 * unit(rng));
            const double l2 = k / l1;
            Mat2 R;
            R << 1.0, unit(rng) - 0.5, unit(rng) - 0.5, 1.0;
            const Mat2 A = R * Eigen::Vector2d(l1, l2).asDiagonal() * R.inverse();
            const double direct = trace_coefficient(A);
            const double closed = trace_coefficient_closed_form(A);
            worst = std::max(worst, std::abs(direct - closed) / std::max(1.0, std::abs(direct)));
            largest = std::max(largest, direct);
        }
        out.push_back(at_most("trace_direct_vs_closed_rel", worst, 1e-12));
        Check neg{"trace_coefficient_max", largest, 0.0, largest < 0.0};
        out.push_back(neg);
    });
}

Criterion criterion_homogeneous_solve() {
    return run(7, "Homogeneous elliptic solve", [](std::vector<Check>& out) {
        const ContinuationState s = ContinuationState::fuchsian(desk_chart(), 0.25, ForcingMode::PaperLiteral);
        const EllipticOperator op = assemble_operator(s.g, s.A);
        const ScalarField rhs =
            forcing_rhs(op, s.A, ForcingMode::PaperLiteral, homogeneous_boundary_values(s.A, ForcingMode::PaperLiteral));
        const ScalarField f = solve_f(op, rhs, SolverConfig{}.tol_solve);
        double worst = 0.0;
        for (int i = 1; i < op.grid.n0 - 1; ++i)
            for (int j = 0; j < op.grid.n1; ++j) worst = std::max(worst, std::abs(f[op.grid.index(i, j)] - 1.0 / 3.0));
        out.push_back(at_most("f_minus_one_third", worst, 1e-6));
    });
}

Criterion criterion_determinant_law(const VerifyOptions& opt) {
    return run(8, "Determinant law of the homogeneous continuation", [&](std::vector<Check>& out) {
        for (ForcingMode mode : {ForcingMode::PaperLiteral, ForcingMode::DetNormalized}) {
            SolverConfig cfg;
            cfg.dt = opt.dt;
            cfg.det_law = DetLaw::Off;
            ContinuationState s = ContinuationState::fuchsian(desk_chart(), 0.25, mode);
            const double t_end = 0.5;
            double gap = 0.0;
            while (s.t < t_end - 1e-12) {
                s = step(s, std::min(cfg.dt, t_end - s.t), cfg);
                gap = std::max(gap, consistency_report(s, DetLaw::FromMode).det_law_gap);
            }
            out.push_back(at_most(mode == ForcingMode::PaperLiteral ? "det_law_k_exp_t" : "det_law_k_plus_t", gap, 1e-6));
        }
    }, 60.0);
}

Criterion criterion_fuchsian_continuation(const VerifyOptions& opt) {
    return run(9, "Continuation against the exact family", [&](std::vector<Check>& out) {
        const BasePlaneChart chart = desk_chart();
        SolverConfig cfg;
        cfg.dt = opt.dt;
        cfg.det_law = DetLaw::Off;
        cfg.tol_det = 1.0;
        const ContinuationState s0 = ContinuationState::from_graph(fuchsian_leaf(chart, 0.25), ForcingMode::DetNormalized);
        const ContinuationResult r = continue_to(s0, 0.5, cfg);
        const FermiGraph leaf = resample_to_graph(chart, r.state.points);
        const double exact = fuchsian_exact_distance(0.5);
        const double width = chart.rho_max - chart.rho_min;
        double err = 0.0;
        for (int i = 0; i < chart.n_rho; ++i) {
            const double rho = chart.rho(i);
            if (rho < chart.rho_min + width / 4 - 1e-12 || rho > chart.rho_max - width / 4 + 1e-12) continue;
            for (int j = 0; j < chart.n_theta; ++j) err = std::max(err, std::abs(leaf.u[i * chart.n_theta + j] - exact));
        }
        out.push_back(at_most("u_error_half_annulus", err, 5e-3));
        const DistanceRange d = leaf_core_distance(r.state.points, chart.grid(), plane_core());
        out.push_back(at_most("core_distance_error", std::max(std::abs(d.min - exact), std::abs(d.max - exact)), 5e-3));
    }, 120.0);
}

Criterion criterion_perturbed_continuation(const VerifyOptions& opt) {
    return run(10, "Perturbed start: dispersion and nesting", [&](std::vector<Check>& out) {
        const BasePlaneChart chart = desk_chart();
        const double d = std::atanh(0.5);
        const FermiGraph start = FermiGraph::from_function(
            chart, [d](double rho, double theta) { return d + 0.01 * std::cos(theta) * perturbation_bump(rho); });
        SolverConfig cfg;
        cfg.dt = opt.dt;
        cfg.det_law = DetLaw::Off;
        cfg.tol_det = 1.0;
        const ContinuationState s0 = ContinuationState::from_graph(start, ForcingMode::DetNormalized, 0.25);
        const ContinuationResult r = continue_to(s0, 0.75, cfg, {0.3, 0.4});
        out.push_back(at_most("det_dispersion", r.max_dispersion, 1e-4));
        const FermiGraph inner = resample_to_graph(chart, r.checkpoints.at(0).state.points);
        const FermiGraph outer = resample_to_graph(chart, r.checkpoints.at(1).state.points);
        const NestingResult n = nesting_check(inner, outer);
        out.push_back(above("nesting_margin_0.3_0.4", n.margin, 0.0));
    });
}

Criterion criterion_wedge_bound() {
    return run(11, "Weak curvature bound on wedge equidistants", [](std::vector<Check>& out) {
        double deficit = -std::numeric_limits<double>::infinity(), band = 0.0, tube = 0.0;
        bool all_pass = true;
        for (double bend : {M_PI / 6, M_PI / 3, M_PI / 2})
            for (double d : {0.1, 0.5, 1.0, 2.0}) {
                const WedgeCheck w = wedge_equidistant_curvature_check(WedgeCore::symmetric(bend), d);
                deficit = std::max(deficit, std::tanh(d) * std::tanh(d) - w.min_det);
                band = std::max(band, w.band_error);
                tube = std::max(tube, w.tube_error);
                all_pass = all_pass && w.pass;
            }
        out.push_back(at_most("wedge_min_det_deficit", deficit, 1e-6));
        out.push_back(at_most("wedge_band_error", band, 1e-6));
        out.push_back(at_most("wedge_tube_error", tube, 1e-6));
        out.push_back({"wedge_all_cases_pass", all_pass ? 1.0 : 0.0, 1.0, all_pass});
    });
}

namespace {

std::vector<double> sweep_ks() {
    std::vector<double> ks;
    for (int i = 0; i < 10; ++i) ks.push_back(0.05 + 0.1 * i);
    return ks;
}

}  // namespace

Criterion criterion_convergence_sweep() {
    return run(12, "Fuchsian convergence sweep", [](std::vector<Check>& out) {
        const BasePlaneChart chart = desk_chart();
        const FoliationTable t = convergence_sweep(sweep_ks(), plane_core(), chart, SweepPath::Exact);
        double dist_err = 0.0;
        std::vector<double> dmax, gap, scaled;
        for (const LeafRecord& r : t.rows) {
            const double e = fuchsian_exact_distance(r.k);
            dist_err = std::max({dist_err, std::abs(r.dist_min - e), std::abs(r.dist_max - e)});
            dmax.push_back(r.dist_max);
            gap.push_back(-r.ball_gap);
            scaled.push_back(r.area * (1.0 - r.k));
        }
        out.push_back(at_most("dist_vs_exact", dist_err, 1e-8));
        out.push_back(above("dist_max_min_increment", min_increment(dmax), 0.0));
        out.push_back(at_most("dist_max_k0.05", t.rows.front().dist_max, 0.23));
        out.push_back(above("ball_gap_min_decrement", min_increment(gap), 0.0));
        const double h2 = chart.h_max() * chart.h_max();
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        out.push_back(at_most("area_scaled_spread_rel", (*hi - *lo) / *lo, h2));
        const double base = 2.0 * M_PI * (std::cosh(chart.rho_max) - std::cosh(chart.rho_min));
        double base_err = 0.0;
        for (double a : scaled) base_err = std::max(base_err, std::abs(a / base - 1.0));
        out.push_back(at_most("area_scaled_vs_base_rel", base_err, h2));
    });
}

Criterion criterion_volume() {
    return run(13, "Volume closed form", [](std::vector<Check>& out) {
        const BasePlaneChart chart = desk_chart();
        const FoliationTable t = convergence_sweep(sweep_ks(), plane_core(), chart, SweepPath::Exact);
        const double base = 2.0 * M_PI * (std::cosh(chart.rho_max) - std::cosh(chart.rho_min));
        double worst = 0.0;
        for (const LeafRecord& r : t.rows) {
            const double d = fuchsian_exact_distance(r.k);
            const double exact = (d / 2 + std::sinh(2 * d) / 4) * base;
            worst = std::max(worst, std::abs(r.volume_to_core / exact - 1.0));
        }
        out.push_back(at_most("volume_rel_error", worst, 1e-3));
    });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"riccati", "bounds", "fuchsian", "continuation", "wedge", "foliation"};
    return names;
}

bool is_suite(const std::string& name) {
    const auto& n = suite_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<Criterion> run_suite(const std::string& name, const VerifyOptions& opt) {
    if (name == "riccati") return {criterion_riccati_closed_form()};
    if (name == "bounds") return {criterion_curvature_bound(), criterion_phi_derivative()};
    if (name == "fuchsian") return {criterion_discrete_geometry(), criterion_gauss_equation()};
    if (name == "continuation")
        return {criterion_trace_identity(), criterion_homogeneous_solve(), criterion_determinant_law(opt),
                criterion_fuchsian_continuation(opt), criterion_perturbed_continuation(opt)};
    if (name == "wedge") return {criterion_wedge_bound()};
    if (name == "foliation") return {criterion_convergence_sweep(), criterion_volume()};
    throw std::invalid_argument("unknown suite '" + name + "'");
}

std::string report_lines(const std::vector<Criterion>& criteria) {
    std::string s;
    char buf[256];
    for (const Criterion& c : criteria)
        for (const Check& k : c.checks) {
            std::snprintf(buf, sizeof buf, "%s %.6g %.6g %s\n", k.name.c_str(), k.measured, k.bound,
                          k.pass ? "PASS" : "FAIL");
            s += buf;
        }
    return s;
}

}  // namespace kfol
