#include "kfol/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace kfol {

namespace {

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string csv_row(std::initializer_list<double> values) {
    std::string s;
    for (double v : values) {
        if (!s.empty()) s += ',';
        s += format("%.12g", v);
    }
    return s + '\n';
}

Core make_core(const RunConfig& cfg) {
    if (cfg.core == CoreKind::Wedge) return WedgeCore::symmetric(cfg.bend_angle);
    return plane_core();
}

SolverConfig solver_config(const RunConfig& cfg) {
    SolverConfig s;
    s.dt = cfg.dt;
    s.tol_det = cfg.tol_det;
    s.det_law = cfg.det_law;
    return s;
}

void emit_report(const std::string& lines, const std::string& path, std::ostream& out) {
    out << lines;
    if (!path.empty()) write_atomic(path, lines);
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const FoliationTable t = convergence_sweep(cfg.k_list(), make_core(cfg), cfg.chart,
                                               cfg.exact_path ? SweepPath::Exact : SweepPath::Continued,
                                               cfg.forcing, solver_config(cfg));
    for (const LeafRecord& r : t.rows)
        if (r.failed) {
            err << "solver abort at k = " << r.k << ": " << r.error << "\n";
            return kExitSolverAbort;
        }
    write_atomic(cfg.csv, leaves_csv(t.rows));
    out << "wrote " << t.rows.size() << " rows to " << cfg.csv << "\n";
    return kExitOk;
}

ContinuationState start_state(const RunConfig& cfg) {
    return ContinuationState::from_graph(start_graph(cfg), cfg.forcing, cfg.k_start);
}

ContinuationResult continue_run(const RunConfig& cfg, const ContinuationState& s0) {
    const std::vector<double> ks = cfg.k_list();
    return continue_to(s0, cfg.k_end, solver_config(cfg), std::vector<double>(ks.begin() + 1, ks.end() - 1));
}

int run_continue(const RunConfig& cfg, std::ostream& out) {
    const Core core = make_core(cfg);
    const ContinuationState s0 = start_state(cfg);
    const ContinuationResult r = continue_run(cfg, s0);
    std::vector<LeafRecord> rows{leaf_record(s0, cfg.k_start, core)};
    for (const Checkpoint& c : r.checkpoints) rows.push_back(leaf_record(c.state, c.k, core));
    rows.push_back(leaf_record(r.state, cfg.k_end, core));
    write_atomic(cfg.csv, leaves_csv(rows));
    if (!cfg.mesh.empty()) write_atomic(cfg.mesh + ".ply", mesh_ply(cfg.chart, r.state.points));
    out << "continued to k = " << cfg.k_end << " in " << r.steps << " steps, max det-A dispersion "
        << format("%.3e", r.max_dispersion) << "\n";
    return kExitOk;
}

int run_flow(const RunConfig& cfg, std::ostream& out) {
    Mat2 A0;
    A0 << cfg.a0[0], cfg.a0[1], cfg.a0[2], cfg.a0[3];
    const Mat2 g = Mat2::Identity();
    const int n = static_cast<int>(std::llround(cfg.t_max / cfg.t_step));
    const int sub = static_cast<int>(std::ceil(cfg.t_step / 1e-3 - 1e-9));
    auto eig = [](const Mat2& A) {
        const Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
        return Eigen::Vector2d(es.eigenvalues());
    };
    std::string csv = "t,lambda1_closed,lambda2_closed,lambda1_rk4,lambda2_rk4,max_gap,det_closed\n";
    Mat2 A = A0;
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(i * cfg.t_step, cfg.t_max);
        if (i > 0) A = oracle::rk4_matrix_riccati(A, cfg.t_step, cfg.t_step / sub);
        const Eigen::Vector2d c = eig(evolve_shape(A0, g, t));
        const Eigen::Vector2d r = eig(A);
        const double gap = (c - r).cwiseAbs().maxCoeff();
        worst = std::max(worst, gap);
        csv += csv_row({t, c(0), c(1), r(0), r(1), gap, c(0) * c(1)});
    }
    write_atomic(cfg.csv, csv);
    out << "flow max gap " << format("%.3e", worst) << "\n";
    if (worst > 1e-8) {
        out << "max_gap " << format("%.6g", worst) << " 1e-08 FAIL\n";
        return kExitVerificationFailed;
    }
    return kExitOk;
}

int run_export_mesh(const RunConfig& cfg, std::ostream& out) {
    std::vector<MinkVector> points;
    switch (cfg.mesh_leaf) {
        case MeshLeaf::Core:
            points = immerse(FermiGraph(cfg.chart, ScalarField(cfg.chart.size(), 0.0))).points;
            break;
        case MeshLeaf::Start: points = immerse(start_graph(cfg)).points; break;
        case MeshLeaf::Final: points = continue_run(cfg, start_state(cfg)).state.points; break;
    }
    const std::string path = cfg.mesh + ".ply";
    write_atomic(path, mesh_ply(cfg.chart, points));
    out << "wrote " << path << "\n";
    return kExitOk;
}

int run_wedge_check(const RunConfig& cfg, std::ostream& out) {
    const WedgeCore w = WedgeCore::symmetric(cfg.bend_angle);
    std::string lines;
    bool ok = true;
    char buf[160];
    for (double d : cfg.wedge_distances) {
        const WedgeCheck c = wedge_equidistant_curvature_check(w, d);
        const double bound = std::tanh(d) * std::tanh(d) - 1e-6;
        std::snprintf(buf, sizeof buf, "wedge_min_det_d=%g %.6g %.6g %s\n", d, c.min_det, bound,
                      c.pass ? "PASS" : "FAIL");
        lines += buf;
        ok = ok && c.pass;
    }
    emit_report(lines, cfg.report, out);
    return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(path + ": cannot open for writing");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError(path + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(path + ": cannot rename into place");
    }
}

std::string leaves_csv(const std::vector<LeafRecord>& rows) {
    std::string s = "k,t,det_min,det_max,dist_min,dist_max,area,volume\n";
    for (const LeafRecord& r : rows)
        s += csv_row({r.k, r.t, r.det_min, r.det_max, r.dist_min, r.dist_max, r.area, r.volume_to_core});
    return s;
}

std::string mesh_ply(const BasePlaneChart& chart, const std::vector<MinkVector>& points) {
    const int nr = chart.n_rho, nt = chart.n_theta;
    const int faces = (nr - 1) * nt;
    std::string s = "ply\nformat ascii 1.0\n";
    s += "element vertex " + std::to_string(points.size()) + "\n";
    s += "property double x\nproperty double y\nproperty double z\n";
    s += "element face " + std::to_string(faces) + "\n";
    s += "property list uchar int vertex_indices\nend_header\n";
    char buf[128];
    for (const MinkVector& p : points) {
        const auto y = to_ball(p);
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", y[0], y[1], y[2]);
        s += buf;
    }
    for (int i = 0; i + 1 < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const int jn = (j + 1) % nt;
            std::snprintf(buf, sizeof buf, "4 %d %d %d %d\n", i * nt + j, (i + 1) * nt + j, (i + 1) * nt + jn,
                          i * nt + jn);
            s += buf;
        }
    return s;
}

FermiGraph start_graph(const RunConfig& cfg) {
    const double d = fuchsian_exact_distance(cfg.k_start);
    const BasePlaneChart& c = cfg.chart;
    const double amp = cfg.perturb_amplitude;
    const int m = cfg.perturb_frequency;
    return FermiGraph::from_function(c, [&](double rho, double theta) {
        const double s = std::sin(M_PI * (rho - c.rho_min) / (c.rho_max - c.rho_min));
        return d + amp * std::cos(m * theta) * s * s * s * s;
    });
}

int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
        case Command::Sweep: return run_sweep(cfg, out, err);
        case Command::Continue: return run_continue(cfg, out);
        case Command::Flow: return run_flow(cfg, out);
        case Command::ExportMesh: return run_export_mesh(cfg, out);
        case Command::WedgeCheck: return run_wedge_check(cfg, out);
        case Command::Verify: return run_verify(cfg.suite, VerifyOptions{cfg.dt}, cfg.report, out, err);
    }
    return kExitInvalidConfig;
}

int run_file(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        return run_config(load_config(path), out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const IoError& e) {
        err << "output error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const SolverAbort& e) {
        err << "solver abort: " << e.what() << "\n";
        return kExitSolverAbort;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << "solver abort: " << e.what() << "\n";
        return kExitSolverAbort;
    }
}

int run_verify(const std::string& suite, const VerifyOptions& opt, const std::string& report, std::ostream& out,
               std::ostream& err) {
    if (!is_suite(suite)) {
        err << "unknown suite '" << suite << "'\n";
        return kExitInvalidConfig;
    }
    const std::vector<Criterion> criteria = run_suite(suite, opt);
    bool ok = true;
    for (const Criterion& c : criteria) ok = ok && c.pass();
    try {
        emit_report(report_lines(criteria), report, out);
    } catch (const IoError& e) {
        err << "output error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace kfol
