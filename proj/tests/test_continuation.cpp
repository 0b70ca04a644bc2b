#include <doctest.h>

#include <cmath>
#include <random>

#include "kfol/continuation.hpp"

using namespace kfol;

namespace {

BasePlaneChart chart(int n) { return BasePlaneChart(0.1, 1.0, n, n); }

}  // namespace

TEST_CASE("trace coefficient") {
    const Mat2 A = 0.5 * Mat2::Identity();
    CHECK(trace_coefficient(A) == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(trace_coefficient_closed_form(A) == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(trace_coefficient_closed_form(Mat2::Identity()) == 0.0);
    CHECK(std::abs(trace_coefficient((1 - 1e-9) * Mat2::Identity())) < 1e-8);
    CHECK_THROWS_AS(trace_coefficient(Mat2::Identity()), SolvabilityError);
    CHECK_THROWS_AS(trace_coefficient(-0.5 * Mat2::Identity()), SolvabilityError);
}

TEST_CASE("determinant laws") {
    CHECK(det_law_value(DetLaw::FromMode, ForcingMode::PaperLiteral, 0.25, 0.1) == doctest::Approx(0.25 * std::exp(0.1)));
    CHECK(det_law_value(DetLaw::FromMode, ForcingMode::DetNormalized, 0.25, 0.1) == doctest::Approx(0.35));
    CHECK(time_to_reach(ForcingMode::DetNormalized, 0.25, 0.5) == doctest::Approx(0.25));
    CHECK(time_to_reach(ForcingMode::PaperLiteral, 0.25, 0.5) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("operator on constants") {
    const ContinuationState s = ContinuationState::fuchsian(chart(24), 0.25, ForcingMode::PaperLiteral);
    const EllipticOperator op = assemble_operator(s.g, s.A);
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(op.grid.size(), 2.0);
    const Eigen::VectorXd Lf = op.matrix * one;
    for (int i = 1; i < op.grid.n0 - 1; ++i)
        for (int j = 0; j < op.grid.n1; ++j) CHECK(Lf(op.grid.index(i, j)) == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("operator with A a multiple of the identity is a scaled Laplacian") {
    const BasePlaneChart c = chart(64);
    const ContinuationState s = ContinuationState::fuchsian(c, 0.36, ForcingMode::DetNormalized);
    const EllipticOperator op = assemble_operator(s.g, s.A);
    ScalarField f(c.size());
    for (int i = 0; i < c.n_rho; ++i)
        for (int j = 0; j < c.n_theta; ++j) f[i * c.n_theta + j] = std::sin(2 * c.rho(i)) * std::cos(c.theta(j));
    const Eigen::VectorXd Lf = op.matrix * Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    const ScalarField lap = laplace_beltrami_divergence(s.g, f);
    const double h2 = c.h_max() * c.h_max();
    const Grid grid = c.grid();
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            if (!grid.interior(i, j, kDiagnosticCollar)) continue;
            const int k = grid.index(i, j);
            const double expect = lap[k] / 0.6 + op.zeroth[k] * f[k];
            CHECK(std::abs(Lf(k) - expect) <= 10 * h2);
        }
}

TEST_CASE("homogeneous solve and maximum principle") {
    const ContinuationState s = ContinuationState::fuchsian(chart(24), 0.25, ForcingMode::PaperLiteral);
    const EllipticOperator op = assemble_operator(s.g, s.A);
    const ScalarField rhs = forcing_rhs(op, s.A, ForcingMode::PaperLiteral,
                                        homogeneous_boundary_values(s.A, ForcingMode::PaperLiteral));
    for (double v : solve_f(op, rhs, 1e-9)) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField b(op.grid.size(), 0.0);
    double bmax = 0.0;
    for (int k = 0; k < op.grid.size(); ++k)
        if (op.dirichlet[k]) {
            b[k] = u(rng);
            bmax = std::max(bmax, std::abs(b[k]));
        }
    for (double v : solve_f(op, b, 1e-9)) CHECK(std::abs(v) <= bmax + 1e-12);

    CHECK_THROWS_AS(solve_f(op, rhs, 1e-300), SolverAbort);
}

TEST_CASE("non-convex shape operator is rejected") {
    ContinuationState s = ContinuationState::fuchsian(chart(16), 0.25, ForcingMode::DetNormalized);
    s.A.A[40] = 1.2 * Mat2::Identity();
    CHECK_THROWS_AS(assemble_operator(s.g, s.A), SolvabilityError);
}

TEST_CASE("one homogeneous step follows the determinant law") {
    SolverConfig cfg;
    const ContinuationState pl = step(ContinuationState::fuchsian(chart(24), 0.25, ForcingMode::PaperLiteral), 1e-2, cfg);
    const ContinuationState dn = step(ContinuationState::fuchsian(chart(24), 0.25, ForcingMode::DetNormalized), 1e-2, cfg);
    for (std::size_t k = 0; k < pl.A.A.size(); ++k) {
        CHECK(std::abs(pl.A.A[k].determinant() - 0.25 * std::exp(0.01)) <= 1e-8);
        CHECK(std::abs(dn.A.A[k].determinant() - 0.26) <= 1e-8);
    }
    CHECK(dn.t == doctest::Approx(0.01));
}

TEST_CASE("mismatched determinant law aborts") {
    SolverConfig cfg;
    cfg.det_law = DetLaw::KPlusT;
    const ContinuationState s = ContinuationState::fuchsian(chart(16), 0.25, ForcingMode::PaperLiteral);
    try {
        step(s, 1e-2, cfg);
        FAIL("expected an abort");
    } catch (const SolverAbort& e) {
        CHECK(std::string(e.what()).find("determinant law") != std::string::npos);
    }
}

TEST_CASE("consistency of the evolved fields") {
    const ContinuationState f0 = ContinuationState::fuchsian(chart(32), 0.25, ForcingMode::DetNormalized);
    const ConsistencyReport r0 = consistency_report(f0);
    const double h2 = chart(32).h_max() * chart(32).h_max();
    CHECK(r0.a_gap <= h2);
    CHECK(r0.g_gap <= 2 * h2);
    CHECK(r0.det_law_gap == 0.0);
    ContinuationState f = f0;
    for (int i = 0; i < 10; ++i) f = step(f, 1e-2, SolverConfig{});
    CHECK(consistency_report(f).det_law_gap < 1e-8);
    CHECK(consistency_report(f).a_gap <= h2);

    // A gap of a perturbed graph start over the middle half-annulus: second
    // order under refinement.
    double gaps[2];
    int n = 64;
    for (double& gap : gaps) {
        const BasePlaneChart c = chart(n);
        const double d = std::atanh(0.5);
        const FermiGraph start = FermiGraph::from_function(c, [d](double rho, double theta) {
            const double s = std::sin(M_PI * (rho - 0.1) / 0.9);
            return d + 0.01 * std::cos(theta) * s * s * s * s;
        });
        SolverConfig cfg;
        cfg.det_law = DetLaw::Off;
        ContinuationState s = ContinuationState::from_graph(start, ForcingMode::DetNormalized);
        for (int i = 0; i < 10; ++i) s = step(s, 1e-2, cfg);
        const ImmersionField imm = s.immersion();
        const ShapeField A = shape_operator(imm, induced_metric(imm));
        gap = 0.0;
        for (int i = 0; i < n; ++i) {
            if (c.rho(i) < 0.1 + 0.9 / 4 || c.rho(i) > 1.0 - 0.9 / 4) continue;
            for (int j = 0; j < n; ++j) gap = std::max(gap, (A.A[i * n + j] - s.A.A[i * n + j]).cwiseAbs().maxCoeff());
        }
        CHECK(gap <= c.h_max() * c.h_max() + 1e-8);
        n *= 2;
    }
    CHECK(gaps[0] / gaps[1] >= 3.8);
}

TEST_CASE("continue_to") {
    const ContinuationState s = ContinuationState::fuchsian(chart(16), 0.25, ForcingMode::DetNormalized);
    const ContinuationResult same = continue_to(s, 0.25, SolverConfig{});
    CHECK(same.steps == 0);
    CHECK(same.state.t == 0.0);
    SolverConfig cfg;
    cfg.dt = 0.02;
    const ContinuationResult r = continue_to(s, 0.3, cfg, {0.27});
    REQUIRE(r.checkpoints.size() == 1);
    CHECK(r.checkpoints[0].state.t == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(r.state.t == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(r.steps == 3);
    CHECK(std::abs(r.state.A.A[100].determinant() - 0.3) < 1e-8);
    CHECK_THROWS_AS(continue_to(s, 0.2, cfg), std::invalid_argument);
}
