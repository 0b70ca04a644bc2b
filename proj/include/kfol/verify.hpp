// Acceptance checks and the independent oracles they compare against.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kfol/equiflow.hpp"

namespace kfol {

namespace oracle {

/// Classical RK4 for lambda' = 1 - lambda^2, returning lambda at every step.
std::vector<double> rk4_scalar_riccati(double lambda0, double t_max, double h);
/// Classical RK4 for A' = Id - A^2.
Mat2 rk4_matrix_riccati(const Mat2& A0, double t_max, double h);
/// Central difference (f(x + h) - f(x - h)) / 2h.
double central_difference(const std::function<double(double)>& f, double x, double h);
/// det A of the equidistant with principal curvatures lambda1 <= lambda2,
/// evolved through the scalar branches.
double evolved_det(double lambda1, double lambda2, double t);

}  // namespace oracle

/// One assertion: measured value compared with its bound.
struct Check {
    std::string name;
    double measured;
    double bound;
    bool pass;
};

struct Criterion {
    int id;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool pass() const;
};

struct VerifyOptions {
    double dt = 1e-2;  // continuation step for the continuation suite
};

Criterion criterion_riccati_closed_form();
Criterion criterion_curvature_bound();
Criterion criterion_phi_derivative();
Criterion criterion_discrete_geometry();
Criterion criterion_gauss_equation();
Criterion criterion_trace_identity();
Criterion criterion_homogeneous_solve();
Criterion criterion_determinant_law(const VerifyOptions& opt = {});
Criterion criterion_fuchsian_continuation(const VerifyOptions& opt = {});
Criterion criterion_perturbed_continuation(const VerifyOptions& opt = {});
Criterion criterion_wedge_bound();
Criterion criterion_convergence_sweep();
Criterion criterion_volume();

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);
/// Throws std::invalid_argument for an unknown suite.
std::vector<Criterion> run_suite(const std::string& name, const VerifyOptions& opt = {});

/// "name measured bound PASS|FAIL" per check.
std::string report_lines(const std::vector<Criterion>& criteria);

}  // namespace kfol
