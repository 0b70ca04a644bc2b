// Weingarten operator under normal deformations.
//
// Along the equidistant flow the shape operator obeys dA/dt = Id - A^2, whose
// eigenvalues follow tanh, coth or the constant 1 depending on the seed. A
// general normal deformation with speed f gives dA/dt = f Id - Hess f - f A^2
// and dg/dt = f (gA + (gA)^T).
#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace kfol {

using Mat2 = Eigen::Matrix2d;

class FlowError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

Mat2 riccati_rhs(const Mat2& A);

struct RiccatiBranch {
    enum class Kind { Tanh, Coth, Unit };
    Kind kind = Kind::Unit;
    double T0 = 0.0;
};

/// Branch of lambda' = 1 - lambda^2 through lambda(0) = lambda0 >= 0.
RiccatiBranch classify_branch(double lambda0);
double evolve_eigen(const RiccatiBranch& b, double t);

/// Closed-form equidistant evolution of a g-symmetric positive A0 by time t.
/// Eigenvectors are frozen; eigenvalues follow their branches.
Mat2 evolve_shape(const Mat2& A0, const Mat2& g, double t);

Mat2 normal_deformation_rhs(const Mat2& A, double f, const Mat2& hess_raised);
Mat2 metric_deformation_rhs(const Mat2& g, const Mat2& A, double f);

struct PhiValue {
    double value;
    double dt;
};

/// phi(c, t) = coth(c + t) tanh(t) and its t-derivative.
PhiValue phi(double c, double t);

struct CurvatureBoundParams {
    double a;  // lower eigenvalue bound of A at t = 0
    double k;  // constant curvature det A at t = 0

    CurvatureBoundParams(double a, double k);
};

/// Upper bound on the extrinsic curvature of the distance-t equidistant of a
/// convex k-surface with A >= a Id. Nondecreasing in t, tends to 1.
double curvature_bound(const CurvatureBoundParams& p, double t);

/// The three case bounds before the max and clamp; K1 is NaN when a >= k.
struct CurvatureBoundCases {
    double k1;
    double k2;
    double k3;
};
CurvatureBoundCases curvature_bound_cases(const CurvatureBoundParams& p, double t);

}  // namespace kfol
