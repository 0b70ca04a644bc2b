#include "kfol/equiflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kfol {

Mat2 riccati_rhs(const Mat2& A) { return Mat2::Identity() - A * A; }

RiccatiBranch classify_branch(double lambda0) {
    if (!(lambda0 >= 0.0)) throw FlowError("classify_branch: negative principal curvature");
    if (std::abs(lambda0 - 1.0) <= 1e-12) return {RiccatiBranch::Kind::Unit, 0.0};
    if (lambda0 < 1.0) return {RiccatiBranch::Kind::Tanh, std::atanh(lambda0)};
    return {RiccatiBranch::Kind::Coth, std::atanh(1.0 / lambda0)};
}

double evolve_eigen(const RiccatiBranch& b, double t) {
    switch (b.kind) {
        case RiccatiBranch::Kind::Tanh: return std::tanh(b.T0 + t);
        case RiccatiBranch::Kind::Coth: return 1.0 / std::tanh(b.T0 + t);
        case RiccatiBranch::Kind::Unit: return 1.0;
    }
    return 1.0;
}

Mat2 evolve_shape(const Mat2& A0, const Mat2& g, double t) {
    // S = L^T A L^{-T} is symmetric when gA is, with g = L L^T.
    const Eigen::LLT<Mat2> llt(g);
    if (llt.info() != Eigen::Success) throw FlowError("evolve_shape: metric is not positive definite");
    const Mat2 L = llt.matrixL();
    const Mat2 gA = g * A0;
    const double scale = std::max(1.0, gA.cwiseAbs().maxCoeff());
    if (std::abs(gA(0, 1) - gA(1, 0)) > 1e-8 * scale) throw FlowError("evolve_shape: A is not g-symmetric");
    const Mat2 Linv = L.inverse();
    Mat2 S = Linv * gA * Linv.transpose();
    S = 0.5 * (S + S.transpose());
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(S);
    Eigen::Vector2d lam = eig.eigenvalues();
    for (int i = 0; i < 2; ++i) lam(i) = evolve_eigen(classify_branch(lam(i)), t);
    const Mat2 Q = eig.eigenvectors();
    const Mat2 St = Q * lam.asDiagonal() * Q.transpose();
    return Linv.transpose() * St * L.transpose();
}

Mat2 normal_deformation_rhs(const Mat2& A, double f, const Mat2& hess_raised) {
    return f * Mat2::Identity() - hess_raised - f * A * A;
}

Mat2 metric_deformation_rhs(const Mat2& g, const Mat2& A, double f) {
    const Mat2 gA = g * A;
    return f * (gA + gA.transpose());
}

PhiValue phi(double c, double t) {
    const double value = std::tanh(t) / std::tanh(c + t);
    const double den = std::cosh(t) * std::sinh(c + t);
    return {value, std::sinh(c) * std::cosh(c + 2.0 * t) / (den * den)};
}

CurvatureBoundParams::CurvatureBoundParams(double a_, double k_) : a(a_), k(k_) {
    if (!(k > 0.0 && k < 1.0)) throw FlowError("CurvatureBoundParams: k must lie in (0, 1)");
    if (!(a > 0.0 && a <= std::sqrt(k) * (1.0 + 1e-15)))
        throw FlowError("CurvatureBoundParams: require 0 < a <= sqrt(k)");
}

CurvatureBoundCases curvature_bound_cases(const CurvatureBoundParams& p, double t) {
    const double a = p.a, k = p.k;
    CurvatureBoundCases out{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
    if (a < k) {
        const double lower = std::atanh(k);        // tanh branch of the small eigenvalue
        const double upper = std::atanh(a / k);    // arccoth(k / a), coth branch of the large one
        out.k1 = std::tanh(lower + t) / std::tanh(upper + t);
    }
    out.k2 = std::tanh(std::atanh(k) + t);
    const double small = std::tanh(std::atanh(std::sqrt(k)) + t);
    out.k3 = a > k ? small * std::tanh(std::atanh(k / a) + t) : small;
    return out;
}

double curvature_bound(const CurvatureBoundParams& p, double t) {
    const CurvatureBoundCases c = curvature_bound_cases(p, t);
    double m = std::max(c.k2, c.k3);
    if (!std::isnan(c.k1)) m = std::max(m, c.k1);
    return std::min(1.0, m);
}

}  // namespace kfol
