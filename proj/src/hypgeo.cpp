#include "kfol/hypgeo.hpp"

#include <algorithm>

namespace kfol {

bool is_point(const MinkVector& p, double tol) {
    return std::abs(mink_inner(p, p) + 1.0) <= tol && p.x0 > 0.0;
}

bool is_unit_spacelike(const MinkVector& v, double tol) {
    return std::abs(mink_inner(v, v) - 1.0) <= tol;
}

MinkVector project_to_hyperboloid(const MinkVector& p) {
    const double q = -mink_inner(p, p);
    if (!(q > 0.0)) throw GeometryError("project_to_hyperboloid: vector is not timelike");
    MinkVector out = p / std::sqrt(q);
    if (out.x0 < 0.0) out = -out;
    return out;
}

MinkVector project_to_unit_normal(const MinkVector& n, const MinkVector& p) {
    MinkVector out = n + mink_inner(n, p) * p;
    const double q = mink_inner(out, out);
    if (!(q > 0.0)) throw GeometryError("project_to_unit_normal: degenerate normal");
    return out / std::sqrt(q);
}

double dist(const MinkVector& p, const MinkVector& q) {
    const double c = -mink_inner(p, q);
    if (c < 1.0 - 1e-9) throw GeometryError("dist: -<p,q> < 1, inputs are not hyperbolic points");
    // Chord form: <p-q, p-q> = 2c - 2 stays accurate when p and q are close.
    const MinkVector chord = p - q;
    const double len2 = std::max(mink_inner(chord, chord), 0.0);
    return 2.0 * std::asinh(0.5 * std::sqrt(len2));
}

FlowResult normal_flow(const MinkVector& p, const MinkVector& n, double t) {
    const double c = std::cosh(t), s = std::sinh(t);
    return {c * p + s * n, s * p + c * n};
}

GeodesicPlane::GeodesicPlane(const MinkVector& v) : normal(v) {
    if (!is_unit_spacelike(v)) throw GeometryError("GeodesicPlane: normal is not unit spacelike");
}

double dist_to_plane(const MinkVector& p, const GeodesicPlane& plane) {
    return std::asinh(mink_inner(p, plane.normal));
}

Geodesic::Geodesic(const MinkVector& timelike, const MinkVector& spacelike)
    : e0(timelike), e1(spacelike) {
    if (std::abs(mink_inner(e0, e0) + 1.0) > kNormTol || std::abs(mink_inner(e1, e1) - 1.0) > kNormTol ||
        std::abs(mink_inner(e0, e1)) > kNormTol)
        throw GeometryError("Geodesic: frame is not orthonormal");
}

double dist_to_geodesic(const MinkVector& p, const Geodesic& gamma) {
    const double a = mink_inner(p, gamma.e0);
    const double b = mink_inner(p, gamma.e1);
    const double c = std::sqrt(std::max(a * a - b * b, 1.0));
    return std::acosh(c);
}

WedgeCore WedgeCore::symmetric(double bend_angle) {
    if (!(bend_angle >= 0.0 && bend_angle < M_PI))
        throw GeometryError("WedgeCore: bend angle must lie in [0, pi)");
    const double c = std::cos(bend_angle / 2), s = std::sin(bend_angle / 2);
    return WedgeCore{
        GeodesicPlane({0.0, 0.0, s, c}),
        GeodesicPlane({0.0, 0.0, -s, c}),
        bend_angle,
        Geodesic({1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}),
        {0.0, 0.0, c, -s},
        {0.0, 0.0, -c, -s},
    };
}

MinkVector wedge_sector_direction(const WedgeCore& w, double phi) {
    // Rotate between the two face normals inside the plane they span.
    const double half = w.bend_angle / 2;
    if (half == 0.0) return w.planeA.normal;
    const MinkVector mid = (w.planeA.normal + w.planeB.normal) / (2.0 * std::cos(half));
    const MinkVector across = (w.planeA.normal - w.planeB.normal) / (2.0 * std::sin(half));
    return std::cos(phi) * mid + std::sin(phi) * across;
}

bool inside_wedge(const MinkVector& p, const WedgeCore& w) {
    return mink_inner(p, w.planeA.normal) < 0.0 && mink_inner(p, w.planeB.normal) < 0.0;
}

namespace {

// Distance from p to a closed half-plane of the wedge.
double dist_to_face(const MinkVector& p, const GeodesicPlane& plane, const MinkVector& face_dir,
                    const Geodesic& ridge) {
    const double s = mink_inner(p, plane.normal);
    const MinkVector foot = (p - s * plane.normal) / std::sqrt(1.0 + s * s);
    if (mink_inner(foot, face_dir) >= 0.0) return std::abs(std::asinh(s));
    return dist_to_geodesic(p, ridge);
}

}  // namespace

double dist_to_wedge(const MinkVector& p, const WedgeCore& w) {
    if (inside_wedge(p, w)) throw GeometryError("dist_to_wedge: point lies inside the wedge");
    return std::min(dist_to_face(p, w.planeA, w.faceA_dir, w.ridge),
                    dist_to_face(p, w.planeB, w.faceB_dir, w.ridge));
}

std::complex<double> IdealPoint::value() const {
    if (!z_) throw GeometryError("IdealPoint: point at infinity has no finite value");
    return *z_;
}

IdealPoint gauss_minkowski(const MinkVector& p, const MinkVector& n) {
    const MinkVector null = p + n;
    const double s1 = null.x1 / null.x0, s2 = null.x2 / null.x0, s3 = null.x3 / null.x0;
    if (s3 >= 1.0 - 1e-12) return IdealPoint::infinity();
    return IdealPoint::finite({s1 / (1.0 - s3), s2 / (1.0 - s3)});
}

std::array<double, 3> to_ball(const MinkVector& p) {
    const double d = 1.0 + p.x0;
    return {p.x1 / d, p.x2 / d, p.x3 / d};
}

MinkVector from_ball(const std::array<double, 3>& y) {
    const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    if (!(r2 < 1.0)) throw GeometryError("from_ball: point is not inside the unit ball");
    const double d = 1.0 - r2;
    return {(1.0 + r2) / d, 2.0 * y[0] / d, 2.0 * y[1] / d, 2.0 * y[2] / d};
}

}  // namespace kfol
