// Hyperbolic 3-space in the hyperboloid model.
//
// Points live on the upper sheet {<p,p> = -1, x0 > 0} of Minkowski space with
// signature (-,+,+,+). Tangent and normal vectors are spacelike vectors
// Minkowski-orthogonal to their base point.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace kfol {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kNormTol = 1e-10;

struct MinkVector {
    double x0 = 0.0, x1 = 0.0, x2 = 0.0, x3 = 0.0;

    constexpr double operator[](int i) const {
        return i == 0 ? x0 : i == 1 ? x1 : i == 2 ? x2 : x3;
    }

    MinkVector& operator+=(const MinkVector& o) {
        x0 += o.x0; x1 += o.x1; x2 += o.x2; x3 += o.x3;
        return *this;
    }
    MinkVector& operator-=(const MinkVector& o) {
        x0 -= o.x0; x1 -= o.x1; x2 -= o.x2; x3 -= o.x3;
        return *this;
    }
    MinkVector& operator*=(double s) {
        x0 *= s; x1 *= s; x2 *= s; x3 *= s;
        return *this;
    }
};

inline MinkVector operator+(MinkVector a, const MinkVector& b) { return a += b; }
inline MinkVector operator-(MinkVector a, const MinkVector& b) { return a -= b; }
inline MinkVector operator-(MinkVector a) { return a *= -1.0; }
inline MinkVector operator*(double s, MinkVector a) { return a *= s; }
inline MinkVector operator*(MinkVector a, double s) { return a *= s; }
inline MinkVector operator/(MinkVector a, double s) { return a *= 1.0 / s; }

/// Minkowski inner product -x0*y0 + x1*y1 + x2*y2 + x3*y3.
constexpr double mink_inner(const MinkVector& x, const MinkVector& y) {
    return -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3;
}

inline constexpr MinkVector kBasepoint{1.0, 0.0, 0.0, 0.0};
/// Unit normal of the base plane {x3 = 0}.
inline constexpr MinkVector kE3{0.0, 0.0, 0.0, 1.0};

bool is_point(const MinkVector& p, double tol = kNormTol);
bool is_unit_spacelike(const MinkVector& v, double tol = kNormTol);

/// Rescales a near-hyperboloid vector back onto the upper sheet.
MinkVector project_to_hyperboloid(const MinkVector& p);
/// Removes the component along the point p and rescales to unit length.
MinkVector project_to_unit_normal(const MinkVector& n, const MinkVector& p);

/// Hyperbolic distance arccosh(-<p,q>).
double dist(const MinkVector& p, const MinkVector& q);

struct FlowResult {
    MinkVector point;
    MinkVector normal;
};

/// Moves (p, n) a signed distance t along the geodesic with initial velocity n.
FlowResult normal_flow(const MinkVector& p, const MinkVector& n, double t);

struct GeodesicPlane {
    MinkVector normal;  // unit spacelike

    explicit GeodesicPlane(const MinkVector& v);
};

/// Signed distance arcsinh(<p, v>); positive on the side the normal points to.
double dist_to_plane(const MinkVector& p, const GeodesicPlane& plane);

/// Geodesic spanned by a timelike unit e0 and a spacelike unit e1.
struct Geodesic {
    MinkVector e0;
    MinkVector e1;

    Geodesic(const MinkVector& timelike, const MinkVector& spacelike);

    MinkVector at(double s) const { return std::cosh(s) * e0 + std::sinh(s) * e1; }
    MinkVector velocity(double s) const { return std::sinh(s) * e0 + std::cosh(s) * e1; }
};

double dist_to_geodesic(const MinkVector& p, const Geodesic& gamma);

/// Convex dihedral wedge bounded by two half-planes meeting along a ridge.
///
/// Interior is {<p,vA> <= 0 and <p,vB> <= 0}. Face X is the half-plane of
/// plane X on which <q, faceX_dir> >= 0, where faceX_dir is the unit vector in
/// plane X orthogonal to the ridge pointing away from it.
struct WedgeCore {
    GeodesicPlane planeA;
    GeodesicPlane planeB;
    double bend_angle;  // exterior dihedral angle
    Geodesic ridge;
    MinkVector faceA_dir;
    MinkVector faceB_dir;

    /// Symmetric wedge around the ridge through the basepoint along x1. For a
    /// zero bend both faces lie in {x3 = 0} with normal +x3.
    static WedgeCore symmetric(double bend_angle);
};

/// Closed-form exterior unit normal of the ridge tube at angle phi in
/// [-bend/2, bend/2]; phi = bend/2 gives planeA's normal.
MinkVector wedge_sector_direction(const WedgeCore& w, double phi);

bool inside_wedge(const MinkVector& p, const WedgeCore& w);
double dist_to_wedge(const MinkVector& p, const WedgeCore& w);

/// Point of the ideal boundary in the stereographic chart from the north pole.
class IdealPoint {
public:
    static IdealPoint finite(std::complex<double> z) { return IdealPoint(z); }
    static IdealPoint infinity() { return IdealPoint(); }

    bool is_infinity() const { return !z_.has_value(); }
    std::complex<double> value() const;

private:
    IdealPoint() = default;
    explicit IdealPoint(std::complex<double> z) : z_(z) {}
    std::optional<std::complex<double>> z_;
};

/// Ideal endpoint of the geodesic ray from p with initial direction n.
IdealPoint gauss_minkowski(const MinkVector& p, const MinkVector& n);

std::array<double, 3> to_ball(const MinkVector& p);
MinkVector from_ball(const std::array<double, 3>& y);

}  // namespace kfol
