#include <doctest.h>

#include <cmath>
#include <random>

#include "kfol/hypgeo.hpp"

using namespace kfol;

namespace {

MinkVector random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double x1 = u(rng), x2 = u(rng), x3 = u(rng);
    return {std::sqrt(1 + x1 * x1 + x2 * x2 + x3 * x3), x1, x2, x3};
}

}  // namespace

TEST_CASE("minkowski inner product") {
    CHECK(mink_inner(kBasepoint, kBasepoint) == -1.0);
    CHECK(mink_inner({0, 1, 0, 0}, {0, 1, 0, 0}) == 1.0);
    CHECK(mink_inner(kBasepoint, {std::cosh(1.0), std::sinh(1.0), 0, 0}) == doctest::Approx(-1.5430806).epsilon(1e-7));
}

TEST_CASE("distance") {
    const MinkVector p{std::cosh(1.0), std::sinh(1.0), 0, 0};
    CHECK(dist(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dist(kBasepoint, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist(kBasepoint, {std::cosh(2.0), 0, std::sinh(2.0), 0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(dist(kBasepoint, {0.5, 0, 0, 0}), GeometryError);
}

TEST_CASE("distance is a metric on random triples") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const MinkVector a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(dist(a, b) == dist(b, a));
        CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-10);
    }
}

TEST_CASE("normal flow") {
    const FlowResult id = normal_flow(kBasepoint, kE3, 0.0);
    CHECK(id.point.x0 == 1.0);
    CHECK(id.normal.x3 == 1.0);
    const double d = 0.7;
    const FlowResult r = normal_flow(kBasepoint, kE3, d);
    CHECK(r.point.x0 == doctest::Approx(std::cosh(d)).epsilon(1e-15));
    CHECK(r.point.x3 == doctest::Approx(std::sinh(d)).epsilon(1e-15));

    // Constraints hold for |t| <= 10.
    const MinkVector p{std::cosh(0.3), std::sinh(0.3), 0, 0};
    const MinkVector n{0, 0, 0.6, 0.8};
    for (double t = -10.0; t <= 10.0; t += 0.5) {
        const FlowResult f = normal_flow(p, n, t);
        const double scale = f.point.x0 * f.point.x0;
        CHECK(std::abs(mink_inner(f.point, f.point) + 1) <= 1e-12 * scale);
        CHECK(std::abs(mink_inner(f.normal, f.normal) - 1) <= 1e-12 * scale);
        CHECK(std::abs(mink_inner(f.point, f.normal)) <= 1e-12 * scale);
    }
}

TEST_CASE("projections") {
    const MinkVector p = project_to_hyperboloid({1.0 + 1e-6, 0.1, 0, 0});
    CHECK(is_point(p));
    const MinkVector n = project_to_unit_normal({0.01, 0, 0.2, 1.0}, p);
    CHECK(is_unit_spacelike(n));
    CHECK(std::abs(mink_inner(n, p)) < 1e-14);
}

TEST_CASE("plane distance") {
    const GeodesicPlane P(kE3);
    const MinkVector q{std::cosh(0.4), std::sinh(0.4), 0, 0};
    CHECK(dist_to_plane(q, P) == doctest::Approx(0.0).epsilon(1e-15));
    for (double d : {-1.0, 0.3, 2.5}) CHECK(dist_to_plane(normal_flow(q, kE3, d).point, P) == doctest::Approx(d).epsilon(1e-12));
    CHECK_THROWS_AS(GeodesicPlane({0, 0, 0, 2.0}), GeometryError);
}

TEST_CASE("geodesic distance") {
    const Geodesic g(kBasepoint, {0, 1, 0, 0});
    CHECK(dist_to_geodesic(g.at(0.8), g) == doctest::Approx(0.0).epsilon(1e-7));
    for (double d : {0.2, 1.0, 3.0}) {
        const MinkVector p = normal_flow(g.at(0.5), {0, 0, std::cos(1.0), std::sin(1.0)}, d).point;
        CHECK(dist_to_geodesic(p, g) == doctest::Approx(d).epsilon(1e-10));
    }
}

TEST_CASE("wedge distance") {
    SUBCASE("flat limit") {
        const WedgeCore w = WedgeCore::symmetric(0.0);
        std::mt19937_64 rng(5);
        for (int i = 0; i < 50; ++i) {
            MinkVector p = random_point(rng);
            if (p.x3 < 0) p.x3 = -p.x3;
            if (p.x3 < 1e-3) continue;
            CHECK(dist_to_wedge(p, w) == doctest::Approx(std::abs(dist_to_plane(p, GeodesicPlane(kE3)))).epsilon(1e-10));
        }
    }
    const WedgeCore w = WedgeCore::symmetric(M_PI / 3);
    SUBCASE("above a face") {
        const MinkVector q = std::cosh(0.6) * w.ridge.at(0.2) + std::sinh(0.6) * w.faceA_dir;
        for (double d : {0.1, 0.9, 2.0}) CHECK(dist_to_wedge(normal_flow(q, w.planeA.normal, d).point, w) == doctest::Approx(d).epsilon(1e-10));
    }
    SUBCASE("ridge sector") {
        for (double phi : {-0.4, 0.0, 0.3})
            for (double d : {0.2, 1.5}) {
                const MinkVector p = normal_flow(w.ridge.at(-0.3), wedge_sector_direction(w, phi), d).point;
                CHECK(dist_to_wedge(p, w) == doctest::Approx(dist_to_geodesic(p, w.ridge)).epsilon(1e-10));
                CHECK(dist_to_wedge(p, w) == doctest::Approx(d).epsilon(1e-10));
            }
    }
    SUBCASE("inside") {
        const MinkVector p = normal_flow(kBasepoint, {0, 0, 0, -1}, 0.5).point;
        CHECK(inside_wedge(p, w));
        CHECK_THROWS_AS(dist_to_wedge(p, w), GeometryError);
    }
    SUBCASE("1-Lipschitz along geodesics") {
        const MinkVector a = normal_flow(kBasepoint, kE3, 1.0).point;
        const MinkVector v = project_to_unit_normal({0, 0.3, 1.0, 0.2}, a);
        const double h = 1e-4;
        for (double s = 0.0; s < 2.0; s += 0.05) {
            const double d0 = dist_to_wedge(normal_flow(a, v, s).point, w);
            const double d1 = dist_to_wedge(normal_flow(a, v, s + h).point, w);
            CHECK(std::abs(d1 - d0) / h <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("gauss-minkowski map") {
    CHECK(gauss_minkowski(kBasepoint, kE3).is_infinity());
    const IdealPoint z = gauss_minkowski(kBasepoint, {0, 1, 0, 0});
    REQUIRE_FALSE(z.is_infinity());
    CHECK(std::abs(z.value() - std::complex<double>(1.0, 0.0)) < 1e-15);

    // Injective on outward normals of an equidistant.
    std::vector<std::complex<double>> seen;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const double rho = 0.2 + 0.3 * i, th = j * M_PI / 3;
            const MinkVector b{std::cosh(rho), std::sinh(rho) * std::cos(th), std::sinh(rho) * std::sin(th), 0};
            const FlowResult f = normal_flow(b, kE3, 0.5);
            const IdealPoint q = gauss_minkowski(f.point, f.normal);
            REQUIRE_FALSE(q.is_infinity());
            for (const auto& s : seen) CHECK(std::abs(s - q.value()) > 1e-9);
            seen.push_back(q.value());
        }
}

TEST_CASE("ball model") {
    const auto o = to_ball(kBasepoint);
    CHECK(o[0] == 0.0);
    const double d = 1.3;
    CHECK(to_ball({std::cosh(d), std::sinh(d), 0, 0})[0] == doctest::Approx(std::tanh(d / 2)).epsilon(1e-15));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.55, 0.55);
    for (int i = 0; i < 100; ++i) {
        const std::array<double, 3> y{u(rng), u(rng), u(rng)};
        const auto back = to_ball(from_ball(y));
        for (int k = 0; k < 3; ++k) CHECK(std::abs(back[k] - y[k]) <= 1e-12);
    }
}
