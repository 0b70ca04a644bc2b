#include "kfol/surfcalc.hpp"

#include <cmath>
#include <stdexcept>

namespace kfol {

bool Grid::interior(int i, int j, int collar) const {
    if (i < collar || i > n0 - 1 - collar) return false;
    if (!periodic1 && (j < collar || j > n1 - 1 - collar)) return false;
    return true;
}

void Taps::add(int i, double weight) {
    idx[count] = i;
    w[count] = weight;
    ++count;
}

namespace {

// One-dimensional stencil on an axis of n nodes: (offset from position, weight).
struct Line {
    std::array<int, 4> pos{};
    std::array<double, 4> w{};
    int count = 0;
    void add(int p, double weight) {
        pos[count] = p;
        w[count] = weight;
        ++count;
    }
};

int wrap(int j, int n) { return ((j % n) + n) % n; }

Line first_derivative(int k, int n, double h, bool periodic) {
    Line l;
    if (periodic || (k > 0 && k < n - 1)) {
        l.add(periodic ? wrap(k + 1, n) : k + 1, 0.5 / h);
        l.add(periodic ? wrap(k - 1, n) : k - 1, -0.5 / h);
    } else if (k == 0) {
        l.add(0, -1.5 / h);
        l.add(1, 2.0 / h);
        l.add(2, -0.5 / h);
    } else {
        l.add(n - 1, 1.5 / h);
        l.add(n - 2, -2.0 / h);
        l.add(n - 3, 0.5 / h);
    }
    return l;
}

Line second_derivative(int k, int n, double h, bool periodic) {
    Line l;
    const double s = 1.0 / (h * h);
    if (periodic || (k > 0 && k < n - 1)) {
        l.add(periodic ? wrap(k + 1, n) : k + 1, s);
        l.add(k, -2.0 * s);
        l.add(periodic ? wrap(k - 1, n) : k - 1, s);
    } else if (k == 0) {
        l.add(0, 2.0 * s);
        l.add(1, -5.0 * s);
        l.add(2, 4.0 * s);
        l.add(3, -1.0 * s);
    } else {
        l.add(n - 1, 2.0 * s);
        l.add(n - 2, -5.0 * s);
        l.add(n - 3, 4.0 * s);
        l.add(n - 4, -1.0 * s);
    }
    return l;
}

}  // namespace

Taps stencil(const Grid& grid, int i, int j, Deriv d) {
    Taps t;
    switch (d) {
        case Deriv::D0: {
            const Line l = first_derivative(i, grid.n0, grid.h0, false);
            for (int k = 0; k < l.count; ++k) t.add(grid.index(l.pos[k], j), l.w[k]);
            break;
        }
        case Deriv::D00: {
            const Line l = second_derivative(i, grid.n0, grid.h0, false);
            for (int k = 0; k < l.count; ++k) t.add(grid.index(l.pos[k], j), l.w[k]);
            break;
        }
        case Deriv::D1: {
            const Line l = first_derivative(j, grid.n1, grid.h1, grid.periodic1);
            for (int k = 0; k < l.count; ++k) t.add(grid.index(i, l.pos[k]), l.w[k]);
            break;
        }
        case Deriv::D11: {
            const Line l = second_derivative(j, grid.n1, grid.h1, grid.periodic1);
            for (int k = 0; k < l.count; ++k) t.add(grid.index(i, l.pos[k]), l.w[k]);
            break;
        }
        case Deriv::D01: {
            const Line a = first_derivative(i, grid.n0, grid.h0, false);
            const Line b = first_derivative(j, grid.n1, grid.h1, grid.periodic1);
            for (int p = 0; p < a.count; ++p)
                for (int q = 0; q < b.count; ++q) t.add(grid.index(a.pos[p], b.pos[q]), a.w[p] * b.w[q]);
            break;
        }
    }
    return t;
}

BasePlaneChart::BasePlaneChart(double rho_min_, double rho_max_, int n_rho_, int n_theta_)
    : rho_min(rho_min_), rho_max(rho_max_), n_rho(n_rho_), n_theta(n_theta_) {
    if (!(rho_min > 0.0)) throw std::invalid_argument("BasePlaneChart: rho_min must be positive");
    if (!(rho_max > rho_min)) throw std::invalid_argument("BasePlaneChart: rho_max must exceed rho_min");
    if (n_rho < 5) throw std::invalid_argument("BasePlaneChart: n_rho must be at least 5");
    if (n_theta < 8) throw std::invalid_argument("BasePlaneChart: n_theta must be at least 8");
}

Grid BasePlaneChart::grid() const { return Grid{n_rho, n_theta, h_rho(), h_theta(), true}; }

MinkVector base_point(double rho, double theta) {
    const double s = std::sinh(rho);
    return {std::cosh(rho), s * std::cos(theta), s * std::sin(theta), 0.0};
}

MinkVector fermi_point(double rho, double theta, double u) {
    return std::cosh(u) * base_point(rho, theta) + std::sinh(u) * kE3;
}

FermiCoords fermi_coords(const MinkVector& p) {
    const double u = std::asinh(p.x3);
    const double c = std::cosh(u);
    const double rho = std::acosh(std::max(p.x0 / c, 1.0));
    return {rho, std::atan2(p.x2, p.x1), u};
}

FermiGraph::FermiGraph(const BasePlaneChart& chart_, ScalarField u_) : chart(chart_), u(std::move(u_)) {
    if (static_cast<int>(u.size()) != chart.size()) throw std::invalid_argument("FermiGraph: size mismatch");
    for (double v : u)
        if (!std::isfinite(v)) throw std::invalid_argument("FermiGraph: non-finite height");
}

FermiGraph FermiGraph::from_function(const BasePlaneChart& chart,
                                     const std::function<double(double, double)>& fn) {
    ScalarField u(chart.size());
    for (int i = 0; i < chart.n_rho; ++i)
        for (int j = 0; j < chart.n_theta; ++j) u[i * chart.n_theta + j] = fn(chart.rho(i), chart.theta(j));
    return FermiGraph(chart, std::move(u));
}

namespace {

double det3(double a, double b, double c, double d, double e, double f, double g, double h, double k) {
    return a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g);
}

// Vector N with <N, x> = det[x; a; b; c] for all x.
MinkVector orthogonal_complement(const MinkVector& a, const MinkVector& b, const MinkVector& c) {
    const double w0 = det3(a.x1, a.x2, a.x3, b.x1, b.x2, b.x3, c.x1, c.x2, c.x3);
    const double w1 = -det3(a.x0, a.x2, a.x3, b.x0, b.x2, b.x3, c.x0, c.x2, c.x3);
    const double w2 = det3(a.x0, a.x1, a.x3, b.x0, b.x1, b.x3, c.x0, c.x1, c.x3);
    const double w3 = -det3(a.x0, a.x1, a.x2, b.x0, b.x1, b.x2, c.x0, c.x1, c.x2);
    return {-w0, w1, w2, w3};
}

}  // namespace

ImmersionField immersion_from_points(const Grid& grid, std::vector<MinkVector> points,
                                     const std::vector<MinkVector>& orient) {
    const int n = grid.size();
    if (static_cast<int>(points.size()) != n || static_cast<int>(orient.size()) != n)
        throw std::invalid_argument("immersion_from_points: size mismatch");
    ImmersionField imm{grid, std::move(points), std::vector<MinkVector>(n), std::vector<MinkVector>(n),
                       std::vector<MinkVector>(n)};
    for (int i = 0; i < grid.n0; ++i) {
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const MinkVector t0 = derivative(grid, imm.points, i, j, Deriv::D0);
            const MinkVector t1 = derivative(grid, imm.points, i, j, Deriv::D1);
            const double g00 = mink_inner(t0, t0), g11 = mink_inner(t1, t1), g01 = mink_inner(t0, t1);
            if (!(g00 > 0.0 && g11 > 0.0) || g00 * g11 - g01 * g01 <= std::pow(1e-6, 2) * g00 * g11)
                throw SingularImmersion("immersion: degenerate tangents at node (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
            MinkVector nrm = orthogonal_complement(imm.points[k], t0, t1);
            const double q = mink_inner(nrm, nrm);
            if (!(q > 0.0)) throw SingularImmersion("immersion: normal is not spacelike");
            nrm = nrm / std::sqrt(q);
            if (mink_inner(nrm, orient[k]) < 0.0) nrm = -nrm;
            imm.d0[k] = t0;
            imm.d1[k] = t1;
            imm.normals[k] = nrm;
        }
    }
    return imm;
}

ImmersionField immerse(const FermiGraph& graph) {
    const BasePlaneChart& c = graph.chart;
    std::vector<MinkVector> pts(c.size());
    for (int i = 0; i < c.n_rho; ++i)
        for (int j = 0; j < c.n_theta; ++j) {
            const int k = i * c.n_theta + j;
            pts[k] = fermi_point(c.rho(i), c.theta(j), graph.u[k]);
        }
    return immersion_from_points(c.grid(), std::move(pts), std::vector<MinkVector>(c.size(), kE3));
}

MetricField induced_metric(const ImmersionField& imm) {
    MetricField m{imm.grid, std::vector<Mat2>(imm.points.size())};
    for (std::size_t k = 0; k < imm.points.size(); ++k) {
        Mat2 g;
        g(0, 0) = mink_inner(imm.d0[k], imm.d0[k]);
        g(1, 1) = mink_inner(imm.d1[k], imm.d1[k]);
        g(0, 1) = g(1, 0) = mink_inner(imm.d0[k], imm.d1[k]);
        if (!(g(0, 0) > 0.0) || !(g.determinant() > 1e-12))
            throw DegenerateMetric("induced_metric: metric is not positive definite at node " + std::to_string(k));
        m.g[k] = g;
    }
    return m;
}

ShapeField shape_operator(const ImmersionField& imm, const MetricField& g) {
    const Grid& grid = imm.grid;
    ShapeField s{grid, std::vector<Mat2>(grid.size())};
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const MinkVector n0 = derivative(grid, imm.normals, i, j, Deriv::D0);
            const MinkVector n1 = derivative(grid, imm.normals, i, j, Deriv::D1);
            Mat2 h;
            h(0, 0) = mink_inner(n0, imm.d0[k]);
            h(0, 1) = mink_inner(n0, imm.d1[k]);
            h(1, 0) = mink_inner(n1, imm.d0[k]);
            h(1, 1) = mink_inner(n1, imm.d1[k]);
            if (!(g.g[k].determinant() > 1e-12)) throw DegenerateMetric("shape_operator: degenerate metric");
            s.A[k] = g.g[k].inverse() * h;
        }
    return s;
}

ShapeField shape_operator_second_derivative(const ImmersionField& imm, const MetricField& g) {
    const Grid& grid = imm.grid;
    ShapeField s{grid, std::vector<Mat2>(grid.size())};
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const MinkVector& n = imm.normals[k];
            Mat2 h;
            h(0, 0) = -mink_inner(n, derivative(grid, imm.points, i, j, Deriv::D00));
            h(1, 1) = -mink_inner(n, derivative(grid, imm.points, i, j, Deriv::D11));
            h(0, 1) = h(1, 0) = -mink_inner(n, derivative(grid, imm.points, i, j, Deriv::D01));
            s.A[k] = g.g[k].inverse() * h;
        }
    return s;
}

ScalarField gaussian_curvature(const ShapeField& A) {
    ScalarField k(A.A.size());
    for (std::size_t n = 0; n < A.A.size(); ++n) k[n] = A.A[n].determinant();
    return k;
}

ScalarField intrinsic_curvature(const MetricField& g) {
    const Grid& grid = g.grid;
    const int n = grid.size();
    ScalarField E(n), F(n), G(n), K(n);
    for (int k = 0; k < n; ++k) {
        E[k] = g.g[k](0, 0);
        F[k] = g.g[k](0, 1);
        G[k] = g.g[k](1, 1);
    }
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            auto d = [&](const ScalarField& f, Deriv w) { return derivative(grid, f, i, j, w); };
            const double Eu = d(E, Deriv::D0), Ev = d(E, Deriv::D1);
            const double Fu = d(F, Deriv::D0), Fv = d(F, Deriv::D1);
            const double Gu = d(G, Deriv::D0), Gv = d(G, Deriv::D1);
            const double Evv = d(E, Deriv::D11), Guu = d(G, Deriv::D00), Fuv = d(F, Deriv::D01);
            const double e = E[k], f = F[k], gg = G[k];
            const double m1 = det3(-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,  //
                                   Fv - 0.5 * Gu, e, f,                                //
                                   0.5 * Gv, f, gg);
            const double m2 = det3(0.0, 0.5 * Ev, 0.5 * Gu,  //
                                   0.5 * Ev, e, f,           //
                                   0.5 * Gu, f, gg);
            const double w = e * gg - f * f;
            K[k] = (m1 - m2) / (w * w);
        }
    return K;
}

std::vector<Christoffel> christoffel_symbols(const MetricField& g) {
    const Grid& grid = g.grid;
    std::vector<Christoffel> out(grid.size());
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const std::array<Mat2, 2> dg{derivative(grid, g.g, i, j, Deriv::D0),
                                         derivative(grid, g.g, i, j, Deriv::D1)};
            // first-kind symbols: lower[d](a,b) = 1/2 (d_a g_db + d_b g_da - d_d g_ab)
            std::array<Mat2, 2> lower;
            for (int dd = 0; dd < 2; ++dd)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        lower[dd](a, b) = 0.5 * (dg[a](dd, b) + dg[b](dd, a) - dg[dd](a, b));
            const Mat2 ginv = g.g[k].inverse();
            for (int c = 0; c < 2; ++c) out[k][c] = ginv(c, 0) * lower[0] + ginv(c, 1) * lower[1];
        }
    return out;
}

std::vector<Mat2> hessian_endomorphism(const MetricField& g, const std::vector<Christoffel>& gamma,
                                       const ScalarField& f) {
    const Grid& grid = g.grid;
    std::vector<Mat2> out(grid.size());
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const double f0 = derivative(grid, f, i, j, Deriv::D0);
            const double f1 = derivative(grid, f, i, j, Deriv::D1);
            Mat2 hess;
            hess(0, 0) = derivative(grid, f, i, j, Deriv::D00);
            hess(1, 1) = derivative(grid, f, i, j, Deriv::D11);
            hess(0, 1) = hess(1, 0) = derivative(grid, f, i, j, Deriv::D01);
            hess -= gamma[k][0] * f0 + gamma[k][1] * f1;
            out[k] = g.g[k].inverse() * hess;
        }
    return out;
}

std::vector<Mat2> hessian_endomorphism(const MetricField& g, const ScalarField& f) {
    return hessian_endomorphism(g, christoffel_symbols(g), f);
}

std::vector<Vec2> surface_gradient(const MetricField& g, const ScalarField& f) {
    const Grid& grid = g.grid;
    std::vector<Vec2> out(grid.size());
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            const Vec2 df(derivative(grid, f, i, j, Deriv::D0), derivative(grid, f, i, j, Deriv::D1));
            out[k] = g.g[k].inverse() * df;
        }
    return out;
}

ScalarField laplace_beltrami_divergence(const MetricField& g, const ScalarField& f) {
    const Grid& grid = g.grid;
    const int n = grid.size();
    ScalarField flux0(n), flux1(n), vol(n), out(n);
    const std::vector<Vec2> grad = surface_gradient(g, f);
    for (int k = 0; k < n; ++k) {
        vol[k] = std::sqrt(g.g[k].determinant());
        flux0[k] = vol[k] * grad[k](0);
        flux1[k] = vol[k] * grad[k](1);
    }
    for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
            const int k = grid.index(i, j);
            out[k] = (derivative(grid, flux0, i, j, Deriv::D0) + derivative(grid, flux1, i, j, Deriv::D1)) / vol[k];
        }
    return out;
}

double area(const ImmersionField& imm, const MetricField& g) {
    const Grid& grid = imm.grid;
    double total = 0.0;
    for (int i = 0; i < grid.n0; ++i) {
        const double w0 = (i == 0 || i == grid.n0 - 1) ? 0.5 : 1.0;
        double ring = 0.0;
        for (int j = 0; j < grid.n1; ++j) {
            const double w1 = (!grid.periodic1 && (j == 0 || j == grid.n1 - 1)) ? 0.5 : 1.0;
            ring += w1 * std::sqrt(g.g[grid.index(i, j)].determinant());
        }
        total += w0 * ring;
    }
    return total * grid.h0 * grid.h1;
}

double max_abs_asymmetry(const MetricField& g, const ShapeField& A) {
    double worst = 0.0;
    for (std::size_t k = 0; k < A.A.size(); ++k) {
        const Mat2 gA = g.g[k] * A.A[k];
        worst = std::max(worst, std::abs(gA(0, 1) - gA(1, 0)));
    }
    return worst;
}

}  // namespace kfol
