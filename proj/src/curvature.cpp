#include "curvlab/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "curvlab/parallel.hpp"

namespace curvlab {

namespace {

void require_margin(const MetricField& field, const Vec2& p, double margin, const char* who) {
    if (field.domain().boundary_distance(p) < margin * (1.0 - 1e-12))
        throw std::domain_error(std::string(who) + ": point (" + std::to_string(p.x) + ", " +
                                std::to_string(p.y) + ") closer than " + std::to_string(margin) +
                                " to the domain boundary");
}

std::array<Sym2, 2> metric_derivatives(const MetricField& field, const Vec2& p, double h) {
    if (field.has_derivative()) return field.derivative_at(p);
    const Sym2 xp = field.at({p.x + h, p.y}), xm = field.at({p.x - h, p.y});
    const Sym2 yp = field.at({p.x, p.y + h}), ym = field.at({p.x, p.y - h});
    const double inv = 1.0 / (2.0 * h);
    return {(xp - xm) * inv, (yp - ym) * inv};
}

// index helper over the symmetric storage
double G(const Sym2& m, int a, int b) {
    return a == 0 ? (b == 0 ? m.xx : m.xy) : (b == 0 ? m.xy : m.yy);
}

Christoffel christoffel_from(const Sym2& g, const std::array<Sym2, 2>& dg, const Vec2& where) {
    if (!g.positive_definite())
        throw DegenerateMetric("christoffel: metric not positive definite at (" +
                               std::to_string(where.x) + ", " + std::to_string(where.y) + ")");
    const Sym2 ginv = g.inverse();
    Christoffel out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = j; k < 2; ++k) {
                double acc = 0.0;
                for (int l = 0; l < 2; ++l)
                    acc += G(ginv, i, l) *
                           (G(dg[j], l, k) + G(dg[k], j, l) - G(dg[l], j, k));
                out.g[i][j][k] = 0.5 * acc;
                out.g[i][k][j] = out.g[i][j][k];
            }
    return out;
}

Christoffel christoffel_unchecked(const MetricField& field, const Vec2& p, double h) {
    return christoffel_from(field.at(p), metric_derivatives(field, p, h), p);
}

// curvature from Christoffel values at the center and its four neighbours:
// Riem(d1, d2) d2 = (d1 Gamma^l_22 - d2 Gamma^l_12
//                    + Gamma^l_1m Gamma^m_22 - Gamma^l_2m Gamma^m_12) d_l
double sectional_from(const Sym2& g, const Christoffel& c, const Christoffel& cxp,
                      const Christoffel& cxm, const Christoffel& cyp, const Christoffel& cym,
                      double hx, double hy, const Vec2& where) {
    double r[2];
    for (int l = 0; l < 2; ++l) {
        double acc = (cxp.g[l][1][1] - cxm.g[l][1][1]) / (2.0 * hx) -
                     (cyp.g[l][0][1] - cym.g[l][0][1]) / (2.0 * hy);
        for (int m = 0; m < 2; ++m)
            acc += c.g[l][0][m] * c.g[m][1][1] - c.g[l][1][m] * c.g[m][0][1];
        r[l] = acc;
    }
    const double numer = r[0] * g.xx + r[1] * g.xy; // g(Riem(d1,d2)d2, d1)
    const double denom = g.det();                   // wedge norm of d1^d2
    if (!(denom > 0.0))
        throw DegenerateMetric("sectional: degenerate metric at (" + std::to_string(where.x) +
                               ", " + std::to_string(where.y) + ")");
    return numer / denom;
}

} // namespace

Christoffel christoffel(const MetricField& field, const Vec2& p, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("christoffel: step must be positive");
    // the stencil only reaches out when derivatives are taken numerically
    if (!field.has_derivative()) require_margin(field, p, 2.0 * h, "christoffel");
    return christoffel_unchecked(field, p, h);
}

double sectional(const MetricField& field, const Vec2& p, double h, CurvatureMethod method) {
    if (method == CurvatureMethod::analytic) return field.analytic_sectional_at(p);
    if (!(h > 0.0)) throw std::invalid_argument("sectional: step must be positive");
    require_margin(field, p, field.has_derivative() ? h : 3.0 * h, "sectional");

    const Christoffel cxp = christoffel_unchecked(field, {p.x + h, p.y}, h);
    const Christoffel cxm = christoffel_unchecked(field, {p.x - h, p.y}, h);
    const Christoffel cyp = christoffel_unchecked(field, {p.x, p.y + h}, h);
    const Christoffel cym = christoffel_unchecked(field, {p.x, p.y - h}, h);
    const Christoffel c = christoffel_unchecked(field, p, h);
    return sectional_from(field.at(p), c, cxp, cxm, cyp, cym, h, h, p);
}

double lattice_sectional(const SampledMetric& sm, int i, int j) {
    if (i < 2 || j < 2 || i > sm.nx - 3 || j > sm.ny - 3)
        throw std::invalid_argument("lattice_sectional: node (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") too close to the sample boundary");
    const double hx = sm.hx(), hy = sm.hy();
    const auto gamma = [&](int a, int b) {
        const std::array<Sym2, 2> dg{(sm.node(a + 1, b) - sm.node(a - 1, b)) * (0.5 / hx),
                                     (sm.node(a, b + 1) - sm.node(a, b - 1)) * (0.5 / hy)};
        return christoffel_from(sm.node(a, b), dg, sm.point(a, b));
    };
    return sectional_from(sm.node(i, j), gamma(i, j), gamma(i + 1, j), gamma(i - 1, j),
                          gamma(i, j + 1), gamma(i, j - 1), hx, hy, sm.point(i, j));
}

CurvatureSample curvature_sample(const MetricField& field, const Vec2& p, double h,
                                 CurvatureMethod method) {
    CurvatureSample s;
    s.point = p;
    s.h = h;
    s.method = method;
    s.sectional = sectional(field, p, h, method);
    s.gamma = christoffel(field, p, h);
    return s;
}

double riemann_form(const MetricField& field, const Vec2& p, const Vec2& x, const Vec2& y,
                    const Vec2& v, const Vec2& w, double h, CurvatureMethod method) {
    // in 2d the tensor has one component: R(X^Y, V^W) = R_1212 (X^Y)^12 (V^W)^12
    const double sec = sectional(field, p, h, method);
    const double r1212 = sec * field.at(p).det();
    return r1212 * cross(x, y) * cross(v, w);
}

BoundScanReport curvature_bound_scan(const MetricField& field, const Mollifier& mollifier,
                                     const Rect& region, const std::vector<double>& eps_schedule,
                                     double k, BoundDirection direction, int resolution) {
    if (eps_schedule.empty())
        throw std::invalid_argument("curvature_bound_scan: empty eps schedule");
    if (resolution < 2) throw std::invalid_argument("curvature_bound_scan: resolution < 2");

    BoundScanReport rep;
    rep.direction = direction;
    rep.k = k;
    for (const double eps : eps_schedule) {
        const SampledMetric sm = smooth_metric(field, mollifier, eps, resolution);
        const Rect& sd = sm.rect;
        if (region.x0 < sd.x0 + 2 * sm.hx() || region.x1 > sd.x1 - 2 * sm.hx() ||
            region.y0 < sd.y0 + 2 * sm.hy() || region.y1 > sd.y1 - 2 * sm.hy())
            throw std::invalid_argument(
                "curvature_bound_scan: region not two cells inside the eps-shrunk domain (eps " +
                std::to_string(eps) + ")");

        std::vector<std::pair<int, int>> nodes;
        for (int j = 2; j <= sm.ny - 3; ++j)
            for (int i = 2; i <= sm.nx - 3; ++i)
                if (region.contains(sm.point(i, j))) nodes.push_back({i, j});
        if (nodes.size() < 16)
            throw std::invalid_argument("curvature_bound_scan: region captures too few sample "
                                        "nodes; raise the resolution");

        std::vector<double> secs(nodes.size());
        parallel_for(nodes.size(), [&](std::size_t idx) {
            secs[idx] = lattice_sectional(sm, nodes[idx].first, nodes[idx].second);
        });

        BoundScanEntry e;
        e.eps = eps;
        e.min_sec = *std::min_element(secs.begin(), secs.end());
        e.max_sec = *std::max_element(secs.begin(), secs.end());
        e.slack = direction == BoundDirection::lower ? e.min_sec - k : k - e.max_sec;
        e.pass = e.slack >= 0.0;
        rep.entries.push_back(e);
    }
    return rep;
}

} // namespace curvlab
