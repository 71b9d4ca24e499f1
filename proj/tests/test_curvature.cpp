#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curvlab/curvature.hpp"
#include "curvlab/metric_field.hpp"
#include "curvlab/mollify.hpp"
#include "curvlab/rng.hpp"

using namespace curvlab;

namespace {

// Christoffel symbols of a conformal metric e^{2 phi} Id:
// G^1_11 = px, G^1_12 = py, G^1_22 = -px, G^2_11 = -py, G^2_12 = px, G^2_22 = py
Christoffel conformal_gamma(double px, double py) {
    Christoffel c;
    c.g[0][0][0] = px;
    c.g[0][0][1] = c.g[0][1][0] = py;
    c.g[0][1][1] = -px;
    c.g[1][0][0] = -py;
    c.g[1][0][1] = c.g[1][1][0] = px;
    c.g[1][1][1] = py;
    return c;
}

} // namespace

TEST_CASE("christoffel symbols match the conformal closed form") {
    // hw1 is conformal with phi = log(1 + |x|^lambda) / 2
    const double lambda = 1.6;
    const MetricField g = make_hw1(lambda);
    for (const double x : {0.3, -0.5, 0.75}) {
        const Vec2 p{x, 0.1};
        const double ax = std::abs(x);
        const double px = 0.5 * lambda * std::pow(ax, lambda - 1.0) * (x > 0 ? 1 : -1) /
                          (1.0 + std::pow(ax, lambda));
        const Christoffel want = conformal_gamma(px, 0.0);
        const Christoffel got = christoffel(g, p, 1e-5);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    CHECK(got.g[i][j][k] == doctest::Approx(want.g[i][j][k]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("finite difference curvature agrees with analytic on the catalog") {
    // relative 1e-3 agreement on |x| in [0.2, 0.9] for the singular metrics
    for (const double lambda : {1.2, 1.5, 1.8}) {
        for (const MetricField& g : {make_hw1(lambda), make_hw2(lambda)}) {
            const MetricField fd = g.without_analytic_hooks();
            const double xmax = g.domain().x1 - 5e-3;
            for (double ax = 0.2; ax <= 0.9; ax += 0.05) {
                const double x = std::min(ax, xmax);
                for (const double sx : {1.0, -1.0}) {
                    const Vec2 p{sx * x, 0.15};
                    const double want = g.analytic_sectional_at(p);
                    const double got = sectional(fd, p, 1e-4);
                    CHECK(got == doctest::Approx(want).epsilon(1e-3));
                }
            }
        }
    }
    for (const double k : {-1.0, 0.0, 1.0}) {
        const MetricField g = make_constant_curvature(k);
        const MetricField fd = g.without_analytic_hooks();
        const Rect d = g.domain().shrunk(0.05);
        Rng rng(7);
        for (int i = 0; i < 25; ++i) {
            const Vec2 p{rng.uniform(d.x0, d.x1), rng.uniform(d.y0, d.y1)};
            CHECK(sectional(fd, p, 1e-4) == doctest::Approx(k).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("stencil error shrinks like h^2") {
    const MetricField fd = make_hw1(1.5).without_analytic_hooks();
    const double want = make_hw1(1.5).analytic_sectional_at({0.4, 0.0});
    const double e1 = std::abs(sectional(fd, {0.4, 0.0}, 2e-3) - want);
    const double e2 = std::abs(sectional(fd, {0.4, 0.0}, 1e-3) - want);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("curvature form is a bivector form") {
    const MetricField g = make_hw2(1.7);
    const Vec2 p{0.45, -0.2};
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    const double base = riemann_form(g, p, e1, e2, e1, e2, 1e-4);
    const double base_sec = base / wedge_norm(g.at(p), e1, e2);

    // antisymmetry in each slot pair and symmetry under pair swap
    CHECK(riemann_form(g, p, e2, e1, e1, e2, 1e-4) == doctest::Approx(-base).epsilon(1e-10));
    CHECK(riemann_form(g, p, e1, e2, e2, e1, 1e-4) == doctest::Approx(-base).epsilon(1e-10));

    // invariance of sec under change of the spanning pair
    Rng rng(31);
    for (int i = 0; i < 30; ++i) {
        const Vec2 v{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Vec2 w{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (std::abs(cross(v, w)) < 0.1) continue;
        const double form = riemann_form(g, p, v, w, v, w, 1e-4);
        const double sec = form / wedge_norm(g.at(p), v, w);
        CHECK(sec == doctest::Approx(base_sec).epsilon(1e-7));
    }
}

TEST_CASE("boundary margins are enforced") {
    const MetricField fd = make_hw1(1.5).without_analytic_hooks();
    CHECK_THROWS_AS(christoffel(fd, {1.0, 0.0}, 1e-3), std::domain_error);
    CHECK_THROWS_AS(sectional(fd, {0.9999, 0.0}, 1e-3), std::domain_error);
    CHECK_NOTHROW(sectional(fd, {0.99, 0.0}, 1e-3));
}

TEST_CASE("lattice curvature of a smoothed constant curvature metric") {
    for (const double k : {0.6, -0.8}) {
        const MetricField g = make_constant_curvature(k);
        const SampledMetric sm = smooth_metric(g, make_mollifier("bump"), 0.05, 161);
        // smoothing wobbles curvature by O(eps^2); the lattice stencil must land
        // within that band, not at machine precision
        for (int j = 20; j <= sm.ny - 21; j += 24)
            for (int i = 20; i <= sm.nx - 21; i += 24)
                CHECK(lattice_sectional(sm, i, j) == doctest::Approx(k).epsilon(2e-2));
    }
}

TEST_CASE("bound scan slack behaves on constant curvature") {
    const MetricField g = make_constant_curvature(1.0);
    const Rect region{-0.25, 0.25, -0.25, 0.25};
    const std::vector<double> eps{0.1, 0.05};
    const auto upper = curvature_bound_scan(g, make_mollifier("bump"), region, eps, 1.0,
                                            BoundDirection::upper, 161);
    REQUIRE(upper.entries.size() == 2);
    // smoothing a k = 1 metric can push curvature a hair above 1, but the
    // overshoot must shrink with eps
    CHECK(std::abs(upper.entries[1].slack) <= std::abs(upper.entries[0].slack) + 1e-12);
    CHECK(upper.entries[1].slack > -1e-2);

    const auto lower = curvature_bound_scan(g, make_mollifier("bump"), region, eps, 1.0,
                                            BoundDirection::lower, 161);
    CHECK(lower.entries[1].slack > -1e-2);
    CHECK(lower.entries[1].min_sec == doctest::Approx(1.0).epsilon(5e-2));

    // region that pokes outside the shrunk domain is rejected
    CHECK_THROWS_AS(curvature_bound_scan(g, make_mollifier("bump"), Rect{-5, 5, -5, 5}, eps, 1.0,
                                         BoundDirection::lower, 161),
                    std::invalid_argument);
}
