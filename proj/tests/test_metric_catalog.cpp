#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curvlab/metric_field.hpp"
#include "curvlab/rng.hpp"

using namespace curvlab;

namespace {

// Gauss curvature of a conformal metric e^{2 phi} Id is -e^{-2 phi} (lap phi);
// evaluated with 5 point FD so it is independent of the catalog's closed forms
double conformal_curvature_fd(const std::function<double(double, double)>& phi, double x, double y,
                              double h) {
    const double lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) + phi(x, y - h) -
                        4.0 * phi(x, y)) /
                       (h * h);
    return -std::exp(-2.0 * phi(x, y)) * lap;
}

// Gauss curvature of dx^2 + f(x) dy^2 is -(sqrt(f))'' / sqrt(f)
double warped_curvature_fd(const std::function<double(double)>& f, double x, double h) {
    const auto r = [&](double t) { return std::sqrt(f(t)); };
    const double second = (r(x + h) - 2.0 * r(x) + r(x - h)) / (h * h);
    return -second / r(x);
}

} // namespace

TEST_CASE("hw1 closed-form curvature matches a conformal oracle") {
    for (const double lambda : {1.2, 1.5, 1.8}) {
        const MetricField g = make_hw1(lambda);
        REQUIRE(g.has_analytic_sectional());
        const auto phi = [&](double x, double y) {
            (void)y;
            return 0.5 * std::log(1.0 + std::pow(std::abs(x), lambda));
        };
        for (const double x : {0.25, 0.4, -0.55, 0.7, -0.85}) {
            const double want = conformal_curvature_fd(phi, x, 0.3, 1e-4);
            const double got = g.analytic_sectional_at({x, 0.3});
            CHECK(got == doctest::Approx(want).epsilon(2e-5));
        }
    }
}

TEST_CASE("hw2 closed-form curvature matches a warped-product oracle") {
    for (const double lambda : {1.2, 1.5, 1.8}) {
        const MetricField g = make_hw2(lambda);
        REQUIRE(g.has_analytic_sectional());
        const auto f = [&](double x) { return 1.0 - std::pow(std::abs(x), lambda); };
        for (const double x : {0.25, -0.4, 0.55, -0.7, 0.85}) {
            const double want = warped_curvature_fd(f, x, 1e-4);
            const double got = g.analytic_sectional_at({x, -0.2});
            CHECK(got == doctest::Approx(want).epsilon(2e-5));
        }
    }
}

TEST_CASE("hw1 curvature is unbounded below near the singular line") {
    // sec ~ -lambda (lambda - 1)/2 |x|^(lambda-2) near x = 0
    const MetricField g = make_hw1(1.5);
    double prev = 0.0;
    bool first = true;
    for (const double x : {1e-2, 1e-4, 1e-8, 1e-12}) {
        const double sec = g.analytic_sectional_at({x, 0.0});
        CHECK(sec < 0.0);
        if (!first) CHECK(sec < prev);
        prev = sec;
        first = false;
    }
    CHECK(prev < -1e5);
}

TEST_CASE("hw2 curvature is unbounded above near the singular line") {
    const MetricField g = make_hw2(1.5);
    double prev = 0.0;
    bool first = true;
    for (const double x : {1e-2, 1e-4, 1e-8, 1e-12}) {
        const double sec = g.analytic_sectional_at({x, 0.0});
        CHECK(sec > 0.0);
        if (!first) CHECK(sec > prev);
        prev = sec;
        first = false;
    }
    CHECK(prev > 1e5);
}

TEST_CASE("constant curvature metric has constant curvature") {
    for (const double k : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
        const MetricField g = make_constant_curvature(k);
        Rng rng(17);
        for (int i = 0; i < 50; ++i) {
            const Rect d = g.domain().shrunk(0.05);
            const Vec2 p{rng.uniform(d.x0, d.x1), rng.uniform(d.y0, d.y1)};
            CHECK(g.analytic_sectional_at(p) == doctest::Approx(k).epsilon(1e-12));
        }
    }
}

TEST_CASE("analytic metric derivatives match difference quotients") {
    Rng rng(23);
    for (const char* spec : {"hw1(1.3)", "hw2(1.7)", "constk(0.8)", "constk(-1.2)"}) {
        const MetricField g = parse_metric_spec(spec);
        REQUIRE(g.has_derivative());
        const Rect d = g.domain().shrunk(0.1);
        for (int i = 0; i < 40; ++i) {
            Vec2 p{rng.uniform(d.x0, d.x1), rng.uniform(d.y0, d.y1)};
            if (std::abs(p.x) < 0.05) p.x += 0.1; // keep clear of the kink
            const double h = 1e-6;
            const auto dg = g.derivative_at(p);
            const Sym2 gx1 = g.at({p.x + h, p.y}), gx0 = g.at({p.x - h, p.y});
            const Sym2 gy1 = g.at({p.x, p.y + h}), gy0 = g.at({p.x, p.y - h});
            CHECK(dg[0].xx == doctest::Approx((gx1.xx - gx0.xx) / (2 * h)).epsilon(1e-4));
            CHECK(dg[0].yy == doctest::Approx((gx1.yy - gx0.yy) / (2 * h)).epsilon(1e-4));
            CHECK(dg[1].xx == doctest::Approx((gy1.xx - gy0.xx) / (2 * h)).epsilon(1e-4));
            CHECK(dg[1].yy == doctest::Approx((gy1.yy - gy0.yy) / (2 * h)).epsilon(1e-4));
        }
    }
}

TEST_CASE("wedge norm") {
    const Sym2 id{1.0, 0.0, 1.0};
    CHECK(wedge_norm(id, {1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(wedge_norm(id, {1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(0.0));
    // |v ^ w|^2 = det(g) (v x w)^2
    const Sym2 g{2.0, 0.5, 3.0};
    const Vec2 v{1.0, 2.0}, w{-1.0, 1.5};
    const double cr = v.x * w.y - v.y * w.x;
    CHECK(wedge_norm(g, v, w) == doctest::Approx(g.det() * cr * cr).epsilon(1e-12));
}

TEST_CASE("nondegeneracy scan") {
    const auto rep = nondegeneracy_scan(make_hw1(1.5), 41);
    CHECK(rep.lambda_min == doctest::Approx(1.0).epsilon(1e-9)); // attained on x = 0
    CHECK(rep.lambda_max == doctest::Approx(2.0).epsilon(1e-9)); // attained at |x| = 1

    const auto rep2 = nondegeneracy_scan(make_hw2(1.5), 41);
    CHECK(rep2.lambda_min > 0.0);
    CHECK(rep2.lambda_min == doctest::Approx(1.0 - std::pow(0.9, 1.5)).epsilon(1e-9));

    // a genuinely degenerate field must throw with the offending node
    const MetricField bad("bad", Rect{-1, 1, -1, 1}, Regularity::smooth,
                          [](const Vec2& p) { return Sym2{p.x, 0.0, 1.0}; });
    CHECK_THROWS_AS(nondegeneracy_scan(bad, 11), DegenerateMetric);
}

TEST_CASE("evaluation outside the chart is an error") {
    const MetricField g = make_hw1(1.5);
    CHECK_THROWS_AS(g.at({1.5, 0.0}), std::domain_error);
    CHECK_NOTHROW(g.at({1.0, 1.0}));
    // tiny rounding slop just outside the boundary is clamped, not fatal
    CHECK_NOTHROW(g.at({1.0 + 1e-14, 0.0}));
}

TEST_CASE("catalog parsing") {
    CHECK(parse_metric_spec("flat").name() == "flat");
    CHECK(parse_metric_spec("hw1(1.5)").name() == "hw1(1.5)");
    CHECK(parse_metric_spec("constk(-2)").analytic_sectional_at({0.1, 0.1}) ==
          doctest::Approx(-2.0));
    CHECK_THROWS_AS(parse_metric_spec("hw3(1.5)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric_spec("hw1(2.5)"), std::invalid_argument); // lambda outside (1,2)
    CHECK_THROWS_AS(parse_metric_spec("hw1(1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric_spec("hw1(abc)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric_spec(""), std::invalid_argument);
}

TEST_CASE("restricted fields delegate and clip") {
    const MetricField g = make_hw1(1.5);
    const Rect sub{0.3, 0.7, -0.2, 0.2};
    const MetricField r = restrict_field(g, sub);
    CHECK(r.domain().x0 == doctest::Approx(0.3));
    const Vec2 p{0.5, 0.0};
    CHECK(r.at(p).xx == doctest::Approx(g.at(p).xx));
    CHECK(r.has_analytic_sectional());
    CHECK(r.analytic_sectional_at(p) == doctest::Approx(g.analytic_sectional_at(p)));
    CHECK_THROWS_AS(r.at({0.1, 0.0}), std::domain_error);
    CHECK_THROWS_AS(restrict_field(g, Rect{-2.0, 0.5, 0.0, 0.1}), std::invalid_argument);
}
