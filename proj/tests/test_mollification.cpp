#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "curvlab/metric_field.hpp"
#include "curvlab/mollify.hpp"
#include "curvlab/rng.hpp"

using namespace curvlab;

namespace {

// 2d midpoint quadrature of the scaled kernel over its support square,
// independent of the kernel's own radial normalization path
double kernel_mass(const Mollifier& m, double eps, int n) {
    const double h = 2.0 * eps / n;
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = -eps + (i + 0.5) * h;
            const double y = -eps + (j + 0.5) * h;
            sum += m(std::hypot(x, y) / eps) / (eps * eps) * h * h;
        }
    return sum;
}

} // namespace

TEST_CASE("kernel integrates to one") {
    for (const char* name : {"bump", "wendland"}) {
        const Mollifier m = make_mollifier(name);
        CHECK(kernel_mass(m, 1.0, 4000) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(kernel_mass(m, 0.05, 4000) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(m(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(make_mollifier("gauss"), std::invalid_argument);
}

TEST_CASE("smoothing preserves constant metrics") {
    const Sym2 g0{2.0, 0.3, 1.5};
    const MetricField f("const", Rect{-1, 1, -1, 1}, Regularity::smooth,
                        [g0](const Vec2&) { return g0; });
    const SampledMetric sm = smooth_metric(f, make_mollifier("bump"), 0.2, 33);
    for (const Sym2& g : sm.values) {
        CHECK(g.xx == doctest::Approx(g0.xx).epsilon(1e-8));
        CHECK(g.xy == doctest::Approx(g0.xy).epsilon(1e-8));
        CHECK(g.yy == doctest::Approx(g0.yy).epsilon(1e-8));
    }
}

TEST_CASE("smoothing reproduces affine fields exactly away from scaling") {
    // convolution with a symmetric kernel fixes first degree polynomials
    const MetricField f("affine", Rect{-1, 1, -1, 1}, Regularity::smooth, [](const Vec2& p) {
        return Sym2{2.0 + 0.25 * p.x - 0.125 * p.y, 0.05 * p.x, 1.0 + 0.3 * p.y};
    });
    const SampledMetric sm = smooth_metric(f, make_mollifier("wendland"), 0.15, 41);
    for (int j = 0; j < sm.ny; ++j)
        for (int i = 0; i < sm.nx; ++i) {
            const Vec2 p = sm.point(i, j);
            const Sym2 want = f.at(p);
            const Sym2 got = sm.values[std::size_t(j) * sm.nx + i];
            CHECK(got.xx == doctest::Approx(want.xx).epsilon(1e-8));
            CHECK(got.xy == doctest::Approx(want.xy).epsilon(1e-8));
            CHECK(got.yy == doctest::Approx(want.yy).epsilon(1e-8));
        }
}

TEST_CASE("smoothed metrics stay positive definite") {
    Rng rng(11);
    for (const double eps : {0.1, 0.05}) {
        const SampledMetric sm = smooth_metric(make_hw1(1.2), make_mollifier("bump"), eps, 65);
        for (const Sym2& g : sm.values) CHECK(g.positive_definite());
    }
}

TEST_CASE("smoothing a kink straightens it by order eps") {
    // f(x) = |x| mollified: value at 0 grows like c * eps, and the smoothed
    // function dominates the original
    const MetricField f("absx", Rect{-1, 1, -1, 1}, Regularity::c1, [](const Vec2& p) {
        return Sym2{1.0 + std::abs(p.x), 0.0, 1.0};
    });
    double prev = -1.0;
    for (const double eps : {0.2, 0.1, 0.05}) {
        const SampledMetric sm = smooth_metric(f, make_mollifier("bump"), eps, 65);
        // node closest to x = 0
        double best = 1e9, at = 0.0;
        for (int i = 0; i < sm.nx; ++i) {
            const Vec2 p = sm.point(i, sm.ny / 2);
            if (std::abs(p.x) < best) {
                best = std::abs(p.x);
                at = sm.value_at(Vec2{0.0, p.y}).xx;
            }
        }
        const double bump_over = at - 1.0; // excess over |0| = 0
        CHECK(bump_over > 0.0);
        if (prev > 0.0) CHECK(bump_over < prev);
        prev = bump_over;
    }
}

TEST_CASE("smoothed domain shrinks by eps") {
    const MetricField f = make_hw1(1.5);
    const SampledMetric sm = smooth_metric(f, make_mollifier("bump"), 0.25, 33);
    CHECK(sm.rect.x0 == doctest::Approx(-0.75));
    CHECK(sm.rect.x1 == doctest::Approx(0.75));
    CHECK_THROWS_AS(smooth_metric(f, make_mollifier("bump"), 1.2, 33), std::invalid_argument);
    CHECK_THROWS_AS(smooth_metric(f, make_mollifier("bump"), 0.0, 33), std::invalid_argument);
    CHECK_THROWS_AS(smooth_metric(f, make_mollifier("bump"), 0.1, 1), std::invalid_argument);
}

TEST_CASE("sampled metric csv round trip") {
    const SampledMetric sm = smooth_metric(make_hw2(1.5), make_mollifier("wendland"), 0.1, 41);
    const auto path = std::filesystem::temp_directory_path() / "curvlab_roundtrip.csv";
    save_metric_csv(sm, path.string());
    const SampledMetric back = load_metric_csv(path.string());
    REQUIRE(back.nx == sm.nx);
    REQUIRE(back.ny == sm.ny);
    CHECK(back.rect.x0 == sm.rect.x0);
    CHECK(back.rect.y1 == sm.rect.y1);
    for (std::size_t i = 0; i < sm.values.size(); ++i) {
        CHECK(back.values[i].xx == sm.values[i].xx);
        CHECK(back.values[i].xy == sm.values[i].xy);
        CHECK(back.values[i].yy == sm.values[i].yy);
    }
    std::filesystem::remove(path);
}

TEST_CASE("bilinear interpolation hits nodes exactly and stays inside bounds") {
    const SampledMetric sm = smooth_metric(make_hw1(1.5), make_mollifier("bump"), 0.2, 17);
    for (int j = 0; j < sm.ny; ++j)
        for (int i = 0; i < sm.nx; ++i) {
            const Sym2 want = sm.values[std::size_t(j) * sm.nx + i];
            const Sym2 got = sm.value_at(sm.point(i, j));
            CHECK(got.xx == doctest::Approx(want.xx).epsilon(1e-13));
        }
    CHECK_THROWS_AS(sm.value_at({sm.rect.x1 + 0.1, 0.0}), std::domain_error);
}

TEST_CASE("monotone sequence helper tolerates bounded noise") {
    CHECK(non_increasing_within({5.0, 4.0, 3.0}, 0.0));
    CHECK(non_increasing_within({5.0, 5.4, 3.0}, 0.10)); // 8% bump allowed
    CHECK_FALSE(non_increasing_within({5.0, 5.6, 3.0}, 0.10));
    CHECK(non_increasing_within({0.0, 0.0}, 0.0));
}

TEST_CASE("seeded pair sampling respects rect, separation, and determinism") {
    const Rect usable{-0.8, 0.8, -0.8, 0.8};
    const auto pairs = sample_point_pairs(usable, 12, 0.3, 77);
    REQUIRE(pairs.size() == 12);
    for (const auto& [p, q] : pairs) {
        CHECK(usable.contains(p));
        CHECK(usable.contains(q));
        CHECK((p - q).norm() >= 0.3);
    }
    const auto again = sample_point_pairs(usable, 12, 0.3, 77);
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        CHECK(pairs[n].first.x == again[n].first.x);
        CHECK(pairs[n].second.y == again[n].second.y);
    }
    CHECK_THROWS_AS(sample_point_pairs(usable, 1, 10.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_point_pairs(Rect{0.0, 0.0, 0.0, 1.0}, 1, 0.0, 1),
                    std::invalid_argument);
}

TEST_CASE("distance convergence on a flat metric reads as pure lattice agreement") {
    const MetricField flat = make_flat();
    std::vector<std::pair<Vec2, Vec2>> pairs{{{-0.5, -0.5}, {0.5, 0.5}},
                                             {{-0.6, 0.4}, {0.7, -0.1}},
                                             {{0.3, -0.2}, {0.3, -0.2}}}; // p = q: zero by convention
    const auto rep = distance_convergence_experiment(flat, make_mollifier("wendland"),
                                                     {0.2, 0.1}, pairs, 33);
    REQUIRE(rep.max_rel_deviation.size() == 2);
    for (const double dev : rep.max_rel_deviation) CHECK(dev <= 1e-12);
    CHECK(rep.non_increasing);
    CHECK(rep.base_distance[2] == 0.0);
    // straight diagonal across a shared square lattice
    CHECK(rep.base_distance[0] == doctest::Approx(std::hypot(1.0, 1.0)).epsilon(1e-6));

    CHECK_THROWS_AS(distance_convergence_experiment(flat, make_mollifier("wendland"), {},
                                                    pairs, 33),
                    std::invalid_argument);
    CHECK_THROWS_AS(distance_convergence_experiment(flat, make_mollifier("wendland"),
                                                    {0.1, 0.2}, pairs, 33),
                    std::invalid_argument);
    const std::vector<std::pair<Vec2, Vec2>> outside{{{-0.95, 0.0}, {0.5, 0.5}}};
    CHECK_THROWS_AS(distance_convergence_experiment(flat, make_mollifier("wendland"),
                                                    {0.2, 0.1}, outside, 33),
                    std::invalid_argument);
}

TEST_CASE("distance deviations shrink with eps on the singular catalog metric") {
    const MetricField field = make_hw1(1.5);
    const auto pairs = sample_point_pairs(field.domain().shrunk(0.2), 6, 0.3, 20260819);
    const auto rep = distance_convergence_experiment(field, make_mollifier("bump"),
                                                     {0.2, 0.1, 0.05}, pairs, 65);
    REQUIRE(rep.max_rel_deviation.size() == 3);
    CHECK(rep.non_increasing);
    CHECK(rep.max_rel_deviation.back() < 0.02);
    // the largest eps perturbs the metric well above lattice noise
    CHECK(rep.max_rel_deviation.front() > rep.max_rel_deviation.back());
}
