#include "curvlab/metric_field.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace curvlab {

namespace {

double sq(double x) { return x * x; }

// signed |x|^p derivative helper: d/dx |x|^p = p |x|^(p-1) sgn(x), zero at x = 0 for p > 1
double dabs_pow(double x, double p) {
    if (x == 0.0) return 0.0;
    return p * std::pow(std::fabs(x), p - 1.0) * (x > 0.0 ? 1.0 : -1.0);
}

void require_lambda(double lambda, const char* who) {
    if (!(lambda > 1.0) || !(lambda < 2.0))
        throw std::invalid_argument(std::string(who) + ": lambda must lie in (1, 2)");
}

// compact parameter rendering so catalog names round-trip through parse_metric_spec
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string to_string(Regularity r) {
    switch (r) {
        case Regularity::smooth: return "smooth";
        case Regularity::c1: return "c1";
        case Regularity::sampled: return "sampled";
    }
    return "unknown";
}

Sym2 MetricField::at(const Vec2& p) const {
    const double slop = 1e-12 * std::max(1.0, std::max(domain_.width(), domain_.height()));
    if (!domain_.contains(p, -slop))
        throw std::domain_error("MetricField(" + name_ + "): evaluation outside domain at (" +
                                std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    return value_(domain_.clamp(p));
}

std::array<Sym2, 2> MetricField::derivative_at(const Vec2& p) const {
    if (!derivative_) throw std::logic_error("MetricField(" + name_ + "): no analytic derivative");
    return derivative_(p);
}

double MetricField::analytic_sectional_at(const Vec2& p) const {
    if (!analytic_sectional_)
        throw std::logic_error("MetricField(" + name_ + "): no analytic sectional curvature");
    return analytic_sectional_(p);
}

double wedge_norm(const Sym2& g, const Vec2& v, const Vec2& w) {
    return g.quad(v) * g.quad(w) - sq(g.inner(v, w));
}

MetricField make_flat(Rect domain) {
    MetricField f("flat", domain, Regularity::smooth,
                  [](const Vec2&) { return Sym2::identity(); });
    f.with_derivative([](const Vec2&) { return std::array<Sym2, 2>{Sym2{0, 0, 0}, Sym2{0, 0, 0}}; });
    f.with_analytic_sectional([](const Vec2&) { return 0.0; });
    return f;
}

MetricField make_hw1(double lambda) {
    require_lambda(lambda, "make_hw1");
    MetricField f("hw1(" + num(lambda) + ")", Rect{-1, 1, -1, 1}, Regularity::c1,
                  [lambda](const Vec2& p) {
                      const double g = 1.0 + std::pow(std::fabs(p.x), lambda);
                      return Sym2{g, 0.0, g};
                  });
    f.with_derivative([lambda](const Vec2& p) {
        const double gx = dabs_pow(p.x, lambda);
        return std::array<Sym2, 2>{Sym2{gx, 0.0, gx}, Sym2{0.0, 0.0, 0.0}};
    });
    // sec = lambda |x|^(lambda-2) (1 + |x|^lambda - lambda) / (2 (1 + |x|^lambda)^3)
    f.with_analytic_sectional([lambda](const Vec2& p) {
        const double ax = std::fabs(p.x);
        const double al = std::pow(ax, lambda);
        return lambda * std::pow(ax, lambda - 2.0) * (1.0 + al - lambda) /
               (2.0 * sq(1.0 + al) * (1.0 + al));
    });
    return f;
}

MetricField make_hw2(double lambda) {
    require_lambda(lambda, "make_hw2");
    MetricField f("hw2(" + num(lambda) + ")", Rect{-0.9, 0.9, -1, 1}, Regularity::c1,
                  [lambda](const Vec2& p) {
                      return Sym2{1.0, 0.0, 1.0 - std::pow(std::fabs(p.x), lambda)};
                  });
    f.with_derivative([lambda](const Vec2& p) {
        return std::array<Sym2, 2>{Sym2{0.0, 0.0, -dabs_pow(p.x, lambda)}, Sym2{0.0, 0.0, 0.0}};
    });
    // sec = lambda |x|^(lambda-2) (2 lambda + |x|^lambda (2 - lambda) - 2) / (4 (|x|^lambda - 1)^2)
    f.with_analytic_sectional([lambda](const Vec2& p) {
        const double ax = std::fabs(p.x);
        const double al = std::pow(ax, lambda);
        return lambda * std::pow(ax, lambda - 2.0) * (2.0 * lambda + al * (2.0 - lambda) - 2.0) /
               (4.0 * sq(al - 1.0));
    });
    return f;
}

MetricField make_constant_curvature(double k) {
    Rect domain{-1, 1, -1, 1};
    if (k < 0.0) {
        // chart square inscribed in the disk where the conformal factor stays positive
        const double half = 0.9 / std::sqrt(-k) / std::sqrt(2.0);
        domain = Rect{-half, half, -half, half};
    }
    MetricField f("constk(" + num(k) + ")", domain, Regularity::smooth,
                  [k](const Vec2& p) {
                      const double c = 4.0 / sq(1.0 + k * p.norm2());
                      return Sym2{c, 0.0, c};
                  });
    f.with_derivative([k](const Vec2& p) {
        const double u = 1.0 + k * p.norm2();
        const double cx = -16.0 * k * p.x / (u * u * u);
        const double cy = -16.0 * k * p.y / (u * u * u);
        return std::array<Sym2, 2>{Sym2{cx, 0.0, cx}, Sym2{cy, 0.0, cy}};
    });
    f.with_analytic_sectional([k](const Vec2&) { return k; });
    return f;
}

NondegeneracyReport nondegeneracy_scan(const MetricField& field, int resolution) {
    if (resolution < 2) throw std::invalid_argument("nondegeneracy_scan: resolution < 2");
    const Rect& d = field.domain();
    NondegeneracyReport rep;
    rep.lambda_min = std::numeric_limits<double>::infinity();
    rep.lambda_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            const Vec2 p{d.x0 + d.width() * i / (resolution - 1),
                         d.y0 + d.height() * j / (resolution - 1)};
            const auto ev = field.at(p).eigenvalues();
            if (ev[0] < rep.lambda_min) { rep.lambda_min = ev[0]; rep.argmin = p; }
            if (ev[1] > rep.lambda_max) { rep.lambda_max = ev[1]; rep.argmax = p; }
        }
    }
    if (!(rep.lambda_min > 0.0))
        throw DegenerateMetric("nondegeneracy_scan(" + field.name() + "): eigenvalue " +
                               std::to_string(rep.lambda_min) + " at (" +
                               std::to_string(rep.argmin.x) + ", " +
                               std::to_string(rep.argmin.y) + ")");
    return rep;
}

MetricField parse_metric_spec(const std::string& spec) {
    const auto open = spec.find('(');
    if (open == std::string::npos) {
        if (spec == "flat") return make_flat();
        throw std::invalid_argument("parse_metric_spec: unknown metric '" + spec + "'");
    }
    if (spec.back() != ')')
        throw std::invalid_argument("parse_metric_spec: malformed metric '" + spec + "'");
    const std::string head = spec.substr(0, open);
    const std::string arg_str = spec.substr(open + 1, spec.size() - open - 2);
    double arg;
    try {
        std::size_t used = 0;
        arg = std::stod(arg_str, &used);
        if (used != arg_str.size()) throw std::invalid_argument("trailing characters");
    } catch (...) {
        throw std::invalid_argument("parse_metric_spec: bad parameter in '" + spec + "'");
    }
    if (head == "hw1") return make_hw1(arg);
    if (head == "hw2") return make_hw2(arg);
    if (head == "constk") return make_constant_curvature(arg);
    throw std::invalid_argument("parse_metric_spec: unknown metric '" + spec + "'");
}

MetricField restrict_field(const MetricField& field, const Rect& sub) {
    const Rect& dom = field.domain();
    const double slop = 1e-12 * std::max(1.0, std::max(dom.width(), dom.height()));
    if (sub.x0 < dom.x0 - slop || sub.x1 > dom.x1 + slop || sub.y0 < dom.y0 - slop ||
        sub.y1 > dom.y1 + slop)
        throw std::invalid_argument("restrict_field: sub rectangle leaves the domain of " +
                                    field.name());
    auto base = std::make_shared<MetricField>(field);
    MetricField out(field.name(), sub, field.regularity(),
                    [base](const Vec2& p) { return base->at(p); });
    if (base->has_derivative())
        out.with_derivative([base](const Vec2& p) { return base->derivative_at(p); });
    if (base->has_analytic_sectional())
        out.with_analytic_sectional([base](const Vec2& p) { return base->analytic_sectional_at(p); });
    return out;
}

} // namespace curvlab
