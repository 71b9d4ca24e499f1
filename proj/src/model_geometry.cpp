#include "curvlab/model_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace curvlab {

namespace {

double sq(double x) { return x * x; }

// half-angle mass of alpha: sin^2(alpha/2), the quantity all three laws share
double half_angle_mass(double alpha) {
    const double s = std::sin(0.5 * alpha);
    return s * s;
}

void validate_side_inputs(double k, double b, double c, double& alpha) {
    if (!(b >= 0.0) || !(c >= 0.0))
        throw std::invalid_argument("model_side: negative side length");
    if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(alpha))
        throw std::invalid_argument("model_side: non-finite input");
    const double pi = std::acos(-1.0);
    if (alpha < -1e-12 || alpha > pi + 1e-12)
        throw std::invalid_argument("model_side: angle outside [0, pi]");
    alpha = std::clamp(alpha, 0.0, pi);
    if (k > 0.0) {
        const double w = model_diameter(k);
        if (b > w * (1.0 + 1e-12) || c > w * (1.0 + 1e-12))
            throw std::invalid_argument("model_side: side exceeds model diameter");
    }
}

} // namespace

double model_diameter(double k) {
    if (k > 0.0) return std::acos(-1.0) / std::sqrt(k);
    return std::numeric_limits<double>::infinity();
}

double model_side(double k, double b, double c, double alpha) {
    validate_side_inputs(k, b, c, alpha);
    const double m = half_angle_mass(alpha);
    double a;
    if (k > kModelCurvatureEps) {
        // sin^2(sa/2) = sin^2(s(b-c)/2) + sin(sb) sin(sc) sin^2(alpha/2)
        const double s = std::sqrt(k);
        double h = sq(std::sin(0.5 * s * (b - c))) + std::sin(s * b) * std::sin(s * c) * m;
        h = std::clamp(h, 0.0, 1.0);
        a = 2.0 / s * std::asin(std::sqrt(h));
    } else if (k < -kModelCurvatureEps) {
        // sinh^2(sa/2) = sinh^2(s(b-c)/2) + sinh(sb) sinh(sc) sin^2(alpha/2)
        const double s = std::sqrt(-k);
        const double h =
            sq(std::sinh(0.5 * s * (b - c))) + std::sinh(s * b) * std::sinh(s * c) * m;
        a = 2.0 / s * std::asinh(std::sqrt(std::max(h, 0.0)));
    } else {
        // Euclidean law plus the first-order k-correction of the same expansion
        const double d = b - c;
        const double a0sq = d * d + 4.0 * b * c * m;
        const double corr = (sq(a0sq) - sq(d * d) - 8.0 * m * b * c * (b * b + c * c)) / 12.0;
        a = std::sqrt(std::max(a0sq + k * corr, 0.0));
    }
    const double lo = std::fabs(b - c);
    const double hi = std::min(b + c, model_diameter(k));
    return std::clamp(a, lo, hi);
}

bool triangle_admissible(double k, double a, double b, double c, double rel_tol) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return false;
    if (!(a >= 0.0) || !(b > 0.0) || !(c > 0.0)) return false;
    const double slop = rel_tol * std::max(1.0, a + b + c);
    if (a > b + c + slop) return false;
    if (a < std::fabs(b - c) - slop) return false;
    if (k > 0.0) {
        const double w = model_diameter(k);
        if (a > w + slop || b > w + slop || c > w + slop) return false;
        if (a + b + c > 2.0 * w - 1e-9 * w) return false;
    }
    return true;
}

double model_angle(double k, double a, double b, double c, double rel_tol) {
    if (!triangle_admissible(k, a, b, c, rel_tol)) {
        throw InadmissibleTriangle("model_angle: no triangle with sides (" +
                                   std::to_string(a) + ", " + std::to_string(b) + ", " +
                                   std::to_string(c) + ") at curvature " + std::to_string(k));
    }
    const double d = std::fabs(b - c);
    const double sigma = b + c;
    a = std::clamp(a, d, std::min(sigma, model_diameter(k)));

    // tan^2(alpha/2) = P / Q with both factors nonnegative on admissible data;
    // the atan2 form stays accurate at both ends alpha -> 0 and alpha -> pi
    double p, q;
    if (k > kModelCurvatureEps) {
        const double s = std::sqrt(k);
        p = std::sin(0.5 * s * (a + d)) * std::sin(0.5 * s * (a - d));
        q = std::sin(0.5 * s * (sigma + a)) * std::sin(0.5 * s * (sigma - a));
    } else if (k < -kModelCurvatureEps) {
        const double s = std::sqrt(-k);
        p = std::sinh(0.5 * s * (a + d)) * std::sinh(0.5 * s * (a - d));
        q = std::sinh(0.5 * s * (sigma + a)) * std::sinh(0.5 * s * (sigma - a));
    } else {
        // Euclidean factors with the first-order k-correction; the correction
        // factors are kept away from zero as a pure numeric guard
        p = (a * a - d * d) * std::max(1.0 - k * (a * a + d * d) / 12.0, 0.5);
        q = (sigma * sigma - a * a) * std::max(1.0 - k * (sigma * sigma + a * a) / 12.0, 0.5);
    }
    p = std::max(p, 0.0);
    q = std::max(q, 0.0);
    if (p == 0.0 && q == 0.0) return 0.0; // possible only for point-like numeric dust
    return 2.0 * std::atan2(std::sqrt(p), std::sqrt(q));
}

double model_point_distance(double k, const ModelPoint& p, const ModelPoint& q) {
    if (std::fabs(k) <= kModelCurvatureEps) return (p - q).norm();
    const double pi = std::acos(-1.0);
    double dphi = std::fabs(std::fmod(p.y - q.y, 2.0 * pi));
    if (dphi > pi) dphi = 2.0 * pi - dphi;
    return model_side(k, p.x, q.x, dphi);
}

ModelPoint model_translate(double k, const ModelPoint& base, double s, double bearing) {
    if (!(s >= 0.0)) throw std::invalid_argument("model_translate: negative distance");
    if (std::fabs(k) <= kModelCurvatureEps)
        return base + Vec2{s * std::cos(bearing), s * std::sin(bearing)};
    if (s == 0.0) return base;

    const double pi = std::acos(-1.0);
    double chi = std::fmod(bearing, 2.0 * pi);
    if (chi < 0.0) chi += 2.0 * pi;

    const double r1 = base.x;
    if (r1 == 0.0) return {std::min(s, model_diameter(k)), chi};

    const double interior = chi <= pi ? chi : 2.0 * pi - chi;
    const double r2 = model_side(k, r1, s, interior);
    if (r2 < 1e-14) return {0.0, 0.0};
    double dphi = 0.0;
    if (triangle_admissible(k, s, r1, r2))
        dphi = model_angle(k, s, r1, r2);
    const double side = chi <= pi ? 1.0 : -1.0;
    return {r2, base.y + side * dphi};
}

ModelTriangle model_triangle(double k, double d01, double d12, double d20, double rel_tol) {
    if (!(d01 >= 0.0) || !(d12 >= 0.0) || !(d20 >= 0.0))
        throw InadmissibleTriangle("model_triangle: negative side length");
    ModelTriangle t;
    t.k = k;
    t.v[0] = {0.0, 0.0};

    const double slop = rel_tol * std::max(1.0, d01 + d12 + d20);
    if (d01 <= slop) {
        // first two vertices coincide; the data must be a point pair
        if (std::fabs(d12 - d20) > slop)
            throw InadmissibleTriangle("model_triangle: inconsistent degenerate sides");
        t.v[1] = {0.0, 0.0};
        t.v[2] = {d20, 0.0};
        return t;
    }
    if (d20 <= slop) {
        if (std::fabs(d12 - d01) > slop)
            throw InadmissibleTriangle("model_triangle: inconsistent degenerate sides");
        t.v[1] = {d01, 0.0};
        t.v[2] = {0.0, 0.0};
        return t;
    }

    // angle at vertex 0, spanned by the sides to vertices 1 and 2
    const double theta = model_angle(k, d12, d01, d20, rel_tol);
    t.v[1] = {d01, 0.0};
    if (std::fabs(k) <= kModelCurvatureEps)
        t.v[2] = {d20 * std::cos(theta), d20 * std::sin(theta)};
    else
        t.v[2] = {d20, theta};
    return t;
}

} // namespace curvlab
