#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace curvlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// z-component of the wedge of two chart vectors
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// symmetric 2x2 tensor, the only matrix shape the lab needs
struct Sym2 {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    Sym2() = default;
    Sym2(double xx_, double xy_, double yy_) : xx(xx_), xy(xy_), yy(yy_) {}

    static Sym2 identity() { return {1.0, 0.0, 1.0}; }
    static Sym2 scale(double s) { return {s, 0.0, s}; }

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }

    // quadratic form v^T g v
    double quad(const Vec2& v) const {
        return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y;
    }
    // bilinear form v^T g w
    double inner(const Vec2& v, const Vec2& w) const {
        return xx * v.x * w.x + xy * (v.x * w.y + v.y * w.x) + yy * v.y * w.y;
    }

    Sym2 inverse() const {
        const double d = det();
        if (d == 0.0) throw std::domain_error("Sym2::inverse: singular tensor");
        return {yy / d, -xy / d, xx / d};
    }

    Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    Sym2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
    Sym2& operator+=(const Sym2& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }

    // Sylvester: leading minor and determinant both positive
    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }

    // eigenvalues of a symmetric 2x2, ascending
    std::array<double, 2> eigenvalues() const {
        const double m = 0.5 * trace();
        const double r = std::hypot(0.5 * (xx - yy), xy);
        return {m - r, m + r};
    }
};

inline Sym2 operator*(double s, const Sym2& g) { return g * s; }

// closed axis-aligned rectangle, the chart domain of every metric field
struct Rect {
    double x0 = -1.0, x1 = 1.0;
    double y0 = -1.0, y1 = 1.0;

    Rect() = default;
    Rect(double x0_, double x1_, double y0_, double y1_) : x0(x0_), x1(x1_), y0(y0_), y1(y1_) {
        if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("Rect: empty rectangle");
    }

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }

    bool contains(const Vec2& p, double margin = 0.0) const {
        return p.x >= x0 + margin && p.x <= x1 - margin &&
               p.y >= y0 + margin && p.y <= y1 - margin;
    }

    // distance from p to the rectangle boundary (negative outside)
    double boundary_distance(const Vec2& p) const {
        return std::min(std::min(p.x - x0, x1 - p.x), std::min(p.y - y0, y1 - p.y));
    }

    Rect shrunk(double margin) const {
        if (2.0 * margin >= width() || 2.0 * margin >= height())
            throw std::invalid_argument("Rect::shrunk: margin swallows the rectangle");
        return {x0 + margin, x1 - margin, y0 + margin, y1 - margin};
    }

    Vec2 clamp(const Vec2& p) const {
        return {std::min(std::max(p.x, x0), x1), std::min(std::max(p.y, y0), y1)};
    }
};

} // namespace curvlab
