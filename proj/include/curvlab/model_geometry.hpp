#pragma once

#include <array>
#include <stdexcept>

#include "curvlab/geom.hpp"

namespace curvlab {

// triangle data that cannot be realized in the model plane of the requested curvature
struct InadmissibleTriangle : std::domain_error {
    using std::domain_error::domain_error;
};

// diameter of the model plane of curvature k: pi/sqrt(k) for k > 0, infinite otherwise
double model_diameter(double k);

// below this |k| the constant-curvature laws switch to the Euclidean law with a
// first-order k-correction; the exact forms would divide ~0 by ~0 at k = 0
inline constexpr double kModelCurvatureEps = 1e-8;

// relative slop used when validating triangle data (absorbs rounding in inputs
// that come out of distance computations)
inline constexpr double kTriangleRelTol = 1e-9;

// side opposite the angle alpha in a triangle with adjacent sides b, c in the
// model plane of curvature k. Result is clamped to [|b-c|, min(b+c, diameter)].
double model_side(double k, double b, double c, double alpha);

// can (a, b, c) be realized as a triangle with positive adjacent sides b, c?
// Checks b,c > 0, the triangle inequality, side caps and the perimeter bound
// perimeter <= 2*diameter - tau with tau = 1e-9 * diameter (k > 0 only).
bool triangle_admissible(double k, double a, double b, double c,
                         double rel_tol = kTriangleRelTol);

// angle opposite side a (at the vertex joining b and c); inverse of model_side.
// Collinear degenerate data map to the boundary values: a = b + c gives pi,
// a = |b - c| gives 0. Throws InadmissibleTriangle on data that fails
// triangle_admissible beyond rel_tol.
double model_angle(double k, double a, double b, double c,
                   double rel_tol = kTriangleRelTol);

// A point of the model plane M^2(k). For k = 0 the pair is Cartesian; for
// k != 0 it is geodesic polar about a fixed basepoint: (distance from the
// basepoint, bearing). Distances depend on the bearing only through its
// difference, so the chart origin direction is arbitrary but fixed.
using ModelPoint = Vec2;

// geodesic distance between two chart points of M^2(k)
double model_point_distance(double k, const ModelPoint& p, const ModelPoint& q);

// point at geodesic distance s from base along the given bearing. For k != 0
// the bearing is measured at base against the geodesic running back to the
// chart basepoint; for k = 0 it is the absolute direction angle.
ModelPoint model_translate(double k, const ModelPoint& base, double s, double bearing);

struct ModelTriangle {
    double k = 0.0;
    // comparison triangle vertices; first at the chart basepoint, second on the
    // zero bearing (k = 0: on the positive x-axis)
    std::array<ModelPoint, 3> v{};
};

// comparison triangle for the side lengths (d01, d12, d20); throws
// InadmissibleTriangle when the data fits no triangle at curvature k
ModelTriangle model_triangle(double k, double d01, double d12, double d20,
                             double rel_tol = kTriangleRelTol);

} // namespace curvlab
