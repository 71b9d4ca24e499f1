#pragma once

#include <vector>

#include "curvlab/geom.hpp"
#include "curvlab/metric_field.hpp"
#include "curvlab/mollify.hpp"

namespace curvlab {

// Gamma[i][j][k] = Gamma^i_jk, symmetric in (j, k)
struct Christoffel {
    double g[2][2][2] = {};
};

enum class CurvatureMethod { finite_difference, analytic };

// Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_jl - d_l g_jk); metric derivatives
// come from the field's analytic hook when present, else central differences
// with step h. Requires p at distance >= 2h from the domain boundary.
Christoffel christoffel(const MetricField& field, const Vec2& p, double h);

// sectional curvature of the coordinate plane at p. finite_difference builds
// R^l_ijk from Gamma and central differences of Gamma (margin 3h);
// analytic requires the field's analytic_sectional hook.
double sectional(const MetricField& field, const Vec2& p, double h,
                 CurvatureMethod method = CurvatureMethod::finite_difference);

struct CurvatureSample {
    Vec2 point;
    double sectional = 0.0;
    Christoffel gamma;
    CurvatureMethod method = CurvatureMethod::finite_difference;
    double h = 0.0;
};

CurvatureSample curvature_sample(const MetricField& field, const Vec2& p, double h,
                                 CurvatureMethod method = CurvatureMethod::finite_difference);

// curvature operator as a bilinear form on bivectors:
// R(X^Y, V^W) = g(Riem(X,Y)W, V), evaluated by multilinear expansion of R_1212
double riemann_form(const MetricField& field, const Vec2& p, const Vec2& x, const Vec2& y,
                    const Vec2& v, const Vec2& w, double h,
                    CurvatureMethod method = CurvatureMethod::finite_difference);

// sectional curvature from second differences on the sample lattice itself,
// so no interpolation enters the stencils; needs 2 <= i <= nx-3, 2 <= j <= ny-3
double lattice_sectional(const SampledMetric& sm, int i, int j);

enum class BoundDirection { lower, upper };

struct BoundScanEntry {
    double eps = 0.0;
    double min_sec = 0.0;
    double max_sec = 0.0;
    // signed margin of the requested bound: min - k (lower) or k - max (upper);
    // negative means the smoothed metric violates the bound by that much
    double slack = 0.0;
    bool pass = false;
};

struct BoundScanReport {
    BoundDirection direction = BoundDirection::lower;
    double k = 0.0;
    std::vector<BoundScanEntry> entries;
};

// smooths the field along the eps schedule and scans lattice_sectional over
// every sample node inside `region`; resolution is the sampling resolution of
// the smoothed metrics, and region must stay two cells inside the shrunk
// domain of the largest eps
BoundScanReport curvature_bound_scan(const MetricField& field, const Mollifier& mollifier,
                                     const Rect& region, const std::vector<double>& eps_schedule,
                                     double k, BoundDirection direction, int resolution);

} // namespace curvlab
