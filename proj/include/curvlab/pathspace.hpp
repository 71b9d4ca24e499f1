#pragma once

#include <cstdint>
#include <vector>

#include "curvlab/geom.hpp"
#include "curvlab/metric_field.hpp"

namespace curvlab {

// length of the polyline under the trapezoid rule per straight chart segment
double curve_length(const MetricField& field, const std::vector<Vec2>& pts);

struct GridPathResult {
    std::vector<Vec2> path; // exact endpoints spliced onto the lattice path
    double length = 0.0;
    int resolution = 0;
    double cell = 0.0; // max grid spacing, the unit for path separation tests
};

// shortest lattice path on a resolution^2 grid over the field domain;
// neighborhood 8 (kings moves) or 16 (kings + knights). Upper bound on d_g.
GridPathResult grid_distance(const MetricField& field, const Vec2& p, const Vec2& q,
                             int resolution, int neighborhood = 16);

// coordinate-descent shortening: per sweep each interior vertex is moved by
// golden-section line searches on a local 2-D patch (normal to the neighbor
// chord, then along it); a move is kept only when it strictly lowers the two
// adjacent segment lengths, so the length never increases and stationary paths
// are left untouched. Returns the final length. window_cap > 0 bounds the
// per-vertex search window, which otherwise scales with the local segments.
double refine_path(const MetricField& field, std::vector<Vec2>& path, int sweeps,
                   double window_cap = 0.0);

struct IvpResult {
    std::vector<double> t;
    std::vector<Vec2> pos;
    std::vector<Vec2> vel;
    bool exited_domain = false;
    double t_end = 0.0;
    // max relative deviation of sqrt(g(v,v)) from its initial value
    double speed_drift = 0.0;
};

// classical RK4 on the geodesic equation x'' = -Gamma(x)(x', x'); stops early
// (reported, not an error) when the trajectory leaves the chart domain
IvpResult geodesic_ivp(const MetricField& field, const Vec2& p, const Vec2& v, double t_max,
                       double dt);

struct BvpSolution {
    double angle = 0.0; // initial direction
    double length = 0.0;
    double miss = 0.0; // chart distance to the target at convergence
    std::vector<Vec2> path;
};

// shooting solver: unit-speed geodesics from p launched at n_starts directions
// (one drawn per equal sector of the circle, deterministic in the seed),
// polished by damped Newton with clamped steps on (angle, arrival time);
// solutions hitting q within 1e-5 chart distance are kept and clustered by
// launch angle, distinct meaning angles more than 1e-3 apart. Starts run
// concurrently; the result does not depend on scheduling.
std::vector<BvpSolution> geodesic_bvp(const MetricField& field, const Vec2& p, const Vec2& q,
                                      int n_starts, std::uint64_t seed = 0);

struct MultiplicityReport {
    int count = 0;
    double min_length = 0.0;
    double cell = 0.0;
    std::vector<std::vector<Vec2>> paths;
    std::vector<double> lengths;
};

// distinct near-minimizing paths from p to q: refinement is seeded from the
// lattice path and, when both endpoints sit on the x = 0 axis of an
// x-symmetric domain, also from its x-mirror (and the mirrored refinement).
// Distinct = lengths within 0.5% of the minimum, pairwise Hausdorff
// separation > 2 grid cells.
MultiplicityReport minimizer_multiplicity(const MetricField& field, const Vec2& p, const Vec2& q,
                                          int resolution, int sweeps = 60);

// symmetric Hausdorff distance between polylines (point-to-segment based)
double path_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

} // namespace curvlab
