#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/geom.hpp"
#include "curvlab/metric_field.hpp"

namespace curvlab {

// smoothing produced a tensor that fails the positivity check at some node
struct SpdViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// radial averaging kernel supported in the unit ball with unit integral
struct Mollifier {
    std::string name;
    // normalized radial density: rho(r) for r in [0,1], 0 beyond
    std::function<double(double)> density;

    double operator()(double r) const { return r >= 1.0 ? 0.0 : density(r); }
};

// profiles: "bump" = exp(-1/(1-r^2)), "wendland" = (1-r)^4 (4r+1); the
// normalization constant makes the integral over the unit disk 1
Mollifier make_mollifier(const std::string& profile);

// metric samples on a uniform node grid (row-major, y-major rows)
struct SampledMetric {
    std::string name;
    Rect rect;
    int nx = 0, ny = 0;
    double epsilon = 0.0; // smoothing radius that produced the samples
    std::vector<Sym2> values;

    double hx() const { return rect.width() / (nx - 1); }
    double hy() const { return rect.height() / (ny - 1); }
    double spacing() const { return std::max(hx(), hy()); }

    const Sym2& node(int i, int j) const { return values[std::size_t(j) * nx + i]; }
    Sym2& node(int i, int j) { return values[std::size_t(j) * nx + i]; }
    // end nodes land exactly on the rect corners so a saved grid reloads bit for bit
    Vec2 point(int i, int j) const {
        return {i == nx - 1 ? rect.x1 : rect.x0 + hx() * i,
                j == ny - 1 ? rect.y1 : rect.y0 + hy() * j};
    }

    // bilinear interpolation of the three components
    Sym2 value_at(const Vec2& p) const;

    // wrap as a MetricField over the sample rectangle
    MetricField as_field() const;
};

struct SampledScalar {
    Rect rect;
    int nx = 0, ny = 0;
    std::vector<double> values;

    double node(int i, int j) const { return values[std::size_t(j) * nx + i]; }
    double value_at(const Vec2& p) const;
};

// mollified metric on the domain shrunk by eps per side, sampled on a
// resolution^2 grid; convolution by tensor-product midpoint quadrature with
// the kernel sampled at >= 17x17 nodes (more when eps spans many grid cells).
// Discrete kernel weights are normalized to sum exactly to one, so constant
// fields are reproduced and nonnegative scalars stay nonnegative.
SampledMetric smooth_metric(const MetricField& field, const Mollifier& mollifier, double eps,
                            int resolution);

SampledScalar smooth_scalar(const std::function<double(const Vec2&)>& f, const Rect& domain,
                            const Mollifier& mollifier, double eps, int resolution);

// CSV schema: header "x,y,g11,g12,g22", one node per row, x fastest
void save_metric_csv(const SampledMetric& sm, const std::string& path);
SampledMetric load_metric_csv(const std::string& path);

struct DistanceConvergenceReport {
    std::vector<double> epsilons;
    // max over pairs of |d_eps - d| / d per schedule entry
    std::vector<double> max_rel_deviation;
    std::vector<Vec2> pair_p, pair_q;
    std::vector<double> base_distance;
    std::vector<std::vector<double>> eps_distance; // [schedule entry][pair]
    bool non_increasing = false; // within the 10% noise allowance
};

// true when every step satisfies s[i+1] <= s[i] * (1 + noise)
bool non_increasing_within(const std::vector<double>& s, double noise);

// seeded point pairs in usable with chart separation at least min_sep; on
// metrics with g >= Id the chart separation also bounds the metric distance
// from below
std::vector<std::pair<Vec2, Vec2>> sample_point_pairs(const Rect& usable, int n, double min_sep,
                                                      std::uint64_t seed);

// Smooths the field along a decreasing eps schedule and compares pathspace
// distances of the sample pairs against the unsmoothed-field baseline. Every
// distance, the baseline included, is measured on one lattice over the rect
// usable at the largest eps, and each deviation prices both metrics over the
// same pair of refined candidate curves (keeping the per-metric minimum), so
// discretization bias and refinement residue cancel out of the deviations
// instead of flooring them once the smoothing perturbation gets small. Pairs
// must lie in that rect; a pair with p = q deviates by zero by convention.
DistanceConvergenceReport distance_convergence_experiment(
    const MetricField& field, const Mollifier& mollifier, const std::vector<double>& eps_schedule,
    const std::vector<std::pair<Vec2, Vec2>>& sample_pairs, int resolution);

} // namespace curvlab
