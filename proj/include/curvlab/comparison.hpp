#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/geom.hpp"
#include "curvlab/metric_field.hpp"
#include "curvlab/model_geometry.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

// A metric measure space reduced to what comparison testing needs: distances
// between labelled points and a way to sample points near a center.
class DistanceOracle {
  public:
    virtual ~DistanceOracle() = default;
    virtual std::string name() const = 0;
    virtual double distance(const Vec2& p, const Vec2& q) const = 0;
    // largest ball radius sample_in_ball accepts around this center
    virtual double max_radius(const Vec2& center) const = 0;
    virtual Vec2 sample_in_ball(const Vec2& center, double radius, Rng& rng) const = 0;
    // one sided absolute error estimate for a reported distance
    virtual double distance_error(double d) const = 0;
    // cheap lower bound on distance, used to reject nearly coincident samples
    virtual double separation(const Vec2& p, const Vec2& q) const { return distance(p, q); }
};

// Model plane M^2(k) in geodesic polar coordinates about the origin. Distances
// are exact, so synthetic verdicts against it are ground truth.
class ModelPlaneOracle final : public DistanceOracle {
  public:
    explicit ModelPlaneOracle(double k);
    std::string name() const override;
    double distance(const Vec2& p, const Vec2& q) const override;
    double max_radius(const Vec2& center) const override;
    Vec2 sample_in_ball(const Vec2& center, double radius, Rng& rng) const override;
    double distance_error(double d) const override;
    double curvature() const { return k_; }

  private:
    double k_;
};

// Chart metric backed by the shortest path machinery. Distances carry the
// discretization error of the grid plus refinement, modelled as a calibrated
// relative constant.
class FieldOracle final : public DistanceOracle {
  public:
    FieldOracle(MetricField field, int resolution, int sweeps = 40,
                double rel_error = kFieldOracleRelError);
    std::string name() const override;
    double distance(const Vec2& p, const Vec2& q) const override;
    double max_radius(const Vec2& center) const override;
    Vec2 sample_in_ball(const Vec2& center, double radius, Rng& rng) const override;
    double distance_error(double d) const override;
    double separation(const Vec2& p, const Vec2& q) const override;
    const MetricField& field() const { return field_; }

    // calibrated against exact distances on the constant curvature catalog
    static constexpr double kFieldOracleRelError = 4e-3;

  private:
    MetricField field_;
    int resolution_;
    int sweeps_;
    double rel_error_;
    double sqrt_lambda_min_ = 1.0;
};

// Fixed distance table over explicit points, for tests and tiny examples.
class MatrixOracle final : public DistanceOracle {
  public:
    MatrixOracle(std::vector<Vec2> points, std::vector<std::vector<double>> dist,
                 double abs_error = 0.0);
    std::string name() const override;
    double distance(const Vec2& p, const Vec2& q) const override;
    double max_radius(const Vec2& center) const override;
    Vec2 sample_in_ball(const Vec2& center, double radius, Rng& rng) const override;
    double distance_error(double d) const override;

  private:
    std::size_t index_of(const Vec2& p) const;
    std::vector<Vec2> points_;
    std::vector<std::vector<double>> dist_;
    double abs_error_;
};

enum class VerdictStatus { pass, fail, inadmissible };

struct QuadrupleVerdict {
    VerdictStatus status = VerdictStatus::inadmissible;
    double slack = 0.0;       // signed margin, >= 0 passes
    double slack_error = 0.0; // propagated distance-error sensitivity
    bool marginal = false;    // |slack| smaller than its error estimate
    bool via_undefined_angle = false;
    std::string detail;
};

// angle comparison tolerance for pass/fail decisions
inline constexpr double kVerdictTol = 1e-7;

// Lower bound test: the three model angles of (p; x1, x2, x3) sum to at most
// 2 pi when curvature >= k holds.
QuadrupleVerdict cbb_quadruple(double k, const DistanceOracle& oracle, const Vec2& p,
                               const std::array<Vec2, 3>& x);

// Upper bound test on (p1, p2; x1, x2): the angle at p1 between x1 and x2 is
// at most the sum of the angles the geodesic [p1 p2] makes with [p1 x1] and
// [p1 x2], and likewise at p2; a quadruple with an undefined model angle
// passes by convention and is flagged.
QuadrupleVerdict cat_quadruple(double k, const DistanceOracle& oracle, const Vec2& p1,
                               const Vec2& p2, const std::array<Vec2, 2>& x);

struct QuadrupleSample {
    std::array<Vec2, 4> pts; // cbb: p, x1..x3; cat: p1, p2, x1, x2
};

// Deterministic batch of admissible-looking quadruples inside the ball.
std::vector<QuadrupleSample> sample_quadruples(const DistanceOracle& oracle, const Vec2& center,
                                               double radius, int n, std::uint64_t seed);

struct ComparisonReport {
    double k = 0.0;
    bool cbb = true; // false means the cat test
    int n_pass = 0;
    int n_fail = 0;
    int n_inadmissible = 0;
    int n_marginal = 0;
    double worst_slack = 0.0; // most negative slack seen among definite verdicts
    QuadrupleSample worst;
    std::vector<QuadrupleVerdict> verdicts;
};

ComparisonReport comparison_scan(double k, bool cbb, const DistanceOracle& oracle,
                                 const Vec2& center, double radius, int n_quadruples,
                                 std::uint64_t seed);

// Largest ball radius around center at which every sampled quadruple passes
// (or is inadmissible); bisection with a relative grid of 1e-2.
struct RadiusEstimate {
    double radius = 0.0;
    double tol = 0.0;
    int n_quadruples = 0;
};

RadiusEstimate comparison_radius_estimate(double k, bool cbb, const DistanceOracle& oracle,
                                          const Vec2& center, double radius_cap, int n_quadruples,
                                          std::uint64_t seed);

// Bisect over k for the boundary between passing and failing comparison tests
// on a fixed quadruple batch. For cbb the passing side is k <= k*, for cat it
// is k >= k*. Throws std::invalid_argument when the bracket does not actually
// straddle the boundary.
struct CriticalCurvature {
    double k = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int n_quadruples = 0;
};

CriticalCurvature critical_curvature_search(bool cbb, const DistanceOracle& oracle,
                                            const Vec2& center, double radius, double k_lo,
                                            double k_hi, int n_quadruples, std::uint64_t seed);

} // namespace curvlab
