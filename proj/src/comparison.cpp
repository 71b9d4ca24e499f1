#include "curvlab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "curvlab/parallel.hpp"
#include "curvlab/pathspace.hpp"

namespace curvlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinSeparation = 1e-4;

} // namespace

// ---------------------------------------------------------------- model plane

ModelPlaneOracle::ModelPlaneOracle(double k) : k_(k) {
    if (!std::isfinite(k)) throw std::invalid_argument("ModelPlaneOracle: k must be finite");
}

std::string ModelPlaneOracle::name() const {
    return "model_plane(k=" + std::to_string(k_) + ")";
}

double ModelPlaneOracle::distance(const Vec2& p, const Vec2& q) const {
    return model_point_distance(k_, p, q);
}

double ModelPlaneOracle::max_radius(const Vec2&) const {
    return k_ > 0.0 ? 0.45 * model_diameter(k_) : 1e9;
}

Vec2 ModelPlaneOracle::sample_in_ball(const Vec2& center, double radius, Rng& rng) const {
    if (!(radius > 0.0) || radius > max_radius(center))
        throw std::invalid_argument("ModelPlaneOracle: ball radius out of range");
    const double r = radius * std::sqrt(rng.next_double());
    const double bearing = 2.0 * kPi * rng.next_double();
    return model_translate(k_, center, r, bearing);
}

double ModelPlaneOracle::distance_error(double) const { return 0.0; }

// ---------------------------------------------------------------- chart field

FieldOracle::FieldOracle(MetricField field, int resolution, int sweeps, double rel_error)
    : field_(std::move(field)), resolution_(resolution), sweeps_(sweeps), rel_error_(rel_error) {
    if (resolution_ < 32) throw std::invalid_argument("FieldOracle: resolution < 32");
    if (sweeps_ < 0) throw std::invalid_argument("FieldOracle: negative sweep count");
    sqrt_lambda_min_ = std::sqrt(nondegeneracy_scan(field_, 33).lambda_min);
}

std::string FieldOracle::name() const { return "field(" + field_.name() + ")"; }

double FieldOracle::distance(const Vec2& p, const Vec2& q) const {
    GridPathResult r = grid_distance(field_, p, q, resolution_, 16);
    return refine_path(field_, r.path, sweeps_);
}

double FieldOracle::max_radius(const Vec2& center) const {
    // keep the whole ball well separated from the chart boundary
    return field_.domain().boundary_distance(center) / 3.0;
}

Vec2 FieldOracle::sample_in_ball(const Vec2& center, double radius, Rng& rng) const {
    if (!(radius > 0.0) || radius > max_radius(center) * (1.0 + 1e-9))
        throw std::invalid_argument("FieldOracle: ball radius out of range");
    const Rect& dom = field_.domain();

    // chart reach of the ball from a local eigenvalue floor
    const double lam0 = field_.at(center).eigenvalues()[0];
    double reach = 2.0 * radius / std::sqrt(lam0);
    Rect box{std::max(dom.x0, center.x - reach), std::min(dom.x1, center.x + reach),
             std::max(dom.y0, center.y - reach), std::min(dom.y1, center.y + reach)};
    double lam_box = lam0;
    for (int j = 0; j < 9; ++j)
        for (int i = 0; i < 9; ++i) {
            const Vec2 v{box.x0 + box.width() * i / 8.0, box.y0 + box.height() * j / 8.0};
            lam_box = std::min(lam_box, field_.at(v).eigenvalues()[0]);
        }
    reach = radius / std::sqrt(lam_box);

    for (int attempt = 0; attempt < 256; ++attempt) {
        const double r = reach * std::sqrt(rng.next_double());
        const double phi = 2.0 * kPi * rng.next_double();
        const Vec2 cand{center.x + r * std::cos(phi), center.y + r * std::sin(phi)};
        if (!dom.contains(cand)) continue;
        if (distance(center, cand) <= radius) return cand;
    }
    throw std::runtime_error("FieldOracle: ball sampling failed around (" +
                             std::to_string(center.x) + ", " + std::to_string(center.y) + ")");
}

double FieldOracle::distance_error(double d) const { return rel_error_ * d; }

double FieldOracle::separation(const Vec2& p, const Vec2& q) const {
    return sqrt_lambda_min_ * (p - q).norm();
}

// ---------------------------------------------------------------- fixed table

MatrixOracle::MatrixOracle(std::vector<Vec2> points, std::vector<std::vector<double>> dist,
                           double abs_error)
    : points_(std::move(points)), dist_(std::move(dist)), abs_error_(abs_error) {
    const std::size_t n = points_.size();
    if (dist_.size() != n) throw std::invalid_argument("MatrixOracle: table shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (dist_[i].size() != n) throw std::invalid_argument("MatrixOracle: table not square");
        if (std::abs(dist_[i][i]) > 1e-12)
            throw std::invalid_argument("MatrixOracle: nonzero diagonal");
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(dist_[i][j] - dist_[j][i]) > 1e-12)
                throw std::invalid_argument("MatrixOracle: table not symmetric");
    }
}

std::string MatrixOracle::name() const { return "matrix(" + std::to_string(points_.size()) + ")"; }

std::size_t MatrixOracle::index_of(const Vec2& p) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if ((points_[i] - p).norm() < 1e-9) return i;
    throw std::invalid_argument("MatrixOracle: point not in the table");
}

double MatrixOracle::distance(const Vec2& p, const Vec2& q) const {
    return dist_[index_of(p)][index_of(q)];
}

double MatrixOracle::max_radius(const Vec2& center) const {
    const std::size_t c = index_of(center);
    return *std::max_element(dist_[c].begin(), dist_[c].end());
}

Vec2 MatrixOracle::sample_in_ball(const Vec2& center, double radius, Rng& rng) const {
    const std::size_t c = index_of(center);
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (dist_[c][i] <= radius) in.push_back(i);
    if (in.empty()) throw std::runtime_error("MatrixOracle: empty ball");
    return points_[in[rng.next_below(in.size())]];
}

double MatrixOracle::distance_error(double) const { return abs_error_; }

// ------------------------------------------------------------------ verdicts

namespace {

// shared finite difference propagation of distance errors into a slack value
double propagate_slack_error(const std::vector<double>& d, const std::vector<double>& err,
                             const std::function<std::optional<double>(const std::vector<double>&)>& slack_of) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (err[i] <= 0.0) continue;
        const double h = std::max(1e-9, 0.1 * err[i]);
        std::vector<double> dp = d, dm = d;
        dp[i] += h;
        dm[i] = std::max(0.0, dm[i] - h);
        const auto fp = slack_of(dp), fm = slack_of(dm);
        double grad;
        if (fp && fm)
            grad = (*fp - *fm) / (dp[i] - dm[i]);
        else if (fp)
            grad = (*fp - *slack_of(d)) / h;
        else if (fm)
            grad = (*slack_of(d) - *fm) / (d[i] - dm[i]);
        else {
            // perturbation knocks the quadruple out of admissibility both ways;
            // treat the whole angle budget as uncertain
            total += kPi;
            continue;
        }
        total += std::abs(grad) * err[i];
    }
    return total;
}

} // namespace

QuadrupleVerdict cbb_quadruple(double k, const DistanceOracle& oracle, const Vec2& p,
                               const std::array<Vec2, 3>& x) {
    QuadrupleVerdict v;
    for (int i = 0; i < 3; ++i)
        if ((x[i] - p).norm() < 1e-14) {
            v.status = VerdictStatus::pass;
            v.detail = "base point coincides with a comparison point";
            return v;
        }

    // distances: 0..2 radial, 3..5 opposite sides (01, 12, 20)
    std::vector<double> d(6), err(6);
    for (int i = 0; i < 3; ++i) d[i] = oracle.distance(p, x[i]);
    d[3] = oracle.distance(x[0], x[1]);
    d[4] = oracle.distance(x[1], x[2]);
    d[5] = oracle.distance(x[2], x[0]);
    for (int i = 0; i < 6; ++i) err[i] = oracle.distance_error(d[i]);

    const auto slack_of = [k](const std::vector<double>& dd) -> std::optional<double> {
        try {
            const double s = model_angle(k, dd[3], dd[0], dd[1]) +
                             model_angle(k, dd[4], dd[1], dd[2]) +
                             model_angle(k, dd[5], dd[2], dd[0]);
            return 2.0 * kPi - s;
        } catch (const InadmissibleTriangle&) {
            return std::nullopt;
        }
    };

    const auto s0 = slack_of(d);
    if (!s0) {
        v.status = VerdictStatus::inadmissible;
        v.detail = "a comparison triangle is inadmissible in the model plane";
        return v;
    }
    v.slack = *s0;
    v.slack_error = propagate_slack_error(d, err, slack_of);
    v.marginal = std::abs(v.slack) < v.slack_error;
    v.status = v.slack >= -kVerdictTol ? VerdictStatus::pass : VerdictStatus::fail;
    return v;
}

QuadrupleVerdict cat_quadruple(double k, const DistanceOracle& oracle, const Vec2& p1,
                               const Vec2& p2, const std::array<Vec2, 2>& x) {
    QuadrupleVerdict v;

    // distances: 0 = p1 p2, 1 = p1 x1, 2 = p1 x2, 3 = p2 x1, 4 = p2 x2, 5 = x1 x2
    std::vector<double> d(6), err(6);
    d[0] = oracle.distance(p1, p2);
    d[1] = oracle.distance(p1, x[0]);
    d[2] = oracle.distance(p1, x[1]);
    d[3] = oracle.distance(p2, x[0]);
    d[4] = oracle.distance(p2, x[1]);
    d[5] = oracle.distance(x[0], x[1]);
    for (int i = 0; i < 6; ++i) err[i] = oracle.distance_error(d[i]);

    // slack is the larger of the two angle comparison margins; nullopt when a
    // needed model angle is undefined
    const auto slack_of = [k](const std::vector<double>& dd) -> std::optional<double> {
        try {
            const double a1 = model_angle(k, dd[5], dd[1], dd[2]);
            const double b1 = model_angle(k, dd[3], dd[0], dd[1]);
            const double c1 = model_angle(k, dd[4], dd[0], dd[2]);
            const double a2 = model_angle(k, dd[5], dd[3], dd[4]);
            const double b2 = model_angle(k, dd[1], dd[0], dd[3]);
            const double c2 = model_angle(k, dd[2], dd[0], dd[4]);
            return std::max(b1 + c1 - a1, b2 + c2 - a2);
        } catch (const InadmissibleTriangle&) {
            return std::nullopt;
        }
    };

    const auto s0 = slack_of(d);
    if (!s0) {
        // quadruples whose comparison angles do not exist impose no constraint
        v.status = VerdictStatus::pass;
        v.via_undefined_angle = true;
        v.detail = "an angle of the quadruple is undefined in the model plane";
        return v;
    }
    v.slack = *s0;
    v.slack_error = propagate_slack_error(d, err, slack_of);
    v.marginal = std::abs(v.slack) < v.slack_error;
    v.status = v.slack >= -kVerdictTol ? VerdictStatus::pass : VerdictStatus::fail;
    return v;
}

// ------------------------------------------------------------------ sampling

std::vector<QuadrupleSample> sample_quadruples(const DistanceOracle& oracle, const Vec2& center,
                                               double radius, int n, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("sample_quadruples: need a positive count");
    Rng rng(derive_seed(seed, 0x71756164));
    std::vector<QuadrupleSample> out;
    out.reserve(std::size_t(n));
    for (int q = 0; q < n; ++q) {
        QuadrupleSample s;
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            for (auto& pt : s.pts) pt = oracle.sample_in_ball(center, radius, rng);
            ok = true;
            for (int i = 0; i < 4 && ok; ++i)
                for (int j = i + 1; j < 4 && ok; ++j)
                    if (oracle.separation(s.pts[i], s.pts[j]) < kMinSeparation) ok = false;
        }
        if (!ok)
            throw std::runtime_error("sample_quadruples: could not separate points in the ball");
        out.push_back(s);
    }
    return out;
}

ComparisonReport comparison_scan(double k, bool cbb, const DistanceOracle& oracle,
                                 const Vec2& center, double radius, int n_quadruples,
                                 std::uint64_t seed) {
    ComparisonReport rep;
    rep.k = k;
    rep.cbb = cbb;
    const auto samples = sample_quadruples(oracle, center, radius, n_quadruples, seed);
    rep.verdicts.resize(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        const auto& s = samples[i];
        rep.verdicts[i] = cbb ? cbb_quadruple(k, oracle, s.pts[0], {s.pts[1], s.pts[2], s.pts[3]})
                              : cat_quadruple(k, oracle, s.pts[0], s.pts[1], {s.pts[2], s.pts[3]});
    });
    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const QuadrupleVerdict& v = rep.verdicts[i];
        switch (v.status) {
            case VerdictStatus::pass: ++rep.n_pass; break;
            case VerdictStatus::fail: ++rep.n_fail; break;
            case VerdictStatus::inadmissible: ++rep.n_inadmissible; break;
        }
        if (v.marginal) ++rep.n_marginal;
        if (v.status != VerdictStatus::inadmissible && !v.via_undefined_angle &&
            v.slack < rep.worst_slack) {
            rep.worst_slack = v.slack;
            rep.worst = samples[i];
        }
    }
    if (rep.worst_slack == std::numeric_limits<double>::infinity()) rep.worst_slack = 0.0;
    return rep;
}

namespace {

// a batch passes when nothing fails definitively; marginal failures are noise
bool batch_passes(const ComparisonReport& rep) {
    for (const QuadrupleVerdict& v : rep.verdicts)
        if (v.status == VerdictStatus::fail && !v.marginal) return false;
    return true;
}

} // namespace

RadiusEstimate comparison_radius_estimate(double k, bool cbb, const DistanceOracle& oracle,
                                          const Vec2& center, double radius_cap, int n_quadruples,
                                          std::uint64_t seed) {
    const double cap = std::min(radius_cap, oracle.max_radius(center));
    if (!(cap > 0.0)) throw std::invalid_argument("comparison_radius_estimate: empty radius range");
    RadiusEstimate est;
    est.tol = 0.01 * cap;
    est.n_quadruples = n_quadruples;

    const auto passes = [&](double r) {
        return batch_passes(comparison_scan(k, cbb, oracle, center, r, n_quadruples, seed));
    };
    if (passes(cap)) {
        est.radius = cap;
        return est;
    }
    double lo = 0.0, hi = cap; // passes at lo (vacuously), fails at hi
    while (hi - lo > est.tol) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid))
            lo = mid;
        else
            hi = mid;
    }
    est.radius = lo;
    return est;
}

CriticalCurvature critical_curvature_search(bool cbb, const DistanceOracle& oracle,
                                            const Vec2& center, double radius, double k_lo,
                                            double k_hi, int n_quadruples, std::uint64_t seed) {
    if (!(k_lo < k_hi)) throw std::invalid_argument("critical_curvature_search: empty bracket");
    const auto samples = sample_quadruples(oracle, center, radius, n_quadruples, seed);

    const auto passes = [&](double k) {
        std::vector<char> fail(samples.size(), 0);
        parallel_for(samples.size(), [&](std::size_t i) {
            const auto& s = samples[i];
            const QuadrupleVerdict v =
                cbb ? cbb_quadruple(k, oracle, s.pts[0], {s.pts[1], s.pts[2], s.pts[3]})
                    : cat_quadruple(k, oracle, s.pts[0], s.pts[1], {s.pts[2], s.pts[3]});
            fail[i] = v.status == VerdictStatus::fail && !v.marginal;
        });
        return std::none_of(fail.begin(), fail.end(), [](char f) { return f != 0; });
    };

    // cbb passes on the low side of the boundary, cat on the high side
    const bool lo_pass = passes(k_lo), hi_pass = passes(k_hi);
    const bool expect_lo = cbb, expect_hi = !cbb;
    if (lo_pass != expect_lo || hi_pass != expect_hi)
        throw std::invalid_argument(
            "critical_curvature_search: bracket does not straddle the pass/fail boundary");

    double lo = k_lo, hi = k_hi;
    const double width_goal = (k_hi - k_lo) * 1e-3;
    while (hi - lo > width_goal) {
        const double mid = 0.5 * (lo + hi);
        const bool mid_pass = passes(mid);
        // shrink toward the boundary keeping the pass side fixed by mode
        if (cbb == mid_pass)
            lo = mid;
        else
            hi = mid;
    }
    CriticalCurvature out;
    out.k = 0.5 * (lo + hi);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.n_quadruples = n_quadruples;
    return out;
}

} // namespace curvlab
