#include "curvlab/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curvlab/parallel.hpp"
#include "curvlab/pathspace.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

namespace {

// \int_0^1 f(r) 2 pi r dr by composite Simpson; plenty for the smooth profiles
double radial_integral(const std::function<double(double)>& f, int n = 4096) {
    const double pi = std::acos(-1.0);
    const double h = 1.0 / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = i * h, b = a + h, m = a + 0.5 * h;
        acc += h / 6.0 * (f(a) * a + 4.0 * f(m) * m + f(b) * b);
    }
    return 2.0 * pi * acc;
}

struct Kernel {
    int m = 0;          // nodes per axis
    double eps = 0.0;
    std::vector<double> w;      // normalized weights, sum exactly 1
    std::vector<double> offset; // midpoint offsets in [-eps, eps]
};

Kernel build_kernel(const Mollifier& mollifier, double eps, double grid_spacing) {
    Kernel k;
    k.eps = eps;
    int m = 17;
    if (grid_spacing > 0.0) m = std::max(m, int(std::ceil(2.0 * eps / grid_spacing)));
    m = std::min(m, 49);
    k.m = m;
    k.offset.resize(m);
    const double cell = 2.0 * eps / m;
    for (int i = 0; i < m; ++i) k.offset[i] = -eps + (i + 0.5) * cell;
    k.w.assign(std::size_t(m) * m, 0.0);
    double total = 0.0;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const double r = std::hypot(k.offset[i], k.offset[j]) / eps;
            const double wij = mollifier(r);
            k.w[std::size_t(j) * m + i] = wij;
            total += wij;
        }
    if (!(total > 0.0)) throw std::invalid_argument("smooth_metric: kernel vanishes on the grid");
    for (double& wij : k.w) wij /= total;
    return k;
}

void check_smoothing_args(const Rect& domain, double eps, int resolution, const char* who) {
    if (!(eps > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
    if (2.0 * eps >= std::min(domain.width(), domain.height()))
        throw std::invalid_argument(std::string(who) + ": eps " + std::to_string(eps) +
                                    " too large for the domain");
    if (resolution < 2) throw std::invalid_argument(std::string(who) + ": resolution < 2");
}

} // namespace

Mollifier make_mollifier(const std::string& profile) {
    std::function<double(double)> base;
    if (profile == "bump") {
        base = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    } else if (profile == "wendland") {
        base = [](double r) {
            if (r >= 1.0) return 0.0;
            const double t = 1.0 - r;
            const double t2 = t * t;
            return t2 * t2 * (4.0 * r + 1.0);
        };
    } else {
        throw std::invalid_argument("make_mollifier: unknown profile '" + profile + "'");
    }
    const double c = 1.0 / radial_integral(base);
    return Mollifier{profile, [base, c](double r) { return r < 1.0 ? c * base(r) : 0.0; }};
}

Sym2 SampledMetric::value_at(const Vec2& p) const {
    const double slop = 1e-12 * std::max(1.0, std::max(rect.width(), rect.height()));
    if (!rect.contains(p, -slop))
        throw std::domain_error("SampledMetric(" + name + "): evaluation outside rect at (" +
                                std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    const double fx = std::clamp((p.x - rect.x0) / hx(), 0.0, double(nx - 1));
    const double fy = std::clamp((p.y - rect.y0) / hy(), 0.0, double(ny - 1));
    const int i = std::min(int(fx), nx - 2);
    const int j = std::min(int(fy), ny - 2);
    const double tx = fx - i, ty = fy - j;
    const Sym2 a = node(i, j) * ((1 - tx) * (1 - ty)) + node(i + 1, j) * (tx * (1 - ty));
    const Sym2 b = node(i, j + 1) * ((1 - tx) * ty) + node(i + 1, j + 1) * (tx * ty);
    return a + b;
}

MetricField SampledMetric::as_field() const {
    SampledMetric copy = *this;
    return MetricField(name, rect, Regularity::sampled,
                       [copy](const Vec2& p) { return copy.value_at(p); });
}

double SampledScalar::value_at(const Vec2& p) const {
    const double hx = rect.width() / (nx - 1), hy = rect.height() / (ny - 1);
    const double fx = std::clamp((p.x - rect.x0) / hx, 0.0, double(nx - 1));
    const double fy = std::clamp((p.y - rect.y0) / hy, 0.0, double(ny - 1));
    const int i = std::min(int(fx), nx - 2);
    const int j = std::min(int(fy), ny - 2);
    const double tx = fx - i, ty = fy - j;
    return node(i, j) * (1 - tx) * (1 - ty) + node(i + 1, j) * tx * (1 - ty) +
           node(i, j + 1) * (1 - tx) * ty + node(i + 1, j + 1) * tx * ty;
}

SampledMetric smooth_metric(const MetricField& field, const Mollifier& mollifier, double eps,
                            int resolution) {
    check_smoothing_args(field.domain(), eps, resolution, "smooth_metric");
    SampledMetric sm;
    sm.name = field.name() + " * " + mollifier.name + "(" + std::to_string(eps) + ")";
    sm.rect = field.domain().shrunk(eps);
    sm.nx = sm.ny = resolution;
    sm.epsilon = eps;
    sm.values.assign(std::size_t(resolution) * resolution, Sym2{});

    const Kernel kern = build_kernel(mollifier, eps, sm.spacing());
    parallel_for(std::size_t(resolution) * resolution, [&](std::size_t idx) {
        const int i = int(idx % resolution), j = int(idx / resolution);
        const Vec2 p{sm.rect.x0 + sm.hx() * i, sm.rect.y0 + sm.hy() * j};
        Sym2 acc{0.0, 0.0, 0.0};
        for (int b = 0; b < kern.m; ++b)
            for (int a = 0; a < kern.m; ++a) {
                const double w = kern.w[std::size_t(b) * kern.m + a];
                if (w == 0.0) continue;
                acc += field.at({p.x - kern.offset[a], p.y - kern.offset[b]}) * w;
            }
        sm.values[idx] = acc;
    });

    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i)
            if (!sm.node(i, j).positive_definite())
                throw SpdViolation("smooth_metric: tensor not positive definite at node (" +
                                   std::to_string(sm.rect.x0 + sm.hx() * i) + ", " +
                                   std::to_string(sm.rect.y0 + sm.hy() * j) + ")");
    return sm;
}

SampledScalar smooth_scalar(const std::function<double(const Vec2&)>& f, const Rect& domain,
                            const Mollifier& mollifier, double eps, int resolution) {
    check_smoothing_args(domain, eps, resolution, "smooth_scalar");
    SampledScalar ss;
    ss.rect = domain.shrunk(eps);
    ss.nx = ss.ny = resolution;
    ss.values.assign(std::size_t(resolution) * resolution, 0.0);
    const double hx = ss.rect.width() / (resolution - 1), hy = ss.rect.height() / (resolution - 1);
    const Kernel kern = build_kernel(mollifier, eps, std::max(hx, hy));
    parallel_for(std::size_t(resolution) * resolution, [&](std::size_t idx) {
        const int i = int(idx % resolution), j = int(idx / resolution);
        const Vec2 p{ss.rect.x0 + hx * i, ss.rect.y0 + hy * j};
        double acc = 0.0;
        for (int b = 0; b < kern.m; ++b)
            for (int a = 0; a < kern.m; ++a) {
                const double w = kern.w[std::size_t(b) * kern.m + a];
                if (w == 0.0) continue;
                acc += w * f({p.x - kern.offset[a], p.y - kern.offset[b]});
            }
        ss.values[idx] = acc;
    });
    return ss;
}

void save_metric_csv(const SampledMetric& sm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_metric_csv: cannot open " + path);
    out.precision(17);
    out << "x,y,g11,g12,g22\n";
    for (int j = 0; j < sm.ny; ++j)
        for (int i = 0; i < sm.nx; ++i) {
            const Sym2& g = sm.node(i, j);
            const Vec2 p = sm.point(i, j);
            out << p.x << ',' << p.y << ',' << g.xx << ',' << g.xy << ',' << g.yy << '\n';
        }
    if (!out) throw std::runtime_error("save_metric_csv: write failed for " + path);
}

SampledMetric load_metric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_metric_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y,g11,g12,g22", 0) != 0)
        throw std::runtime_error("load_metric_csv: bad header in " + path);
    std::vector<double> xs, ys;
    std::vector<Sym2> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[5];
        char comma;
        for (int f = 0; f < 5; ++f) {
            if (!(row >> v[f])) throw std::runtime_error("load_metric_csv: bad row '" + line + "'");
            if (f < 4 && !(row >> comma)) throw std::runtime_error("load_metric_csv: bad row");
        }
        xs.push_back(v[0]);
        ys.push_back(v[1]);
        vals.push_back({v[2], v[3], v[4]});
    }
    if (vals.empty()) throw std::runtime_error("load_metric_csv: no samples in " + path);
    int nx = 1;
    while (nx < int(xs.size()) && xs[nx] > xs[nx - 1]) ++nx;
    const int ny = int(vals.size()) / nx;
    if (std::size_t(nx) * ny != vals.size() || nx < 2 || ny < 2)
        throw std::runtime_error("load_metric_csv: not a full grid in " + path);
    SampledMetric sm;
    sm.name = "csv:" + path;
    sm.nx = nx;
    sm.ny = ny;
    sm.rect = Rect{xs.front(), xs[nx - 1], ys.front(), ys.back()};
    sm.values = std::move(vals);
    return sm;
}

bool non_increasing_within(const std::vector<double>& s, double noise) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1] > s[i] * (1.0 + noise) + 1e-12) return false;
    return true;
}

std::vector<std::pair<Vec2, Vec2>> sample_point_pairs(const Rect& usable, int n, double min_sep,
                                                      std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_point_pairs: negative count");
    if (!(usable.width() > 0.0) || !(usable.height() > 0.0))
        throw std::invalid_argument("sample_point_pairs: empty rect");
    if (min_sep > std::hypot(usable.width(), usable.height()))
        throw std::invalid_argument("sample_point_pairs: separation exceeds the rect diagonal");
    Rng rng(derive_seed(seed, 0x70617273ULL));
    std::vector<std::pair<Vec2, Vec2>> pairs;
    pairs.reserve(std::size_t(n));
    while (int(pairs.size()) < n) {
        const Vec2 p{rng.uniform(usable.x0, usable.x1), rng.uniform(usable.y0, usable.y1)};
        const Vec2 q{rng.uniform(usable.x0, usable.x1), rng.uniform(usable.y0, usable.y1)};
        if ((p - q).norm() >= min_sep) pairs.emplace_back(p, q);
    }
    return pairs;
}

namespace {

// same metric, tighter evaluation rect: grid_distance builds its lattice from
// the domain, so restricting every field in a comparison to one shared rect
// makes the measurements commensurable node for node
MetricField restrict_to(const MetricField& f, const Rect& r) {
    return MetricField(f.name(), r, f.regularity(), [f](const Vec2& p) { return f.at(p); });
}

} // namespace

DistanceConvergenceReport distance_convergence_experiment(
    const MetricField& field, const Mollifier& mollifier, const std::vector<double>& eps_schedule,
    const std::vector<std::pair<Vec2, Vec2>>& sample_pairs, int resolution) {
    if (eps_schedule.empty()) throw std::invalid_argument("distance_convergence: empty schedule");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]))
            throw std::invalid_argument("distance_convergence: schedule must decrease");
    const double eps_max = eps_schedule.front();
    check_smoothing_args(field.domain(), eps_max, resolution, "distance_convergence");

    // every sampled field along the schedule is defined at least here, so this
    // rect carries the one lattice all the measurements share
    const Rect stage = field.domain().shrunk(eps_max);
    for (const auto& [p, q] : sample_pairs)
        if (!stage.contains(p) || !stage.contains(q))
            throw std::invalid_argument(
                "distance_convergence: sample pair outside the usable rect");

    DistanceConvergenceReport rep;
    rep.epsilons = eps_schedule;
    for (const auto& [p, q] : sample_pairs) {
        rep.pair_p.push_back(p);
        rep.pair_q.push_back(q);
    }
    const int n_pairs = int(sample_pairs.size());

    const auto solve_paths = [&](const MetricField& f) {
        std::vector<std::vector<Vec2>> paths(static_cast<std::size_t>(n_pairs));
        parallel_for(std::size_t(n_pairs), [&](std::size_t n) {
            auto gp = grid_distance(f, rep.pair_p[n], rep.pair_q[n], resolution, 16);
            refine_path(f, gp.path, 40);
            paths[n] = std::move(gp.path);
        });
        return paths;
    };

    const MetricField base_view = restrict_to(field, stage);
    const auto base_paths = solve_paths(base_view);
    for (const auto& path : base_paths)
        rep.base_distance.push_back(curve_length(base_view, path));

    // sample the smoothed metric finer than the path lattice: near-singular
    // components have second derivatives of order eps^(lambda-2), and the
    // bilinear interpolation error h^2 eps^(lambda-2) would otherwise creep
    // above the shrinking distance signal at the small end of the schedule
    const int sample_res = 4 * resolution - 3;
    for (const double eps : eps_schedule) {
        const SampledMetric sm = smooth_metric(field, mollifier, eps, sample_res);
        const MetricField eps_view = restrict_to(sm.as_field(), stage);
        const auto eps_paths = solve_paths(eps_view);

        // Price both metrics over the same two candidate curves and keep each
        // metric's minimum. Along a common curve the refinement residual hits
        // both lengths identically, and a near-optimal curve prices either
        // metric to second order in the path error, so the deviation reads
        // the metric change instead of which zigzag the lattice happened to
        // relax for each run.
        std::vector<double> d(std::size_t(n_pairs), 0.0);
        double worst = 0.0;
        for (int n = 0; n < n_pairs; ++n) {
            const auto& own = eps_paths[std::size_t(n)];
            const auto& alt = base_paths[std::size_t(n)];
            d[std::size_t(n)] = std::min(curve_length(eps_view, own), curve_length(eps_view, alt));
            const double base_n =
                std::min(curve_length(base_view, alt), curve_length(base_view, own));
            if (base_n > 0.0)
                worst = std::max(worst, std::fabs(d[std::size_t(n)] - base_n) / base_n);
        }
        rep.max_rel_deviation.push_back(worst);
        rep.eps_distance.push_back(std::move(d));
    }
    rep.non_increasing = non_increasing_within(rep.max_rel_deviation, 0.10);
    return rep;
}

} // namespace curvlab
