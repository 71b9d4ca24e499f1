#include "curvlab/pathspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "curvlab/curvature.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

namespace {

double segment_length(const MetricField& field, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    return 0.5 * (std::sqrt(std::max(0.0, field.at(a).quad(d))) +
                  std::sqrt(std::max(0.0, field.at(b).quad(d))));
}

} // namespace

double curve_length(const MetricField& field, const std::vector<Vec2>& path) {
    if (path.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        total += segment_length(field, path[i], path[i + 1]);
    return total;
}

GridPathResult grid_distance(const MetricField& field, const Vec2& p, const Vec2& q,
                             int resolution, int neighborhood) {
    if (resolution < 32) throw std::invalid_argument("grid_distance: resolution < 32");
    if (neighborhood != 8 && neighborhood != 16)
        throw std::invalid_argument("grid_distance: neighborhood must be 8 or 16");
    const Rect& dom = field.domain();
    field.at(p);
    field.at(q);

    const int nx = resolution, ny = resolution;
    const double hx = dom.width() / (nx - 1), hy = dom.height() / (ny - 1);
    const auto node = [&](int i, int j) { return Vec2{dom.x0 + i * hx, dom.y0 + j * hy}; };
    const auto id = [&](int i, int j) { return std::size_t(j) * nx + i; };

    std::vector<Sym2> gs(std::size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) gs[id(i, j)] = field.at(node(i, j));

    // kings moves, plus knights for the 16 neighborhood
    std::vector<std::pair<int, int>> moves{{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                           {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
    if (neighborhood == 16)
        moves.insert(moves.end(), {{1, 2}, {2, 1}, {-1, 2}, {-2, 1},
                                   {1, -2}, {2, -1}, {-1, -2}, {-2, -1}});

    const auto nearest = [&](const Vec2& v) {
        const int i = std::clamp(int(std::lround((v.x - dom.x0) / hx)), 0, nx - 1);
        const int j = std::clamp(int(std::lround((v.y - dom.y0) / hy)), 0, ny - 1);
        return std::pair<int, int>{i, j};
    };
    const auto [pi, pj] = nearest(p);
    const auto [qi, qj] = nearest(q);
    const std::size_t src = id(pi, pj), dst = id(qi, qj);
    if (src == dst) {
        GridPathResult out;
        out.resolution = resolution;
        out.cell = std::max(hx, hy);
        out.path = {p, q};
        out.length = curve_length(field, out.path);
        return out;
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(gs.size(), inf);
    std::vector<std::size_t> prev(gs.size(), std::size_t(-1));
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        const int ui = int(u % nx), uj = int(u / nx);
        for (const auto& [di, dj] : moves) {
            const int vi = ui + di, vj = uj + dj;
            if (vi < 0 || vi >= nx || vj < 0 || vj >= ny) continue;
            const std::size_t v = id(vi, vj);
            const Vec2 step{di * hx, dj * hy};
            const double w = 0.5 * (std::sqrt(gs[u].quad(step)) + std::sqrt(gs[v].quad(step)));
            if (d + w < dist[v]) {
                dist[v] = d + w;
                prev[v] = u;
                heap.push({dist[v], v});
            }
        }
    }
    if (dist[dst] == inf) throw std::runtime_error("grid_distance: target unreachable");

    GridPathResult out;
    out.resolution = resolution;
    out.cell = std::max(hx, hy);
    for (std::size_t u = dst; u != std::size_t(-1); u = prev[u]) {
        out.path.push_back(node(int(u % nx), int(u / nx)));
        if (u == src) break;
    }
    std::reverse(out.path.begin(), out.path.end());
    // splice the exact endpoints in place of their nearest nodes
    out.path.front() = p;
    out.path.back() = q;
    if (out.path.size() >= 2 && (out.path[0] - out.path[1]).norm() < 1e-12 * out.cell)
        out.path.erase(out.path.begin() + 1);
    if (out.path.size() >= 2 &&
        (out.path[out.path.size() - 1] - out.path[out.path.size() - 2]).norm() < 1e-12 * out.cell)
        out.path.erase(out.path.end() - 2);
    out.length = curve_length(field, out.path);
    return out;
}

namespace {

// length of the two segments meeting at vertex i when it sits at v
double local_cost(const MetricField& field, const std::vector<Vec2>& path, std::size_t i,
                  const Vec2& v) {
    return segment_length(field, path[i - 1], v) + segment_length(field, v, path[i + 1]);
}

// how far the point base + s*dir can travel with s in [0, w] before leaving dom
double clip_to_rect(const Rect& dom, const Vec2& base, const Vec2& dir, double w) {
    double hi = w;
    if (dir.x > 1e-300) hi = std::min(hi, (dom.x1 - base.x) / dir.x);
    if (dir.x < -1e-300) hi = std::min(hi, (dom.x0 - base.x) / dir.x);
    if (dir.y > 1e-300) hi = std::min(hi, (dom.y1 - base.y) / dir.y);
    if (dir.y < -1e-300) hi = std::min(hi, (dom.y0 - base.y) / dir.y);
    return std::max(0.0, hi);
}

// golden section along base + s*dir, s in [-w, w] clipped to the domain
Vec2 dir_search(const MetricField& field, const std::vector<Vec2>& path, std::size_t i,
                const Vec2& base, const Vec2& dir, double w) {
    const Rect& dom = field.domain();
    double a = -clip_to_rect(dom, base, dir * -1.0, w);
    double b = clip_to_rect(dom, base, dir, w);
    if (!(b - a > 0.0)) return base;
    const auto cost = [&](double s) { return local_cost(field, path, i, base + dir * s); };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cost(c), fd = cost(d);
    for (int it = 0; it < 28 && b - a > 1e-14; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = cost(d);
        }
    }
    return base + dir * (0.5 * (a + b));
}

} // namespace

double refine_path(const MetricField& field, std::vector<Vec2>& path, int sweeps,
                   double window_cap) {
    if (path.size() < 3) return curve_length(field, path);
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const Vec2 a = path[i - 1], b = path[i + 1];
            // frame aligned with the neighbor chord; searching the normal first
            // pulls the vertex onto the chord in one step on flat patches
            Vec2 tang = b - a;
            const double tl = tang.norm();
            tang = tl > 1e-300 ? tang / tl : Vec2{1.0, 0.0};
            const Vec2 norm{-tang.y, tang.x};
            double w = std::max((path[i] - a).norm(), (b - path[i]).norm());
            if (window_cap > 0.0) w = std::min(w, window_cap);
            if (!(w > 0.0)) continue;
            Vec2 moved = dir_search(field, path, i, path[i], norm, w);
            moved = dir_search(field, path, i, moved, tang, w);
            if (local_cost(field, path, i, moved) < local_cost(field, path, i, path[i]))
                path[i] = moved;
        }
    }
    return curve_length(field, path);
}

IvpResult geodesic_ivp(const MetricField& field, const Vec2& p, const Vec2& v, double t_max,
                       double dt) {
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("geodesic_ivp: step and horizon must be positive");
    const double ch = 1e-3; // christoffel stencil
    const double margin = field.has_derivative() ? 1e-9 : 2.5 * ch;
    const Rect& dom = field.domain();

    IvpResult out;
    out.exited_domain = false;
    const double speed0 = std::sqrt(std::max(1e-300, field.at(p).quad(v)));

    struct State {
        Vec2 x, u;
    };
    const auto accel = [&](const State& s) {
        const Christoffel c = christoffel(field, s.x, ch);
        Vec2 a;
        a.x = -(c.g[0][0][0] * s.u.x * s.u.x + 2 * c.g[0][0][1] * s.u.x * s.u.y +
                c.g[0][1][1] * s.u.y * s.u.y);
        a.y = -(c.g[1][0][0] * s.u.x * s.u.x + 2 * c.g[1][0][1] * s.u.x * s.u.y +
                c.g[1][1][1] * s.u.y * s.u.y);
        return a;
    };
    const auto deriv = [&](const State& s) { return State{s.u, accel(s)}; };
    const auto step = [&](State s, double h) {
        const State k1 = deriv(s);
        const State k2 = deriv({s.x + k1.x * (h / 2), s.u + k1.u * (h / 2)});
        const State k3 = deriv({s.x + k2.x * (h / 2), s.u + k2.u * (h / 2)});
        const State k4 = deriv({s.x + k3.x * h, s.u + k3.u * h});
        s.x = s.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6);
        s.u = s.u + (k1.u + k2.u * 2.0 + k3.u * 2.0 + k4.u) * (h / 6);
        return s;
    };

    State s{p, v};
    double t = 0.0;
    out.t.push_back(t);
    out.pos.push_back(s.x);
    out.vel.push_back(s.u);
    while (t < t_max - 1e-15) {
        const double h = std::min(dt, t_max - t);
        // the RK stages reach roughly |u| h from the current point; stop while
        // every stage evaluation is still safely inside the chart
        if (dom.boundary_distance(s.x) < 2.0 * s.u.norm() * h + margin) {
            out.exited_domain = true;
            break;
        }
        State trial;
        try {
            trial = step(s, h);
        } catch (const std::domain_error&) {
            out.exited_domain = true;
            break;
        }
        if (dom.boundary_distance(trial.x) < margin) {
            out.exited_domain = true;
            break;
        }
        s = trial;
        t += h;
        out.t.push_back(t);
        out.pos.push_back(s.x);
        out.vel.push_back(s.u);
        const double sp = std::sqrt(std::max(1e-300, field.at(s.x).quad(s.u)));
        out.speed_drift = std::max(out.speed_drift, std::abs(sp - speed0) / speed0);
    }
    out.t_end = t;
    return out;
}

namespace {

// shoot a unit speed geodesic at angle theta for time t, return arrival point
// (or the last point before leaving the domain)
struct ShootResult {
    Vec2 end;
    bool exited;
    std::vector<Vec2> path;
};

ShootResult shoot(const MetricField& field, const Vec2& p, double theta, double t, double dt) {
    const Sym2 g = field.at(p);
    Vec2 dir{std::cos(theta), std::sin(theta)};
    const double sp = std::sqrt(std::max(1e-300, g.quad(dir)));
    dir = dir / sp;
    const IvpResult r = geodesic_ivp(field, p, dir, t, dt);
    return {r.pos.back(), r.exited_domain, r.pos};
}

} // namespace

std::vector<BvpSolution> geodesic_bvp(const MetricField& field, const Vec2& p, const Vec2& q,
                                      int n_starts, std::uint64_t seed) {
    if (n_starts < 4) throw std::invalid_argument("geodesic_bvp: need at least 4 starts");
    field.at(p);
    field.at(q);
    const Vec2 chord = q - p;
    const double chord_len = chord.norm();
    if (chord_len < 1e-12) throw std::invalid_argument("geodesic_bvp: endpoints coincide");
    constexpr double kPi = 3.14159265358979323846;
    constexpr double kMissTol = 1e-5;

    // coarse scale from the largest metric eigenvalue along the chord
    double lam_max = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const Vec2 x = p + chord * (double(i) / 16.0);
        lam_max = std::max(lam_max, field.at(x).eigenvalues()[1]);
    }
    const double t_scale = 1.5 * chord_len * std::sqrt(lam_max);
    const double dt = t_scale / 400.0;
    const double theta0 = std::atan2(chord.y, chord.x);

    // one launch angle per equal sector of the circle, jittered from the seed;
    // the sector grid is centered on the chord direction so coverage near the
    // obvious candidate never depends on luck
    std::vector<double> inits(n_starts);
    Rng rng(derive_seed(seed, 0x6276705f73747274ULL));
    for (int s = 0; s < n_starts; ++s)
        inits[s] = theta0 + (2.0 * kPi / n_starts) * (s - 0.5 * (n_starts - 1) +
                                                      rng.uniform(-0.5, 0.5));

    const auto miss_of = [&](double theta, double t, std::vector<Vec2>* keep = nullptr) {
        const ShootResult r = shoot(field, p, theta, t, dt);
        if (keep) *keep = r.path;
        if (r.exited) return 1e6 + (r.end - q).norm();
        return (r.end - q).norm();
    };

    // polish every start concurrently; slot writes keep the outcome scheduling free
    struct Converged {
        bool ok = false;
        double theta = 0.0, t = 0.0, miss = 0.0;
    };
    std::vector<Converged> slots(std::size_t(n_starts), Converged{});
    parallel_for(std::size_t(n_starts), [&](std::size_t s) {
        double theta = inits[s], t = chord_len * std::sqrt(lam_max);
        double miss = miss_of(theta, t);
        if (miss > 1e5) return;
        for (int it = 0; it < 60 && miss > kMissTol; ++it) {
            const double dth = 1e-6, dtt = std::max(1e-6, 1e-6 * t);
            const ShootResult r0 = shoot(field, p, theta, t, dt);
            if (r0.exited) break;
            const Vec2 f0 = r0.end - q;
            const ShootResult ra = shoot(field, p, theta + dth, t, dt);
            const ShootResult rb = shoot(field, p, theta, t + dtt, dt);
            if (ra.exited || rb.exited) break;
            // jacobian of the endpoint wrt (theta, t)
            const double j00 = (ra.end.x - r0.end.x) / dth, j01 = (rb.end.x - r0.end.x) / dtt;
            const double j10 = (ra.end.y - r0.end.y) / dth, j11 = (rb.end.y - r0.end.y) / dtt;
            const double det = j00 * j11 - j01 * j10;
            if (std::abs(det) < 1e-14) break;
            // clamped so a bad jacobian near the Hoelder axis cannot fling the
            // shot out of the chart
            const double step_th = std::clamp(-(j11 * f0.x - j01 * f0.y) / det, -0.5, 0.5);
            const double step_t =
                std::clamp(-(-j10 * f0.x + j00 * f0.y) / det, -0.5 * t_scale, 0.5 * t_scale);
            double damp = 1.0;
            for (int back = 0; back < 8; ++back) {
                const double th2 = theta + damp * step_th;
                const double t2 = std::max(0.05 * t, t + damp * step_t);
                const double m2 = miss_of(th2, t2);
                if (m2 < miss) {
                    theta = th2;
                    t = t2;
                    miss = m2;
                    break;
                }
                damp *= 0.5;
            }
            if (damp < 1.0 / 200.0) break;
        }
        if (miss <= kMissTol) slots[s] = {true, theta, t, miss};
    });

    // cluster by launch angle, keeping the best converged member of each cluster
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s].ok) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (slots[a].miss != slots[b].miss) return slots[a].miss < slots[b].miss;
        return slots[a].theta < slots[b].theta;
    });
    std::vector<BvpSolution> sols;
    for (const std::size_t s : order) {
        const double angle = std::remainder(slots[s].theta - theta0, 2.0 * kPi);
        bool dup = false;
        for (const auto& other : sols)
            if (std::abs(other.angle - angle) <= 1e-3) {
                dup = true;
                break;
            }
        if (dup) continue;
        BvpSolution sol;
        sol.angle = angle;
        std::vector<Vec2> path;
        sol.miss = miss_of(slots[s].theta, slots[s].t, &path);
        sol.path = std::move(path);
        sol.path.back() = q;
        sol.length = curve_length(field, sol.path);
        sols.push_back(std::move(sol));
    }
    std::sort(sols.begin(), sols.end(),
              [](const BvpSolution& a, const BvpSolution& b) { return a.length < b.length; });
    return sols;
}

double path_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("path_hausdorff: empty path");
    const auto point_to_segment = [](const Vec2& p, const Vec2& u, const Vec2& v) {
        const Vec2 d = v - u;
        const double len2 = d.norm2();
        if (len2 < 1e-300) return (p - u).norm();
        const double t = std::clamp((p - u).dot(d) / len2, 0.0, 1.0);
        return (p - (u + d * t)).norm();
    };
    const auto one_sided = [&](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
        double worst = 0.0;
        for (const Vec2& p : from) {
            double best = std::numeric_limits<double>::infinity();
            if (to.size() == 1) best = (p - to[0]).norm();
            for (std::size_t i = 0; i + 1 < to.size(); ++i)
                best = std::min(best, point_to_segment(p, to[i], to[i + 1]));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

MultiplicityReport minimizer_multiplicity(const MetricField& field, const Vec2& p, const Vec2& q,
                                          int resolution, int sweeps) {
    MultiplicityReport rep;
    const GridPathResult base = grid_distance(field, p, q, resolution, 16);
    rep.cell = base.cell;

    std::vector<std::vector<Vec2>> seeds;
    seeds.push_back(base.path);
    // mirror seed across the y axis when both endpoints sit on it; low regularity
    // metrics concentrated on x = 0 can hide a symmetric pair of minimizers there
    const bool on_axis = std::abs(p.x) < 1e-12 && std::abs(q.x) < 1e-12;
    if (on_axis) {
        std::vector<Vec2> mirrored = base.path;
        for (Vec2& v : mirrored) v.x = -v.x;
        bool inside = true;
        for (const Vec2& v : mirrored)
            if (!field.domain().contains(v)) inside = false;
        if (inside) seeds.push_back(std::move(mirrored));
        // bowed seeds on both sides, to give the descent a way off the axis
        for (const double side : {1.0, -1.0}) {
            std::vector<Vec2> bowed = base.path;
            const double amp = side * 2.0 * base.cell;
            for (std::size_t i = 1; i + 1 < bowed.size(); ++i) {
                const double t = double(i) / double(bowed.size() - 1);
                bowed[i].x += amp * std::sin(3.14159265358979323846 * t);
            }
            bool ok = true;
            for (const Vec2& v : bowed)
                if (!field.domain().contains(v)) ok = false;
            if (ok) seeds.push_back(std::move(bowed));
        }
    }

    std::vector<std::vector<Vec2>> refined;
    std::vector<double> lengths;
    for (auto& seed : seeds) {
        std::vector<Vec2> path = seed;
        const double len = refine_path(field, path, sweeps);
        refined.push_back(std::move(path));
        lengths.push_back(len);
    }
    if (on_axis) {
        // mirrors of the refined curves are admissible competitors too
        const std::size_t n0 = refined.size();
        for (std::size_t i = 0; i < n0; ++i) {
            std::vector<Vec2> m = refined[i];
            for (Vec2& v : m) v.x = -v.x;
            bool inside = true;
            for (const Vec2& v : m)
                if (!field.domain().contains(v)) inside = false;
            if (!inside) continue;
            refined.push_back(std::move(m));
            lengths.push_back(curve_length(field, refined.back()));
        }
    }

    const double best = *std::min_element(lengths.begin(), lengths.end());
    rep.min_length = best;
    // visit candidates shortest first so the kept representative of any
    // near-duplicate cluster is its best member
    std::vector<std::size_t> order(refined.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    for (const std::size_t i : order) {
        if (lengths[i] > best * 1.005) continue;
        bool dup = false;
        for (const auto& kept : rep.paths)
            if (path_hausdorff(refined[i], kept) <= 2.0 * rep.cell) {
                dup = true;
                break;
            }
        if (dup) continue;
        rep.paths.push_back(refined[i]);
        rep.lengths.push_back(lengths[i]);
    }
    rep.count = int(rep.paths.size());
    return rep;
}

} // namespace curvlab
