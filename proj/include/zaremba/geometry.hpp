#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zaremba/errors.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

template <std::size_t N>
struct Ball {
    Vec<N> center{};
    double radius = 0;
    Ball() = default;
    Ball(const Vec<N>& c, double r) : center(c), radius(r) {
        if (!(r > 0)) throw GeometryError("Ball: radius must be positive");
    }
    bool contains(const Vec<N>& x, double slack = 0.0) const {
        return dist(x, center) <= radius + slack;
    }
};

template <std::size_t N>
struct SphericalLayer {
    Vec<N> center{};
    double r_inner = 0, r_outer = 0;
    SphericalLayer() = default;
    SphericalLayer(const Vec<N>& c, double ri, double ro)
        : center(c), r_inner(ri), r_outer(ro) {
        if (!(0 < ri && ri < ro))
            throw GeometryError("SphericalLayer: need 0 < r_inner < r_outer");
    }
    bool contains(const Vec<N>& x) const {
        double r = dist(x, center);
        return r >= r_inner && r <= r_outer;
    }
};

enum class Region { Interior, OnGamma1, OnGamma2, Exterior };

inline const char* to_string(Region r) {
    switch (r) {
        case Region::Interior: return "interior";
        case Region::OnGamma1: return "gamma1";
        case Region::OnGamma2: return "gamma2";
        case Region::Exterior: return "exterior";
    }
    return "?";
}

/// Domain with split boundary: Gamma1 carries Dirichlet data, Gamma2 is the
/// graph x_n = f(x') of a Lipschitz function near the junction (the origin),
/// and the domain lies below the graph there.
template <std::size_t N>
struct Domain {
    using GraphFn = std::function<double(const Vec<N - 1>&)>;
    using InsideFn = std::function<bool(const Vec<N>&)>;
    /// Produces points of Gamma1 inside a query ball (possibly empty).
    using Gamma1Sampler = std::function<std::vector<Vec<N>>(const Ball<N>&)>;

    std::size_t n = N;
    InsideFn inside;
    GraphFn gamma2_graph;
    double gamma2_patch_radius = 0;
    Gamma1Sampler gamma1_sampler;
    Vec<N> junction{};  // fixed to the origin
    /// Exact distance to the Gamma2 surface when the preset knows it;
    /// otherwise classify/chains fall back to graph sampling.
    std::function<double(const Vec<N>&)> gamma2_distance;
    /// Exact distance to Gamma1 when the preset knows it (grid classification
    /// is orders of magnitude faster with it).
    std::function<double(const Vec<N>&)> gamma1_distance;
    /// Known Lipschitz bound of the graph (presets fill it in).
    double lipschitz = 0;

    bool has_gamma2() const { return bool(gamma2_graph); }

    double graph_height(const Vec<N - 1>& t) const { return gamma2_graph(t); }

    /// Vertical gap f(x') - x_n; positive below the graph.
    double graph_gap(const Vec<N>& x) const {
        return graph_height(tangential(x)) - x[N - 1];
    }

    bool in_patch(const Vec<N>& x) const {
        return norm(tangential(x)) <= gamma2_patch_radius;
    }

    /// Distance to Gamma2, exact if provided, otherwise via patch sampling.
    double dist_gamma2(const Vec<N>& x) const {
        if (gamma2_distance) return gamma2_distance(x);
        if (!has_gamma2()) return std::numeric_limits<double>::infinity();
        // sample the graph around the foot of x
        Vec<N - 1> t0 = tangential(x);
        double best = std::numeric_limits<double>::infinity();
        double span = std::min(gamma2_patch_radius, std::abs(graph_gap(x)) * (1.0 + lipschitz) + 1e-12);
        const int K = 12;
        // coarse-to-fine local search on the tangential plane
        Vec<N - 1> c = t0;
        double w = std::max(span, 1e-9);
        for (int level = 0; level < 4; ++level) {
            Vec<N - 1> arg = c;
            for (int axis_i = 0; axis_i < int(N - 1); ++axis_i) {
                for (int k = -K; k <= K; ++k) {
                    Vec<N - 1> t = c;
                    t[axis_i] += w * double(k) / K;
                    if (norm(t) > gamma2_patch_radius) continue;
                    Vec<N> p = with_last(t, graph_height(t));
                    double d = dist(p, x);
                    if (d < best) { best = d; arg = t; }
                }
            }
            c = arg;
            w *= 0.25;
        }
        return best;
    }

    /// Nearest Gamma1 sample within radius r of x, if any.
    std::optional<Vec<N>> nearest_gamma1(const Vec<N>& x, double r) const {
        if (!gamma1_sampler) return std::nullopt;
        auto pts = gamma1_sampler(Ball<N>(x, r));
        std::optional<Vec<N>> best;
        double bd = r;
        for (const auto& p : pts) {
            double d = dist(p, x);
            if (d <= bd) { bd = d; best = p; }
        }
        return best;
    }
};

/// Classifies a point against the split boundary with tolerance tol.
/// Gamma2 membership means |x_n - f(x')| <= tol inside the graph patch.
/// When a point is within tol of both boundary sets, Gamma1 wins if the two
/// candidate boundary points coincide (sets that genuinely touch, e.g. a
/// Dirichlet patch lying on the graph); otherwise the classification is
/// ambiguous and the caller has to refine tol.
template <std::size_t N>
Region classify(const Domain<N>& dom, const Vec<N>& x, double tol) {
    if (!(tol > 0)) throw GeometryError("classify: tol must be positive");
    bool near_g2 = false;
    double gap = 0;
    if (dom.has_gamma2() && dom.in_patch(x)) {
        gap = dom.graph_gap(x);
        near_g2 = std::abs(gap) <= tol;
    }
    std::optional<Vec<N>> g1;
    if (!dom.gamma1_distance || dom.gamma1_distance(x) <= tol)
        g1 = dom.nearest_gamma1(x, tol);
    if (g1 && near_g2) {
        // Gamma1 wins when its point lies on the graph itself (sets that
        // genuinely touch); two distinct boundary pieces raise the error.
        Vec<N - 1> t = tangential(*g1);
        if (dom.in_patch(*g1) &&
            std::abs((*g1)[N - 1] - dom.graph_height(t)) <= 0.25 * tol)
            return Region::OnGamma1;
        throw GeometryError("classify: point within tol of both Gamma1 and Gamma2; refine tol");
    }
    if (g1) return Region::OnGamma1;
    if (near_g2) return Region::OnGamma2;
    return dom.inside(x) ? Region::Interior : Region::Exterior;
}

/// Lower estimate of the Lipschitz constant of f over the patch from pairwise
/// difference quotients on a regular lattice (k points per axis).
template <std::size_t N>
double lipschitz_estimate(const std::function<double(const Vec<N - 1>&)>& f,
                          double patch_radius, std::size_t n_samples) {
    if (n_samples < 2) throw GeometryError("lipschitz_estimate: need n_samples >= 2");
    constexpr std::size_t M = N - 1;
    std::size_t k = n_samples;
    std::vector<Vec<M>> pts;
    std::vector<std::size_t> idx(M, 0);
    while (true) {
        Vec<M> t{};
        for (std::size_t i = 0; i < M; ++i)
            t[i] = -patch_radius + 2.0 * patch_radius * double(idx[i]) / double(k - 1);
        if (norm(t) <= patch_radius) pts.push_back(t);
        std::size_t i = 0;
        for (; i < M; ++i) {
            if (++idx[i] < k) break;
            idx[i] = 0;
        }
        if (i == M) break;
    }
    std::vector<double> fv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = f(pts[i]);
    double L = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = dist(pts[i], pts[j]);
            if (d > 1e-14) L = std::max(L, std::abs(fv[i] - fv[j]) / d);
        }
    return L;
}

/// True iff the sampled right cone with apex y, axis -e_n, half-angle phi and
/// height h lies inside the domain. The extreme ring (angle exactly phi) is
/// always part of the sample set.
template <std::size_t N>
bool cone_check(const Domain<N>& dom, const Vec<N>& y, double phi, double h,
                std::size_t n_samples) {
    if (!(phi > 0 && phi < 1.5707963267948966))
        throw GeometryError("cone_check: need 0 < phi < pi/2");
    if (!(h > 0)) throw GeometryError("cone_check: need h > 0");
    std::size_t depths = std::max<std::size_t>(2, n_samples / 8);
    std::size_t rays = std::max<std::size_t>(8, n_samples);
    auto dirs = sphere_samples<N - 1>(rays, 77);
    for (std::size_t id = 1; id <= depths; ++id) {
        double t = h * double(id) / double(depths);
        // axis point
        if (!dom.inside(y - axis<N>(N - 1, t))) return false;
        for (double frac : {0.5, 1.0}) {
            double ang = phi * frac;
            double rad = t * std::tan(ang);
            for (const auto& d : dirs) {
                Vec<N> p = y - axis<N>(N - 1, t);
                for (std::size_t i = 0; i + 1 < N; ++i) p[i] += rad * d[i];
                if (!dom.inside(p)) return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Obstacles: closed sets removed from the open region below the graph; their
// surface carries the Dirichlet condition.
// ---------------------------------------------------------------------------

template <std::size_t N>
struct Obstacle {
    virtual ~Obstacle() = default;
    virtual double distance(const Vec<N>& x) const = 0;  // to the Dirichlet surface
    virtual bool blocks(const Vec<N>& x) const = 0;      // x inside the removed set
    virtual std::vector<Vec<N>> sample(const Ball<N>& q) const = 0;
    /// Quasi-uniform cloud on the Dirichlet surface clipped to a ball.
    virtual std::vector<Vec<N>> cloud(std::size_t count) const = 0;
};

/// Solid closed ball; Gamma1 is its sphere.
template <std::size_t N>
struct BallObstacle final : Obstacle<N> {
    Vec<N> center{};
    double radius = 0;
    BallObstacle(const Vec<N>& c, double r) : center(c), radius(r) {}
    double distance(const Vec<N>& x) const override {
        return std::abs(dist(x, center) - radius);
    }
    bool blocks(const Vec<N>& x) const override { return dist(x, center) < radius; }
    std::vector<Vec<N>> sample(const Ball<N>& q) const override {
        std::vector<Vec<N>> out;
        double d = dist(q.center, center);
        if (std::abs(d - radius) > q.radius) return out;
        if (d > 1e-14) {
            Vec<N> p = center + (radius / d) * (q.center - center);
            if (q.contains(p)) out.push_back(p);
        }
        for (const auto& u : sphere_samples<N>(128, 5)) {
            Vec<N> p = center + radius * u;
            if (q.contains(p)) out.push_back(p);
        }
        return out;
    }
    std::vector<Vec<N>> cloud(std::size_t count) const override {
        std::vector<Vec<N>> out;
        for (const auto& u : sphere_samples<N>(count, 5)) out.push_back(center + radius * u);
        return out;
    }
};

/// Flat closed disk {x_n = level, |x' - c'| <= r}: a slit with empty interior.
template <std::size_t N>
struct DiskObstacle final : Obstacle<N> {
    Vec<N - 1> center{};
    double level = 0;
    double radius = 0;
    DiskObstacle(const Vec<N - 1>& c, double lvl, double r)
        : center(c), level(lvl), radius(r) {}
    double distance(const Vec<N>& x) const override {
        Vec<N - 1> t = tangential(x) - center;
        double rho = norm(t);
        double dz = x[N - 1] - level;
        if (rho <= radius) return std::abs(dz);
        double dr = rho - radius;
        return std::sqrt(dr * dr + dz * dz);
    }
    bool blocks(const Vec<N>& x) const override { return distance(x) <= 0.0; }
    std::vector<Vec<N>> sample(const Ball<N>& q) const override {
        std::vector<Vec<N>> out;
        // nearest point of the disk
        Vec<N - 1> t = tangential(q.center) - center;
        double rho = norm(t);
        Vec<N - 1> proj = center;
        if (rho > 1e-14) proj = center + (std::min(rho, radius) / rho) * t;
        Vec<N> p = with_last(proj, level);
        if (q.contains(p)) out.push_back(p);
        for (const auto& s : disk_lattice(radius, 24))
            if (Vec<N> y = with_last(center + s, level); q.contains(y)) out.push_back(y);
        return out;
    }
    std::vector<Vec<N>> cloud(std::size_t count) const override {
        std::size_t rings = std::max<std::size_t>(4, std::size_t(std::sqrt(double(count))));
        std::vector<Vec<N>> out;
        for (const auto& s : disk_lattice(radius, rings))
            out.push_back(with_last(center + s, level));
        return out;
    }

    /// Polar lattice on a disk of radius r (rings x angular).
    static std::vector<Vec<N - 1>> disk_lattice(double r, std::size_t rings) {
        static_assert(N == 3, "disk lattice is implemented for N = 3");
        std::vector<Vec<N - 1>> out;
        out.push_back(Vec<N - 1>{});
        for (std::size_t i = 1; i <= rings; ++i) {
            double rho = r * double(i) / double(rings);
            std::size_t m = std::max<std::size_t>(6, std::size_t(6.2831853 * rho / (r / double(rings))));
            for (std::size_t j = 0; j < m; ++j) {
                double th = 6.283185307179586 * double(j) / double(m);
                out.push_back(Vec<N - 1>{{rho * std::cos(th), rho * std::sin(th)}});
            }
        }
        return out;
    }
};

/// Planar sector {x_n = 0, azimuth in [-half_angle, half_angle], rho <= extent}
/// with apex at the junction; used as a Dirichlet set reaching the origin.
struct SectorObstacle final : Obstacle<3> {
    double half_angle = 0;
    double extent = 0;
    SectorObstacle(double ha, double ext) : half_angle(ha), extent(ext) {}
    double distance(const Vec<3>& x) const override {
        double rho = std::hypot(x[0], x[1]);
        double phi = std::atan2(x[1], x[0]);
        double dz = x[2];
        double din;
        if (std::abs(phi) <= half_angle) {
            din = (rho <= extent) ? 0.0 : rho - extent;
        } else {
            // distance to the nearer sector edge ray in the plane
            double dphi = std::abs(phi) - half_angle;
            if (dphi < 1.5707963267948966) {
                double along = std::min(rho * std::cos(dphi), extent);
                double dx = rho * std::cos(dphi) - along;
                double dy = rho * std::sin(dphi);
                din = std::hypot(dx, dy);
            } else {
                din = rho;
            }
        }
        return std::hypot(din, dz);
    }
    bool blocks(const Vec<3>& x) const override { return distance(x) <= 0.0; }
    std::vector<Vec<3>> sample(const Ball<3>& q) const override {
        std::vector<Vec<3>> out;
        double rho0 = std::hypot(q.center[0], q.center[1]);
        double lo = std::max(1e-9, rho0 - q.radius), hi = std::min(extent, rho0 + q.radius);
        if (lo > hi) return out;
        for (std::size_t i = 0; i <= 16; ++i) {
            double rho = lo + (hi - lo) * double(i) / 16.0;
            std::size_t m = 24;
            for (std::size_t j = 0; j <= m; ++j) {
                double phi = -half_angle + 2 * half_angle * double(j) / double(m);
                Vec<3> p{{rho * std::cos(phi), rho * std::sin(phi), 0.0}};
                if (q.contains(p)) out.push_back(p);
            }
        }
        return out;
    }
    std::vector<Vec<3>> cloud(std::size_t count) const override {
        return cloud_annulus(1e-6 * extent, extent, count);
    }
    /// Cloud restricted to rho in [r0, r1].
    std::vector<Vec<3>> cloud_annulus(double r0, double r1, std::size_t count) const {
        std::vector<Vec<3>> out;
        std::size_t rings = std::max<std::size_t>(3, std::size_t(std::sqrt(double(count) / 2)));
        for (std::size_t i = 0; i < rings; ++i) {
            double rho = r0 + (r1 - r0) * (double(i) + 0.5) / double(rings);
            std::size_t m = std::max<std::size_t>(4, std::size_t(2 * half_angle * rho / ((r1 - r0) / double(rings))));
            for (std::size_t j = 0; j < m; ++j) {
                double phi = -half_angle + 2 * half_angle * (double(j) + 0.5) / double(m);
                out.push_back(Vec<3>{{rho * std::cos(phi), rho * std::sin(phi), 0.0}});
            }
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Preset domains. All live below the graph x_n = f(x'); obstacles are removed
// from the open region and carry (part of) the Dirichlet boundary.
// ---------------------------------------------------------------------------

template <std::size_t N>
struct DomainBuilder {
    using GraphFn = typename Domain<N>::GraphFn;
    GraphFn graph;
    std::function<double(const Vec<N>&)> graph_dist;  // exact distance, optional
    double patch_radius = 8.0;
    double lipschitz = 0;
    std::vector<std::shared_ptr<Obstacle<N>>> obstacles;

    DomainBuilder& add(std::shared_ptr<Obstacle<N>> ob) {
        obstacles.push_back(std::move(ob));
        return *this;
    }

    Domain<N> build() const {
        Domain<N> d;
        auto obs = obstacles;
        GraphFn g = graph;
        d.gamma2_graph = g;
        d.gamma2_patch_radius = patch_radius;
        d.lipschitz = lipschitz;
        d.gamma2_distance = graph_dist;
        d.inside = [g, obs](const Vec<N>& x) {
            if (!(x[N - 1] < g(tangential(x)))) return false;
            for (const auto& ob : obs)
                if (ob->blocks(x) || ob->distance(x) == 0.0) return false;
            return true;
        };
        d.gamma1_sampler = [obs](const Ball<N>& q) {
            std::vector<Vec<N>> out;
            for (const auto& ob : obs) {
                auto pts = ob->sample(q);
                out.insert(out.end(), pts.begin(), pts.end());
            }
            return out;
        };
        if (!obs.empty())
            d.gamma1_distance = [obs](const Vec<N>& x) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ob : obs) best = std::min(best, ob->distance(x));
                return best;
            };
        return d;
    }
};

/// Half-space below the flat graph f = 0.
template <std::size_t N>
DomainBuilder<N> halfspace_builder() {
    DomainBuilder<N> b;
    b.graph = [](const Vec<N - 1>&) { return 0.0; };
    b.graph_dist = [](const Vec<N>& x) { return std::abs(x[N - 1]); };
    b.lipschitz = 0;
    return b;
}

/// Thin cone domain {x_n < -L |x'|}: the graph is f(x') = -L|x'|, the inner
/// cone condition holds with half-angle arccot(L) exactly.
template <std::size_t N>
DomainBuilder<N> cone_builder(double L) {
    DomainBuilder<N> b;
    b.graph = [L](const Vec<N - 1>& t) { return -L * norm(t); };
    b.graph_dist = [L](const Vec<N>& x) {
        // distance from (rho, z) to the ray z = -L rho, rho >= 0
        double rho = norm(tangential(x));
        double z = x[N - 1];
        double inv = 1.0 / std::sqrt(1.0 + L * L);
        double along = (rho - L * z) * inv;  // projection parameter onto the ray
        if (along <= 0) return std::sqrt(rho * rho + z * z);
        return std::abs(z + L * rho) * inv;
    };
    b.lipschitz = L;
    return b;
}

/// Piecewise-linear graph interpolated from samples on a regular tangential
/// lattice; each cell is split into simplices along the main diagonal.
/// `values[j*k+i]` is f at (t0 + i*step, t1 + j*step) for N == 3.
struct PiecewiseLinearGraph {
    double t0 = 0, t1 = 0, step = 1;
    std::size_t k = 0;
    std::vector<double> values;

    double operator()(const Vec<2>& t) const {
        double u = (t[0] - t0) / step, v = (t[1] - t1) / step;
        double iu = std::clamp(std::floor(u), 0.0, double(k - 2));
        double iv = std::clamp(std::floor(v), 0.0, double(k - 2));
        std::size_t i = std::size_t(iu), j = std::size_t(iv);
        double fu = std::clamp(u - iu, 0.0, 1.0), fv = std::clamp(v - iv, 0.0, 1.0);
        double f00 = values[j * k + i], f10 = values[j * k + i + 1];
        double f01 = values[(j + 1) * k + i], f11 = values[(j + 1) * k + i + 1];
        // triangles split by the diagonal from (0,0) to (1,1)
        if (fu >= fv) return f00 + fu * (f10 - f00) + fv * (f11 - f10);
        return f00 + fv * (f01 - f00) + fu * (f11 - f01);
    }
};

template <std::size_t N>
DomainBuilder<N> graph_builder(const PiecewiseLinearGraph& g, double patch_radius) {
    static_assert(N == 3, "piecewise-linear graphs are implemented for N = 3");
    DomainBuilder<N> b;
    b.graph = [g](const Vec<2>& t) { return g(t); };
    b.patch_radius = patch_radius;
    return b;
}

}  // namespace zaremba
