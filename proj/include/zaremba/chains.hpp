#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "zaremba/capacity.hpp"
#include "zaremba/errors.hpp"
#include "zaremba/geometry.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

/// How condition 3's ball-in-intersection test is interpreted:
///  - Literal: B(xi_{j+1}, delta R), centered at the far ball's center, must
///    lie inside B^j and the domain (centers at most (theta-delta) R apart).
///  - Relaxed: some ball of radius delta R inside the lens; realized by the
///    inscribed midpoint ball (centers at most 2 (theta-delta) R apart).
enum class OverlapRule { Literal, Relaxed };

struct LayerSpec {
    double q1 = 1, q2 = 2, q_star = 2.5, q3 = 3, q4 = 4;
    double R = 1;
    double theta = 0.25;   // ball radius ratio
    double delta = 0.1;    // overlap ball ratio, in (0, 1/2)
    double kappa = 0;      // declared capacity ratio (0 = take the measured one)
    double a = 1.08;       // dilation from compute_a
    OverlapRule overlap = OverlapRule::Relaxed;
    double cover_margin = 0.1;        // cover samples stay cover_margin*theta*R off Gamma2
    std::size_t cover_samples = 350;  // sphere sample budget for the cover check

    void validate() const {
        if (!(0 < q1 && q1 < q2 && q2 < q_star && q_star < q3 && q3 < q4))
            throw ChainError("LayerSpec: need 0 < q1 < q2 < q* < q3 < q4");
        if (!(R > 0 && theta > 0)) throw ChainError("LayerSpec: need R, theta > 0");
        if (!(delta > 0 && delta < 0.5)) throw ChainError("LayerSpec: need delta in (0, 1/2)");
        if (!(a > 1)) throw ChainError("LayerSpec: need a > 1");
        if (!(delta < theta)) throw ChainError("LayerSpec: need delta < theta");
    }
    double ball_radius() const { return theta * R; }
    /// Center distance bound for an adjacency edge under the active rule.
    double adjacency_step() const {
        return (overlap == OverlapRule::Literal ? 1.0 : 2.0) * (theta - delta) * R;
    }
    SphericalLayer<3> outer_layer() const { return {Vec<3>{}, q1 * R, q4 * R}; }
    SphericalLayer<3> inner_layer() const { return {Vec<3>{}, q2 * R, q3 * R}; }
};

template <std::size_t N>
struct BallChain {
    std::vector<Ball<N>> balls;                 // index 0 is the root
    std::vector<std::vector<int>> adjacency;    // edge u -> v: step from u to v
    double kappa_measured = 0;
    double cap_root = 0, cap_layer = 0;

    std::size_t size() const { return balls.size(); }
};

namespace detail {

/// The delta-ball placed by the overlap rule for the edge u -> v, or nullopt
/// when the centers are too far apart.
template <std::size_t N>
std::optional<Vec<N>> overlap_ball_center(const LayerSpec& layer, const Vec<N>& cu,
                                          const Vec<N>& cv) {
    double d = dist(cu, cv);
    if (d > layer.adjacency_step() + 1e-12) return std::nullopt;
    if (layer.overlap == OverlapRule::Literal) return cv;
    return 0.5 * (cu + cv);
}

/// Sampled "closed ball inside the open domain" test with tangency slack.
template <std::size_t N>
bool ball_in_domain(const Domain<N>& dom, const Vec<N>& c, double r, double slack = 1e-9) {
    if (!dom.inside(c)) return false;
    for (const auto& u : sphere_samples<N>(48, 19))
        if (!dom.inside(c + (r - slack) * u)) return false;
    return true;
}

template <std::size_t N>
bool adjacency_edge(const Domain<N>& dom, const LayerSpec& layer, const Vec<N>& cu,
                    const Vec<N>& cv) {
    auto oc = overlap_ball_center(layer, cu, cv);
    if (!oc) return false;
    // the overlap ball must sit inside both chain balls ...
    double rr = layer.ball_radius();
    double dr = layer.delta * layer.R;
    if (dist(*oc, cu) > rr - dr + 1e-12) return false;
    if (dist(*oc, cv) > rr - dr + 1e-12) return false;
    // ... and inside the domain
    return ball_in_domain(dom, *oc, dr);
}

/// Deterministic subsample: keep at most `cap` points with a fixed stride.
template <std::size_t N>
std::vector<Vec<N>> subsample(std::vector<Vec<N>> pts, std::size_t cap) {
    if (pts.size() <= cap) return pts;
    std::vector<Vec<N>> out;
    out.reserve(cap);
    double stride = double(pts.size()) / double(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(pts[std::size_t(i * stride)]);
    return out;
}

/// Gamma1 cloud clipped to a ball, via the domain sampler.
template <std::size_t N>
std::vector<Vec<N>> gamma1_cloud_in_ball(const Domain<N>& dom, const Ball<N>& b,
                                         std::size_t cap) {
    if (!dom.gamma1_sampler) return {};
    auto pts = dom.gamma1_sampler(b);
    std::vector<Vec<N>> keep;
    for (const auto& p : pts)
        if (b.contains(p, 1e-12)) keep.push_back(p);
    // drop duplicates from overlapping generators
    std::sort(keep.begin(), keep.end(), [](const Vec<N>& a, const Vec<N>& c) {
        return std::lexicographical_compare(a.c.begin(), a.c.end(), c.c.begin(), c.c.end());
    });
    keep.erase(std::unique(keep.begin(), keep.end(),
                           [](const Vec<N>& a, const Vec<N>& c) { return dist(a, c) < 1e-12; }),
               keep.end());
    return subsample(std::move(keep), cap);
}

template <std::size_t N>
std::vector<Vec<N>> gamma1_cloud_in_layer(const Domain<N>& dom, const LayerSpec& layer,
                                          std::size_t cap) {
    auto inner = layer.inner_layer();
    auto pts = gamma1_cloud_in_ball(dom, Ball<N>(Vec<N>{}, layer.q3 * layer.R), 1 << 20);
    std::vector<Vec<N>> keep;
    for (const auto& p : pts)
        if (inner.contains(p)) keep.push_back(p);
    return subsample(std::move(keep), cap);
}

template <std::size_t N>
double cloud_capacity(const std::vector<Vec<N>>& cloud, double s) {
    if (cloud.size() < 2) return 0.0;
    CapacityProblem<N> prob;
    prob.atoms = cloud;
    prob.s = s;
    prob.constraint_points = standard_constraints(cloud, 128);
    return capacity_estimate(prob).value;
}

/// Cover samples of S_R: sphere points inside the domain keeping
/// cover_margin * theta * R clear of Gamma2 (closed tangent balls cover any
/// such point once the candidate lattice is fine enough; points nearer to
/// Gamma2 fall under the tangency footnote).
template <std::size_t N>
std::vector<Vec<N>> cover_points(const Domain<N>& dom, const LayerSpec& layer) {
    std::vector<Vec<N>> out;
    double margin = layer.cover_margin * layer.ball_radius();
    bool any_inside = false;
    for (const auto& u : sphere_samples<N>(layer.cover_samples, 23)) {
        Vec<N> p = layer.q_star * layer.R * u;
        if (!dom.inside(p)) continue;
        any_inside = true;
        if (dom.dist_gamma2(p) < margin) continue;
        out.push_back(p);
    }
    if (!any_inside) throw ChainError("build_chain: empty S_R (domain misses the layer sphere)");
    return out;
}

}  // namespace detail

/// Greedy construction of an admissible ball chain: candidate centers on a
/// lattice of spacing theta R / 2 inside the inner layer, filtered by the
/// Gamma2 clearance; the root maximizes captured Gamma1 mass; the cover team
/// is chosen greedily over sphere samples and then connected to the root
/// through the candidate lattice.
template <std::size_t N>
BallChain<N> build_chain(const Domain<N>& dom, LayerSpec layer, double s,
                         std::size_t candidate_density = 0) {
    layer.validate();
    if (candidate_density) layer.cover_samples = candidate_density;
    const double rr = layer.ball_radius();
    const double step = rr / 2;
    const double rin = layer.q2 * layer.R + rr, rout = layer.q3 * layer.R - rr;
    if (rin > rout) throw ChainError("build_chain: theta too large for the inner layer");

    // candidate lattice
    std::vector<Vec<N>> cand;
    std::vector<std::array<int, N>> cand_key;
    std::map<std::array<int, N>, int> key_index;
    {
        int kmax = int(std::ceil(rout / step));
        std::array<int, N> idx{};
        for (std::size_t i = 0; i < N; ++i) idx[i] = -kmax;
        while (true) {
            Vec<N> p{};
            for (std::size_t i = 0; i < N; ++i) p[i] = step * double(idx[i]);
            double r = norm(p);
            if (r >= rin - 1e-12 && r <= rout + 1e-12 && dom.inside(p) &&
                dom.dist_gamma2(p) >= rr - 1e-9) {
                key_index[idx] = int(cand.size());
                cand.push_back(p);
                cand_key.push_back(idx);
            }
            std::size_t i = 0;
            for (; i < N; ++i) {
                if (++idx[i] <= kmax) break;
                idx[i] = -kmax;
            }
            if (i == N) break;
        }
    }
    if (cand.empty()) throw ChainError("build_chain: no admissible candidate centers");

    // root: the candidate capturing the most Gamma1 samples, with the
    // enlarged clearance a theta R
    auto g1 = detail::gamma1_cloud_in_layer(dom, layer, 4000);
    int root = -1;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (dom.dist_gamma2(cand[i]) < layer.a * rr - 1e-9) continue;
        std::size_t cnt = 0;
        for (const auto& p : g1)
            if (dist(p, cand[i]) <= rr) ++cnt;
        if (cnt > best_count) {
            best_count = cnt;
            root = int(i);
        }
    }
    if (root < 0 || best_count == 0)
        throw ChainError("build_chain: no candidate ball captures Gamma1 capacity "
                         "(condition 1 unsatisfiable)");

    // greedy cover of the layer sphere
    auto samples = detail::cover_points(dom, layer);
    std::vector<int> chosen{root};
    std::vector<char> is_chosen(cand.size(), 0);
    is_chosen[std::size_t(root)] = 1;
    {
        std::vector<char> covered(samples.size(), 0);
        std::size_t left = samples.size();
        for (std::size_t si = 0; si < samples.size(); ++si)
            if (dist(samples[si], cand[std::size_t(root)]) <= rr) {
                covered[si] = 1;
                --left;
            }
        // restrict to candidates near the sphere
        std::vector<int> near;
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (std::abs(norm(cand[i]) - layer.q_star * layer.R) <= rr) near.push_back(int(i));
        while (left > 0) {
            int pick = -1;
            std::size_t best = 0;
            for (int ci : near) {
                if (is_chosen[std::size_t(ci)]) continue;
                std::size_t cnt = 0;
                for (std::size_t si = 0; si < samples.size(); ++si)
                    if (!covered[si] && dist(samples[si], cand[std::size_t(ci)]) <= rr) ++cnt;
                if (cnt > best) {
                    best = cnt;
                    pick = ci;
                }
            }
            if (pick < 0) {
                for (std::size_t si = 0; si < samples.size(); ++si)
                    if (!covered[si])
                        throw ChainError("build_chain: cover impossible; Gamma2 blocks all "
                                         "candidates near the sphere sample at radius " +
                                         std::to_string(norm(samples[si])));
                break;
            }
            is_chosen[std::size_t(pick)] = 1;
            chosen.push_back(pick);
            for (std::size_t si = 0; si < samples.size(); ++si)
                if (!covered[si] && dist(samples[si], cand[std::size_t(pick)]) <= rr) {
                    covered[si] = 1;
                    --left;
                }
        }
    }

    // connect everything to the root through the candidate lattice
    {
        const double step_bound = layer.adjacency_step();
        const int reach = int(std::floor(step_bound / step + 1e-9));
        std::vector<std::array<int, N>> offsets;
        {
            std::array<int, N> off{};
            for (std::size_t i = 0; i < N; ++i) off[i] = -reach;
            while (true) {
                double d2 = 0;
                for (std::size_t i = 0; i < N; ++i) d2 += double(off[i] * off[i]);
                bool zero = true;
                for (std::size_t i = 0; i < N; ++i)
                    if (off[i]) zero = false;
                if (!zero && d2 * step * step <= step_bound * step_bound + 1e-12)
                    offsets.push_back(off);
                std::size_t i = 0;
                for (; i < N; ++i) {
                    if (++off[i] <= reach) break;
                    off[i] = -reach;
                }
                if (i == N) break;
            }
        }
        // BFS over candidates from the root; remember parents
        std::vector<int> parent(cand.size(), -2);
        std::deque<int> queue{root};
        parent[std::size_t(root)] = -1;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto& off : offsets) {
                std::array<int, N> key = cand_key[std::size_t(u)];
                for (std::size_t i = 0; i < N; ++i) key[i] += off[i];
                auto it = key_index.find(key);
                if (it == key_index.end()) continue;
                int v = it->second;
                if (parent[std::size_t(v)] != -2) continue;
                if (!detail::adjacency_edge(dom, layer, cand[std::size_t(u)],
                                            cand[std::size_t(v)]))
                    continue;
                parent[std::size_t(v)] = u;
                queue.push_back(v);
            }
        }
        std::vector<int> extra;
        for (int ci : chosen) {
            if (parent[std::size_t(ci)] == -2)
                throw ChainError("build_chain: cover ball at radius " +
                                 std::to_string(norm(cand[std::size_t(ci)])) +
                                 " cannot be connected to the root");
            for (int v = parent[std::size_t(ci)]; v >= 0; v = parent[std::size_t(v)])
                if (!is_chosen[std::size_t(v)]) {
                    is_chosen[std::size_t(v)] = 1;
                    extra.push_back(v);
                }
        }
        chosen.insert(chosen.end(), extra.begin(), extra.end());
    }

    BallChain<N> chain;
    for (int ci : chosen) chain.balls.emplace_back(cand[std::size_t(ci)], rr);

    // adjacency among the final balls
    chain.adjacency.assign(chain.size(), {});
    for (std::size_t u = 0; u < chain.size(); ++u)
        for (std::size_t v = 0; v < chain.size(); ++v) {
            if (u == v) continue;
            if (detail::adjacency_edge(dom, layer, chain.balls[u].center,
                                       chain.balls[v].center))
                chain.adjacency[u].push_back(int(v));
        }

    // measured capacity ratio (condition 1 output)
    auto root_cloud = detail::gamma1_cloud_in_ball(dom, chain.balls[0], 400);
    auto layer_cloud = detail::gamma1_cloud_in_layer(dom, layer, 700);
    chain.cap_root = detail::cloud_capacity(root_cloud, s);
    chain.cap_layer = detail::cloud_capacity(layer_cloud, s);
    if (chain.cap_root <= 1e-12)
        throw ChainError("build_chain: root ball has zero Gamma1 capacity");
    chain.kappa_measured = chain.cap_layer > 0 ? chain.cap_root / chain.cap_layer : 1.0;
    return chain;
}

struct ChainCondition {
    bool ok = false;
    double margin = 0;  // worst slack; positive means satisfied
    std::string note;
};

struct ChainReport {
    ChainCondition capacity_ratio;   // condition 1
    ChainCondition gamma2_clearance; // condition 2 (and balls inside the layer)
    ChainCondition connectivity;     // condition 3
    ChainCondition cover;            // condition 4
    double kappa_measured = 0, cap_root = 0, cap_layer = 0;

    bool all_ok() const {
        return capacity_ratio.ok && gamma2_clearance.ok && connectivity.ok && cover.ok;
    }
};

/// Independent re-check of the four admissibility conditions.
template <std::size_t N>
ChainReport verify_chain(const Domain<N>& dom, const BallChain<N>& chain, LayerSpec layer,
                         double s) {
    layer.validate();
    ChainReport rep;
    if (chain.balls.empty()) {
        rep.connectivity.note = "empty chain";
        return rep;
    }
    const double rr = layer.ball_radius();

    // condition 1: capacity ratio
    {
        auto root_cloud = detail::gamma1_cloud_in_ball(dom, chain.balls[0], 400);
        auto layer_cloud = detail::gamma1_cloud_in_layer(dom, layer, 700);
        rep.cap_root = detail::cloud_capacity(root_cloud, s);
        rep.cap_layer = detail::cloud_capacity(layer_cloud, s);
        rep.kappa_measured = rep.cap_layer > 0 ? rep.cap_root / rep.cap_layer : 1.0;
        double kappa = layer.kappa > 0 ? layer.kappa : rep.kappa_measured;
        rep.capacity_ratio.margin = rep.cap_root - kappa * rep.cap_layer;
        rep.capacity_ratio.ok =
            rep.cap_root > 1e-12 && rep.capacity_ratio.margin >= -1e-9 * std::max(1.0, rep.cap_layer);
        if (!rep.capacity_ratio.ok) rep.capacity_ratio.note = "root capacity below kappa share";
    }

    // condition 2: Gamma2 clearance (tangency allowed) and balls inside U-hat
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string note;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            double need = (k == 0 ? layer.a * rr : rr);
            double have = dom.dist_gamma2(chain.balls[k].center);
            if (have - need < worst) {
                worst = have - need;
                if (have - need < -1e-9) note = "ball " + std::to_string(k) + " meets Gamma2";
            }
            double r = norm(chain.balls[k].center);
            double layer_slack =
                std::min(r - (layer.q2 * layer.R + rr), (layer.q3 * layer.R - rr) - r);
            if (layer_slack < worst) worst = layer_slack;
            if (layer_slack < -1e-9 && note.empty())
                note = "ball " + std::to_string(k) + " leaves the inner layer";
        }
        rep.gamma2_clearance.margin = worst;
        rep.gamma2_clearance.ok = worst >= -1e-9;
        rep.gamma2_clearance.note = note;
    }

    // condition 3: every listed edge passes the overlap test; every ball
    // reaches the root along listed edges
    {
        bool edges_ok = true;
        std::string note;
        for (std::size_t u = 0; u < chain.size() && edges_ok; ++u)
            for (int v : chain.adjacency[u])
                if (!detail::adjacency_edge(dom, layer, chain.balls[u].center,
                                            chain.balls[std::size_t(v)].center)) {
                    edges_ok = false;
                    note = "edge " + std::to_string(u) + "->" + std::to_string(v) + " fails";
                    break;
                }
        std::vector<char> seen(chain.size(), 0);
        std::deque<int> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : chain.adjacency[std::size_t(u)])
                if (!seen[std::size_t(v)]) {
                    seen[std::size_t(v)] = 1;
                    ++reached;
                    queue.push_back(v);
                }
        }
        rep.connectivity.ok = edges_ok && reached == chain.size();
        rep.connectivity.margin = double(reached) - double(chain.size());
        if (!edges_ok)
            rep.connectivity.note = note;
        else if (reached != chain.size())
            rep.connectivity.note = "chain not connected to the root";
    }

    // condition 4: sphere cover
    {
        auto samples = detail::cover_points(dom, layer);
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const auto& p : samples) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : chain.balls) best = std::min(best, dist(p, b.center) - rr);
            worst = std::max(worst, best);
            if (best > 1e-9) ok = false;
        }
        rep.cover.ok = ok;
        rep.cover.margin = -worst;
        if (!ok) rep.cover.note = "uncovered sphere sample";
    }
    return rep;
}

/// Shortest adjacency path from ball k back to the root, BFS with ascending
/// neighbor order (lowest-index tie break). Paths run root -> k along the
/// recorded edges; the returned list is [k, ..., 0].
template <std::size_t N>
std::vector<int> chain_path(const BallChain<N>& chain, int k) {
    if (k < 0 || std::size_t(k) >= chain.size()) throw ChainError("chain_path: bad index");
    std::vector<int> parent(chain.size(), -2);
    parent[0] = -1;
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        auto nb = chain.adjacency[std::size_t(u)];
        std::sort(nb.begin(), nb.end());
        for (int v : nb)
            if (parent[std::size_t(v)] == -2) {
                parent[std::size_t(v)] = u;
                queue.push_back(v);
            }
    }
    if (parent[std::size_t(k)] == -2)
        throw ChainError("chain_path: ball " + std::to_string(k) + " disconnected from root");
    std::vector<int> path;
    for (int v = k; v >= 0; v = parent[std::size_t(v)]) path.push_back(v);
    return path;
}

}  // namespace zaremba
