#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "zaremba/errors.hpp"
#include "zaremba/lp.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

template <std::size_t N>
struct DiscreteMeasure {
    std::vector<Vec<N>> atoms;
    std::vector<double> masses;

    double total() const {
        double t = 0;
        for (double m : masses) t += m;
        return t;
    }
    void validate() const {
        if (atoms.size() != masses.size())
            throw CapacityError("measure: atoms/masses length mismatch");
        for (double m : masses)
            if (!(m >= 0)) throw CapacityError("measure: negative mass");
    }
};

/// Riesz potential sum_i m_i / |x - y_i|^s.
template <std::size_t N>
double potential(const DiscreteMeasure<N>& mu, double s, const Vec<N>& x) {
    double p = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        double d = dist(x, mu.atoms[i]);
        if (d <= 0)
            throw CapacityError("potential: evaluation point coincides with an atom");
        p += mu.masses[i] / std::pow(d, s);
    }
    return p;
}

template <std::size_t N>
struct CapacityProblem {
    std::vector<Vec<N>> atoms;            // discretization of the compact set H
    double s = 1.0;                       // Riesz exponent
    std::vector<Vec<N>> constraint_points;  // sampled from the complement of H
    double feas_tol = 1e-9;

    void validate() const {
        if (!(s > 0)) throw CapacityError("capacity: s must be positive");
        for (const auto& c : constraint_points)
            for (const auto& a : atoms)
                if (dist(c, a) <= 0)
                    throw CapacityError("capacity: constraint point touches an atom");
    }
};

/// mu is admissible when its potential is <= 1 + feas_tol at every constraint
/// point of the problem.
template <std::size_t N>
bool is_admissible(const DiscreteMeasure<N>& mu, const CapacityProblem<N>& problem) {
    if (problem.constraint_points.empty())
        throw CapacityError("is_admissible: empty constraint set");
    for (const auto& c : problem.constraint_points)
        if (potential(mu, problem.s, c) > 1.0 + problem.feas_tol) return false;
    return true;
}

namespace detail {

template <std::size_t N>
double typical_spacing(const std::vector<Vec<N>>& atoms) {
    // median nearest-neighbour distance
    std::vector<double> nn;
    nn.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < atoms.size(); ++j)
            if (j != i) best = std::min(best, dist(atoms[i], atoms[j]));
        nn.push_back(best);
    }
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    return nn[nn.size() / 2];
}

/// Local surface normal from the covariance of the k nearest neighbours
/// (smallest principal direction); used to push near-field constraint points
/// off the atom cloud on both sides.
template <std::size_t N>
Vec<N> local_normal(const std::vector<Vec<N>>& atoms, std::size_t i, std::size_t k = 8) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j)
        if (j != i) d.push_back({dist(atoms[i], atoms[j]), j});
    std::size_t kk = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    Vec<N> mean{};
    for (std::size_t t = 0; t < kk; ++t) mean += atoms[d[t].second];
    mean = (1.0 / double(kk)) * mean;
    double cov[N][N] = {};
    for (std::size_t t = 0; t < kk; ++t) {
        Vec<N> u = atoms[d[t].second] - mean;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = 0; q < N; ++q) cov[p][q] += u[p] * u[q];
    }
    // smallest principal direction by a few inverse-ish power iterations on
    // (tr I - cov); deterministic start
    double tr = 0;
    for (std::size_t p = 0; p < N; ++p) tr += cov[p][p];
    Vec<N> v{};
    v[N - 1] = 1.0;
    v[0] = 0.3;
    v = normalized(v);
    for (int iter = 0; iter < 32; ++iter) {
        Vec<N> w{};
        for (std::size_t p = 0; p < N; ++p) {
            double acc = (tr + 1e-30) * v[p];
            for (std::size_t q = 0; q < N; ++q) acc -= cov[p][q] * v[q];
            w[p] = acc;
        }
        double nw = norm(w);
        if (nw < 1e-30) break;
        v = (1.0 / nw) * w;
    }
    return v;
}

}  // namespace detail

/// Standard constraint layout around an atom cloud: two enclosing spherical
/// shells (1.05 and 3 times the circumradius around the centroid) plus a pair
/// of near-field points off each atom along +-(local normal) at half the
/// typical atom spacing. Points closer than the clearance to any atom are
/// dropped.
template <std::size_t N>
std::vector<Vec<N>> standard_constraints(const std::vector<Vec<N>>& atoms,
                                         std::size_t shell_count = 256) {
    if (atoms.empty()) throw CapacityError("constraints: empty atom cloud");
    Vec<N> centroid{};
    for (const auto& a : atoms) centroid += a;
    centroid = (1.0 / double(atoms.size())) * centroid;
    double r_h = 0;
    for (const auto& a : atoms) r_h = std::max(r_h, dist(a, centroid));
    r_h = std::max(r_h, 1e-12);

    std::vector<Vec<N>> out;
    for (double rad : {1.05 * r_h, 3.0 * r_h})
        for (const auto& u : sphere_samples<N>(shell_count, 11))
            out.push_back(centroid + rad * u);

    if (atoms.size() >= 2) {
        double spacing = detail::typical_spacing(atoms);
        double clearance = 0.5 * spacing;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            Vec<N> nrm = detail::local_normal(atoms, i);
            for (double sgn : {1.0, -1.0}) {
                Vec<N> p = atoms[i] + (sgn * clearance) * nrm;
                bool ok = true;
                for (const auto& a : atoms)
                    if (dist(p, a) < 0.45 * spacing) { ok = false; break; }
                if (ok) out.push_back(p);
            }
        }
    }
    return out;
}

template <std::size_t N>
struct CapacityEstimate {
    double value = 0;
    DiscreteMeasure<N> witness;
    std::size_t lp_iterations = 0;
};

/// Lower estimate of the s-capacity: the maximal total mass of a nonnegative
/// measure on the given atoms whose potential stays <= 1 at every constraint
/// point (a finite LP solved by dense simplex). Single-atom sets report 0 by
/// convention, matching the continuum value of a point.
template <std::size_t N>
CapacityEstimate<N> capacity_estimate(const CapacityProblem<N>& problem) {
    if (problem.atoms.empty()) throw CapacityError("capacity_estimate: empty atom set");
    problem.validate();
    CapacityEstimate<N> res;
    res.witness.atoms = problem.atoms;
    res.witness.masses.assign(problem.atoms.size(), 0.0);
    if (problem.atoms.size() == 1) return res;
    if (problem.constraint_points.empty())
        throw CapacityError("capacity_estimate: empty constraint set (LP would be unbounded)");

    const std::size_t m = problem.constraint_points.size(), n = problem.atoms.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double d = dist(problem.constraint_points[i], problem.atoms[j]);
            A[i][j] = 1.0 / std::pow(d, problem.s);
        }
    auto lp = detail::lp_max(std::move(A), std::vector<double>(m, 1.0),
                             std::vector<double>(n, 1.0));
    res.witness.masses = lp.x;
    res.lp_iterations = lp.iterations;

    // guarantee witness feasibility against rounding
    double worst = 0;
    for (const auto& c : problem.constraint_points)
        worst = std::max(worst, potential(res.witness, problem.s, c));
    if (worst > 1.0) {
        double sc = 1.0 / worst;
        for (double& mm : res.witness.masses) mm *= sc;
    }
    res.value = res.witness.total();
    return res;
}

/// Independent oracle for at most 3 atoms: enumerates every active-constraint
/// vertex of {A m <= 1, m >= 0} and returns the maximal total mass (exact up
/// to rounding). Deliberately brute force; no convention for single points.
template <std::size_t N>
double capacity_oracle_small(const std::vector<Vec<N>>& atoms, double s,
                             const std::vector<Vec<N>>& constraints) {
    const std::size_t n = atoms.size();
    if (n == 0 || n > 3) throw CapacityError("capacity_oracle_small: supports 1..3 atoms");
    const std::size_t m = constraints.size();
    if (m == 0) throw CapacityError("capacity_oracle_small: empty constraint set");
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A[i][j] = 1.0 / std::pow(dist(constraints[i], atoms[j]), s);

    auto feasible = [&](const std::vector<double>& x) {
        for (double v : x)
            if (v < -1e-12) return false;
        for (std::size_t i = 0; i < m; ++i) {
            double lhs = 0;
            for (std::size_t j = 0; j < n; ++j) lhs += A[i][j] * x[j];
            if (lhs > 1.0 + 1e-10) return false;
        }
        return true;
    };

    double best = 0.0;  // origin is a vertex
    // choose which variables are zero; the rest are pinned by active rows
    for (unsigned zero_mask = 0; zero_mask < (1u << n); ++zero_mask) {
        std::vector<std::size_t> free_idx;
        for (std::size_t j = 0; j < n; ++j)
            if (!(zero_mask & (1u << j))) free_idx.push_back(j);
        std::size_t k = free_idx.size();
        if (k == 0) continue;
        // all k-subsets of rows
        std::vector<std::size_t> rows(k);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
            if (depth == k) {
                // solve the k x k system A[rows][free] x = 1
                double M[3][3] = {}, rhs[3] = {};
                for (std::size_t r = 0; r < k; ++r) {
                    rhs[r] = 1.0;
                    for (std::size_t cidx = 0; cidx < k; ++cidx)
                        M[r][cidx] = A[rows[r]][free_idx[cidx]];
                }
                // Gaussian elimination with partial pivoting
                double x[3] = {};
                bool ok = true;
                for (std::size_t col = 0; col < k && ok; ++col) {
                    std::size_t piv = col;
                    for (std::size_t r = col + 1; r < k; ++r)
                        if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
                    if (std::abs(M[piv][col]) < 1e-14) { ok = false; break; }
                    std::swap(M[col], M[piv]);
                    std::swap(rhs[col], rhs[piv]);
                    for (std::size_t r = col + 1; r < k; ++r) {
                        double f = M[r][col] / M[col][col];
                        for (std::size_t cc = col; cc < k; ++cc) M[r][cc] -= f * M[col][cc];
                        rhs[r] -= f * rhs[col];
                    }
                }
                if (ok) {
                    for (std::size_t r = k; r-- > 0;) {
                        double acc = rhs[r];
                        for (std::size_t cc = r + 1; cc < k; ++cc) acc -= M[r][cc] * x[cc];
                        x[r] = acc / M[r][r];
                    }
                    std::vector<double> full(n, 0.0);
                    for (std::size_t cidx = 0; cidx < k; ++cidx) full[free_idx[cidx]] = x[cidx];
                    if (feasible(full)) {
                        double tot = 0;
                        for (double v : full) tot += v;
                        best = std::max(best, tot);
                    }
                }
                return;
            }
            for (std::size_t r = start; r < m; ++r) {
                rows[depth] = r;
                rec(r + 1, depth + 1);
            }
        };
        rec(0, 0);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Cloud generators for the preset experiments.
// ---------------------------------------------------------------------------

/// Quasi-uniform cloud on a sphere of given radius.
template <std::size_t N>
std::vector<Vec<N>> sphere_cloud(const Vec<N>& center, double radius, std::size_t count) {
    std::vector<Vec<N>> out;
    for (const auto& u : sphere_samples<N>(count, 7)) out.push_back(center + radius * u);
    return out;
}

}  // namespace zaremba
