#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "zaremba/barrier.hpp"
#include "zaremba/coeffs.hpp"
#include "zaremba/errors.hpp"
#include "zaremba/grid.hpp"

namespace zaremba {

template <std::size_t N>
struct BoundaryData {
    std::function<double(const Vec<N>&)> phi;   // Dirichlet values on Gamma1
    std::function<double(const Vec<N>&)> psi;   // oblique derivative on Gamma2
    std::function<double(const Vec<N>&)> load;  // right-hand side g of L u = g

    static BoundaryData homogeneous() {
        auto zero = [](const Vec<N>&) { return 0.0; };
        return {zero, zero, zero};
    }
    double phi_at(const Vec<N>& x) const { return phi ? phi(x) : 0.0; }
    double psi_at(const Vec<N>& x) const { return psi ? psi(x) : 0.0; }
    double load_at(const Vec<N>& x) const { return load ? load(x) : 0.0; }
};

/// Sparse rows of the monotone discretization: strictly positive diagonal,
/// nonpositive off-diagonal entries, weak diagonal dominance. This sign
/// pattern is what carries the discrete comparison principle, so assembly
/// refuses coefficient fields that would break it.
struct DiscreteSystem {
    std::size_t n_eq = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> cols;  // equation indices, diagonal excluded
    std::vector<double> vals;
    std::vector<double> diag;
    std::vector<double> rhs;
    std::vector<std::int32_t> node_to_eq;  // -1 for exterior nodes
    std::vector<std::size_t> eq_to_node;
    std::vector<std::uint8_t> eq_region;

    void check_m_matrix() const {
        for (std::size_t e = 0; e < n_eq; ++e) {
            if (!(diag[e] > 0)) throw SolverError("M-matrix check: nonpositive diagonal");
            double off = 0;
            for (auto k = row_ptr[e]; k < row_ptr[e + 1]; ++k) {
                if (vals[k] > 1e-12 * diag[e])
                    throw SolverError("M-matrix check: positive off-diagonal entry");
                off += std::abs(vals[k]);
            }
            if (off > diag[e] * (1.0 + 1e-9))
                throw SolverError("M-matrix check: row not diagonally dominant");
        }
    }

    /// Row action sum_j a_ij u_j (diagonal included), in equation space.
    double row_apply(std::size_t e, const std::vector<double>& u) const {
        double s = diag[e] * u[e];
        for (auto k = row_ptr[e]; k < row_ptr[e + 1]; ++k) s += vals[k] * u[cols[k]];
        return s;
    }
};

template <std::size_t N>
struct GridSolution {
    const Grid<N>* grid = nullptr;
    std::vector<double> nodal;  // per node; quiet NaN at exterior nodes
    double residual = 0;        // scaled max-norm at exit
    std::size_t iterations = 0;

    double value(std::size_t lin) const { return nodal[lin]; }
    NodalField<N> field() const { return {grid, nodal}; }
};

namespace detail {

template <std::size_t N>
struct RowBuffer {
    std::vector<std::pair<std::int32_t, double>> entries;
    double diag = 0, rhs = 0;
    void clear() {
        entries.clear();
        diag = 0;
        rhs = 0;
    }
};

}  // namespace detail

/// Assembles the monotone finite-difference system for
///   L u = -sum a_ij D_i D_j u = g,  u = phi on Gamma1,  du/dl = psi on Gamma2.
/// Interior rows: axis second differences weighted a_ii - sum_{j!=i}|a_ij|
/// plus rotated second differences along e_i + sign(a_ij) e_j weighted
/// |a_ij|; requires diagonal dominance of a(x) at every interior node.
/// Gamma2 rows: first-order upwind (u(x) - I[u](x - h l))/h with positively
/// weighted multilinear interpolation at the foot point.
template <std::size_t N>
DiscreteSystem assemble(const Domain<N>& dom, const CoefficientField<N>& field,
                        const Grid<N>& grid, const VectorField<N>& ell,
                        const BoundaryData<N>& data) {
    DiscreteSystem sys;
    const std::size_t nn = grid.size();
    sys.node_to_eq.assign(nn, -1);
    for (std::size_t lin = 0; lin < nn; ++lin) {
        if (grid.region(lin) == Region::Exterior) continue;
        sys.node_to_eq[lin] = std::int32_t(sys.eq_to_node.size());
        sys.eq_to_node.push_back(lin);
        sys.eq_region.push_back(grid.cls[lin]);
    }
    sys.n_eq = sys.eq_to_node.size();
    sys.row_ptr.assign(sys.n_eq + 1, 0);
    sys.diag.assign(sys.n_eq, 0.0);
    sys.rhs.assign(sys.n_eq, 0.0);

    const double h = grid.h;
    const double inv_h2 = 1.0 / (h * h);
    detail::RowBuffer<N> row;
    std::vector<std::pair<std::int32_t, double>> all_entries;
    all_entries.reserve(sys.n_eq * (2 * N + N * (N - 1)));

    auto neighbor_eq = [&](const std::array<int, N>& idx) -> std::pair<Region, std::int32_t> {
        if (!grid.in_bounds(idx))
            throw SolverError("assemble: stencil leaves the grid box; enlarge the box");
        std::size_t lin = grid.linear(idx);
        return {grid.region(lin), sys.node_to_eq[lin]};
    };

    for (std::size_t e = 0; e < sys.n_eq; ++e) {
        std::size_t lin = sys.eq_to_node[e];
        auto idx = grid.multi(lin);
        Vec<N> x = grid.node(idx);
        Region reg = Region(sys.eq_region[e]);
        row.clear();

        auto add_neighbor = [&](const std::array<int, N>& nidx, double coeff) {
            auto [nreg, neq] = neighbor_eq(nidx);
            if (nreg == Region::Exterior)
                throw SolverError("assemble: stencil exits the domain at node " +
                                  std::to_string(lin) + "; grid too coarse for this boundary");
            if (nreg == Region::OnGamma1) {
                row.rhs -= coeff * data.phi_at(grid.node(nidx));
            } else {
                row.entries.push_back({neq, coeff});
            }
        };

        if (reg == Region::OnGamma1) {
            row.diag = 1.0;
            row.rhs = data.phi_at(x);
        } else if (reg == Region::Interior) {
            SymMat<N> a = field.at(x);
            if (!a.symmetric(1e-12))
                throw SolverError("assemble: coefficient matrix not symmetric at node " +
                                  std::to_string(lin));
            if (!stencil_admissible(a))
                throw SolverError("assemble: coefficient field fails the monotone-stencil "
                                  "admissibility test (diagonal dominance) at node " +
                                  std::to_string(lin));
            for (std::size_t i = 0; i < N; ++i) {
                double w = a(i, i);
                for (std::size_t j = 0; j < N; ++j)
                    if (j != i) w -= std::abs(a(i, j));
                if (w > 0) {
                    row.diag += 2.0 * w * inv_h2;
                    auto up = idx, dn = idx;
                    up[i] += 1;
                    dn[i] -= 1;
                    add_neighbor(up, -w * inv_h2);
                    add_neighbor(dn, -w * inv_h2);
                }
            }
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = i + 1; j < N; ++j) {
                    double aij = a(i, j);
                    if (aij == 0.0) continue;
                    double w = std::abs(aij);
                    int sgn = aij > 0 ? 1 : -1;
                    row.diag += 2.0 * w * inv_h2;
                    auto up = idx, dn = idx;
                    up[i] += 1;
                    up[j] += sgn;
                    dn[i] -= 1;
                    dn[j] -= sgn;
                    add_neighbor(up, -w * inv_h2);
                    add_neighbor(dn, -w * inv_h2);
                }
            row.rhs += data.load_at(x);
        } else {  // OnGamma2: upwind oblique derivative
            Vec<N> l = ell.at(x);
            Vec<N> foot = x - h * l;
            if (!grid.box().contains(foot))
                throw SolverError("assemble: oblique foot point leaves the grid box at node " +
                                  std::to_string(lin));
            // multilinear weights at the foot point, exterior corners dropped
            std::array<int, N> base{};
            std::array<double, N> frac{};
            for (std::size_t i = 0; i < N; ++i) {
                double u = (foot[i] - grid.lo[i]) / h;
                int b = int(std::floor(u));
                b = std::max(0, std::min(b, grid.dims[i] - 2));
                base[i] = b;
                frac[i] = std::min(1.0, std::max(0.0, u - double(b)));
            }
            struct Corner {
                std::array<int, N> idx;
                double w;
                Region reg;
                std::int32_t eq;
            };
            std::vector<Corner> corners;
            double wsum = 0;
            for (std::size_t cbits = 0; cbits < (std::size_t(1) << N); ++cbits) {
                std::array<int, N> cidx = base;
                double w = 1;
                for (std::size_t i = 0; i < N; ++i) {
                    if (cbits & (std::size_t(1) << i)) {
                        cidx[i] += 1;
                        w *= frac[i];
                    } else {
                        w *= 1.0 - frac[i];
                    }
                }
                if (w == 0.0) continue;
                auto [creg, ceq] = neighbor_eq(cidx);
                if (creg == Region::Exterior) continue;
                corners.push_back({cidx, w, creg, ceq});
                wsum += w;
            }
            if (wsum < 0.5)
                throw SolverError("assemble: oblique foot point exits the domain at node " +
                                  std::to_string(lin) +
                                  "; vector field not inward enough for this grid");
            double inv_h = 1.0 / h;
            row.diag = inv_h;
            row.rhs = data.psi_at(x);
            for (const auto& c : corners) {
                double coeff = -(c.w / wsum) * inv_h;
                if (c.idx == idx) {
                    row.diag += coeff;
                } else if (c.reg == Region::OnGamma1) {
                    row.rhs -= coeff * data.phi_at(grid.node(c.idx));
                } else {
                    row.entries.push_back({c.eq, coeff});
                }
            }
            if (!(row.diag > 0))
                throw SolverError("assemble: oblique row lost its diagonal at node " +
                                  std::to_string(lin));
        }

        // merge duplicate columns (rotated stencils can revisit a neighbor)
        std::sort(row.entries.begin(), row.entries.end(),
                  [](const auto& p, const auto& q) { return p.first < q.first; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < row.entries.size(); ++k) {
            if (out > 0 && row.entries[k].first == row.entries[out - 1].first) {
                row.entries[out - 1].second += row.entries[k].second;
            } else {
                row.entries[out++] = row.entries[k];
            }
        }
        row.entries.resize(out);

        sys.diag[e] = row.diag;
        sys.rhs[e] = row.rhs;
        for (const auto& p : row.entries) all_entries.push_back(p);
        sys.row_ptr[e + 1] = std::int64_t(all_entries.size());
    }

    sys.cols.resize(all_entries.size());
    sys.vals.resize(all_entries.size());
    for (std::size_t k = 0; k < all_entries.size(); ++k) {
        sys.cols[k] = all_entries[k].first;
        sys.vals[k] = all_entries[k].second;
    }
    return sys;
}

struct SolveOptions {
    double tol = 1e-10;        // scaled residual max_i |r_i| / diag_i
    std::size_t max_iter = 1000000;
    double omega = 0;          // 0 = automatic over-relaxation
};

namespace detail {

/// Estimate of the Jacobi iteration spectral radius by power sweeps.
inline double jacobi_radius(const DiscreteSystem& sys, std::size_t sweeps = 48) {
    std::vector<double> x(sys.n_eq), y(sys.n_eq);
    Rng rng(4242);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    double mu = 0;
    for (std::size_t it = 0; it < sweeps; ++it) {
        double nrm = 0;
        for (std::size_t e = 0; e < sys.n_eq; ++e) {
            double s = 0;
            for (auto k = sys.row_ptr[e]; k < sys.row_ptr[e + 1]; ++k)
                s += sys.vals[k] * x[sys.cols[k]];
            y[e] = -s / sys.diag[e];
            nrm = std::max(nrm, std::abs(y[e]));
        }
        if (nrm < 1e-300) return 0.0;
        mu = nrm;
        for (std::size_t e = 0; e < sys.n_eq; ++e) x[e] = y[e] / nrm;
    }
    return std::min(mu, 1.0 - 1e-8);
}

}  // namespace detail

/// Deterministic SOR with fixed lexicographic sweep order. The relaxation
/// parameter defaults to the consistently-ordered optimum derived from a
/// power estimate of the Jacobi radius; on divergence the solve restarts
/// with the relaxation pulled back toward plain Gauss-Seidel.
template <std::size_t N>
GridSolution<N> solve(const Grid<N>& grid, const DiscreteSystem& sys,
                      const SolveOptions& opt = {}) {
    double omega = opt.omega;
    if (omega <= 0) {
        double mu = detail::jacobi_radius(sys);
        omega = 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - mu * mu)));
        omega = std::min(omega, 1.97);
    }

    std::vector<double> u(sys.n_eq, 0.0);
    auto scaled_residual = [&]() {
        double r = 0;
        for (std::size_t e = 0; e < sys.n_eq; ++e)
            r = std::max(r, std::abs(sys.rhs[e] - sys.row_apply(e, u)) / sys.diag[e]);
        return r;
    };

    double r0 = scaled_residual();
    double target = opt.tol;
    std::size_t it = 0;
    int restarts = 0;
    double last_checked = r0;
    std::size_t stagnant = 0;
    double reached = r0;

    while (it < opt.max_iter) {
        for (std::size_t e = 0; e < sys.n_eq; ++e) {
            double s = 0;
            for (auto k = sys.row_ptr[e]; k < sys.row_ptr[e + 1]; ++k)
                s += sys.vals[k] * u[sys.cols[k]];
            double unew = (sys.rhs[e] - s) / sys.diag[e];
            u[e] += omega * (unew - u[e]);
        }
        ++it;
        if (it % 16 == 0 || it == opt.max_iter) {
            double r = scaled_residual();
            reached = r;
            if (r <= target) break;
            if (!(r < 1e6 * (r0 + 1.0))) {  // divergence or NaN
                if (++restarts > 4)
                    throw SolverError("solve: diverged; last residual " + std::to_string(r));
                omega = 1.0 + (omega - 1.0) * 0.5;
                if (restarts >= 3) omega = 1.0;
                std::fill(u.begin(), u.end(), 0.0);
                last_checked = r0;
                stagnant = 0;
                continue;
            }
            if (r > last_checked * 0.999) {
                if (++stagnant >= 6) {
                    if (r <= 100 * target) break;  // rounding floor
                    throw SolverError("solve: stalled at residual " + std::to_string(r) +
                                      " (target " + std::to_string(target) + ")");
                }
            } else {
                stagnant = 0;
            }
            last_checked = r;
        }
    }
    if (it >= opt.max_iter && reached > target * 100)
        throw SolverError("solve: no convergence within max_iter; residual " +
                          std::to_string(reached));

    GridSolution<N> sol;
    sol.grid = &grid;
    sol.nodal.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t e = 0; e < sys.n_eq; ++e) sol.nodal[sys.eq_to_node[e]] = u[e];
    sol.residual = reached;
    sol.iterations = it;
    return sol;
}

/// Assemble-and-solve convenience wrapper.
template <std::size_t N>
GridSolution<N> solve_bvp(const Domain<N>& dom, const CoefficientField<N>& field,
                          const Grid<N>& grid, const VectorField<N>& ell,
                          const BoundaryData<N>& data, const SolveOptions& opt = {}) {
    DiscreteSystem sys = assemble(dom, field, grid, ell, data);
    return solve(grid, sys, opt);
}

/// Maximum nodal value over non-exterior nodes satisfying the predicate.
template <std::size_t N>
double sup_on(const GridSolution<N>& sol,
              const std::function<bool(const Vec<N>&)>& region) {
    const Grid<N>& g = *sol.grid;
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        if (g.region(lin) == Region::Exterior) continue;
        Vec<N> x = g.node(g.multi(lin));
        if (!region(x)) continue;
        any = true;
        best = std::max(best, sol.nodal[lin]);
    }
    if (!any) throw SolverError("sup_on: empty region");
    return best;
}

}  // namespace zaremba
