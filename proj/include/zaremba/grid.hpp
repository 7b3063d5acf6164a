#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "zaremba/errors.hpp"
#include "zaremba/geometry.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

/// Uniform lattice over a box with per-node boundary classification.
/// Nodes sit at lo + idx*h; classification uses tol = h/2. Box-face nodes
/// that are not exterior carry Dirichlet data (the far boundary of the
/// computational window), so every system is pinned.
template <std::size_t N>
struct Grid {
    Vec<N> lo{};
    double h = 0;
    std::array<int, N> dims{};
    std::vector<std::uint8_t> cls;

    std::size_t size() const {
        std::size_t s = 1;
        for (auto d : dims) s *= std::size_t(d);
        return s;
    }
    std::size_t linear(const std::array<int, N>& idx) const {
        std::size_t lin = 0;
        for (std::size_t i = N; i-- > 0;) lin = lin * std::size_t(dims[i]) + std::size_t(idx[i]);
        return lin;
    }
    std::array<int, N> multi(std::size_t lin) const {
        std::array<int, N> idx{};
        for (std::size_t i = 0; i < N; ++i) {
            idx[i] = int(lin % std::size_t(dims[i]));
            lin /= std::size_t(dims[i]);
        }
        return idx;
    }
    bool in_bounds(const std::array<int, N>& idx) const {
        for (std::size_t i = 0; i < N; ++i)
            if (idx[i] < 0 || idx[i] >= dims[i]) return false;
        return true;
    }
    bool on_face(const std::array<int, N>& idx) const {
        for (std::size_t i = 0; i < N; ++i)
            if (idx[i] == 0 || idx[i] == dims[i] - 1) return true;
        return false;
    }
    Vec<N> node(const std::array<int, N>& idx) const {
        Vec<N> x = lo;
        for (std::size_t i = 0; i < N; ++i) x[i] += h * double(idx[i]);
        return x;
    }
    Region region(std::size_t lin) const { return Region(cls[lin]); }

    Box<N> box() const {
        Box<N> b;
        b.lo = lo;
        b.hi = lo;
        for (std::size_t i = 0; i < N; ++i) b.hi[i] += h * double(dims[i] - 1);
        return b;
    }

    static Grid build(const Domain<N>& dom, const Box<N>& want, double h) {
        if (!(h > 0)) throw GeometryError("Grid: h must be positive");
        Grid g;
        g.lo = want.lo;
        g.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            g.dims[i] = int(std::floor(want.extent(i) / h + 1e-9)) + 1;
            if (g.dims[i] < 3) throw GeometryError("Grid: box too small for spacing");
        }
        g.cls.resize(g.size());
        const double tol = h / 2;
        for (std::size_t lin = 0; lin < g.size(); ++lin) {
            auto idx = g.multi(lin);
            Vec<N> x = g.node(idx);
            Region r = classify(dom, x, tol);
            if (g.on_face(idx) && r != Region::Exterior) r = Region::OnGamma1;
            g.cls[lin] = std::uint8_t(r);
        }
        return g;
    }
};

/// Nodal field over a grid with multilinear interpolation that skips exterior
/// corners (weights renormalized). Values at exterior nodes are unused.
template <std::size_t N>
struct NodalField {
    const Grid<N>* grid = nullptr;
    std::vector<double> values;

    double interpolate(const Vec<N>& x) const {
        const Grid<N>& g = *grid;
        std::array<int, N> base{};
        std::array<double, N> frac{};
        for (std::size_t i = 0; i < N; ++i) {
            double u = (x[i] - g.lo[i]) / g.h;
            double fl = std::floor(u);
            int b = int(fl);
            b = std::max(0, std::min(b, g.dims[i] - 2));
            base[i] = b;
            frac[i] = std::min(1.0, std::max(0.0, u - double(b)));
        }
        double acc = 0, wsum = 0;
        for (std::size_t corner = 0; corner < (std::size_t(1) << N); ++corner) {
            std::array<int, N> idx = base;
            double w = 1;
            for (std::size_t i = 0; i < N; ++i) {
                if (corner & (std::size_t(1) << i)) {
                    idx[i] += 1;
                    w *= frac[i];
                } else {
                    w *= 1.0 - frac[i];
                }
            }
            std::size_t lin = g.linear(idx);
            if (g.region(lin) == Region::Exterior) continue;
            acc += w * values[lin];
            wsum += w;
        }
        if (wsum < 1e-12)
            throw SolverError("interpolate: all cell corners exterior");
        return acc / wsum;
    }
};

}  // namespace zaremba
