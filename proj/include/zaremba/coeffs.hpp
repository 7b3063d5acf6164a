#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "zaremba/errors.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

template <std::size_t N>
struct SymMat {
    std::array<std::array<double, N>, N> a{};

    double& operator()(std::size_t i, std::size_t j) { return a[i][j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i][j]; }

    static SymMat identity() {
        SymMat m;
        for (std::size_t i = 0; i < N; ++i) m.a[i][i] = 1.0;
        return m;
    }
    static SymMat diagonal(const std::array<double, N>& d) {
        SymMat m;
        for (std::size_t i = 0; i < N; ++i) m.a[i][i] = d[i];
        return m;
    }
    double trace() const {
        double t = 0;
        for (std::size_t i = 0; i < N; ++i) t += a[i][i];
        return t;
    }
    double quad(const Vec<N>& x) const {
        double q = 0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) q += a[i][j] * x[i] * x[j];
        return q;
    }
    bool symmetric(double tol = 0.0) const {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j)
                if (std::abs(a[i][j] - a[j][i]) > tol) return false;
        return true;
    }
};

namespace detail {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
template <std::size_t N>
std::array<double, N> jacobi_eigenvalues(SymMat<N> m, double tol = 1e-13) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) off += m(i, j) * m(i, j);
        if (off < tol * tol) break;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1.0 / std::sqrt(t * t + 1), s = t * c;
                SymMat<N> r = m;
                for (std::size_t k = 0; k < N; ++k) {
                    r(k, p) = c * m(k, p) - s * m(k, q);
                    r(k, q) = s * m(k, p) + c * m(k, q);
                }
                m = r;
                for (std::size_t k = 0; k < N; ++k) {
                    r(p, k) = c * m(p, k) - s * m(q, k);
                    r(q, k) = s * m(p, k) + c * m(q, k);
                }
                m = r;
            }
    }
    std::array<double, N> ev{};
    for (std::size_t i = 0; i < N; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Closed-form eigenvalues of a symmetric 3x3 matrix (trigonometric solution
/// of the characteristic cubic), ascending. Falls back to Jacobi when the
/// deviatoric part is tiny or the cosine argument degenerates.
inline std::array<double, 3> eigenvalues3(const SymMat<3>& m) {
    double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    double q = m.trace() / 3.0;
    if (p1 < 1e-28) {
        std::array<double, 3> ev{m(0, 0), m(1, 1), m(2, 2)};
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    double p2 = 0;
    for (int i = 0; i < 3; ++i) p2 += (m(i, i) - q) * (m(i, i) - q);
    p2 += 2 * p1;
    double p = std::sqrt(p2 / 6.0);
    SymMat<3> b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
    double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                  b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                  b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    double r = std::clamp(detb / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2 * p * std::cos(phi);
    double e3 = q + 2 * p * std::cos(phi + 2.0943951023931953);
    double e2 = 3 * q - e1 - e3;
    std::array<double, 3> ev{e3, e2, e1};
    std::sort(ev.begin(), ev.end());
    return ev;
}

template <std::size_t N>
std::array<double, N> eigenvalues_sym(const SymMat<N>& m) {
    if constexpr (N == 3) {
        auto ev = eigenvalues3(m);
        // verify against the characteristic polynomial scale; refine if needed
        double scale = std::max({std::abs(ev[0]), std::abs(ev[2]), 1.0});
        double resid = std::abs(ev[0] + ev[1] + ev[2] - m.trace());
        if (resid > 1e-10 * scale) return jacobi_eigenvalues(m);
        return ev;
    } else {
        return jacobi_eigenvalues(m);
    }
}

}  // namespace detail

/// Symmetric uniformly elliptic coefficient field a_ij(x).
template <std::size_t N>
struct CoefficientField {
    std::function<SymMat<N>(const Vec<N>&)> a;
    std::string kind = "custom";

    SymMat<N> at(const Vec<N>& x) const { return a(x); }

    double lambda_min(const Vec<N>& x) const {
        return detail::eigenvalues_sym(at(x))[0];
    }

    static CoefficientField identity() {
        return {[](const Vec<N>&) { return SymMat<N>::identity(); }, "identity"};
    }
    static CoefficientField diagonal(const std::array<double, N>& d) {
        return {[d](const Vec<N>&) { return SymMat<N>::diagonal(d); }, "constant-diagonal"};
    }
    /// Constant full matrix: rotation by `angle` in the (0,1) plane applied to
    /// diagonal eigenvalues.
    static CoefficientField rot2d(double angle, const std::array<double, N>& eigs) {
        double c = std::cos(angle), s = std::sin(angle);
        SymMat<N> m = SymMat<N>::diagonal(eigs);
        SymMat<N> r;
        r(0, 0) = c * c * eigs[0] + s * s * eigs[1];
        r(1, 1) = s * s * eigs[0] + c * c * eigs[1];
        r(0, 1) = r(1, 0) = c * s * (eigs[0] - eigs[1]);
        for (std::size_t i = 2; i < N; ++i) r(i, i) = m(i, i);
        return {[r](const Vec<N>&) { return r; }, "constant-full"};
    }
    /// diag(1 + amplitude*sin(frequency*x_0), 1, ..., 1)
    static CoefficientField oscillating(double amplitude, double frequency) {
        return {[amplitude, frequency](const Vec<N>& x) {
                    SymMat<N> m = SymMat<N>::identity();
                    m(0, 0) = 1.0 + amplitude * std::sin(frequency * x[0]);
                    return m;
                },
                "oscillating"};
    }
};

/// Ellipticity function e(x, xi) = trace(a) / (xi^T a xi) for unit xi.
template <std::size_t N>
double ellipticity(const CoefficientField<N>& field, const Vec<N>& x, const Vec<N>& xi) {
    if (std::abs(norm(xi) - 1.0) > 1e-12)
        throw EllipticityError("ellipticity: xi must be a unit vector");
    SymMat<N> m = field.at(x);
    if (!m.symmetric(1e-14)) throw EllipticityError("ellipticity: matrix not symmetric");
    return m.trace() / m.quad(xi);
}

/// e1 = max over samples of trace(a)/lambda_min(a); the maximum of e(x, .)
/// over the unit sphere is attained at the minimal eigenvector.
template <std::size_t N>
double e1(const CoefficientField<N>& field, const std::vector<Vec<N>>& sample_points) {
    if (sample_points.empty()) throw EllipticityError("e1: empty sample set");
    double best = 0;
    for (const auto& x : sample_points) {
        SymMat<N> m = field.at(x);
        if (!m.symmetric(1e-14)) throw EllipticityError("e1: matrix not symmetric");
        double lmin = detail::eigenvalues_sym(m)[0];
        if (!(lmin > 0))
            throw EllipticityError("e1: matrix not positive definite at a sample point");
        best = std::max(best, m.trace() / lmin);
    }
    return best;
}

/// Diagonal dominance a_ii >= sum_{j != i} |a_ij|; the admissibility test for
/// the monotone mixed-derivative stencil.
template <std::size_t N>
bool stencil_admissible(const SymMat<N>& m, double tol = 1e-12) {
    for (std::size_t i = 0; i < N; ++i) {
        double off = 0;
        for (std::size_t j = 0; j < N; ++j)
            if (j != i) off += std::abs(m(i, j));
        if (m(i, i) < off - tol) return false;
    }
    return true;
}

}  // namespace zaremba
