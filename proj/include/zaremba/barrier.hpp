#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "zaremba/coeffs.hpp"
#include "zaremba/errors.hpp"
#include "zaremba/geometry.hpp"
#include "zaremba/vec.hpp"

namespace zaremba {

/// The radial barrier w(x) = alpha^s R^s / |x - center|^s - alpha^s / a^s.
template <std::size_t N>
struct BarrierSpec {
    double s = 1.0;
    double alpha = 0.25;  // inner hole ratio, in (0, 1/2)
    double a = 1.1;       // dilation factor of the outer ball, > 1
    double R = 1.0;
    Vec<N> center{};

    BarrierSpec() = default;
    BarrierSpec(double s_, double alpha_, double a_, double R_, const Vec<N>& c)
        : s(s_), alpha(alpha_), a(a_), R(R_), center(c) {
        if (!(alpha > 0 && alpha < 0.5))
            throw GeometryError("BarrierSpec: need 0 < alpha < 1/2");
        if (!(a > 1)) throw GeometryError("BarrierSpec: need a > 1");
        if (!(R > 0)) throw GeometryError("BarrierSpec: need R > 0");
        if (!(s > 0)) throw GeometryError("BarrierSpec: need s > 0");
    }

    /// Floor of w on B(center, R): eta0 = alpha^s (1 - a^{-s}).
    double eta0() const {
        return std::pow(alpha, s) * (1.0 - std::pow(a, -s));
    }
};

template <std::size_t N>
double barrier_eval(const BarrierSpec<N>& spec, const Vec<N>& x) {
    double r = dist(x, spec.center);
    if (r <= 0) throw GeometryError("barrier_eval: singular at the barrier center");
    double as = std::pow(spec.alpha, spec.s);
    return as * std::pow(spec.R / r, spec.s) - as / std::pow(spec.a, spec.s);
}

/// Gradient of w; used for the analytic oblique-derivative check.
template <std::size_t N>
Vec<N> barrier_grad(const BarrierSpec<N>& spec, const Vec<N>& x) {
    Vec<N> d = x - spec.center;
    double r = norm(d);
    if (r <= 0) throw GeometryError("barrier_grad: singular at the barrier center");
    double as = std::pow(spec.alpha, spec.s);
    double f = -spec.s * as * std::pow(spec.R, spec.s) / std::pow(r, spec.s + 2);
    return f * d;
}

/// Exact value of L |x|^{-s} = s |x|^{-s-2} (trace a - (s+2) xhat.a.xhat),
/// from D_iD_j |x|^{-s} = -s d_ij |x|^{-s-2} + s(s+2) x_i x_j |x|^{-s-4}.
/// Nonpositive for every x != 0 whenever s >= e1 - 2.
template <std::size_t N>
double radial_L_apply(const CoefficientField<N>& field, double s, const Vec<N>& x) {
    double r2 = norm2(x);
    if (r2 <= 0) throw GeometryError("radial_L_apply: singular at the origin");
    SymMat<N> m = field.at(x);
    double form = m.quad(x) / r2;
    return s * std::pow(r2, -0.5 * s - 1.0) * (m.trace() - (s + 2.0) * form);
}

/// Same, relative to an arbitrary pole.
template <std::size_t N>
double radial_L_apply(const CoefficientField<N>& field, double s, const Vec<N>& x,
                      const Vec<N>& pole) {
    double r2 = norm2(x - pole);
    if (r2 <= 0) throw GeometryError("radial_L_apply: singular at the pole");
    SymMat<N> m = field.at(x);
    Vec<N> d = x - pole;
    double form = m.quad(d) / r2;
    return s * std::pow(r2, -0.5 * s - 1.0) * (m.trace() - (s + 2.0) * form);
}

struct DilationFactor {
    double a = 1;
    double eps_tilde = 0;
};

/// The largest dilation a > 1 for which the boundary-layer barrier has a
/// nonpositive oblique derivative on the Lipschitz graph:
///   sqrt(a^2-1) (sqrt(1+L^2) + etilde (L-1)) - etilde (L+1) = 0,
/// where etilde is the uniform slack of the non-tangential field,
///   etilde = min( 1/sqrt(1+L^2) - sin(arccot L - eps),
///                 cos(arccot L - eps) - L/sqrt(1+L^2) ).
inline DilationFactor compute_a(double L, double eps) {
    if (!(L >= 0)) throw GeometryError("compute_a: need L >= 0");
    double phi = (L == 0) ? 1.5707963267948966 : std::atan(1.0 / L);
    if (!(eps > 0 && eps < phi))
        throw GeometryError("compute_a: need 0 < eps < arccot(L)");
    double inv = 1.0 / std::sqrt(1.0 + L * L);
    double et = std::min(inv - std::sin(phi - eps), std::cos(phi - eps) - L * inv);
    if (!(et > 0)) throw GeometryError("compute_a: vector field margin too small");
    double den = std::sqrt(1.0 + L * L) + et * (L - 1.0);
    if (!(den > 0)) throw GeometryError("compute_a: degenerate denominator");
    double ratio = et * (L + 1.0) / den;
    return {std::sqrt(1.0 + ratio * ratio), et};
}

/// Uniformly non-tangential outward field on Gamma2.
template <std::size_t N>
struct VectorField {
    std::function<Vec<N>(const Vec<N>&)> ell;
    double epsilon_margin = 0;

    Vec<N> at(const Vec<N>& x) const {
        Vec<N> v = ell(x);
        if (std::abs(norm(v) - 1.0) > 1e-9)
            throw GeometryError("VectorField: |ell| must be 1");
        return v;
    }

    static VectorField normal(double eps = 0.78539816339744831) {
        return {[](const Vec<N>&) { return axis<N>(N - 1, 1.0); }, eps};
    }
    static VectorField tilted(const Vec<N>& dir, double eps) {
        Vec<N> u = normalized(dir);
        return {[u](const Vec<N>&) { return u; }, eps};
    }
};

struct BarrierReport {
    bool sub_elliptic_ok = false;    // L w <= 0 on the domain part of the big ball
    bool dirichlet_bound_ok = false; // w <= 1 on Gamma1 inside the big ball
    bool oblique_sign_ok = false;    // dw/dl <= 0 on Gamma2 inside the big ball
    bool outer_zero_ok = false;      // w <= 0 on the outer sphere
    bool lower_bound_ok = false;     // w >= eta0 on the small ball
    double eta0 = 0;
    double worst_violation = 0;
    /// Informational: whether sampling found domain points strictly inside the
    /// alpha R hole (the barrier's pole must stay outside the closed domain
    /// for the growth argument; this flag does not affect the five checks).
    bool hole_intersects_domain = false;

    bool all_ok() const {
        return sub_elliptic_ok && dirichlet_bound_ok && oblique_sign_ok &&
               outer_zero_ok && lower_bound_ok;
    }
};

/// Certifies the five barrier properties on sampled points, with analytic
/// derivatives throughout (no finite differences). Failures are report
/// fields, never exceptions.
template <std::size_t N>
BarrierReport verify_barrier(const BarrierSpec<N>& spec, const Domain<N>& domain,
                             const CoefficientField<N>& field, const VectorField<N>& ell,
                             std::size_t sample_budget = 4096, double tol = 1e-9) {
    BarrierReport rep;
    rep.eta0 = spec.eta0();
    double worst = 0;
    const double aR = spec.a * spec.R;

    // (i) sub-ellipticity of the radial profile on domain samples in B(c, aR)
    {
        Rng rng(101);
        double v = 0;
        std::size_t found = 0, tries = 0, want = sample_budget;
        Box<N> bb;
        for (std::size_t i = 0; i < N; ++i) {
            bb.lo[i] = spec.center[i] - aR;
            bb.hi[i] = spec.center[i] + aR;
        }
        while (found < want && tries < 64 * want) {
            ++tries;
            Vec<N> x = rng.in_box(bb);
            if (dist(x, spec.center) >= aR) continue;
            if (!domain.inside(x)) continue;
            ++found;
            v = std::max(v, radial_L_apply(field, spec.s, x, spec.center));
            if (dist(x, spec.center) < spec.alpha * spec.R)
                rep.hole_intersects_domain = true;
        }
        rep.sub_elliptic_ok = v <= tol;
        worst = std::max(worst, v);
    }

    // (ii) w <= 1 on Gamma1 inside the big ball
    {
        double v = 0;
        auto pts = domain.gamma1_sampler ? domain.gamma1_sampler(Ball<N>(spec.center, aR))
                                         : std::vector<Vec<N>>{};
        for (const auto& p : pts) {
            if (dist(p, spec.center) > aR) continue;
            v = std::max(v, barrier_eval(spec, p) - 1.0);
        }
        rep.dirichlet_bound_ok = v <= tol;
        worst = std::max(worst, v);
    }

    // (iii) analytic oblique derivative on Gamma2 inside the big ball
    {
        double v = -std::numeric_limits<double>::infinity();
        bool any = false;
        if (domain.has_gamma2()) {
            std::size_t k = std::max<std::size_t>(24, std::size_t(std::sqrt(double(sample_budget))));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    Vec<N - 1> t{};
                    t[0] = -aR + 2 * aR * (double(i) + 0.5) / double(k);
                    if constexpr (N >= 3)
                        t[1] = -aR + 2 * aR * (double(j) + 0.5) / double(k);
                    // shift the tangential grid to the barrier center
                    for (std::size_t q = 0; q + 1 < N; ++q) t[q] += spec.center[q];
                    if (norm(t) > domain.gamma2_patch_radius) continue;
                    Vec<N> p = with_last(t, domain.graph_height(t));
                    if (dist(p, spec.center) > aR) continue;
                    any = true;
                    double d = dot(barrier_grad(spec, p), ell.at(p));
                    v = std::max(v, d);
                }
        }
        if (!any) v = 0.0;  // no Gamma2 in range: vacuous
        rep.oblique_sign_ok = v <= tol;
        worst = std::max(worst, v);
    }

    // (iv) w <= 0 on the outer sphere (exact zero for the radial profile)
    {
        double v = 0;
        for (const auto& u : sphere_samples<N>(512, 13)) {
            Vec<N> p = spec.center + aR * u;
            if (!domain.inside(p)) continue;
            v = std::max(v, barrier_eval(spec, p));
        }
        rep.outer_zero_ok = v <= tol;
        worst = std::max(worst, v);
    }

    // (v) w >= eta0 on the small ball
    {
        Rng rng(202);
        double v = 0;
        std::size_t found = 0, tries = 0, want = sample_budget / 2;
        Box<N> bb;
        for (std::size_t i = 0; i < N; ++i) {
            bb.lo[i] = spec.center[i] - spec.R;
            bb.hi[i] = spec.center[i] + spec.R;
        }
        while (found < want && tries < 64 * want) {
            ++tries;
            Vec<N> x = rng.in_box(bb);
            if (dist(x, spec.center) >= spec.R) continue;
            if (!domain.inside(x)) continue;
            ++found;
            v = std::max(v, rep.eta0 - barrier_eval(spec, x));
        }
        rep.lower_bound_ok = v <= tol;
        worst = std::max(worst, v);
    }

    rep.worst_violation = worst;
    return rep;
}

}  // namespace zaremba
