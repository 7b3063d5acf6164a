#include <catch_amalgamated.hpp>

#include "zaremba/barrier.hpp"

using namespace zaremba;

namespace {

/// Bisection oracle for the dilation factor: root of
/// g(a) = sqrt(a^2-1) (sqrt(1+L^2) + et (L-1)) - et (L+1) on (1, 10].
double bisect_a(double L, double et, double resid_tol = 1e-10) {
    auto g = [&](double a) {
        return std::sqrt(a * a - 1.0) * (std::sqrt(1.0 + L * L) + et * (L - 1.0)) -
               et * (L + 1.0);
    };
    double lo = 1.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(g(mid)) < resid_tol) return mid;
        (g(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("barrier_eval closed form", "[barrier]") {
    BarrierSpec<3> spec(1.0, 0.25, 1.1, 1.0, Vec<3>{});
    CHECK(barrier_eval(spec, Vec<3>{{1.1, 0, 0}}) == Catch::Approx(0.0).margin(1e-15));
    CHECK(barrier_eval(spec, Vec<3>{{0, 0.25, 0}}) ==
          Catch::Approx(1.0 - 0.25 / 1.1).margin(1e-14));
    CHECK(barrier_eval(spec, Vec<3>{{0, 0, 1}}) ==
          Catch::Approx(0.25 - 0.25 / 1.1).margin(1e-14));
    CHECK_THROWS_AS(barrier_eval(spec, Vec<3>{}), GeometryError);

    // radially decreasing
    double prev = barrier_eval(spec, Vec<3>{{0.1, 0, 0}});
    for (double r : {0.3, 0.6, 0.9, 1.05}) {
        double v = barrier_eval(spec, Vec<3>{{r, 0, 0}});
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("invalid barrier specs are rejected", "[barrier]") {
    CHECK_THROWS_AS(BarrierSpec<3>(1.0, 0.25, 0.99, 1.0, Vec<3>{}), GeometryError);
    CHECK_THROWS_AS(BarrierSpec<3>(1.0, 0.6, 1.1, 1.0, Vec<3>{}), GeometryError);
}

TEST_CASE("radial profile under the operator", "[barrier]") {
    auto id = CoefficientField<3>::identity();
    Rng rng(55);
    for (int i = 0; i < 100; ++i) {
        Vec<3> x = rng.uniform(0.1, 2.0) * rng.unit_vector<3>();
        CHECK(std::abs(radial_L_apply(id, 1.0, x)) <= 1e-12);
    }
    CHECK(radial_L_apply(id, 2.0, Vec<3>{{1, 0, 0}}) == Catch::Approx(-2.0));

    // equality case: s = e1 - 2 along the minimal eigenvector
    auto d = CoefficientField<3>::diagonal({1, 1, 4});
    CHECK(std::abs(radial_L_apply(d, 4.0, Vec<3>{{0.7, 0, 0}})) <= 1e-10);

    // exact harmonic exponent s = n - 2
    CHECK(std::abs(radial_L_apply(CoefficientField<4>::identity(), 2.0,
                                  Vec<4>{{0.3, -0.2, 0.5, 0.1}})) <= 1e-12);
}

TEST_CASE("radial profile is a subsolution whenever s >= e1 - 2", "[barrier]") {
    std::vector<CoefficientField<3>> fields{
        CoefficientField<3>::identity(), CoefficientField<3>::diagonal({1, 2, 3}),
        CoefficientField<3>::rot2d(0.4, {2, 1, 1}), CoefficientField<3>::oscillating(0.3, 5)};
    Rng rng(66);
    for (const auto& f : fields) {
        std::vector<Vec<3>> xs;
        for (int i = 0; i < 40; ++i) xs.push_back(rng.uniform(0.2, 2.0) * rng.unit_vector<3>());
        double s = e1(f, xs) - 2.0;
        for (const auto& x : xs) CHECK(radial_L_apply(f, s, x) <= 1e-10);
        for (const auto& x : xs) CHECK(radial_L_apply(f, s + 0.75, x) <= 1e-10);
    }
}

TEST_CASE("dilation factor closed form", "[barrier]") {
    auto [a, et] = compute_a(0.0, 0.78539816339744831);
    CHECK(et == Catch::Approx(0.2928932188134524).margin(1e-15));
    CHECK(a == Catch::Approx(1.0823922002923940).margin(1e-13));

    // equality in the oblique-sign inequality to high accuracy
    double g = std::sqrt(a * a - 1.0) * (1.0 + et * (-1.0)) - et;
    CHECK(std::abs(g) <= 1e-12);

    // matches the bisection oracle
    CHECK(a == Catch::Approx(bisect_a(0.0, et)).margin(1e-6));
    auto [a1, et1] = compute_a(1.0, 0.39269908169872414);
    CHECK(a1 == Catch::Approx(1.0459353954397923).margin(1e-13));
    CHECK(a1 == Catch::Approx(bisect_a(1.0, et1)).margin(1e-6));

    // degenerate margin: a -> 1
    CHECK(compute_a(0.0, 1e-9).a == Catch::Approx(1.0).margin(1e-6));

    // strictly increasing in eps
    CHECK(compute_a(0.0, 0.3).a < compute_a(0.0, 0.5).a);
    CHECK(compute_a(0.0, 0.5).a < compute_a(0.0, 0.7).a);

    CHECK_THROWS_AS(compute_a(1.0, 1.0), GeometryError);  // eps >= arccot(L)
}

TEST_CASE("verify_barrier certifies the half-space preset", "[barrier]") {
    const double R = 1.0;
    auto dom = halfspace_builder<3>().build();
    auto field = CoefficientField<3>::identity();
    auto ell = VectorField<3>::normal();
    auto [a, et] = compute_a(0.0, 0.78539816339744831);
    BarrierSpec<3> spec(1.0, 0.25, a, R, Vec<3>{{0, 0, -R}});

    auto rep = verify_barrier(spec, dom, field, ell, 4096);
    CHECK(rep.all_ok());
    CHECK(rep.worst_violation <= 1e-9);
    CHECK(rep.eta0 == Catch::Approx(0.0190301168721783).margin(1e-12));
    CHECK(rep.eta0 == Catch::Approx(std::pow(0.25, 1.0) * (1.0 - 1.0 / a)).margin(1e-15));
    // the plain half-space still contains the barrier pole's hole
    CHECK(rep.hole_intersects_domain);

    // with the matching ball obstacle the hole is empty
    auto dom2 = halfspace_builder<3>()
                    .add(std::make_shared<BallObstacle<3>>(Vec<3>{{0, 0, -R}}, 0.25 * R))
                    .build();
    auto rep2 = verify_barrier(spec, dom2, field, ell, 4096);
    CHECK(rep2.all_ok());
    CHECK_FALSE(rep2.hole_intersects_domain);
}

TEST_CASE("verify_barrier flags a broken oblique field", "[barrier]") {
    // an inward-tilted field with the wrong sign on one side of the plane
    auto dom = halfspace_builder<3>().build();
    auto field = CoefficientField<3>::identity();
    auto [a, et] = compute_a(0.0, 0.78539816339744831);
    BarrierSpec<3> spec(1.0, 0.25, a, 1.0, Vec<3>{{0, 0, -1}});
    // ell pointing along -e3 (into the domain): dw/dl flips sign
    VectorField<3> bad{[](const Vec<3>&) {
                           return Vec<3>{{0, 0, -1}};
                       },
                       0.5};
    auto rep = verify_barrier(spec, dom, field, bad, 2048);
    CHECK_FALSE(rep.oblique_sign_ok);
    CHECK(rep.worst_violation > 1e-6);
}
