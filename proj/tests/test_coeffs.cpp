#include <catch_amalgamated.hpp>

#include "zaremba/coeffs.hpp"

using namespace zaremba;

namespace {

/// Brute-force sup of e(x, xi) over a fine xi-grid; the independent route for
/// the lambda_min-based e1.
double e1_bruteforce(const CoefficientField<3>& f, const std::vector<Vec<3>>& xs,
                     std::size_t nxi = 20000) {
    double best = 0;
    auto dirs = sphere_samples<3>(nxi, 3);
    for (const auto& x : xs)
        for (const auto& xi : dirs) best = std::max(best, ellipticity(f, x, normalized(xi)));
    return best;
}

}  // namespace

TEST_CASE("ellipticity function values", "[coeffs]") {
    auto id = CoefficientField<3>::identity();
    CHECK(ellipticity(id, Vec<3>{}, Vec<3>{{0, 0, 1}}) == Catch::Approx(3.0));
    CHECK(ellipticity(id, Vec<3>{}, normalized(Vec<3>{{1, 2, -1}})) == Catch::Approx(3.0));

    auto d = CoefficientField<3>::diagonal({1, 1, 4});
    CHECK(ellipticity(d, Vec<3>{}, Vec<3>{{0, 0, 1}}) == Catch::Approx(1.5));
    CHECK(ellipticity(d, Vec<3>{}, Vec<3>{{1, 0, 0}}) == Catch::Approx(6.0));

    CHECK_THROWS_AS(ellipticity(d, Vec<3>{}, Vec<3>{{0, 0, 2}}), EllipticityError);
}

TEST_CASE("ellipticity is even in xi", "[coeffs]") {
    auto f = CoefficientField<3>::rot2d(0.6, {3, 1, 2});
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        Vec<3> xi = rng.unit_vector<3>();
        CHECK(ellipticity(f, Vec<3>{}, xi) == Catch::Approx(ellipticity(f, Vec<3>{}, -xi)));
    }
}

TEST_CASE("e1 of the preset fields", "[coeffs]") {
    std::vector<Vec<3>> xs{Vec<3>{}};
    CHECK(e1(CoefficientField<3>::identity(), xs) == Catch::Approx(3.0));
    CHECK(e1(CoefficientField<3>::diagonal({1, 1, 4}), xs) == Catch::Approx(6.0));

    // oscillating field: worst point has a11 = 0.5, so trace/lambda_min = 5
    auto osc = CoefficientField<3>::oscillating(0.5, 10.0);
    std::vector<Vec<3>> grid;
    for (int i = 0; i <= 400; ++i)
        grid.push_back(Vec<3>{{-1.0 + 2.0 * i / 400.0, 0, 0}});
    double v = e1(osc, grid);
    CHECK(v == Catch::Approx(5.0).margin(2e-3));
    CHECK(v == Catch::Approx(e1_bruteforce(osc, grid, 4000)).margin(1e-3));
}

TEST_CASE("e1 equals the brute-force sphere maximum", "[coeffs]") {
    std::vector<Vec<3>> xs{Vec<3>{}, Vec<3>{{0.3, -0.2, 0.9}}};
    for (auto f : {CoefficientField<3>::identity(), CoefficientField<3>::diagonal({2, 1, 3}),
                   CoefficientField<3>::rot2d(0.5236, {2, 1, 1})}) {
        CHECK(e1(f, xs) == Catch::Approx(e1_bruteforce(f, xs)).margin(1e-3));
    }
}

TEST_CASE("e1 is scale invariant", "[coeffs]") {
    auto base = CoefficientField<3>::rot2d(0.3, {2.5, 1, 1.5});
    CoefficientField<3> scaled{[base](const Vec<3>& x) {
                                   SymMat<3> m = base.at(x);
                                   for (int i = 0; i < 3; ++i)
                                       for (int j = 0; j < 3; ++j) m(i, j) *= 7.5;
                                   return m;
                               },
                               "custom"};
    std::vector<Vec<3>> xs{Vec<3>{}};
    CHECK(e1(base, xs) == Catch::Approx(e1(scaled, xs)));
    CHECK(ellipticity(base, Vec<3>{}, Vec<3>{{1, 0, 0}}) ==
          Catch::Approx(ellipticity(scaled, Vec<3>{}, Vec<3>{{1, 0, 0}})));
}

TEST_CASE("e1 rejects indefinite matrices", "[coeffs]") {
    CoefficientField<3> bad{[](const Vec<3>&) {
                                return SymMat<3>::diagonal({1, -1, 1});
                            },
                            "custom"};
    CHECK_THROWS_AS(e1(bad, std::vector<Vec<3>>{Vec<3>{}}), EllipticityError);
}

TEST_CASE("closed-form 3x3 eigenvalues match Jacobi", "[coeffs]") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        SymMat<3> m;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = rng.uniform(-2, 2);
        for (int i = 0; i < 3; ++i) m(i, i) += 4.0;  // keep it comfortably PD
        auto a = detail::eigenvalues3(m);
        auto b = detail::jacobi_eigenvalues(m);
        for (int i = 0; i < 3; ++i) CHECK(a[i] == Catch::Approx(b[i]).margin(1e-10));
    }
}

TEST_CASE("four-dimensional fields work through the Jacobi path", "[coeffs]") {
    auto d4 = CoefficientField<4>::diagonal({1, 2, 3, 4});
    CHECK(e1(d4, std::vector<Vec<4>>{Vec<4>{}}) == Catch::Approx(10.0));
    CHECK(ellipticity(d4, Vec<4>{}, axis<4>(0)) == Catch::Approx(10.0));
}

TEST_CASE("stencil admissibility test", "[coeffs]") {
    CHECK(stencil_admissible(SymMat<3>::identity()));
    auto r = CoefficientField<3>::rot2d(0.5236, {2, 1, 1}).at(Vec<3>{});
    CHECK(stencil_admissible(r));
    SymMat<3> bad = SymMat<3>::identity();
    bad(0, 1) = bad(1, 0) = 1.5;
    CHECK_FALSE(stencil_admissible(bad));
}
