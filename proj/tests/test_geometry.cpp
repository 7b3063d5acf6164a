#include <catch_amalgamated.hpp>

#include "zaremba/geometry.hpp"

using namespace zaremba;

namespace {
Domain<3> halfspace() { return halfspace_builder<3>().build(); }
}  // namespace

TEST_CASE("classify on the flat half-space", "[geometry]") {
    auto dom = halfspace();
    CHECK(classify(dom, Vec<3>{{0, 0, -1}}, 1e-6) == Region::Interior);
    CHECK(classify(dom, Vec<3>{{0.2, 0.3, 0}}, 1e-6) == Region::OnGamma2);
    CHECK(classify(dom, Vec<3>{{0, 0, 1}}, 1e-6) == Region::Exterior);
    CHECK_THROWS_AS(classify(dom, Vec<3>{{0, 0, -1}}, 0.0), GeometryError);
}

TEST_CASE("classify sees obstacles as Gamma1", "[geometry]") {
    auto dom = halfspace_builder<3>()
                   .add(std::make_shared<BallObstacle<3>>(Vec<3>{{0, 0, -1}}, 0.25))
                   .build();
    CHECK(classify(dom, Vec<3>{{0, 0, -0.75}}, 1e-6) == Region::OnGamma1);
    CHECK(classify(dom, Vec<3>{{0, 0, -0.6}}, 1e-6) == Region::Interior);
    // interior of the obstacle is outside the domain
    CHECK(classify(dom, Vec<3>{{0, 0, -1}}, 1e-6) == Region::Exterior);
}

TEST_CASE("classify precedence and ambiguity", "[geometry]") {
    // Dirichlet sector lying on the graph: Gamma1 wins
    auto sector = std::make_shared<SectorObstacle>(0.7, 2.0);
    auto dom = halfspace_builder<3>().add(sector).build();
    CHECK(classify(dom, Vec<3>{{0.5, 0, 0}}, 1e-6) == Region::OnGamma1);
    CHECK(classify(dom, Vec<3>{{-0.5, 0, 0}}, 1e-6) == Region::OnGamma2);

    // slit hovering below the graph at a distance comparable to tol: ambiguous
    auto slit = std::make_shared<DiskObstacle<3>>(Vec<2>{{0, 0}}, -1.5e-6, 1.0);
    auto dom2 = halfspace_builder<3>().add(slit).build();
    CHECK_THROWS_AS(classify(dom2, Vec<3>{{0.3, 0, -1e-6}}, 2e-6), GeometryError);
    // refining tol resolves it
    CHECK(classify(dom2, Vec<3>{{0.3, 0, -1.5e-6}}, 1e-8) == Region::OnGamma1);
}

TEST_CASE("classify is scale-equivariant", "[geometry]") {
    PiecewiseLinearGraph g;
    g.t0 = g.t1 = -2.0;
    g.step = 0.5;
    g.k = 9;
    g.values.resize(81);
    for (std::size_t j = 0; j < 9; ++j)
        for (std::size_t i = 0; i < 9; ++i) {
            double u = -2.0 + 0.5 * double(i), v = -2.0 + 0.5 * double(j);
            g.values[j * 9 + i] = -0.3 * std::abs(u) + 0.2 * std::min(v, 0.0);
        }
    auto dom = graph_builder<3>(g, 2.0).build();

    for (double t : {0.5, 2.0}) {
        PiecewiseLinearGraph gs = g;
        gs.t0 = gs.t1 = -2.0 * t;
        gs.step = 0.5 * t;
        for (auto& v : gs.values) v *= t;  // f_t(x') = t f(x'/t)
        auto doms = graph_builder<3>(gs, 2.0 * t).build();
        Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            Vec<3> x{{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}};
            double tol = 1e-3;
            CHECK(classify(dom, x, tol) == classify(doms, t * x, t * tol));
        }
    }
}

TEST_CASE("lipschitz_estimate on standard graphs", "[geometry]") {
    auto zero = [](const Vec<2>&) { return 0.0; };
    CHECK(lipschitz_estimate<3>(zero, 1.0, 9) == 0.0);

    auto cone = [](const Vec<2>& t) { return norm(t); };
    CHECK(lipschitz_estimate<3>(cone, 1.0, 9) == Catch::Approx(1.0).margin(1e-9));

    auto lin = [](const Vec<2>& t) { return 0.5 * t[0]; };
    CHECK(lipschitz_estimate<3>(lin, 1.0, 17) == Catch::Approx(0.5).margin(1e-9));

    // monotone under refinement
    auto f = [](const Vec<2>& t) { return std::sin(3 * t[0]) * 0.4 + 0.1 * t[1]; };
    double l1 = lipschitz_estimate<3>(f, 1.0, 5);
    double l2 = lipschitz_estimate<3>(f, 1.0, 9);
    double l3 = lipschitz_estimate<3>(f, 1.0, 17);
    CHECK(l1 <= l2 + 1e-12);
    CHECK(l2 <= l3 + 1e-12);
}

TEST_CASE("cone_check against the exact cone domain", "[geometry]") {
    auto half = halfspace();
    CHECK(cone_check(half, Vec<3>{{0.3, -0.2, 0}}, 0.785398, 0.5, 64));

    auto cone1 = cone_builder<3>(1.0).build();
    const double pi4 = 0.78539816339744831;
    CHECK(cone_check(cone1, Vec<3>{{0, 0, 0}}, pi4 - 0.01, 0.1, 64));
    CHECK_FALSE(cone_check(cone1, Vec<3>{{0, 0, 0}}, pi4 + 0.1, 0.1, 64));

    // monotone in phi and h: shrinking either never flips true -> false
    for (double phi : {pi4 - 0.3, pi4 - 0.1, pi4 - 0.02}) {
        for (double h : {0.05, 0.1, 0.2}) {
            bool big = cone_check(cone1, Vec<3>{{0, 0, 0}}, phi, h, 48);
            if (big) {
                CHECK(cone_check(cone1, Vec<3>{{0, 0, 0}}, phi * 0.5, h, 48));
                CHECK(cone_check(cone1, Vec<3>{{0, 0, 0}}, phi, h * 0.5, 48));
            }
        }
    }
}

TEST_CASE("exact gamma2 distances of the presets", "[geometry]") {
    auto half = halfspace();
    CHECK(half.dist_gamma2(Vec<3>{{2, 1, -0.7}}) == Catch::Approx(0.7));
    auto cone = cone_builder<3>(1.0).build();
    // distance from the axis point (0,0,-1) to the cone z = -|x'|
    CHECK(cone.dist_gamma2(Vec<3>{{0, 0, -1}}) == Catch::Approx(1.0 / std::sqrt(2.0)));
    // generic fallback agrees with the exact value on a graph domain
    auto dom = cone_builder<3>(0.5).build();
    auto generic = dom;
    generic.gamma2_distance = nullptr;
    Vec<3> p{{0.4, -0.3, -0.9}};
    CHECK(generic.dist_gamma2(p) == Catch::Approx(dom.dist_gamma2(p)).margin(1e-4));
}

TEST_CASE("piecewise-linear graph interpolates its samples", "[geometry]") {
    PiecewiseLinearGraph g;
    g.t0 = g.t1 = -1.0;
    g.step = 0.25;
    g.k = 9;
    g.values.resize(81);
    for (std::size_t j = 0; j < 9; ++j)
        for (std::size_t i = 0; i < 9; ++i)
            g.values[j * 9 + i] = 0.3 * double(i) - 0.1 * double(j);
    // affine data is reproduced exactly, also between nodes
    CHECK(g(Vec<2>{{-1.0, -1.0}}) == Catch::Approx(0.0).margin(1e-14));
    CHECK(g(Vec<2>{{-0.6, 0.3}}) ==
          Catch::Approx(0.3 * (0.4 / 0.25) - 0.1 * (1.3 / 0.25)).margin(1e-12));
}
