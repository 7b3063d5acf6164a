#include <catch_amalgamated.hpp>

#include "zaremba/capacity.hpp"
#include "zaremba/geometry.hpp"

using namespace zaremba;

namespace {

CapacityProblem<3> make_problem(std::vector<Vec<3>> atoms, double s,
                                std::size_t shells = 128) {
    CapacityProblem<3> p;
    p.atoms = std::move(atoms);
    p.s = s;
    p.constraint_points = standard_constraints(p.atoms, shells);
    return p;
}

}  // namespace

TEST_CASE("potential of point measures", "[capacity]") {
    DiscreteMeasure<3> one{{Vec<3>{}}, {1.0}};
    CHECK(potential(one, 1.0, Vec<3>{{2, 0, 0}}) == Catch::Approx(0.5));

    DiscreteMeasure<3> two{{Vec<3>{{1, 0, 0}}, Vec<3>{{-1, 0, 0}}}, {0.5, 0.5}};
    CHECK(potential(two, 1.0, Vec<3>{}) == Catch::Approx(1.0));

    CHECK_THROWS_AS(potential(one, 1.0, Vec<3>{}), CapacityError);
}

TEST_CASE("uniform sphere measure reproduces the Newton potential", "[capacity]") {
    auto atoms = sphere_cloud(Vec<3>{}, 1.0, 1000);
    DiscreteMeasure<3> mu{atoms, std::vector<double>(1000, 1.0 / 1000)};
    CHECK(potential(mu, 1.0, Vec<3>{{3, 0, 0}}) == Catch::Approx(1.0 / 3).margin(1e-3));
}

TEST_CASE("is_admissible", "[capacity]") {
    auto prob = make_problem(sphere_cloud(Vec<3>{}, 1.0, 60), 1.0);
    DiscreteMeasure<3> zero{prob.atoms, std::vector<double>(prob.atoms.size(), 0.0)};
    CHECK(is_admissible(zero, prob));

    CapacityProblem<3> single;
    single.atoms = {Vec<3>{}};
    single.s = 1.0;
    single.constraint_points = {Vec<3>{{1, 0, 0}}};
    DiscreteMeasure<3> heavy{single.atoms, {10.0}};
    CHECK_FALSE(is_admissible(heavy, single));

    auto est = capacity_estimate(prob);
    CHECK(is_admissible(est.witness, prob));
}

TEST_CASE("small-instance oracle solves binding constraints exactly", "[capacity]") {
    // one atom, nearest constraint at distance d: mass = d
    for (double d : {0.5, 1.0, 2.5}) {
        double v = capacity_oracle_small<3>({Vec<3>{}}, 1.0,
                                            {Vec<3>{{d, 0, 0}}, Vec<3>{{3 * d, 0, 0}}});
        CHECK(v == Catch::Approx(d).margin(1e-10));
    }
    // two atoms, single midpoint constraint at distance d from each
    double v2 = capacity_oracle_small<3>({Vec<3>{{1, 0, 0}}, Vec<3>{{-1, 0, 0}}}, 1.0,
                                         {Vec<3>{}});
    CHECK(v2 == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("simplex agrees with the vertex-enumeration oracle", "[capacity]") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t na = 2 + trial % 2;
        std::vector<Vec<3>> atoms;
        for (std::size_t i = 0; i < na; ++i)
            atoms.push_back(Vec<3>{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}});
        std::vector<Vec<3>> cons;
        for (int i = 0; i < 24; ++i) {
            Vec<3> c = 2.5 * rng.unit_vector<3>();
            bool ok = true;
            for (const auto& a : atoms)
                if (dist(c, a) < 0.3) ok = false;
            if (ok) cons.push_back(c);
        }
        if (cons.empty()) continue;
        double oracle = capacity_oracle_small(atoms, 1.0, cons);
        CapacityProblem<3> p;
        p.atoms = atoms;
        p.s = 1.0;
        p.constraint_points = cons;
        double est = capacity_estimate(p).value;
        CHECK(est == Catch::Approx(oracle).margin(1e-8));
    }
}

TEST_CASE("unit sphere capacity is close to one", "[capacity]") {
    auto prob = make_problem(sphere_cloud(Vec<3>{}, 1.0, 400), 1.0);
    auto est = capacity_estimate(prob);
    CHECK(est.value == Catch::Approx(1.0).margin(0.06));
}

TEST_CASE("capacity scaling law", "[capacity]") {
    auto atoms = sphere_cloud(Vec<3>{}, 1.0, 200);
    for (double s : {1.0, 2.0}) {
        double base = capacity_estimate(make_problem(atoms, s)).value;
        for (double t : {0.5, 2.0}) {
            std::vector<Vec<3>> scaled;
            for (const auto& a : atoms) scaled.push_back(t * a);
            double v = capacity_estimate(make_problem(scaled, s)).value;
            CHECK(v / std::pow(t, s) == Catch::Approx(base).epsilon(0.02));
        }
    }
}

TEST_CASE("capacity monotone under inclusion and extra constraints", "[capacity]") {
    Rng rng(41);
    auto big = sphere_cloud(Vec<3>{}, 1.0, 120);
    auto cons = standard_constraints(big, 96);
    CapacityProblem<3> pbig{big, 1.0, cons};
    double vbig = capacity_estimate(pbig).value;

    // nested subset with the identical constraint set
    std::vector<Vec<3>> small;
    for (std::size_t i = 0; i < big.size(); ++i)
        if (rng.next_double() < 0.6) small.push_back(big[i]);
    CapacityProblem<3> psmall{small, 1.0, cons};
    double vsmall = capacity_estimate(psmall).value;
    CHECK(vsmall <= vbig + 1e-10);

    // extra constraint points never increase the value
    auto cons2 = cons;
    for (const auto& u : sphere_samples<3>(64, 29)) cons2.push_back(1.2 * u);
    CapacityProblem<3> ptight{big, 1.0, cons2};
    CHECK(capacity_estimate(ptight).value <= vbig + 1e-10);
}

TEST_CASE("degenerate capacity inputs", "[capacity]") {
    CapacityProblem<3> single;
    single.atoms = {Vec<3>{}};
    single.s = 1.0;
    single.constraint_points = {Vec<3>{{1, 0, 0}}};
    CHECK(capacity_estimate(single).value == 0.0);

    CapacityProblem<3> noc;
    noc.atoms = sphere_cloud(Vec<3>{}, 1.0, 10);
    noc.s = 1.0;
    CHECK_THROWS_AS(capacity_estimate(noc), CapacityError);

    // a column with no positive entry makes the LP unbounded
    CHECK_THROWS_AS(detail::lp_max({{0.0}}, {1.0}, {1.0}), CapacityError);
}

TEST_CASE("flat disk capacity matches the classical value", "[capacity]") {
    // electrostatic capacity of a disk of radius r is 2r/pi
    DiskObstacle<3> disk(Vec<2>{}, 0.0, 1.0);
    auto atoms = disk.cloud(500);
    auto est = capacity_estimate(make_problem(atoms, 1.0));
    CHECK(est.value == Catch::Approx(2.0 / 3.141592653589793).epsilon(0.08));
}
