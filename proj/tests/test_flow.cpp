#include <cmath>
#include <random>

#include "doctest.h"
#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/errors.hpp"
#include "sdfm/flow.hpp"
#include "sdfm/geom.hpp"
#include "support/oracle.hpp"

using namespace sdfm;

TEST_CASE("single atom flow is the exact linear interpolation") {
    // gamma_t(x0) = (1-t) x0 + t a; exercises the integrator plus the
    // log-time reparameterization against a closed form
    FlowConfig cfg;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(-2, 2), ux(-5, 5), ut(0.0, 0.999999);
    for (int trial = 0; trial < 5; ++trial) {
        AtomSet a = make_atoms({{ua(rng), ua(rng)}}, 0.25);
        Point x0{ux(rng), ux(rng)};
        double t = ut(rng);
        Point got = flow_at(x0, {t}, a, cfg)[0];
        CHECK(std::fabs(got[0] - ((1 - t) * x0[0] + t * a[0][0])) < 1e-8);
        CHECK(std::fabs(got[1] - ((1 - t) * x0[1] + t * a[0][1])) < 1e-8);
    }
}

TEST_CASE("trajectory structure and exact capture terminal") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    Trajectory tr = integrate_forward({0.2, 0.0}, a, cfg);
    REQUIRE(!tr.times.empty());
    CHECK(tr.times.front() == 0.0);
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
    REQUIRE(tr.capture.has_value());
    CHECK(tr.capture->atom == 4);
    CHECK(tr.capture->residual < a.sep_radius);
    CHECK(tr.captured_by() == 4);
    // terminal snaps to the atom exactly, not approximately
    CHECK(tr.terminal[0] == a[3][0]);
    CHECK(tr.terminal[1] == a[3][1]);
}

TEST_CASE("axis assignments bracket the central/vertex transition") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    CHECK(assign({0.2, 0.0}, a, cfg) == 4);
    CHECK(assign({0.525, 0.0}, a, cfg) == 4);
    CHECK(assign({0.54, 0.0}, a, cfg) == 3);
    CHECK(assign({2.0, 0.0}, a, cfg) == 3);
    CHECK(assign({4.0, 0.0}, a, cfg) == 3);
    // the negative x axis is an exactly representable mirror line: the whole
    // ray belongs to the central cell out to any radius
    CHECK(assign({-2.0, 0.0}, a, cfg) == 4);
    CHECK(assign({-32.0, 0.0}, a, cfg) == 4);
}

TEST_CASE("flow matches the independent fixed-step oracle mid-flight") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    for (const Point& x0 : {Point{0.3, 0.1}, Point{-1.1, 0.6}}) {
        const double t = 0.5;
        Point lib = flow_at(x0, {t}, a, cfg)[0];
        Point ref = oracle::euler_state(x0, a, -std::log1p(-t));
        // the oracle is first order with dtau = 1e-4; agreement is limited by
        // its own truncation error, not the library's
        CHECK(dist(lib, ref) < 5e-4);
    }
}

TEST_CASE("terminal labels match the oracle on a coarse grid") {
    AtomSet a = ten_point_example();
    FlowConfig cfg;
    GridSpec grid = make_grid(-2.0, 2.0, -2.0, 2.0, 9, 9);
    LabelField f = tessellate(a, grid, cfg);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            int ref = oracle::euler_assign({grid.x(i), grid.y(j)}, a);
            if (ref != UNRESOLVED && f.at(i, j) != UNRESOLVED) CHECK(f.at(i, j) == ref);
        }
}

TEST_CASE("tessellation is deterministic") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    GridSpec grid = make_grid(-2, 2, -2, 2, 33, 33);
    LabelField f1 = tessellate(a, grid, cfg);
    LabelField f2 = tessellate(a, grid, cfg);
    CHECK(f1.labels == f2.labels);
    CHECK(f1.producer == Producer::FM);
}

TEST_CASE("tessellation commutes with the exact mirror symmetry") {
    // [-2,2] with 65 nodes puts every coordinate on a dyadic value, so the
    // grid is bitwise symmetric under y -> -y; swapping the two mirror atoms
    // must reproduce the field exactly (every intermediate quantity of the
    // integration mirrors without rounding)
    AtomSet a = four_point_example();
    FlowConfig cfg;
    GridSpec grid = make_grid(-2, 2, -2, 2, 65, 65);
    for (int j = 0; j < grid.ny; ++j) CHECK(grid.y(grid.ny - 1 - j) == -grid.y(j));
    LabelField f = tessellate(a, grid, cfg);
    auto swap12 = [](int l) { return l == 1 ? 2 : (l == 2 ? 1 : l); };
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            CHECK(f.at(i, grid.ny - 1 - j) == swap12(f.at(i, j)));
}

TEST_CASE("exact x-axis row resolves to the two on-axis cells") {
    // row j=1 of a 3-row grid over [-3,3] is y = 0 exactly; every node there
    // belongs to cell 3 or cell 4, with the transition frozen between
    // x = 0.525 and x = 0.54
    AtomSet a = four_point_example();
    FlowConfig cfg;
    GridSpec grid = make_grid(-3, 3, -3, 3, 401, 3);
    CHECK(grid.y(1) == 0.0);
    LabelField f = tessellate(a, grid, cfg);
    int first3 = -1;
    for (int i = 0; i < grid.nx; ++i) {
        int lab = f.at(i, 1);
        CHECK((lab == 3 || lab == 4));
        if (lab == 3 && first3 < 0) first3 = i;
    }
    CHECK(first3 == 236);
}

TEST_CASE("re-integration past capture stays on the atom") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    Trajectory tr = integrate_forward({0.8, 0.55}, a, cfg);
    REQUIRE(tr.capture.has_value());
    const int k = tr.capture->atom;
    const double tau_c = -std::log1p(-tr.capture->time);
    Point fin = integrate_tau_range(tr.states.back(), tau_c, a, cfg);
    CHECK(dist(fin, a[k - 1]) < 1e-12);
}

TEST_CASE("flow inverse round trips") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2, 2);
    const double tols[3] = {1e-8, 1e-7, 1e-6};
    const double ts[3] = {0.5, 0.9, 0.99};
    for (int c = 0; c < 3; ++c) {
        for (int trial = 0; trial < 5; ++trial) {
            Point x0{u(rng), u(rng)};
            Point y = flow_at(x0, {ts[c]}, a, cfg)[0];
            Point back = flow_inverse(y, ts[c], a, cfg);
            CHECK(dist(back, x0) < tols[c]);
        }
    }
}

TEST_CASE("out-of-span component shrinks linearly") {
    // two collinear atoms span a 1D subspace; the orthogonal coordinate obeys
    // y(t) = (1-t) y(0) independent of the weights
    AtomSet a = make_atoms({{1.0, 0.0}, {3.0, 0.0}});
    FlowConfig cfg;
    Point x0{0.0, 2.0};
    for (double t : {0.25, 0.5, 0.9}) {
        Point y = flow_at(x0, {t}, a, cfg)[0];
        CHECK(std::fabs(y[1] - (1 - t) * 2.0) < 1e-9);
    }
    int lab = assign(x0, a, cfg);
    CHECK((lab == 1 || lab == 2));
}

TEST_CASE("center curves") {
    AtomSet a = four_point_example();
    FlowConfig cfg;

    // the origin atom is a flow equilibrium by symmetry, and the mirror
    // cancellations are exact in floating point: every backward sample is 0
    CenterCurve c4 = center_curve(4, a, cfg);
    REQUIRE(c4.samples.size() == 20);
    for (const auto& [t, p] : c4.samples) {
        CHECK(std::fabs(p[0]) < 1e-12);
        CHECK(p[1] == 0.0);
    }
    CHECK(c4.cauchy_ok);

    // the vertex-atom curve stays on the exact axis and converges outward
    CenterCurve c3 = center_curve(3, a, cfg);
    CHECK(c3.cauchy_ok);
    for (const auto& [t, p] : c3.samples) CHECK(p[1] == 0.0);
    CHECK(c3.limit[0] == doctest::Approx(1.724294258).epsilon(1e-6));
    CHECK(assign(c3.limit, a, cfg) == 3);

    CenterCurve c1 = center_curve(1, a, cfg);
    CHECK(c1.cauchy_ok);
    CHECK(c1.limit[0] == doctest::Approx(-0.862147129155).epsilon(1e-6));
    CHECK(c1.limit[1] == doctest::Approx(1.4932826313).epsilon(1e-6));
    CHECK(assign(c1.limit, a, cfg) == 1);

    // custom schedule is honored
    CenterCurve cc = center_curve(1, a, cfg, {0.5, 0.75});
    REQUIRE(cc.samples.size() == 2);
    CHECK(cc.samples[0].first == 0.5);
    CHECK(cc.samples[1].first == 0.75);

    CHECK_THROWS_AS(center_curve(5, a, cfg), Error);
}

TEST_CASE("input validation and failure modes") {
    AtomSet a = four_point_example();
    FlowConfig cfg;
    CHECK_THROWS_AS(flow_at({0.1, 0.1}, {1.0}, a, cfg), InvalidTime);
    CHECK_THROWS_AS(flow_at({0.1, 0.1}, {0.5, 0.5}, a, cfg), Error);
    CHECK_THROWS_AS(flow_inverse({0.1, 0.1}, 1.0, a, cfg), InvalidTime);
    CHECK(flow_inverse({0.1, 0.1}, 0.0, a, cfg) == Point{0.1, 0.1}); // t=0 is the identity
    CHECK_THROWS_AS(integrate_forward({0.1}, a, cfg), DimensionMismatch);

    FlowConfig tiny = cfg;
    tiny.max_steps = 5;
    CHECK_THROWS_AS(integrate_forward({2.5, 1.3}, a, tiny), StepLimitExceeded);

    // node-level failures must degrade to UNRESOLVED, not abort the field.
    // Two steps cannot reach capture from anywhere (a node exactly on an atom
    // sees a near-zero drift, so with more headroom the controller would grow
    // the step until the weights concentrate and the node resolves).
    FlowConfig two = cfg;
    two.max_steps = 2;
    LabelField f = tessellate(a, make_grid(-2, 2, -2, 2, 5, 5), two);
    for (int v : f.labels) CHECK(v == UNRESOLVED);

    AtomSet a3 = random_atoms(5, 4, 3);
    CHECK_THROWS_AS(tessellate(a3, make_grid(-1, 1, -1, 1, 4, 4), cfg), DimensionMismatch);
}

TEST_CASE("plane tessellation of higher dimensional atoms") {
    // atoms in the z = 0 plane of R^3, sliced along that same plane: labels
    // must match the 2D tessellation node for node
    AtomSet flat = four_point_example();
    std::vector<Point> pts;
    for (int k = 0; k < flat.size(); ++k) pts.push_back({flat[k][0], flat[k][1], 0.0});
    AtomSet a3 = make_atoms(pts, flat.sep_radius);
    FlowConfig cfg;
    GridSpec grid = make_grid(-1.5, 1.5, -1.5, 1.5, 17, 17);
    bool in_hull = false;
    LabelField sliced = tessellate_plane(a3, grid, cfg, {0.0, 0.0, 0.0},
                                         {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, &in_hull);
    CHECK(in_hull);
    LabelField flat_field = tessellate(flat, grid, cfg);
    CHECK(sliced.labels == flat_field.labels);

    // an axis leaving the atom span is flagged
    LabelField off = tessellate_plane(a3, grid, cfg, {0.0, 0.0, 0.0},
                                      {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, &in_hull);
    CHECK(!in_hull);
}
