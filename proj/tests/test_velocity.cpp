#include <cmath>

#include "doctest.h"
#include "sdfm/atoms.hpp"
#include "sdfm/errors.hpp"
#include "sdfm/geom.hpp"
#include "sdfm/velocity.hpp"

using namespace sdfm;

// Reference values computed with 50-digit interval arithmetic from the
// closed-form weight/velocity expressions, then rounded to double. The
// library is expected to match to a relative error of a few 1e-14 even for
// weights of magnitude 1e-22 (the log-sum-exp path must not lose them).

static double rel_err(double got, double want) {
    return want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
}

TEST_CASE("weights match high precision reference at t=0.9") {
    AtomSet a = four_point_example();
    Weights w = softmax_weights(0.9, {0.2, 0.0}, a, 0.0);
    REQUIRE(w.alpha.size() == 4);
    CHECK(rel_err(w.alpha[0], 3.179970899659731e-22) < 1e-12);
    CHECK(rel_err(w.alpha[1], 3.179970899659731e-22) < 1e-12);
    CHECK(rel_err(w.alpha[2], 1.6918979223288784e-10) < 1e-12);
    CHECK(rel_err(w.alpha[3], 0.9999999998308102) < 1e-15);
    // the two mirror atoms must get bitwise identical weights
    CHECK(w.alpha[0] == w.alpha[1]);
    CHECK(w.argmax() == 3); // 0-based index of a_4
    CHECK(w.max() == w.alpha[3]);
    double sum = 0.0;
    for (double v : w.alpha) sum += v;
    CHECK(std::fabs(sum - 1.0) < 1e-15);
}

TEST_CASE("weights and velocity at t=0.5, eps=0") {
    AtomSet a = four_point_example();
    Weights w = softmax_weights(0.5, {0.3, 0.1}, a, 0.0);
    CHECK(rel_err(w.alpha[0], 0.17707686425986532) < 1e-13);
    CHECK(rel_err(w.alpha[1], 0.12523271646541323) < 1e-13);
    CHECK(rel_err(w.alpha[2], 0.36627294942268424) < 1e-13);
    CHECK(rel_err(w.alpha[3], 0.33141746985203724) < 1e-13);
    Point v = velocity(0.5, {0.3, 0.1}, a, 0.0);
    CHECK(rel_err(v[0], -0.16976368187991006) < 1e-13);
    CHECK(rel_err(v[1], -0.11020330194489902) < 1e-13);
}

TEST_CASE("smoothed velocity at t=0.5, eps=0.2") {
    AtomSet a = four_point_example();
    Point v = velocity(0.5, {0.3, 0.1}, a, 0.2);
    CHECK(rel_err(v[0], -0.1546786303881493) < 1e-13);
    CHECK(rel_err(v[1], -0.09968449962406747) < 1e-13);
}

TEST_CASE("weights collapse to the captured atom near t=1") {
    AtomSet a = four_point_example();
    Weights w = softmax_weights(1.0 - 1e-15, {0.01, 0.0}, a, 0.0);
    CHECK(w.alpha[0] == 0.0);
    CHECK(w.alpha[1] == 0.0);
    CHECK(w.alpha[2] == 0.0);
    CHECK(w.alpha[3] == 1.0);
}

TEST_CASE("smoothed field is regular at t=1") {
    // with eps > 0 the denominator is t^2 eps^2 at t=1 and v(1, x) = x exactly
    AtomSet a = four_point_example();
    Point x{0.3, -0.7};
    Point v = velocity(1.0, x, a, 0.5);
    CHECK(v[0] == x[0]);
    CHECK(v[1] == x[1]);
}

TEST_CASE("log-sum-exp stays finite far from the atoms") {
    AtomSet a = four_point_example();
    for (double t : {0.1, 0.9, 0.999, 1.0 - 1e-15}) {
        Weights w = softmax_weights(t, {1e6, 3e5}, a, 0.0);
        double sum = 0.0;
        for (double v : w.alpha) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-14);
        Point v = velocity(t, {1e6, 3e5}, a, 0.0);
        CHECK(std::isfinite(v[0]));
        CHECK(std::isfinite(v[1]));
    }
}

TEST_CASE("bounded drift equals u times the velocity") {
    AtomSet a = four_point_example();
    const double tau = 1.7;
    const double u = std::exp(-tau);
    const double t = 1.0 - u;
    Point x{0.4, -0.2};
    Point g = bounded_drift(tau, x, a);
    Point v = velocity(t, x, a, 0.0);
    CHECK(rel_err(g[0], u * v[0]) < 1e-12);
    CHECK(rel_err(g[1], u * v[1]) < 1e-12);
}

TEST_CASE("jacobian matches central differences and the operator bound") {
    AtomSet a = four_point_example();
    double M = 0.0;
    for (int k = 0; k < a.size(); ++k) M = std::max(M, norm(a[k]));
    const double h = 1e-6;
    const Point pts[3] = {{0.3, 0.1}, {-0.8, 0.9}, {1.4, -0.5}};
    for (double t : {0.2, 0.6, 0.9}) {
        for (const Point& x : pts) {
            Mat J = velocity_jacobian(t, x, a);
            Mat Jfd(2, 2);
            for (int c = 0; c < 2; ++c) {
                Point xp = x, xm = x;
                xp[c] += h;
                xm[c] -= h;
                Point vp = velocity(t, xp, a, 0.0);
                Point vm = velocity(t, xm, a, 0.0);
                for (int r = 0; r < 2; ++r) Jfd(r, c) = (vp[r] - vm[r]) / (2 * h);
            }
            CHECK((J - Jfd).frobenius_norm() / std::max(1.0, J.frobenius_norm()) < 1e-8);

            const double u = 1.0 - t;
            Weights w = softmax_weights(t, x, a, 0.0);
            const double bound = 1.0 / u + 4.0 * M * M * (1.0 - w.max()) / (u * u * u);
            CHECK(operator_norm(J) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("velocity input validation") {
    AtomSet a = four_point_example();
    CHECK_THROWS_AS(velocity(0.5, {0.3}, a, 0.0), DimensionMismatch);
    CHECK_THROWS_AS(softmax_weights(0.5, {0.1, 0.2, 0.3}, a, 0.0), DimensionMismatch);
}
