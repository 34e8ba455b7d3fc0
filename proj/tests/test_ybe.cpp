#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ringq/scalar.hpp"
#include "ringq/ybe.hpp"

using namespace ringq;
using R = Rational;

static R rq(long n, long d) { return frac<R>(n, d); }

TEST_CASE("spin-1/2 exchange identity holds exactly over rationals") {
    YbeBounds b{2, 1, 1};
    auto rep = check_rll<R>(rq(1, 5), rq(1, 3), rq(2, 7), rq(1, 2), b);
    CHECK(rep.family == YbeFamily::RLL);
    CHECK(rep.instances_checked > 100);
    CHECK(rep.max_residual == R(0));
    CHECK(rep.passed());

    auto rep2 = check_rll<R>(rq(2, 9), rq(3, 5), rq(1, 4), rq(1, 3), b);
    CHECK(rep2.max_residual == R(0));
}

TEST_CASE("spin-1/2 exchange identity with one color and taller columns") {
    YbeBounds b{1, 2, 1};
    auto rep = check_rll<R>(rq(1, 4), rq(2, 5), rq(3, 7), rq(2, 5), b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("spin-1/2 exchange identity in floating point") {
    YbeBounds b{2, 2, 1};
    auto rep = check_rll<double>(0.21, 0.43, 0.78, 0.37, b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual < 1e-12);
    CHECK(rep.passed());
}

TEST_CASE("fused exchange identity holds exactly over rationals") {
    YbeBounds b{2, 1, 1};
    auto rep = check_fused<R>(rq(1, 3), rq(1, 5), rq(1, 7), rq(2, 5), rq(3, 7),
                              rq(5, 11), rq(1, 2), b);
    CHECK(rep.family == YbeFamily::Fused);
    CHECK(rep.instances_checked > 100);
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("fused exchange identity with unit spins on the crossing lines") {
    // q^L = q^M = q and q^N = 1/s^2 is the parameter point where the two
    // column factors carry spin-1/2 horizontal edges; the identity must still
    // be exact, now with genuine horizontal capacity 1 on the cross vertex.
    R s = rq(1, 5);
    YbeBounds b{2, 1, 1};
    auto rep = check_fused<R>(rq(1, 3), rq(2, 7), s, rq(1, 2), rq(1, 2),
                              R(R(1) / (s * s)), rq(1, 2), b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("fused exchange identity with one color and wider tuples") {
    YbeBounds b{1, 2, 2};
    auto rep = check_fused<R>(rq(2, 3), rq(1, 5), rq(3, 7), rq(1, 4), rq(2, 7),
                              rq(3, 5), rq(1, 3), b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("fused exchange identity in floating point") {
    YbeBounds b{2, 1, 1};
    auto rep = check_fused<double>(0.31, 0.17, 0.53, 0.42, 0.27, 0.61, 0.35, b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual < 1e-12);
}

TEST_CASE("queue-column exchange identity holds exactly over rationals") {
    YbeBounds b{2, 1, 1};
    for (int m = 1; m <= 2; ++m) {
        CAPTURE(m);
        auto rep = check_queue<R>(m, rq(1, 5), rq(1, 3), rq(2, 7), R(1),
                                  rq(2, 3), rq(3, 5), rq(1, 2), b);
        CHECK(rep.family == YbeFamily::Queue);
        CHECK(rep.instances_checked > 100);
        CHECK(rep.max_residual == R(0));
    }
}

TEST_CASE("queue-column exchange identity with three colors") {
    YbeBounds b{3, 1, 1};
    auto rep = check_queue<R>(2, rq(1, 4), rq(2, 5), rq(1, 3), R(1), rq(1, 2),
                              rq(3, 4), rq(1, 3), b);
    CHECK(rep.instances_checked > 100);
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("queue-column exchange identity in floating point") {
    YbeBounds b{2, 1, 1};
    auto rep = check_queue<double>(1, 0.21, 0.55, 0.34, 1.0, 0.8, 0.6, 0.3, b);
    CHECK(rep.instances_checked > 0);
    CHECK(rep.max_residual < 1e-12);
}

TEST_CASE("reports identify the worst boundary when a residual appears") {
    // Deliberately mismatched parameters on the two sides cannot arise through
    // the public entry points, so instead check that a passing report leaves
    // the worst-case label empty only when every residual is exactly zero.
    YbeBounds b{1, 1, 1};
    auto rep = check_rll<R>(rq(1, 6), rq(1, 2), rq(1, 3), rq(1, 4), b);
    CHECK(rep.max_residual == R(0));
    CHECK(rep.worst_case.empty());
}
