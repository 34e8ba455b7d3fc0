#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ringq/qseries.hpp"

using namespace ringq;

TEST_CASE("finite q-Pochhammer values") {
    Rational q = frac<Rational>(1, 3);
    CHECK(qpoch(frac<Rational>(1, 2), q, 0) == Rational(1));
    // (1/2; 1/3)_2 = (1 - 1/2)(1 - 1/6) = 5/12
    CHECK(qpoch(frac<Rational>(1, 2), q, 2) == frac<Rational>(5, 12));
    CHECK_THROWS_AS(qpoch(Rational(1), q, -1), std::domain_error);
}

TEST_CASE("q = 0 convention: (a;0)_k = 1 - a for k >= 1") {
    Rational a = frac<Rational>(2, 7);
    CHECK(qpoch(a, Rational(0), 1) == frac<Rational>(5, 7));
    CHECK(qpoch(a, Rational(0), 5) == frac<Rational>(5, 7));
    CHECK(qpoch(a, Rational(0), 0) == Rational(1));
}

TEST_CASE("q-binomial coefficients") {
    Rational q = frac<Rational>(1, 2);
    CHECK(qbinom(q, 2, 1) == Rational(1) + q);  // [2 over 1]_q = 1 + q
    CHECK(qbinom(q, 3, 1) == Rational(1) + q + q * q);
    CHECK(qbinom(q, 4, 2) == (Rational(1) + q * q) * (Rational(1) + q + q * q));
    CHECK(qbinom(q, 2, 3) == Rational(0));
    CHECK(qbinom(q, 2, -1) == Rational(0));
    CHECK(qbinom(q, 5, 0) == Rational(1));
}

TEST_CASE("infinite product truncation is certified") {
    double q = 0.5, a = 0.7;
    double truncated = qpoch_inf(a, q, 1e-14);
    // Reference: very deep direct product.
    double ref = 1.0, p = a;
    for (int i = 0; i < 200; ++i) {
        ref *= 1 - p;
        p *= q;
    }
    CHECK(truncated == doctest::Approx(ref).epsilon(1e-12));
    CHECK(qpoch_inf(0.0, 0.9, 1e-14) == doctest::Approx(1.0));
}

TEST_CASE("ratio of infinite products") {
    double q = 0.4, a = 0.3, b = 0.6;
    double r = qpoch_inf_ratio(a, b, q, 1e-14);
    CHECK(r == doctest::Approx(qpoch_inf(a, q, 1e-15) / qpoch_inf(b, q, 1e-15))
                   .epsilon(1e-11));
}

TEST_CASE("q-digamma series") {
    // q = 0 collapses to a single term.
    CHECK(q_digamma(0.3, 0.0) == doctest::Approx(0.3 / 0.7));
    // Shift identity: phi(z) - phi(zq) = z/(1-z).
    double z = 0.45, q = 0.6;
    CHECK(q_digamma(z, q) - q_digamma(z * q, q) == doctest::Approx(z / (1 - z)));
    // Negative arguments converge too (used by pushing-type currents).
    double neg = q_digamma(-0.8, 0.5);
    double ref = 0.0, t = -0.8;
    for (int k = 0; k < 200; ++k) {
        ref += t / (1 - t);
        t *= 0.5;
    }
    CHECK(neg == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("q-digamma rejects poles") {
    CHECK_THROWS_AS(q_digamma(1.0, 0.5), std::domain_error);
}
