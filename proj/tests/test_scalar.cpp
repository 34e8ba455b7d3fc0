#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include "doctest.h"
#include "ringq/scalar.hpp"

using namespace ringq;

TEST_CASE("rational backend is closed under field operations") {
    Rational a = frac<Rational>(2, 3), b = frac<Rational>(-5, 7);
    CHECK(a + b == frac<Rational>(-1, 21));
    CHECK(a - b == frac<Rational>(29, 21));
    CHECK(a * b == frac<Rational>(-10, 21));
    CHECK(a / b == frac<Rational>(-14, 15));
    CHECK(frac<Rational>(4, 8) == frac<Rational>(1, 2));
}

TEST_CASE("frac rejects zero denominators") {
    CHECK_THROWS_AS(frac<Rational>(1, 0), std::domain_error);
    CHECK_THROWS_AS(frac<double>(1, 0), std::domain_error);
}

TEST_CASE("pow_int conventions") {
    CHECK(pow_int(Rational(0), 0) == Rational(1));
    CHECK(pow_int(Rational(0), 3) == Rational(0));
    CHECK(pow_int(frac<Rational>(1, 2), 10) == frac<Rational>(1, 1024));
    CHECK(pow_int(frac<Rational>(2, 3), -2) == frac<Rational>(9, 4));
    CHECK(pow_int(Rational(-2), 3) == Rational(-8));
    CHECK_THROWS_AS(pow_int(Rational(0), -1), std::domain_error);
    CHECK(pow_int(2.0, 30) == doctest::Approx(1073741824.0));
}

TEST_CASE("parse_scalar handles fractions, integers, and rejects decimals in exact mode") {
    CHECK(parse_scalar<Rational>("3/4") == frac<Rational>(3, 4));
    CHECK(parse_scalar<Rational>("-7") == Rational(-7));
    CHECK_THROWS_AS(parse_scalar<Rational>("0.25"), std::domain_error);
    CHECK(parse_scalar<double>("0.25") == doctest::Approx(0.25));
    CHECK(parse_scalar<double>("3/4") == doctest::Approx(0.75));
}

TEST_CASE("scalar_str round trips") {
    CHECK(scalar_str(frac<Rational>(-3, 7)) == "-3/7");
    CHECK(parse_scalar<double>(scalar_str(0.1)) == doctest::Approx(0.1).epsilon(1e-16));
}

TEST_CASE("abs_val and to_double") {
    CHECK(abs_val(frac<Rational>(-3, 5)) == frac<Rational>(3, 5));
    CHECK(to_double(frac<Rational>(1, 4)) == doctest::Approx(0.25));
    CHECK(to_double(2.5) == doctest::Approx(2.5));
}

TEST_CASE("Eigen linear algebra over the exact backend has no rounding") {
    using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
    Mat m(2, 2);
    m << frac<Rational>(1, 2), frac<Rational>(1, 3), frac<Rational>(1, 5),
        frac<Rational>(1, 7);
    Vec v(2);
    v << Rational(1), Rational(2);
    Vec w = m * v;
    CHECK(w(0) == frac<Rational>(7, 6));
    CHECK(w(1) == frac<Rational>(17, 35));
    Mat p = m * m;
    CHECK(p(0, 0) == frac<Rational>(1, 4) + frac<Rational>(1, 15));
    // Exact solve via partial-pivot LU.
    Vec x = Eigen::PartialPivLU<Mat>(m).solve(v);
    CHECK(m * x == v);
}
