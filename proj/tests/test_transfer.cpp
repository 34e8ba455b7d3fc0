#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ringq/transfer.hpp"

#include <cmath>
#include <vector>

using namespace ringq;
using R = Rational;
using doctest::Contains;

namespace {

ArrowState site_of(int n, int color) { return ArrowState::unit(n, color); }

RingState ring_of(int n, const std::vector<int>& colors) {
    RingState st;
    for (int c : colors) st.push_back(site_of(n, c));
    return st;
}

// Joint [aux, sites] state: aux color (0 = empty) plus per-site bundles.
RingState aux_ring(int n, int aux, const std::vector<ArrowState>& sites) {
    RingState st;
    st.push_back(aux == 0 ? ArrowState(n) : ArrowState::unit(n, aux));
    for (const ArrowState& b : sites) st.push_back(b);
    return st;
}

template <typename S>
TwistedStationarity<S> twisted_case(int N, int n, const S& q, const S& w,
                                    const S& w1, const std::vector<S>& v,
                                    const std::vector<S>& sv) {
    TwistedStationarity<S> c;
    c.N = N;
    c.n = n;
    c.q = q;
    c.w = w;
    c.w1 = w1;
    c.v = v;
    c.sv = sv;
    return c;
}

template <typename S>
StraightStationarity<S> straight_case(int N, int n, const S& q, const S& x,
                                      const std::vector<S>& sigma,
                                      const std::vector<S>& w,
                                      const std::vector<S>& v,
                                      const std::vector<S>& sv,
                                      const std::vector<long>& counts) {
    StraightStationarity<S> c;
    c.N = N;
    c.n = n;
    c.q = q;
    c.x = x;
    c.sigma = sigma;
    c.w = w;
    c.v = v;
    c.sv = sv;
    c.counts = counts;
    return c;
}

std::vector<long> color_totals(const RingState& st, int n) {
    std::vector<long> t(n, 0);
    for (const ArrowState& b : st)
        for (int m = 1; m <= n; ++m) t[m - 1] += b.at(m);
    return t;
}

}  // namespace

TEST_CASE("swap factor rows are stochastic and the unit ratio is the identity") {
    const R q = frac<R>(1, 3), z = frac<R>(3, 7);
    auto X = pair_swap_matrix<R>(2, z, q);
    REQUIRE(X.rows() == 9);
    for (long i = 0; i < 9; ++i) {
        R s(0);
        for (long j = 0; j < 9; ++j) s += X(i, j);
        CHECK(s == R(1));
    }
    auto I9 = pair_swap_matrix<R>(2, R(1), q);
    bool ident = true;
    for (long i = 0; i < 9; ++i)
        for (long j = 0; j < 9; ++j)
            if (I9(i, j) != R(i == j ? 1 : 0)) ident = false;
    CHECK(ident);
}

TEST_CASE("twisted operator: stochastic rows, identity at equal parameters, "
          "conserved color counts") {
    const R q = frac<R>(1, 3);
    auto op = twisted_operator<R>(3, 2, q, frac<R>(2, 5), frac<R>(3, 5));
    REQUIRE(op.states.size() == 27);
    bool rows_one = true, sector_safe = true;
    for (long i = 0; i < 27; ++i) {
        R s(0);
        for (long j = 0; j < 27; ++j) {
            s += op.matrix(i, j);
            if (color_totals(op.states[i], 2) != color_totals(op.states[j], 2) &&
                op.matrix(i, j) != R(0))
                sector_safe = false;
        }
        if (s != R(1)) rows_one = false;
    }
    CHECK(rows_one);
    CHECK(sector_safe);

    auto id = twisted_operator<R>(3, 2, q, frac<R>(5, 7), frac<R>(5, 7));
    bool ident = true;
    for (long i = 0; i < 27; ++i)
        for (long j = 0; j < 27; ++j)
            if (id.matrix(i, j) != R(i == j ? 1 : 0)) ident = false;
    CHECK(ident);

    CHECK_THROWS_WITH_AS(twisted_operator<R>(1, 2, q, R(1), R(2)),
                         Contains("need N >= 2"), std::domain_error);
}

TEST_CASE("straight and pushing operators have exactly stochastic rows") {
    const R q = frac<R>(1, 3);
    std::vector<R> sigma{frac<R>(1, 7), frac<R>(2, 7)};
    std::vector<R> w{frac<R>(3, 5), frac<R>(2, 5)};
    auto op = straight_operator_combos<R>(2, 2, q, frac<R>(-2, 3), sigma, w, 2);
    CHECK(op.has_aux);
    long m = static_cast<long>(op.states.size());
    bool rows_one = true;
    for (long i = 0; i < m; ++i) {
        R s(0);
        for (long j = 0; j < m; ++j) s += op.matrix(i, j);
        if (s != R(1)) rows_one = false;
    }
    CHECK(rows_one);

    std::vector<R> xs{frac<R>(-5, 3), frac<R>(-7, 5)};
    auto push = qpush_aux_operator<R>(2, 2, q, 2, xs, 2);
    m = static_cast<long>(push.states.size());
    bool push_one = true;
    for (long i = 0; i < m; ++i) {
        R s(0);
        for (long j = 0; j < m; ++j) s += push.matrix(i, j);
        if (s != R(1)) push_one = false;
    }
    CHECK(push_one);

    CHECK_THROWS_WITH_AS(
        straight_operator_combos<R>(2, 2, R(0), R(1), sigma, w, 2),
        Contains("q must be nonzero"), std::domain_error);
    CHECK_THROWS_WITH_AS(straight_operator<R>(2, 2, q, R(1), {R(1)}, {R(1)}, 2),
                         Contains("need u, s per site"), std::domain_error);
}

TEST_CASE("seam rows reproduce the independently derived values") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};
    std::vector<SiteStack<R>> stacks{
        SiteStack<R>::spin_half(2, frac<R>(3, 5), v, sv, q),
        SiteStack<R>::spin_half(2, frac<R>(2, 5), v, sv, q)};

    CHECK(seam_row_value(stacks, ring_of(2, {1, 2})) == frac<R>(-36, 78125));
    CHECK(seam_row_value(stacks, ring_of(2, {2, 1})) == frac<R>(-54, 78125));

    // Same rows on the floating backend.
    std::vector<double> vd{1.0, 1.25}, svd{0.2, 0.1};
    std::vector<SiteStack<double>> fstacks{
        SiteStack<double>::spin_half(2, 0.6, vd, svd, 1.0 / 3),
        SiteStack<double>::spin_half(2, 0.4, vd, svd, 1.0 / 3)};
    CHECK(seam_row_value(fstacks, ring_of(2, {1, 2})) ==
          doctest::Approx(-36.0 / 78125).epsilon(1e-12));
    CHECK(seam_row_value(fstacks, ring_of(2, {2, 1})) ==
          doctest::Approx(-54.0 / 78125).epsilon(1e-12));
}

TEST_CASE("straight-ring rows reproduce the independently derived values") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};
    auto c = straight_case<R>(2, 2, q, frac<R>(-2, 3),
                              {frac<R>(1, 7), frac<R>(2, 7)},
                              {frac<R>(3, 5), frac<R>(2, 5)}, v, sv, {1, 1});
    auto stacks = c.stacks();
    auto val = [&](int aux, std::initializer_list<long> s1,
                   std::initializer_list<long> s2) {
        return seam_row_value(stacks,
                              aux_ring(2, aux, {ArrowState(s1), ArrowState(s2)}));
    };
    CHECK(val(0, {0, 0}, {1, 1}) == frac<R>(38817, 500000));
    CHECK(val(0, {0, 1}, {1, 0}) == frac<R>(27459, 250000));
    CHECK(val(0, {1, 0}, {0, 1}) == frac<R>(46089, 250000));
    CHECK(val(0, {1, 1}, {0, 0}) == frac<R>(55161, 62500));
    CHECK(val(1, {0, 0}, {0, 1}) == frac<R>(99, 5000));
    CHECK(val(1, {0, 1}, {0, 0}) == frac<R>(1377, 62500));
    CHECK(val(2, {0, 0}, {1, 0}) == frac<R>(413, 25000));
    CHECK(val(2, {1, 0}, {0, 0}) == frac<R>(1359, 12500));
}

TEST_CASE("twisted invariance holds identically on the rational backend") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};

    SUBCASE("one color, two sites") {
        auto c = twisted_case<R>(2, 1, q, frac<R>(2, 5), frac<R>(3, 5), {R(1)},
                                 {frac<R>(1, 5)});
        auto rep = check_twisted_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.residual == 0.0);
        CHECK(rep.states == 3);
    }
    SUBCASE("two colors, two sites") {
        auto c = twisted_case<R>(2, 2, q, frac<R>(2, 5), frac<R>(3, 5), v, sv);
        auto rep = check_twisted_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.states == 2);
    }
    SUBCASE("two colors, three sites, all sectors") {
        auto c = twisted_case<R>(3, 2, q, frac<R>(2, 5), frac<R>(3, 5), v, sv);
        auto rep = check_twisted_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.states == 12);
    }
}

TEST_CASE("twisted invariance holds to working precision on the float backend") {
    auto c1 = twisted_case<double>(3, 2, 1.0 / 3, 0.4, 0.6, {1.0, 1.25},
                                   {0.2, 0.1});
    auto rep1 = check_twisted_stationarity(c1);
    CHECK(!rep1.exact_zero);
    CHECK(rep1.residual < 1e-10);

    auto c2 = twisted_case<double>(3, 2, 0.4, 0.5, 0.7, {1.0, 0.8},
                                   {0.15, 0.3});
    auto rep2 = check_twisted_stationarity(c2);
    CHECK(rep2.residual < 1e-10);
}

TEST_CASE("twisted operator commutes with the entrance-row matrix") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};
    auto c2 = twisted_case<R>(2, 2, q, frac<R>(2, 5), frac<R>(3, 5), v, sv);
    auto rep2 = twisted_commutation_residual(c2);
    CHECK(rep2.exact_zero);
    auto c3 = twisted_case<R>(3, 2, q, frac<R>(2, 5), frac<R>(3, 5), v, sv);
    auto rep3 = twisted_commutation_residual(c3);
    CHECK(rep3.exact_zero);
    CHECK(rep3.states == 12);
}

TEST_CASE("straight invariance holds identically on the rational backend") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};

    SUBCASE("one color, one site") {
        auto c = straight_case<R>(1, 1, q, frac<R>(-2, 3), {frac<R>(1, 7)},
                                  {frac<R>(3, 5)}, {R(1)}, {frac<R>(1, 5)}, {1});
        auto rep = check_straight_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.states == 2);
    }
    SUBCASE("two colors, two sites") {
        auto c = straight_case<R>(2, 2, q, frac<R>(-2, 3),
                                  {frac<R>(1, 7), frac<R>(2, 7)},
                                  {frac<R>(3, 5), frac<R>(2, 5)}, v, sv, {1, 1});
        auto rep = check_straight_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.states == 8);
    }
    SUBCASE("two colors, two sites, doubled count") {
        auto c = straight_case<R>(2, 2, q, frac<R>(-2, 3),
                                  {frac<R>(1, 7), frac<R>(2, 7)},
                                  {frac<R>(3, 5), frac<R>(2, 5)}, v, sv, {2, 1});
        auto rep = check_straight_stationarity(c);
        CHECK(rep.exact_zero);
        CHECK(rep.states == 13);
    }
}

TEST_CASE("straight invariance holds to working precision on the float backend") {
    auto c = straight_case<double>(2, 2, 0.35, -0.6, {0.15, 0.3}, {0.55, 0.4},
                                   {1.0, 0.8}, {0.1, 0.2}, {1, 1});
    auto rep = check_straight_stationarity(c);
    CHECK(!rep.exact_zero);
    CHECK(rep.residual < 1e-10);
}

TEST_CASE("high powers of each operator approach the matrix exponential") {
    std::vector<double> eps{0.04, 0.02, 0.01, 0.005};

    SUBCASE("adjacent swaps") {
        auto table = poisson_limit_residual(ColumnFamily::Masep, 1.0, eps);
        REQUIRE(table.points.size() == 4);
        CHECK(table.slope == doctest::Approx(1.0).epsilon(0.2));
        for (size_t i = 1; i < table.points.size(); ++i)
            CHECK(table.points[i].error < table.points[i - 1].error);
        auto zero = poisson_limit_residual(ColumnFamily::Masep, 0.0, {0.01});
        CHECK(zero.points[0].error < 1e-13);
    }
    SUBCASE("bosonic hops") {
        auto table =
            poisson_limit_residual(ColumnFamily::QBoson, 1.0, eps, 2, 2, 0.25);
        CHECK(table.slope == doctest::Approx(1.0).epsilon(0.2));
        for (size_t i = 1; i < table.points.size(); ++i)
            CHECK(table.points[i].error < table.points[i - 1].error);
        auto zero =
            poisson_limit_residual(ColumnFamily::QBoson, 0.0, {0.01}, 2, 2, 0.25);
        CHECK(zero.points[0].error < 1e-13);
    }
    SUBCASE("finite-capacity pushing") {
        auto table = poisson_limit_residual(ColumnFamily::QPush, 1.0, eps, 2, 2,
                                            0.25, 2);
        CHECK(table.slope == doctest::Approx(1.0).epsilon(0.2));
        for (size_t i = 1; i < table.points.size(); ++i)
            CHECK(table.points[i].error < table.points[i - 1].error);
    }
    SUBCASE("generator exponential is stochastic") {
        Sector sec{2, 3, {1, 1}, 1};
        auto g = masep_generator<double>(3, 2, 0.25, sec);
        Eigen::MatrixXd G = Eigen::MatrixXd(g.rates);
        Eigen::MatrixXd P = (1.0 * G).exp();
        for (long i = 0; i < P.rows(); ++i) {
            CHECK(P.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(P.row(i).minCoeff() >= -1e-14);
        }
    }
}

TEST_CASE("swap derivative matches the local rates to second order under "
          "extrapolation") {
    const double q = 0.3;
    auto rates = pair_swap_rates<double>(2, q);
    auto deriv = [&](double e) {
        auto M = pair_swap_matrix<double>(2, 1.0 - e, q);
        Eigen::MatrixXd D = (1.0 - q) / e *
                            (M - Eigen::MatrixXd::Identity(9, 9));
        return Eigen::MatrixXd(D);
    };
    auto err = [&](const Eigen::MatrixXd& D) {
        return (D - rates).cwiseAbs().maxCoeff();
    };
    double e1 = err(deriv(0.02)), e2 = err(deriv(0.01));
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
    // Richardson extrapolation removes the first-order term.
    auto rich = [&](double e) {
        return Eigen::MatrixXd(2.0 * deriv(e / 2) - deriv(e));
    };
    double r1 = err(rich(0.02)), r2 = err(rich(0.01));
    CHECK(r1 / r2 > 3.3);
    CHECK(r1 < e1);
}

TEST_CASE("threaded checks agree with the serial ones") {
    const R q = frac<R>(1, 3);
    std::vector<R> v{R(1), frac<R>(5, 4)};
    std::vector<R> sv{frac<R>(1, 5), frac<R>(1, 10)};
    auto c = twisted_case<R>(3, 2, q, frac<R>(2, 5), frac<R>(3, 5), v, sv);
    auto serial = check_twisted_stationarity(c, 1);
    auto par = check_twisted_stationarity(c, 4);
    CHECK(serial.exact_zero == par.exact_zero);
    CHECK(serial.states == par.states);
    CHECK(serial.residual == par.residual);
}

TEST_CASE("validation rejects unusable parameter sets") {
    const R q = frac<R>(1, 3);
    auto c3 = twisted_case<R>(3, 3, q, R(1), R(2), {R(1), R(1), R(1)},
                              {R(0), R(0), R(0)});
    CHECK_THROWS_WITH_AS(check_twisted_stationarity(c3),
                         Contains("at most two colors"), std::domain_error);

    auto cq = straight_case<R>(2, 2, R(0), R(1), {R(1), R(1)}, {R(1), R(1)},
                               {R(1), R(1)}, {R(0), R(0)}, {1, 1});
    CHECK_THROWS_WITH_AS(check_straight_stationarity(cq),
                         Contains("q must be nonzero"), std::domain_error);

    auto cc = straight_case<R>(2, 2, q, R(1), {R(1), R(1)}, {R(1), R(1)},
                               {R(1), R(1)}, {R(0), R(0)}, {1, 0});
    CHECK_THROWS_WITH_AS(check_straight_stationarity(cc),
                         Contains("every color must be present"),
                         std::domain_error);

    std::vector<SiteStack<R>> stacks{SiteStack<R>::spin_half(
        2, R(1), {R(1), R(1)}, {frac<R>(1, 5), frac<R>(1, 5)}, q)};
    CHECK_THROWS_WITH_AS(seam_row_value(stacks, ring_of(2, {1, 2})),
                         Contains("one exit bundle per site"),
                         std::domain_error);
}
