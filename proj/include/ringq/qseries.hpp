#pragma once

// q-Pochhammer symbols and related q-series.
//
// Conventions used throughout:
//   (a;q)_k   = prod_{i=0}^{k-1} (1 - a q^i),  (a;q)_0 = 1
//   (a;0)_k   = 1 - a for k >= 1 (0^0 = 1, so only the i = 0 factor differs from 1)
//   q-binomial [b over a]_q = (q;q)_b / ((q;q)_a (q;q)_{b-a}), zero outside 0 <= a <= b.
// All finite symbols are exact in the rational backend; the infinite product and
// the q-digamma series truncate with a certified geometric tail bound.

#include <cmath>
#include <stdexcept>

#include "ringq/scalar.hpp"

namespace ringq {

template <typename S>
S qpoch(const S& a, const S& q, long k) {
    if (k < 0) throw std::domain_error("qpoch: negative length");
    S r(1);
    S aq = a;
    for (long i = 0; i < k; ++i) {
        r *= S(1) - aq;
        aq *= q;
    }
    return r;
}

// (q;q)_k
template <typename S>
S qq(const S& q, long k) {
    return qpoch(q, q, k);
}

// (q;q)_b / ((q;q)_a (q;q)_{b-a}); zero when a is outside [0, b].
template <typename S>
S qbinom(const S& q, long b, long a) {
    if (a < 0 || a > b) return S(0);
    return qq(q, b) / (qq(q, a) * qq(q, b - a));
}

// Smallest K with 2|a| q^K / (1-q) < tol, i.e. |log prod_{i>=K}(1-aq^i)| < tol
// whenever |a q^K| <= 1/2.
inline long qpoch_inf_depth(double abs_a, double q, double tol) {
    if (q < 0 || q >= 1) throw std::domain_error("qpoch_inf_depth: need 0 <= q < 1");
    if (abs_a == 0 || q == 0) return 1;
    long k = 0;
    double t = abs_a;
    while (2 * t / (1 - q) >= tol || t > 0.5) {
        t *= q;
        ++k;
        if (k > 100000) throw std::domain_error("qpoch_inf_depth: no convergence");
    }
    return k;
}

// (a;q)_inf truncated at a depth that certifies |relative tail| < tol.
template <typename S>
S qpoch_inf(const S& a, const S& q, double tol = 1e-14) {
    long depth = qpoch_inf_depth(std::abs(to_double(a)), to_double(q), tol);
    return qpoch(a, q, depth);
}

// (a;q)_inf / (b;q)_inf with one shared truncation depth.
template <typename S>
S qpoch_inf_ratio(const S& a, const S& b, const S& q, double tol = 1e-14) {
    double m = std::max(std::abs(to_double(a)), std::abs(to_double(b)));
    long depth = qpoch_inf_depth(m, to_double(q), tol);
    return qpoch(a, q, depth) / qpoch(b, q, depth);
}

// phi(zeta) = sum_{k>=0} zeta q^k / (1 - zeta q^k), a rescaled q-digamma.
// Truncated with tail < tol; rejects arguments too close to a pole zeta = q^{-k}.
template <typename S>
S q_digamma(const S& zeta, const S& q, double tol = 1e-14) {
    double qd = to_double(q);
    if (qd < 0 || qd >= 1) throw std::domain_error("q_digamma: need 0 <= q < 1");
    S r(0);
    S zq = zeta;
    double t = std::abs(to_double(zeta));
    for (long k = 0;; ++k) {
        // Every remaining denominator satisfies |1 - zeta q^j| >= 1 - t, so the
        // tail is at most t / ((1-q)(1-t)) once t <= 1/2.
        if (t <= 0.5 && t / ((1 - qd) * (1 - t)) < tol) break;
        if (std::abs(1.0 - to_double(zq)) < 1e-12)
            throw std::domain_error("q_digamma: argument too close to a pole");
        r += zq / (S(1) - zq);
        zq *= q;
        t *= qd;
        if (k > 100000) throw std::domain_error("q_digamma: no convergence");
    }
    return r;
}

}  // namespace ringq
