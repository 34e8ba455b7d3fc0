#pragma once

// Local vertex-weight families for colored lattice models, all derived from one
// master evaluator:
//
//   * phi            — the nested q-binomial kernel Phi(A,B;x,y)
//   * fused_weight   — the master family W_{x,L,M}(A,B;C,D), stochastic in (C,D)
//   * r_weight       — spin-1/2 cross weights R_z (explicit piecewise form)
//   * l_weight       — one-column weights, defined via the fused reduction
//                      x -> x/s, qL = q, qM = s^{-2}
//   * queue_weight   — the column family with one saturated color m, obtained
//                      from the fused weights in the limit A_m, C_m -> infinity
//   * gauge variants — (-1/s2)^{|D|}-rescaled queue weights, regular at s2 = 0
//   * qboson_weight  — bosonic column family (s1 -> 0 degeneration)
//   * line_weight    — stochastic column family parameterized by (alpha, nu)
//
// Exact arithmetic: the queue family depends on (s1, u) only through the
// combinations s1^2 and s1*u, so parameter sets involving q^{1/2} factors stay
// inside the rational backend when those combinations are rational.  When
// s1^2 = q^{-L} for an integer L >= 1 ("finite horizontal spin", capacity L per
// horizontal edge) every power of q^{-L} cancels algebraically; the reduced
// evaluator below exploits this and stays valid at q = 0.  The infinite
// q-Pochhammer prefactor of the queue family collapses to the finite product
// 1/((s2*s1*u); q)_L in that case and is otherwise truncated (float backend
// only) with a certified tail bound.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ringq/arrows.hpp"
#include "ringq/qseries.hpp"
#include "ringq/scalar.hpp"

namespace ringq {

namespace detail {

// Smallest e in [1, max_e] with v = q^e, if any.
template <typename S>
std::optional<long> detect_qpow(const S& v, const S& q, long max_e = 64) {
    if (q == S(0)) return std::nullopt;
    S p(1);
    for (long e = 1; e <= max_e; ++e) {
        p *= q;
        if constexpr (is_exact_v<S>) {
            if (p == v) return e;
        } else {
            if (std::abs(p - v) <= 1e-12 * std::abs(p)) return e;
        }
    }
    return std::nullopt;
}

// Smallest e in [1, max_e] with v = q^{-e}, i.e. v * q^e = 1, if any.
template <typename S>
std::optional<long> detect_neg_qpow(const S& v, const S& q, long max_e = 64) {
    if (q == S(0)) return std::nullopt;
    S p = v;
    for (long e = 1; e <= max_e; ++e) {
        p *= q;
        if constexpr (is_exact_v<S>) {
            if (p == S(1)) return e;
        } else {
            if (std::abs(p - 1.0) <= 1e-12) return e;
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Phi(A,B;x,y) =
//   [(x;q)_{|A|} (y/x;q)_{|B-A|} / (y;q)_{|B|}] (y/x)^{|A|}
//   q^{sum_{i<j} (B_i-A_i) A_j} prod_i [B_i choose A_i]_q,
// defined for finite A <= B colorwise.
template <typename S>
S phi(const ArrowState& A, const ArrowState& B, const S& x, const S& y, const S& q) {
    if (!A.finite() || !B.finite()) throw std::domain_error("phi: saturated state");
    if (A.n() != B.n()) throw std::domain_error("phi: color count mismatch");
    int n = A.n();
    for (int i = 1; i <= n; ++i)
        if (A.at(i) > B.at(i)) throw std::domain_error("phi: needs A <= B colorwise");
    long aT = A.total(), bT = B.total();
    if (bT == 0) return S(1);
    if (x == S(0)) throw std::domain_error("phi: x = 0 is singular");
    S yox = y / x;
    S num = qpoch(x, q, aT) * qpoch(yox, q, bT - aT) * pow_int(yox, aT);
    S r = checked_div(num, qpoch(y, q, bT));
    long e = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) e += (B.at(i) - A.at(i)) * A.at(j);
    r *= pow_int(q, e);
    for (int i = 1; i <= n; ++i) r *= qbinom(q, B.at(i), A.at(i));
    return r;
}

// Parameters of the master family.  qL and qM are the values of q^L and q^M
// treated as free parameters; when qL happens to be an exact positive power
// q^L, horizontal edges have capacity L and weights with |B| > L or |D| > L
// are defined to be zero.
template <typename S>
struct FusedParams {
    S x, qL, qM, q;
    std::optional<long> cap_h;

    FusedParams(const S& x_, const S& qL_, const S& qM_, const S& q_)
        : x(x_), qL(qL_), qM(qM_), q(q_), cap_h(detail::detect_qpow(qL_, q_)) {}
};

// W_{x,L,M}(A,B;C,D) = 1_{A+B=C+D} x^{|D|-|B|} qL^{|A|} qM^{-|D|}
//   sum_P Phi(C-P, C+D-P; qL x / qM, x / qM) Phi(P, B; 1/(qL x), 1/qL),
// summed over 0 <= P_i <= min(B_i, C_i).  Requires x, qL, qM nonzero (so q = 0
// is outside this family's domain; the queue evaluators below cover q = 0).
template <typename S>
S fused_weight(const FusedParams<S>& p, const ArrowState& A, const ArrowState& B,
               const ArrowState& C, const ArrowState& D) {
    for (const ArrowState* st : {&A, &B, &C, &D})
        if (!st->finite()) throw std::domain_error("fused_weight: saturated state");
    int n = A.n();
    if (B.n() != n || C.n() != n || D.n() != n)
        throw std::domain_error("fused_weight: color count mismatch");
    if (!(A + B == C + D)) return S(0);
    if (p.cap_h && (B.total() > *p.cap_h || D.total() > *p.cap_h)) return S(0);
    if (p.x == S(0) || p.qL == S(0) || p.qM == S(0))
        throw std::domain_error("fused_weight: x, qL, qM must be nonzero");
    S x1 = p.qL * p.x / p.qM;
    S y1 = p.x / p.qM;
    S x2 = S(1) / (p.qL * p.x);
    S y2 = S(1) / p.qL;
    std::vector<long> caps(n);
    for (int i = 1; i <= n; ++i) caps[i - 1] = std::min(B.at(i), C.at(i));
    S r(0);
    for (const ArrowState& P : box_states(caps)) {
        ArrowState CP = *sub(C, P);
        r += phi(CP, CP + D, x1, y1, p.q) * phi(P, B, x2, y2, p.q);
    }
    r *= pow_int(p.x, D.total() - B.total()) * pow_int(p.qL, A.total()) *
         pow_int(p.qM, -D.total());
    return r;
}

// Spin-1/2 cross weights, stochastic in the outputs (c,d):
//   R_z(i,i;i,i) = 1
//   R_z(j,i;j,i) = q(1-z)/(1-qz),   R_z(i,j;i,j) = (1-z)/(1-qz)      (i < j)
//   R_z(j,i;i,j) = (1-q)/(1-qz),    R_z(i,j;j,i) = (1-q)z/(1-qz)     (i < j)
// and 0 for every other index pattern.
template <typename S>
S r_weight(const S& z, const S& q, int a, int b, int c, int d) {
    if (a == b) return (c == a && d == a) ? S(1) : S(0);
    S den = S(1) - q * z;
    if (a == c && b == d)
        return b < a ? checked_div(S(q * (S(1) - z)), den)
                     : checked_div(S(S(1) - z), den);
    if (a == d && b == c)
        return b < a ? checked_div(S(S(1) - q), den)
                     : checked_div(S((S(1) - q) * z), den);
    return S(0);
}

// One-column weights with spin-1/2 horizontal edges (edge colors k, l), defined
// through the fused reduction.  They depend on (s, x) only through s^2 and s*x;
// this overload takes those combinations directly so that parameter points like
// s = q^{-1/2} stay exactly rational.
template <typename S>
S l_weight_ss(const S& s_sq, const S& s_x, const S& q, const ArrowState& A, int k,
              const ArrowState& B, int l) {
    if (s_sq == S(0)) throw std::domain_error("l_weight: s = 0 is not allowed");
    FusedParams<S> p(checked_div(s_x, s_sq), q, S(1) / s_sq, q);
    int n = A.n();
    return fused_weight(p, A, ArrowState::unit(n, k), B, ArrowState::unit(n, l));
}

template <typename S>
S l_weight(const S& s, const S& x, const S& q, const ArrowState& A, int k,
           const ArrowState& B, int l) {
    return l_weight_ss(S(s * s), S(s * x), q, A, k, B, l);
}

enum class QueueRegime { HigherSpin, FiniteSpin, Formal };

// Parameters of the queue column family with distinguished color m.  Stored as
// the combinations s1*u and s1^2 (plus s2 and q); raw s1 and u are kept when
// known.  cap_h = L marks the finite-horizontal-spin case s1^2 = q^{-L}; the
// finite_spin() constructor declares L explicitly, which is the only way to
// reach q = 0 (where q^{-L} has no finite value).
template <typename S>
struct QueueParams {
    int m;
    S q;
    S s1_u;
    S s2;
    std::optional<S> s1_sq;
    std::optional<long> cap_h;
    std::optional<S> s1, u;
    QueueRegime regime = QueueRegime::Formal;

    QueueParams(int m_, const S& s1_, const S& s2_, const S& u_, const S& q_)
        : m(m_), q(q_), s1_u(s1_ * u_), s2(s2_), s1_sq(s1_ * s1_), s1(s1_), u(u_) {
        cap_h = detail::detect_neg_qpow(*s1_sq, q, 64);
        regime = classify(s1_, s2_, u_);
        if (regime == QueueRegime::Formal && cap_h) regime = QueueRegime::FiniteSpin;
    }

    static QueueParams combos(int m, const S& s1_sq, const S& s1_u, const S& s2,
                              const S& q) {
        QueueParams p(m, q, s1_u, s2);
        p.s1_sq = s1_sq;
        p.cap_h = detail::detect_neg_qpow(s1_sq, q, 64);
        if (p.cap_h) p.regime = QueueRegime::FiniteSpin;
        return p;
    }

    static QueueParams finite_spin(int m, long L, const S& s1_u, const S& s2,
                                   const S& q) {
        if (L < 1) throw std::domain_error("QueueParams: capacity must be >= 1");
        QueueParams p(m, q, s1_u, s2);
        p.cap_h = L;
        if (q != S(0)) p.s1_sq = pow_int(q, -L);
        p.regime = QueueRegime::FiniteSpin;
        return p;
    }

  private:
    QueueParams(int m_, const S& q_, const S& s1_u_, const S& s2_)
        : m(m_), q(q_), s1_u(s1_u_), s2(s2_) {}

    static QueueRegime classify(const S& s1, const S& s2, const S& u) {
        S prod = s1 * s2;
        bool box = abs_val(s1) <= S(1) && abs_val(s2) <= S(1) && prod >= S(0) && u > prod;
        if (box) {
            bool upper = true;
            if (s1 != S(0) && s2 != S(0))
                upper = u < s1 / s2 && u < s2 / s1 && u * prod < S(1);
            if (upper) return QueueRegime::HigherSpin;
        }
        return QueueRegime::Formal;
    }
};

namespace detail {

// Shared body of the queue-type column weights: the finite P-sum of
// eq-structure
//   sum_P [(s1 s2/u;q)_{|P|} prod_{j<|B-P|}(s1 s2/u - q^j s1^2) / (s1^2;q)_{|B|}]
//     q^{sum_{i<j}(B_i-P_i)P_j} prod_i [B_i choose P_i]_q
//     a_usD^{|D|} q^{sum_{m<=i<j} D_i(C_j-P_j)} (s1^2;q)_{|D|}
//     / (q;q)_{D_m} prod_{i>m} (q;q)_{C_i-P_i+D_i}/[(q;q)_{C_i-P_i}(q;q)_{D_i}]
// where the pair products above are the algebraic combination
// (s1 u/s2;q)_{|B-P|} (s1 s2/u)^{|B|-|P|}, regular at s2 = 0.
//
// a_usD = base_usD / s1^2.  Two evaluation paths:
//   * generic spin: uses s1^2 directly;
//   * finite spin s1^2 = q^{-L}: every q^{-L} power is cancelled algebraically,
//     leaving a single residual power of q per term that is negative only when
//     the weight genuinely diverges at q = 0; valid at q = 0 otherwise.
// The caller provides g = s2/(s1 u) for the finite-spin path.
template <typename S>
S queue_body_finite(const S& q, int m, long L, const S& g, const S& base_usD,
                    const ArrowState& B, const ArrowState& C, const ArrowState& D) {
    int n = B.n();
    long bT = B.total(), dT = D.total();
    if (bT > L || dT > L) return S(0);
    std::vector<long> caps(n);
    for (int i = 1; i <= n; ++i)
        caps[i - 1] = (i == m) ? B.at(i) : std::min(B.at(i), C.at(i));
    S r(0);
    for (const ArrowState& P : box_states(caps)) {
        long pT = P.total(), bp = bT - pT;
        long e1 = 0, e2 = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e1 += (B.at(i) - P.at(i)) * P.at(j);
        for (int i = m; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e2 += D.at(i) * (C.at(j) - P.at(j));
        S f(1);
        for (long j = 0; j < pT; ++j) f *= pow_int(q, L - j) - g;
        for (long j = 0; j < bp; ++j) f *= g - pow_int(q, j);
        for (int i = 1; i <= n; ++i) f *= qbinom(q, B.at(i), P.at(i));
        for (int i = m + 1; i <= n; ++i)
            f *= checked_div(qq(q, C.at(i) - P.at(i) + D.at(i)),
                             S(qq(q, C.at(i) - P.at(i)) * qq(q, D.at(i))));
        long E = pT * (pT - 1) / 2 - bT * (bT - 1) / 2 + dT * (dT - 1) / 2 + e1 + e2;
        S term = pow_int(q, E) * f * checked_div(qq(q, L - bT), qq(q, L - dT)) *
                 pow_int(base_usD, dT);
        if ((bT + dT) % 2 != 0) term = -term;
        r += term;
    }
    return checked_div(r, qq(q, D.at(m)));
}

template <typename S>
S queue_body_generic(const S& q, int m, const S& s1_sq, const S& s1_u, const S& s2,
                     const S& base_usD, const ArrowState& B, const ArrowState& C,
                     const ArrowState& D) {
    int n = B.n();
    long bT = B.total(), dT = D.total();
    S a_ssu = checked_div(S(s1_sq * s2), s1_u);
    S a_usD = checked_div(base_usD, s1_sq);
    S den_b = qpoch(s1_sq, q, bT);
    std::vector<long> caps(n);
    for (int i = 1; i <= n; ++i)
        caps[i - 1] = (i == m) ? B.at(i) : std::min(B.at(i), C.at(i));
    S r(0);
    for (const ArrowState& P : box_states(caps)) {
        long pT = P.total(), bp = bT - pT;
        long e1 = 0, e2 = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e1 += (B.at(i) - P.at(i)) * P.at(j);
        for (int i = m; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e2 += D.at(i) * (C.at(j) - P.at(j));
        S f = qpoch(a_ssu, q, pT);
        for (long j = 0; j < bp; ++j) f *= a_ssu - pow_int(q, j) * s1_sq;
        for (int i = 1; i <= n; ++i) f *= qbinom(q, B.at(i), P.at(i));
        for (int i = m + 1; i <= n; ++i)
            f *= checked_div(qq(q, C.at(i) - P.at(i) + D.at(i)),
                             S(qq(q, C.at(i) - P.at(i)) * qq(q, D.at(i))));
        r += checked_div(f, den_b) * pow_int(q, e1 + e2) * pow_int(a_usD, dT) *
             qpoch(s1_sq, q, dT);
    }
    return checked_div(r, qq(q, D.at(m)));
}

// Structural checks shared by every queue-type family.  Returns false when the
// weight is zero by the indicators (conservation off the saturated color, or a
// departure of color < m).
inline bool queue_check(int m, const ArrowState& A, const ArrowState& B,
                        const ArrowState& C, const ArrowState& D) {
    int n = A.n();
    if (B.n() != n || C.n() != n || D.n() != n)
        throw std::domain_error("queue weight: color count mismatch");
    if (m < 1 || m > n) throw std::domain_error("queue weight: bad column color");
    if (!A.is_saturated(m) || !C.is_saturated(m))
        throw std::domain_error("queue weight: A and C must be saturated at color m");
    if (!B.finite() || !D.finite())
        throw std::domain_error("queue weight: B and D must be finite");
    for (int i = 1; i < m; ++i)
        if (D.at(i) != 0) return false;
    for (int i = 1; i <= n; ++i) {
        if (i == m) continue;
        if (A.at(i) + B.at(i) != C.at(i) + D.at(i)) return false;
    }
    return true;
}

// Dispatches between the finite-spin and generic evaluators; base_usD is the
// a_usD atom with its q^{L} factor stripped (i.e. a_usD * s1^2).
template <typename S>
S queue_body(const QueueParams<S>& p, const ArrowState& A, const ArrowState& B,
             const ArrowState& C, const ArrowState& D, const S& base_usD) {
    if (!queue_check(p.m, A, B, C, D)) return S(0);
    if (p.cap_h) {
        if (B.total() > *p.cap_h || D.total() > *p.cap_h) return S(0);
        return queue_body_finite(p.q, p.m, *p.cap_h, checked_div(p.s2, p.s1_u),
                                 base_usD, B, C, D);
    }
    if (!p.s1_sq)
        throw std::domain_error("queue weight: generic-spin parameters need s1^2");
    return queue_body_generic(p.q, p.m, *p.s1_sq, p.s1_u, p.s2, base_usD, B, C, D);
}

}  // namespace detail

// The prefactor (s1^{-1} s2 u; q)_inf / (s1 s2 u; q)_inf shared by all queue
// weights with the same parameters.  Finite horizontal spin collapses it to the
// finite product 1/((s2 s1 u); q)_L, exact in both backends; otherwise it is a
// truncated infinite product available in the float backend only.
template <typename S>
S queue_prefactor(const QueueParams<S>& p, double tol = 1e-14) {
    S a = p.s2 * p.s1_u;
    if (p.cap_h) return checked_div(S(1), qpoch(a, p.q, *p.cap_h));
    if constexpr (is_exact_v<S>) {
        throw std::domain_error(
            "queue_prefactor: infinite product; exact mode needs finite horizontal "
            "spin (use prefactor-stripped weights instead)");
    } else {
        if (!p.s1_sq) throw std::domain_error("queue_prefactor: missing s1^2");
        return qpoch_inf_ratio(checked_div(a, *p.s1_sq), a, p.q, tol);
    }
}

// Queue column weight with the shared infinite prefactor factored out; ratios
// of stripped weights at fixed parameters equal ratios of the full weights.
template <typename S>
S queue_weight_stripped(const QueueParams<S>& p, const ArrowState& A,
                        const ArrowState& B, const ArrowState& C,
                        const ArrowState& D) {
    return detail::queue_body(p, A, B, C, D, S(p.s1_u * p.s2));
}

// Full queue column weight (prefactor included).
template <typename S>
S queue_weight(const QueueParams<S>& p, const ArrowState& A, const ArrowState& B,
               const ArrowState& C, const ArrowState& D, double tol = 1e-14) {
    return queue_prefactor(p, tol) * queue_weight_stripped(p, A, B, C, D);
}

// (-1/s2)^{|D|} times the queue weight, evaluated in a limit-safe form so that
// s2 = 0 is a regular point.  Nonnegative in the parameter windows of the
// exclusion-type families; not stochastic (normalization is absorbed later).
template <typename S>
S queue_gauge_weight(const QueueParams<S>& p, const ArrowState& A,
                     const ArrowState& B, const ArrowState& C, const ArrowState& D,
                     double tol = 1e-14) {
    return queue_prefactor(p, tol) * detail::queue_body(p, A, B, C, D, S(-p.s1_u));
}

// Exclusion-process column weights: spin-1/2 horizontal edges, s1^2 = 1/q.
// Build parameters with masep_params(m, w, s, q) where w = s1*u; the physical
// spectral parameter u = q^{1/2} w then never appears un-squared.
template <typename S>
QueueParams<S> masep_params(int m, const S& w, const S& s, const S& q) {
    return QueueParams<S>::finite_spin(m, 1, w, s, q);
}

template <typename S>
S masep_gauge_weight(const QueueParams<S>& p, const ArrowState& A, int k,
                     const ArrowState& C, int l) {
    if (!p.cap_h || *p.cap_h != 1)
        throw std::domain_error("masep_gauge_weight: needs horizontal capacity 1");
    int n = A.n();
    return queue_gauge_weight(p, A, ArrowState::unit(n, k), C, ArrowState::unit(n, l));
}

// Capacity-P column weights for the pushing process: s1^2 = q^{-P}.  Build
// parameters with qpush_params(m, P, w, s, q), w = s1*u.
template <typename S>
QueueParams<S> qpush_params(int m, long P, const S& w, const S& s, const S& q) {
    return QueueParams<S>::finite_spin(m, P, w, s, q);
}

template <typename S>
S qpush_gauge_weight(const QueueParams<S>& p, long P, const ArrowState& A,
                     const ArrowState& B, const ArrowState& C, const ArrowState& D) {
    if (!p.cap_h || *p.cap_h != P)
        throw std::domain_error("qpush_gauge_weight: needs horizontal capacity P");
    if (B.total() > P || D.total() > P)
        throw std::domain_error("qpush_gauge_weight: horizontal capacity exceeded");
    return queue_gauge_weight(p, A, B, C, D);
}

// Bosonic column family (the s1 -> 0 degeneration of the queue weights at
// u -> u s1/s2), with the transcendental (u;q)_inf prefactor excluded:
//   sum_P (s^2/u;q)_{|P|} (s^2)^{|B|-|P|} u^{|D|-|B|+|P|}
//     q^{sum_{i<j}(B_i-P_i)P_j} prod_i [B_i choose P_i]_q
//     q^{sum_{m<=i<j} D_i(C_j-P_j)} / (q;q)_{D_m}
//     prod_{i>m} (q;q)_{C_i-P_i+D_i} / [(q;q)_{C_i-P_i}(q;q)_{D_i}].
// At s = 0 only P = B survives and the family becomes the product form with
// indicators B_i <= C_i.
template <typename S>
S qboson_weight(const S& s, const S& u, const S& q, int m, const ArrowState& A,
                const ArrowState& B, const ArrowState& C, const ArrowState& D) {
    if (!detail::queue_check(m, A, B, C, D)) return S(0);
    if (u == S(0)) throw std::domain_error("qboson_weight: u must be nonzero");
    int n = B.n();
    long bT = B.total(), dT = D.total();
    S s_sq = s * s;
    S a = checked_div(s_sq, u);
    std::vector<long> caps(n);
    for (int i = 1; i <= n; ++i)
        caps[i - 1] = (i == m) ? B.at(i) : std::min(B.at(i), C.at(i));
    S r(0);
    for (const ArrowState& P : box_states(caps)) {
        long pT = P.total();
        long e1 = 0, e2 = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e1 += (B.at(i) - P.at(i)) * P.at(j);
        for (int i = m; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e2 += D.at(i) * (C.at(j) - P.at(j));
        S f = qpoch(a, q, pT) * pow_int(s_sq, bT - pT) * pow_int(u, dT - bT + pT) *
              pow_int(q, e1 + e2);
        for (int i = 1; i <= n; ++i) f *= qbinom(q, B.at(i), P.at(i));
        for (int i = m + 1; i <= n; ++i)
            f *= checked_div(qq(q, C.at(i) - P.at(i) + D.at(i)),
                             S(qq(q, C.at(i) - P.at(i)) * qq(q, D.at(i))));
        r += f;
    }
    return checked_div(r, qq(q, D.at(m)));
}

// The excluded normalizer (u;q)_inf of the bosonic family; transcendental, so
// float backend only.
template <typename S>
S qboson_prefactor(const S& u, const S& q, double tol = 1e-14) {
    if constexpr (is_exact_v<S>) {
        throw std::domain_error("qboson_prefactor: infinite product; float backend only");
    } else {
        return qpoch_inf(u, q, tol);
    }
}

// Stochastic column family on the full line, parameterized by alpha > 0 and
// 0 <= nu (typically nu <= alpha): the queue weights at s1^2 = 1/q with
// s2/(s1 u) = nu/alpha and (u s2/s1) = -alpha q, which depend on (alpha, nu)
// through rational combinations only.  Spin-1/2 horizontal edges k, l.
template <typename S>
S line_weight(const S& alpha, const S& nu, const S& q, int m, const ArrowState& A,
              int k, const ArrowState& B, int l) {
    if (alpha == S(0)) throw std::domain_error("line_weight: alpha must be nonzero");
    int n = A.n();
    ArrowState Bh = ArrowState::unit(n, k), Dh = ArrowState::unit(n, l);
    if (!detail::queue_check(m, A, Bh, B, Dh)) return S(0);
    S body = detail::queue_body_finite(q, m, 1L, checked_div(nu, alpha), S(-alpha),
                                       Bh, B, Dh);
    return checked_div(body, S(S(1) + alpha));
}

}  // namespace ringq
