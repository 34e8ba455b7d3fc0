#!/usr/bin/env python3
"""Independent evaluation of the queue column weights (generic-spin form).

Transcribes the P-sum directly with fractions.Fraction, using the combination
variables s1_sq = s1^2, s1_u = s1*u, s2 (all rational probes).  Used to freeze
exact values for the C++ tests and to sweep positivity regions.
"""
from fractions import Fraction as F
from itertools import product


def qpoch(a, q, k):
    r = F(1)
    for j in range(k):
        r *= 1 - a * q**j
    return r


def qq(q, k):
    return qpoch(q, q, k)


def qbinom(q, b, a):
    if a < 0 or a > b:
        return F(0)
    return qq(q, b) / (qq(q, a) * qq(q, b - a))


def queue_stripped(m, s1_sq, s1_u, s2, q, A, B, C, D, base=None):
    """Stripped queue weight (no infinite prefactor); base=None -> s1*u*s2,
    base=-s1_u gives the gauge variant.  A, C are dicts of finite coords
    (color->count), saturated coordinate m omitted.  B, D are full tuples."""
    n = len(B)
    if base is None:
        base = s1_u * s2
    # Indicators.
    for i in range(1, m):
        if D[i - 1] != 0:
            return F(0)
    for i in range(1, n + 1):
        if i == m:
            continue
        if A[i] + B[i - 1] != C[i] + D[i - 1]:
            return F(0)
    a_ssu = s1_sq * s2 / s1_u
    a_usD = base / s1_sq
    bT, dT = sum(B), sum(D)
    caps = [B[i - 1] if i == m else min(B[i - 1], C[i]) for i in range(1, n + 1)]
    total = F(0)
    for P in product(*[range(c + 1) for c in caps]):
        pT = sum(P)
        e1 = sum((B[i] - P[i]) * P[j] for i in range(n) for j in range(i + 1, n))
        e2 = sum(
            D[i - 1] * (C[j] - P[j - 1])
            for i in range(m, n + 1)
            for j in range(i + 1, n + 1)
        )
        f = qpoch(a_ssu, q, pT)
        for j in range(bT - pT):
            f *= a_ssu - q**j * s1_sq
        for i in range(n):
            f *= qbinom(q, B[i], P[i])
        for i in range(m + 1, n + 1):
            f *= qq(q, C[i] - P[i - 1] + D[i - 1]) / (
                qq(q, C[i] - P[i - 1]) * qq(q, D[i - 1])
            )
        total += f / qpoch(s1_sq, q, bT) * q ** (e1 + e2) * a_usD**dT * qpoch(
            s1_sq, q, dT
        )
    return total / qq(q, D[m - 1])


def masep_gauge(m, w, s, q, A, k, C, l, n):
    """Finite-spin L=1 gauge weight via the generic formula at s1_sq = 1/q,
    s1_u = w (valid only for q > 0), including the finite prefactor."""
    s1_sq = F(1) / q
    B = tuple(1 if i == k else 0 for i in range(1, n + 1))
    D = tuple(1 if i == l else 0 for i in range(1, n + 1))
    body = queue_stripped(m, s1_sq, w, s, q, A, B, C, D, base=-w)
    return body / (1 - s * w)


def sweep_positivity():
    n = 2
    bad = []
    for q in (F(1, 4), F(1, 2), F(3, 4)):
        for w in (F(1, 2), F(3, 4), F(1), F(3, 2)):
            for s in (F(0), w / 3, w * F(9, 10)):
                if s * w >= 1 or s >= w:
                    continue
                for m in (1, 2):
                    for a_vals in product(range(3), repeat=n - 1):
                        others = [i for i in range(1, n + 1) if i != m]
                        A = {c: v for c, v in zip(others, a_vals)}
                        for k in range(0, n + 1):
                            for l in range(0, n + 1):
                                C = dict(A)
                                ok = True
                                for i in others:
                                    ci = A[i] + (1 if k == i else 0) - (
                                        1 if l == i else 0
                                    )
                                    if ci < 0:
                                        ok = False
                                    C[i] = ci
                                if not ok:
                                    continue
                                v = masep_gauge(m, w, s, q, A, k, C, l, n)
                                if v < 0:
                                    bad.append((q, w, s, m, A, k, l, v))
    if bad:
        print(f"NEGATIVE entries: {len(bad)}")
        for b in bad[:20]:
            print(b)
    else:
        print("all masep gauge entries >= 0 on the sweep (incl. k <= m)")


def print_frozen():
    # Martin family entries (w=1, s=0), n=2, m=1, q=1/3: a few exact values.
    q = F(1, 3)
    print("-- Martin family (w=1, s=0), n=2, m=1, q=1/3 --")
    for (A2, k, l) in [(1, 2, 2), (1, 2, 0), (1, 0, 1), (2, 2, 1), (1, 1, 1)]:
        A = {2: A2}
        C = {2: A2 + (1 if k == 2 else 0) - (1 if l == 2 else 0)}
        if C[2] < 0:
            continue
        v = masep_gauge(1, F(1), F(0), q, A, k, C, l, 2)
        print(f"A2={A2} k={k} l={l}: {v}")
    # Generic-spin two-color value for the C++ cross-check.
    print("-- generic combos m=1, s1_sq=5, s1_u=2, s2=1/5, q=1/3 --")
    v = queue_stripped(
        1, F(5), F(2), F(1, 5), F(1, 3), {2: 1}, (1, 1), {2: 2}, (1, 0)
    )
    print(f"stripped A=(inf,1) B=(1,1) C=(inf,2) D=(1,0): {v}")


if __name__ == "__main__":
    sweep_positivity()
    print_frozen()
