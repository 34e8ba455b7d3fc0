#!/usr/bin/env python3
"""Independent cross-checks for the cylinder trace construction (n = 2).

Enumerates the lattice on the cylinder directly -- all winding assignments on
the vertical edges, per-site column chains with conservation-forced internal
edges -- on top of the generic-spin queue weight from queue_oracle.py, and
compares the normalized sector weights with the stationary distribution of
the exclusion generator solved by exact Gaussian elimination.  Also verifies
that the raw (un-gauged) spin-1/2 column weights are stochastic.  Prints
exact rationals to freeze into the C++ tests.
"""
from fractions import Fraction as F
from itertools import permutations, product

from generators_oracle import null_left
from queue_oracle import queue_stripped


def gauge(m, w, s, q, A, B, C, D):
    """Finite-spin L=1 gauge weight: generic-spin body at s1_sq = 1/q with the
    base -w, times the collapsed prefactor 1/(1 - s*w)."""
    body = queue_stripped(m, F(1) / q, w, s, q, A, B, C, D, base=-w)
    return body / (1 - s * w)


def site_weight(q, w, v, sv, ta, tc, Vj):
    """Product of the two column weights at one ring site, n = 2.

    ta / tc are the color-2 winding counts on the vertical edges of column -1
    below / above the site; column -2 has the single seam state (0, inf)."""
    d2 = tc + Vj[1] - ta
    if d2 < 0 or d2 > 1:
        return F(0)
    w2 = gauge(2, w / v[1], sv[1], q, {1: 0}, (0, 0), {1: 0}, (0, d2))
    w1 = gauge(1, w / v[0], sv[0], q, {2: ta}, (0, d2), {2: tc}, tuple(Vj))
    return w2 * w1


def cyl_partition(q, w, v, sv, V, cap):
    N = len(V)
    Z = F(0)
    for seam in product(range(cap + 1), repeat=N):
        term = F(1)
        for j in range(N):
            term *= site_weight(q, w, v, sv, seam[j], seam[(j + 1) % N], V[j])
            if term == 0:
                break
        Z += term
    return Z


def vtuple(color):
    return {0: (0, 0), 1: (1, 0), 2: (0, 1)}[color]


def masep_stationary_N3(q):
    states = sorted(set(permutations([0, 1, 2])))
    idx = {s: i for i, s in enumerate(states)}
    m = len(states)
    G = [[F(0)] * m for _ in range(m)]
    for s in states:
        for k in range(3):
            a, b = s[k], s[(k + 1) % 3]
            if a == b:
                continue
            rate = F(1) if a < b else q
            t = list(s)
            t[k], t[(k + 1) % 3] = t[(k + 1) % 3], t[k]
            t = tuple(t)
            if rate:
                G[idx[s]][idx[t]] += rate
                G[idx[s]][idx[s]] -= rate
    return states, null_left(G)


def check_stochastic():
    """Raw spin-1/2 queue weights (gauge un-done by (-s)^{1[l>=1]}) must sum
    to one over the outputs at every fixed input."""
    q, w = F(1, 3), F(3, 5)
    bad = 0
    for m in (1, 2):
        for s in (F(0), F(1, 5)):
            for a in range(3):
                other = 2 if m == 1 else 1
                A = {other: a}
                for k in range(3):
                    tot = F(0)
                    for l in range(3):
                        C = dict(A)
                        ci = A[other] + (1 if k == other else 0) - (1 if l == other else 0)
                        if ci < 0:
                            continue
                        C[other] = ci
                        B = tuple(1 if i == k else 0 for i in (1, 2))
                        D = tuple(1 if i == l else 0 for i in (1, 2))
                        g = gauge(m, w, s, q, A, B, C, D)
                        tot += (-s) ** (1 if l >= 1 else 0) * g
                    if tot != 1:
                        bad += 1
                        print(f"  NOT stochastic: m={m} s={s} A={A} k={k}: {tot}")
    print("raw spin-1/2 column weights stochastic:", "FAIL" if bad else "ok")


def main():
    q = F(1, 3)
    w = F(3, 5)
    v = (F(1), F(5, 4))
    sv = (F(1, 5), F(1, 10))

    check_stochastic()

    print("\n-- n=2 N=2 sector (1,1), q=1/3: cylinder weights --")
    V12 = [vtuple(1), vtuple(2)]
    V21 = [vtuple(2), vtuple(1)]
    for cap in (8, 12):
        z12 = cyl_partition(q, w, v, sv, V12, cap)
        z21 = cyl_partition(q, w, v, sv, V21, cap)
        print(f"  cap={cap}: Z(1|2)={float(z12):.15g} ratio Z(1|2)/Z(2|1)={z12/z21}")

    print("\n-- n=2 N=3 sector (1,1), q=1/3: generator vs cylinder --")
    states, pi = masep_stationary_N3(q)
    print("  generator stationary (exact):")
    for s, p in zip(states, pi):
        print(f"    {s}: {p} = {float(p):.15g}")
    for cap in (8, 14):
        zs = [cyl_partition(q, w, v, sv, [vtuple(c) for c in s], cap) for s in states]
        tot = sum(zs)
        worst = max(abs(float(z / tot - p)) for z, p in zip(zs, pi))
        print(f"  cylinder cap={cap}: max |prob - generator| = {worst:.3g}")

    print("\n-- entrance invariance spot check (N=2, V'=((0,1),(0,0))) --")
    # Entering color-2 arrow at site 1: add it to the column -2 chain there.
    def site_weight_ent(ta, tc, Vj, ent):
        d2_out = tc + Vj[1] - ta
        if d2_out < 0 or d2_out > 1:
            return F(0)
        tot = F(0)
        # column -2: B = ent (color-2 arrows only), D = (0, d2)
        b2 = (0, ent)
        w2 = gauge(2, w / v[1], sv[1], q, {1: 0}, b2, {1: 0}, (0, d2_out))
        w1 = gauge(1, w / v[0], sv[0], q, {2: ta}, (0, d2_out), {2: tc}, tuple(Vj))
        return w2 * w1

    cap = 12
    z_plain = cyl_partition(q, w, v, sv, V12, cap)
    z_ent = F(0)
    for seam in product(range(cap + 1), repeat=2):
        t = site_weight_ent(seam[0], seam[1], V12[0], 1) * site_weight_ent(
            seam[1], seam[0], V12[1], 0)
        z_ent += t
    print(f"  cap={cap}: |Z_ent - Z|/Z = {abs(float((z_ent - z_plain) / z_plain)):.3g}")


if __name__ == "__main__":
    main()
