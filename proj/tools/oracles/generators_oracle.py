#!/usr/bin/env python3
"""Independent exact computations for generator-module test values.

Everything is computed with fractions.Fraction (no dependency on the C++
implementations).  Null spaces are found by hand-rolled Gaussian elimination
over the rationals.
"""
from fractions import Fraction as F
from itertools import permutations


def null_left(G):
    """Left null vector of rational matrix G (list of rows), normalized to sum 1."""
    m = len(G)
    # Solve x^T G = 0  <=>  G^T x = 0.
    A = [[G[r][c] for r in range(m)] for c in range(m)]
    # Forward elimination with column tracking.
    piv_cols = []
    row = 0
    for col in range(m):
        sel = None
        for r in range(row, m):
            if A[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        pv = A[row][col]
        A[row] = [v / pv for v in A[row]]
        for r in range(m):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[row])]
        piv_cols.append(col)
        row += 1
    free = [c for c in range(m) if c not in piv_cols]
    assert len(free) == 1, free
    x = [F(0)] * m
    x[free[0]] = F(1)
    for r, c in enumerate(piv_cols):
        x[c] = -A[r][free[0]]
    s = sum(x)
    return [v / s for v in x]


def masep_q0_n2_N3():
    states = sorted(set(permutations([0, 1, 2])))  # lex on site tuples
    idx = {s: i for i, s in enumerate(states)}
    m = len(states)
    G = [[F(0)] * m for _ in range(m)]
    q = F(0)
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
    pi = null_left(G)
    print("mASEP q=0 n=2 N=3 sector (1,1), states in lex order:")
    for s, p in zip(states, pi):
        print("  ", s, p)


def qboson_n1_N2():
    q = F(1, 3)
    u = [F(1), F(2)]
    # states (V(1), V(2)) with V(1)+V(2)=2, lex order on site keys
    states = [(0, 2), (1, 1), (2, 0)]
    idx = {s: i for i, s in enumerate(states)}
    G = [[F(0)] * 3 for _ in range(3)]
    for s in states:
        for k in range(2):
            v = s[k]
            if v == 0:
                continue
            rate = (1 - q**v) / u[k]
            t = list(s)
            t[k] -= 1
            t[(k - 1) % 2] += 1
            t = tuple(t)
            G[idx[s]][idx[t]] += rate
            G[idx[s]][idx[s]] -= rate
    pi = null_left(G)
    print("qBoson n=1 N=2 two particles, q=1/3, u=(1,2), states lex:")
    for s, p in zip(states, pi):
        print("  ", s, p)


def qpush_n1_N3_P2():
    # Single color: a cascade never changes the configuration while active, so
    # winding sums are plain geometric series.
    q = F(1, 4)
    P = 2
    N = 3
    u = [F(1)] * N
    states = []
    for a in range(P + 1):
        for b in range(P + 1):
            c = 2 - a - b
            if 0 <= c <= P:
                states.append((a, b, c))
    states.sort()
    idx = {s: i for i, s in enumerate(states)}
    m = len(states)
    G = [[F(0)] * m for _ in range(m)]
    for s in states:
        for k in range(N):
            a = s[k]
            if a == 0:
                continue
            act = (q ** (P - a) - q**P) / u[k]  # u^-1 (q^{-a}-1) q^{P-0} with A_[2,1]=0
            if act == 0:
                continue
            red = list(s)
            red[k] -= 1
            # pass-through probability at site j given occupancy red[j]
            pas = [q ** (P - red[j]) for j in range(N)]
            rho = F(1)
            for p in pas:
                rho *= p
            # absorption at site t = prefix * (1 - pas[t]) / (1 - rho),
            # prefix over sites strictly between k and t along the path
            pref = F(1)
            jpos = (k + 1) % N
            for step in range(N):
                t = (k + 1 + step) % N
                pabs = pref * (1 - pas[t]) / (1 - rho)
                if pabs:
                    fin = list(red)
                    fin[t] += 1
                    fin = tuple(fin)
                    if fin != s:
                        G[idx[s]][idx[fin]] += act * pabs
                        G[idx[s]][idx[s]] -= act * pabs
                pref *= pas[t]
            del jpos
    pi = null_left(G)
    print("qPushTASEP n=1 N=3 P=2 two particles, q=1/4, u=1, states lex:")
    for s, p in zip(states, pi):
        print("  ", s, p)
    # also print one activation rate and one absorption row for spot checks
    s = (2, 0, 0)
    print("  activation rate at full site:", (q ** (P - 2) - q**P) / u[0])


if __name__ == "__main__":
    masep_q0_n2_N3()
    qboson_n1_N2()
    qpush_n1_N3_P2()
