#!/usr/bin/env python3
"""Design experiment for the cylinder-operator stationarity checks.

Questions answered here, all in exact rational arithmetic:
  1. Does the n=2 seam trace slice f(t) (trace term at seam winding digit t)
     satisfy a short linear recurrence with constant coefficients, so the
     winding sum can be computed exactly (geometric-mix tail)?
  2. Is the exactly-summed row ⟨empty|Q annihilated by the twisted operator
     (residual exactly zero), and is the plainly truncated row not?
  3. Same recurrence question for the mixed-spin rows used by the straight
     operator (site 0 with s^2 = 1/q, sites 1..N generic).
"""
from fractions import Fraction as F
from itertools import product
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from phi_oracle import phi  # noqa: E402
from queue_oracle import queue_stripped  # noqa: E402


def fused(x, qL, qM, q, A, B, C, D, hcap=None):
    """W_{x,L,M}(A,B;C,D), stochastic in (C,D); tuples over n colors."""
    if any(a + b != c + d for a, b, c, d in zip(A, B, C, D)):
        return F(0)
    if hcap is not None and (sum(B) > hcap or sum(D) > hcap):
        return F(0)
    x1, y1 = qL * x / qM, x / qM
    x2, y2 = 1 / (qL * x), F(1) / qL
    r = F(0)
    for P in product(*[range(min(b, c) + 1) for b, c in zip(B, C)]):
        CP = tuple(c - p for c, p in zip(C, P))
        CD = tuple(cp + d for cp, d in zip(CP, D))
        r += phi(CP, CD, x1, y1, q) * phi(P, B, x2, y2, q)
    return r * x ** (sum(D) - sum(B)) * qL ** sum(A) * qM ** (-sum(D))


def unit(n, c):
    return tuple(1 if i == c else 0 for i in range(1, n + 1))


def l_ss(s_sq, s_x, q, A, k, B, l):
    n = len(A)
    return fused(s_x / s_sq, q, 1 / s_sq, q, A, unit(n, k), B, unit(n, l), hcap=1)


def r_weight(z, q, a, b, c, d):
    if a == b:
        return F(1) if (c == a and d == a) else F(0)
    den = 1 - q * z
    if (a, b) == (c, d):
        return q * (1 - z) / den if b < a else (1 - z) / den
    if (a, b) == (d, c):
        return (1 - q) / den if b < a else (1 - q) * z / den
    return F(0)


def site_entry(sig, wv, sv, q, exits, t, tp, hcap=None):
    """n=2 site transfer entry between seam digits t -> tp.

    sig = s1^2 for this site's row, wv = (s1*u/v_1, s1*u/v_2), sv = (s2_1, s2_2),
    exits = (e1, e2) arrow counts leaving the site.  Raw stripped weights.
    """
    d2 = tp - t + exits[1]
    if d2 < 0:
        return F(0)
    if hcap is not None and d2 > hcap:
        return F(0)
    w2 = queue_stripped(2, sig, wv[1], sv[1], q, {1: 0}, (0, 0), {1: 0}, (0, d2))
    w1 = queue_stripped(1, sig, wv[0], sv[0], q, {2: t}, (0, d2), {2: tp}, exits)
    return w2 * w1


def row_slices(site_params, exits_list, sv, q, tmax):
    """f(t) for t=0..tmax: diagonal of the product of seam-digit matrices."""
    pad = tmax + sum(e[0] + e[1] for e in exits_list) + 2
    mats = []
    for (sig, wv, hcap), exits in zip(site_params, exits_list):
        M = [[site_entry(sig, wv, sv, q, exits, t, tp, hcap)
              for tp in range(pad)] for t in range(pad)]
        mats.append(M)
    P = mats[0]
    for M in mats[1:]:
        P = [[sum(P[i][k] * M[k][j] for k in range(pad)) for j in range(pad)]
             for i in range(pad)]
    return [P[t][t] for t in range(tmax + 1)]


def find_recurrence(f, max_order=6):
    """Minimal exact constant-coefficient recurrence valid for t >= t0=1."""
    for r in range(1, max_order + 1):
        # Solve f(t+r) = sum_j a_j f(t+j) from rows t = 1..r, verify on the rest.
        rows = [[f[t + j] for j in range(r)] + [f[t + r]] for t in range(1, r + 1)]
        a = solve(rows)
        if a is None:
            continue
        ok = all(
            sum(a[j] * f[t + j] for j in range(r)) == f[t + r]
            for t in range(1, len(f) - r)
        )
        if ok:
            return a
    return None


def solve(rows):
    n = len(rows)
    m = [row[:] for row in rows]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        m[c] = [x / m[c][c] for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                m[r] = [x - m[r][c] * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def exact_sum(f, rec):
    """Sum_{t>=0} f(t) given recurrence valid for t >= 1, roots inside the disk."""
    r = len(rec)
    denom = 1 - sum(rec)
    if denom == 0:
        raise ValueError("z=1 is a characteristic root; sum diverges")
    # S1 = sum_{t>=1} f(t). T_j = sum_{t>=1} f(t+j) = S1 - sum_{i=1..j} f(i).
    # T_r = sum_j a_j T_j.
    rhs = F(0)
    for j in range(r):
        rhs += rec[j] * (-sum(f[1 : j + 1], F(0)))
    # S1 - sum_{i=1..r} f(i) = sum_j a_j S1 + rhs
    s1 = (sum(f[1 : r + 1], F(0)) + rhs) / denom
    return f[0] + s1


def twisted_matrix(states, z, q, N):
    """Row-stochastic matrix of R(12) R(23) ... R(N1) on the given states."""
    idx = {s: i for i, s in enumerate(states)}
    size = len(states)
    T = [[F(1) if i == j else F(0) for j in range(size)] for i in range(size)]
    for step in range(N):
        a, b = step % N, (step + 1) % N
        M = [[F(0)] * size for _ in range(size)]
        for s, i in idx.items():
            for k in range(3):
                for l in range(3):
                    w = r_weight(z, q, s[a], s[b], k, l)
                    if w == 0:
                        continue
                    s2 = list(s)
                    s2[a], s2[b] = l, k
                    M[i][idx[tuple(s2)]] += w
        T = [[sum(T[i][k] * M[k][j] for k in range(size)) for j in range(size)]
             for i in range(size)]
    return T


def main():
    q = F(1, 3)
    v = (F(1), F(5, 4))
    sv = (F(1, 5), F(1, 10))
    w1, w = F(3, 5), F(2, 5)  # site-1 combo and the shared combo
    z = w1 / w

    # --- twisted, N=2, sector {1,2} ---
    N = 2
    states = [(1, 2), (2, 1)]
    exits_of = {0: (0, 0), 1: (1, 0), 2: (0, 1)}
    sig = F(1) / q
    site_params = lambda st: [  # noqa: E731
        (sig, (wj / v[0], wj / v[1]), 1) for wj in ([w1] + [w] * (N - 1))
    ]
    tmax = 12
    slices = {}
    for st in states:
        f = row_slices(site_params(st), [exits_of[c] for c in st], sv, q, tmax)
        rec = find_recurrence(f)
        print(f"V={st}: f(0..4) = {[str(x) for x in f[:5]]}")
        print(f"        recurrence: {rec}")
        slices[st] = (f, rec)

    pi = {st: exact_sum(f, rec) for st, (f, rec) in slices.items()}
    print("exact rows:", {str(k): str(v) for k, v in pi.items()})

    T = twisted_matrix(states, z, q, N)
    res = [
        sum(pi[sp] * T[i][j] for i, sp in enumerate(states)) - pi[st]
        for j, st in enumerate(states)
    ]
    print("twisted residual (exact sum):", [str(x) for x in res])

    for cap in (4, 8):
        pic = {st: sum(slices[st][0][: cap + 1], F(0)) for st in states}
        resc = [
            sum(pic[sp] * T[i][j] for i, sp in enumerate(states)) - pic[st]
            for j, st in enumerate(states)
        ]
        print(f"twisted residual (plain cap {cap}):",
              [float(x) for x in resc])

    # --- straight-type mixed-spin rows, ring (0,1,2) ---
    x = F(-2, 3)
    sig_sites = (F(1, 7), F(2, 7))
    w_sites = (F(3, 5), F(2, 5))
    params = [(F(1) / q, (x / v[0], x / v[1]), 1)]
    params += [
        (sg, (wj / v[0], wj / v[1]), None) for sg, wj in zip(sig_sites, w_sites)
    ]
    for exits in [[(0, 0), (1, 0), (0, 1)], [(1, 0), (0, 1), (0, 0)],
                  [(0, 0), (1, 1), (0, 0)]]:
        f = row_slices(params, exits, sv, q, tmax)
        rec = find_recurrence(f)
        print(f"straight exits={exits}: rec order = "
              f"{None if rec is None else len(rec)} rec={rec}")

    # --- full straight check: operator vs seam rows, N=2 sites, n=2 ---
    n, Ns = 2, 2
    joint = []  # (c, (V1, V2)) with one arrow of each color in total
    bundles = [(a, b) for a in range(3) for b in range(3)]
    for c in range(n + 1):
        for V in product(bundles, repeat=Ns):
            tot = [((1 if c == m else 0) + sum(Vj[m - 1] for Vj in V))
                   for m in range(1, n + 1)]
            if tot == [1, 1]:
                joint.append((c, V))
    idx = {s: i for i, s in enumerate(joint)}

    def l_factor(j):
        sg, wj = sig_sites[j - 1], w_sites[j - 1]
        s_x = x * sg / wj
        M = [[F(0)] * len(joint) for _ in joint]
        for s, i in idx.items():
            c, V = s
            A = V[j - 1]
            for l in range(n + 1):
                B = list(A)
                if c >= 1:
                    B[c - 1] += 1
                if l >= 1:
                    if B[l - 1] == 0:
                        continue
                    B[l - 1] -= 1
                w8 = l_ss(sg, s_x, q, A, c, tuple(B), l)
                if w8 == 0:
                    continue
                V2 = list(V)
                V2[j - 1] = tuple(B)
                M[i][idx[(l, tuple(V2))]] += w8
        return M

    size = len(joint)
    Mop = l_factor(Ns)
    for j in range(Ns - 1, 0, -1):
        Fj = l_factor(j)
        Mop = [[sum(Mop[i][k] * Fj[k][j2] for k in range(size))
                for j2 in range(size)] for i in range(size)]
    rowsums = {sum(row, F(0)) for row in Mop}
    print("straight operator row sums:", [str(x) for x in rowsums])

    pis = []
    for c, V in joint:
        exits = [unit(n, c) if c else (0, 0)] + list(V)
        f = row_slices(params, exits, sv, q, tmax)
        rec = find_recurrence(f)
        pis.append(exact_sum(f, rec))
    res = [
        sum(pis[i] * Mop[i][j] for i in range(size)) - pis[j]
        for j in range(size)
    ]
    print("straight residual (exact sum):", sorted({str(x) for x in res}))
    for s, p in zip(joint, pis):
        print(f"  pi{s} = {p}")

    # --- pushing crossing: stochastic rows, vertical line stays spin-1/2 ---
    P_cap = 2
    xq = F(-5, 3)
    leak = []
    for e in [(0, 0), (1, 0), (0, 1)]:
        for A in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]:
            tot = F(0)
            for l in range(n + 1):
                ep = unit(n, l) if l else (0, 0)
                D = [a + b - c for a, b, c in zip(A, e, ep)]
                if any(d < 0 for d in D) or sum(D) > P_cap:
                    continue
                tot += fused(xq, q ** P_cap, q, q, e, A, ep, tuple(D),
                             hcap=P_cap)
            leak.append(tot - 1)
    print("pushing crossing row-sum defects:", sorted({str(x) for x in leak}))


if __name__ == "__main__":
    main()
