#!/usr/bin/env python3
"""Independent evaluation of the kernel Phi(A,B;x,y) over exact fractions.

Prints the n=1 values Phi((a),(2); 1/2, 1/4) at q = 1/3 for a = 0,1,2 and
checks they sum to one.  The printed fractions are frozen into the C++ tests.
"""
from fractions import Fraction as F


def qpoch(a, q, k):
    r = F(1)
    for i in range(k):
        r *= 1 - a * q**i
    return r


def qq(q, k):
    return qpoch(q, q, k)


def qbinom(q, b, a):
    if a < 0 or a > b:
        return F(0)
    return qq(q, b) / (qq(q, a) * qq(q, b - a))


def phi(A, B, x, y, q):
    n = len(A)
    assert all(A[i] <= B[i] for i in range(n))
    aT, bT = sum(A), sum(B)
    if bT == 0:
        return F(1)
    yox = y / x
    r = qpoch(x, q, aT) * qpoch(yox, q, bT - aT) / qpoch(y, q, bT) * yox**aT
    e = sum((B[i] - A[i]) * A[j] for i in range(n) for j in range(i + 1, n))
    r *= q**e
    for i in range(n):
        r *= qbinom(q, B[i], A[i])
    return r


def main():
    x, y, q = F(1, 2), F(1, 4), F(1, 3)
    vals = [phi((a,), (2,), x, y, q) for a in range(3)]
    for a, v in enumerate(vals):
        print(f"phi(({a}),(2); 1/2, 1/4; q=1/3) = {v}")
    total = sum(vals)
    print(f"sum = {total}")
    assert total == 1

    # A two-color instance for the same freeze-and-compare purpose.
    v = phi((1, 0), (2, 1), F(1, 5), F(1, 7), F(2, 5))
    print(f"phi((1,0),(2,1); 1/5, 1/7; q=2/5) = {v}")


if __name__ == "__main__":
    main()
