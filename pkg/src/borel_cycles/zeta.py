"""Dedekind zeta of Q(zeta_3) at s = 2 and the derived regulator target."""
from __future__ import annotations

import math

import mpmath
import numpy as np

ZETA_STAR_PUBLISHED = -0.026922162268287542838


def _bits_to_dps(p: int) -> int:
    return max(15, int(p * 0.30103) + 5)


def hurwitz_zeta(s: int, a, p: int = 106):
    """zeta(2, a) by Euler-Maclaurin; error below 2^(6 - p)."""
    if s != 2:
        raise ValueError("only s = 2 is supported")
    with mpmath.workprec(p + 20):
        a = mpmath.mpf(a)
        if not 0 < a <= 1:
            raise ValueError("need 0 < a <= 1")
        tol = mpmath.mpf(2) ** (6 - p)
        N = max(16, p // 3)
        head = mpmath.fsum((k + a) ** -2 for k in range(N))
        x = N + a
        tail = 1 / x + 1 / (2 * x * x)
        j = 1
        while True:
            term = mpmath.bernoulli(2 * j) / x ** (2 * j + 1)
            tail += term
            # the remainder of this alternating, completely monotone case is
            # bounded by the first omitted term
            nxt = abs(mpmath.bernoulli(2 * j + 2) / x ** (2 * j + 3))
            if nxt < tol / 4:
                break
            j += 1
            if j > 10 * p:
                raise ArithmeticError("Euler-Maclaurin did not reach the tolerance")
        return +(head + tail)


def hurwitz_bruteforce(a: float, terms: int = 10 ** 6) -> float:
    """Direct partial sum plus a two-term integral tail."""
    k = np.arange(terms, dtype=np.float64) + a
    x = terms + a
    return math.fsum(1.0 / (k * k)) + 1.0 / x + 1.0 / (2.0 * x * x)


def zeta_F2(p: int = 106):
    """zeta_F(2) = zeta(2) * L(2, chi_-3) with L via Hurwitz values."""
    with mpmath.workprec(p + 20):
        L = (hurwitz_zeta(2, mpmath.mpf(1) / 3, p + 10) - hurwitz_zeta(2, mpmath.mpf(2) / 3, p + 10)) / 9
        return +(mpmath.zeta(2) * L)


def zeta_star_minus1(p: int = 106):
    with mpmath.workprec(p + 20):
        return +(-(3 / (4 * mpmath.pi ** 2)) ** mpmath.mpf(1.5) * zeta_F2(p))


def regulator_target(p: int = 106):
    """Magnitude of the leading coefficient; the sign is left to the comparison."""
    with mpmath.workprec(p + 20):
        return abs(zeta_star_minus1(p))


def chi3(n: int) -> int:
    r = n % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


def ideal_counts(N: int) -> np.ndarray:
    """a_n = number of ideals of norm n in Z[zeta_3], for n <= N (a_0 = 0)."""
    a = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        c = chi3(d)
        if c:
            a[d::d] += c
    return a


def ideal_count_prime_power(p: int, k: int) -> int:
    """Closed form from the splitting of p in Z[zeta_3]."""
    if p == 3:
        return 1
    if p % 3 == 1:
        return k + 1
    return 1 if k % 2 == 0 else 0


def zeta_F2_bruteforce(N: int = 10 ** 6) -> float:
    """sum a_n n^-2 up to N plus a tail from A(N) and the mean density pi/(3 sqrt 3)."""
    d = np.arange(1, N + 1, dtype=np.int64)
    chi = np.where(d % 3 == 0, 0, np.where(d % 3 == 1, 1, -1)).astype(np.float64)
    inv2 = 1.0 / (d.astype(np.float64) ** 2)
    H2 = np.concatenate([[0.0], np.cumsum(inv2)])
    q = N // d
    head = math.fsum(chi * inv2 * H2[q])
    A_N = int(np.sum(chi.astype(np.int64) * q))
    rho = math.pi / (3.0 * math.sqrt(3.0))
    return head + 2.0 * rho / N - A_N / float(N) ** 2
