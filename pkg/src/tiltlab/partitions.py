"""Partition-indexed expansion of derivatives of exp(g(x)) at x = 0.

The n-th derivative of exp(g) at 0, divided by exp(g(0)), equals

    n! * sum over (m_1,...,m_n) with sum_i i*m_i = n of
         prod_i c_i^{m_i} / m_i!        where c_i = g^(i)(0)/i!.

The arithmetic is type-generic: floats, complex numbers and Fractions all
work, which lets tests check the Gaussian coefficient identity exactly.
"""

from __future__ import annotations

import math

__all__ = ["partition_multiplicities", "exp_derivative"]


def partition_multiplicities(n):
    """Yield multiplicity tuples (m_1, ..., m_n) with sum_i i*m_i = n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield ()
        return
    m = [0] * (n + 1)

    def rec(remaining, largest):
        if remaining == 0:
            yield tuple(m[1:])
            return
        for part in range(min(remaining, largest), 0, -1):
            m[part] += 1
            yield from rec(remaining - part, part)
            m[part] -= 1

    yield from rec(n, n)


def exp_derivative(coeffs, n):
    """d^n/dx^n exp(g(x)) at 0, divided by exp(g(0)).

    coeffs[i-1] must hold c_i = g^(i)(0)/i! for 1 <= i <= n; shorter
    sequences are padded with zeros.
    """
    if n == 0:
        return 1.0 if not coeffs else type(coeffs[0])(1)
    c = list(coeffs) + [0] * max(0, n - len(coeffs))
    fact_n = math.factorial(n)
    total = 0
    for mult in partition_multiplicities(n):
        coef = fact_n
        term = 1
        for i, mi in enumerate(mult, start=1):
            if mi == 0:
                continue
            coef //= math.factorial(mi)
            term = term * c[i - 1] ** mi
            if term == 0:
                break
        else:
            total = total + coef * term
            continue
    return total
