"""Shared test fixtures: the independent big-rational oracle for the
per-iteration escape probability."""

from fractions import Fraction
from math import comb

import pytest


def escape_probability_bigrational(n, k, p, c, lam_m, lam_c) -> Fraction:
    """Exact escape probability computed entirely in rational arithmetic.

    Independent reimplementation of the case analysis: a radius-ell
    mutation phase succeeds when the fittest mutant flips all k zero-bits
    of the plateau parent; for ell in (k..2k) a good mutant sits in the
    valley below every bad mutant, so all lam_m mutants must be good.
    p and c are converted to exact rationals of the given floats.
    """
    p = Fraction(p)
    c = Fraction(c)
    total = Fraction(0)
    for ell in range(k, n + 1):
        p_ell = comb(n, ell) * p**ell * (1 - p) ** (n - ell)
        q_m = Fraction(comb(n - k, ell - k), comb(n, ell))
        if ell == k:
            p_m = 1 - (1 - q_m) ** lam_m
            p_c = Fraction(1)
        else:
            if ell < 2 * k:
                p_m = q_m**lam_m
            else:
                p_m = 1 - (1 - q_m) ** lam_m
            q_c = c**k * (1 - c) ** (ell - k)
            p_c = 1 - (1 - q_c) ** lam_c
        total += p_ell * p_m * p_c
    return total


@pytest.fixture(scope="session")
def exact_p_oracle():
    return escape_probability_bigrational
