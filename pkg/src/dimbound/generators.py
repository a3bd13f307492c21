"""Closed-form correlations with known dimension bounds.

All entries are exact dyadic (or ``1/d``) rationals; nothing here touches
quantum simulation, so these serve as independent references for it.
"""

from __future__ import annotations

import numpy as np

from .correlation import Correlation

FAMILIES = ("ghz", "prbox", "eq19", "maxent-cb")


def _grid(parties: int, n_settings: int, n_outcomes: int):
    shape = (n_settings,) * parties + (n_outcomes,) * parties
    idx = np.indices(shape)
    return shape, idx[:parties], idx[parties:]


def ghz_correlation(parties: int) -> Correlation:
    """GHZ state measured with Pauli-X (setting 0) or Pauli-Y (setting 1).

    ``p = |1 + i^(2 h(outcomes) + h(settings))|^2 / 2^(parties + 1)`` with ``h``
    the Hamming weight; ``|1 + i^m|^2`` is looked up from ``m mod 4``.
    """
    if parties < 2:
        raise ValueError("ghz needs at least two parties")
    shape, s, o = _grid(parties, 2, 2)
    m = (2 * o.sum(axis=0) + s.sum(axis=0)) % 4
    weight = np.array([4.0, 2.0, 0.0, 2.0])[m]
    return Correlation((2,) * parties, (2,) * parties, weight / 2.0 ** (parties + 1))


def prbox_correlation(parties: int) -> Correlation:
    """Multiparty PR box: uniform on ``a ^ b_1 ^ ... ^ b_k == x * y_1 * ... * y_k``."""
    if parties < 2:
        raise ValueError("prbox needs at least two parties")
    k = parties - 1
    shape, s, o = _grid(parties, 2, 2)
    parity = o.sum(axis=0) % 2
    target = np.prod(s, axis=0)
    p = np.where(parity == target, 1.0 / 2**k, 0.0)
    return Correlation((2,) * parties, (2,) * parties, p)


def eq19_correlation() -> Correlation:
    """Tripartite no-signalling box: uniform on ``x * (y_2 ^ b_1) == a ^ b_1 ^ b_2``.

    Visiting Bob-1 before Bob-2 gives an infinite dimension bound, the
    reverse order a finite one, and fusing the Bobs gives 4.
    """
    shape, (x, y1, y2), (a, b1, b2) = _grid(3, 2, 2)
    lhs = x * (y2 ^ b1)
    rhs = a ^ b1 ^ b2
    p = np.where(lhs == rhs, 0.25, 0.0)
    return Correlation((2, 2, 2), (2, 2, 2), p)


def maxent_cb_correlation(d: int, parties: int) -> Correlation:
    """Computational-basis statistics of ``sum_i |i...i> / sqrt(d)``: one setting, perfect agreement."""
    if d < 2 or parties < 2:
        raise ValueError("maxent-cb needs d >= 2 and parties >= 2")
    shape, _, o = _grid(parties, 1, d)
    agree = np.all(o == o[0], axis=0)
    p = np.where(agree, 1.0 / d, 0.0)
    return Correlation((1,) * parties, (d,) * parties, p)


def generate(family: str, parties: int | None = None, d: int | None = None) -> Correlation:
    if family == "ghz":
        return ghz_correlation(parties or 3)
    if family == "prbox":
        return prbox_correlation(parties or 3)
    if family == "eq19":
        if parties not in (None, 3):
            raise ValueError("eq19 is tripartite")
        return eq19_correlation()
    if family == "maxent-cb":
        return maxent_cb_correlation(d or 2, parties or 3)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
