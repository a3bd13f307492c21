"""Fidelity, purity and dimension bounds computed from correlation data alone.

The central object is the alternating minimization-and-summation (AMS)
functional.  For a non-negative weight tensor ``h(y_1..y_k, b_1..b_k)`` and a
visiting order of the parties it evaluates

    min_{y_1} sum_{b_1} min_{y_2} sum_{b_2} ... min_{y_k} sum_{b_k} h

where every inner minimum is taken separately for each history of earlier
settings and outcomes.  It is computed bottom-up on the full tensor: after
moving the axes into ``(y, b)`` pairs in visiting order, the last outcome axis
is summed and the last setting axis minimized, ``k`` times.  Every prefix is
therefore evaluated exactly once, which is the memoized form of the
recursion; cost is ``prod_j |Y_j| |B_j|`` per weight pair.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correlation import Correlation, PDCorrelation, group_bobs, promote_party

ROUND_EPS = 1e-9
MAX_EXHAUSTIVE_BOBS = 5

STRATEGIES = ("fixed", "global", "per-term")


@dataclass(frozen=True)
class AmsOptions:
    """How to pick the order in which parties are visited by AMS.

    ``fixed`` uses ``perm`` (Bob labels 1..k).  ``global`` tries every order and
    keeps the one giving the smallest denominator.  ``per-term`` picks the best
    order independently for every weight pair.
    """

    strategy: str = "per-term"
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown ordering strategy {self.strategy!r}")
        if self.strategy == "fixed" and self.perm is not None:
            object.__setattr__(self, "perm", tuple(int(j) for j in self.perm))

    @classmethod
    def fixed(cls, perm: Sequence[int]) -> "AmsOptions":
        return cls("fixed", tuple(perm))

    @classmethod
    def parse(cls, text: str) -> "AmsOptions":
        """Parse ``fixed:2,1``, ``global`` or ``per-term``."""
        if text.startswith("fixed"):
            _, _, rest = text.partition(":")
            perm = tuple(int(t) for t in rest.split(",")) if rest else None
            return cls("fixed", perm)
        return cls(text)

    def orders(self, k: int) -> list[tuple[int, ...]]:
        if self.strategy == "fixed":
            perm = self.perm if self.perm is not None else tuple(range(1, k + 1))
            if sorted(perm) != list(range(1, k + 1)):
                raise ValueError(f"ordering {perm} is not a permutation of 1..{k}")
            return [perm]
        if k > MAX_EXHAUSTIVE_BOBS:
            warnings.warn(
                f"{k} Bobs: exhaustive ordering too costly, using the identity order",
                RuntimeWarning,
                stacklevel=3,
            )
            return [tuple(range(1, k + 1))]
        return list(itertools.permutations(range(1, k + 1)))

    def describe(self) -> str:
        if self.strategy == "fixed" and self.perm is not None:
            return "fixed:" + ",".join(map(str, self.perm))
        return self.strategy


def _ams_reduce(h: np.ndarray, k: int, order: Sequence[int]) -> np.ndarray:
    """AMS over the trailing ``2k`` axes of ``h``; leading axes are batch axes."""
    nb = h.ndim - 2 * k
    axes = list(range(nb))
    for j in order:
        axes += [nb + j - 1, nb + k + j - 1]
    t = h.transpose(axes)
    for _ in range(k):
        t = t.sum(axis=-1).min(axis=-1)
    return t


def ams(f: np.ndarray, g: np.ndarray, order: Sequence[int] | None = None) -> float:
    """AMS of ``sqrt(f) * sqrt(g)`` for weights with axes ``(y_1..y_k, b_1..b_k)``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch {f.shape} vs {g.shape}")
    if f.ndim % 2 or f.ndim == 0:
        raise ValueError("weights need matching setting and outcome axes")
    if np.any(f < 0) or np.any(g < 0):
        raise ValueError("weights must be non-negative")
    k = f.ndim // 2
    if order is None:
        order = range(1, k + 1)
    order = tuple(order)
    if sorted(order) != list(range(1, k + 1)):
        raise ValueError(f"ordering {order} is not a permutation of 1..{k}")
    return float(_ams_reduce(np.sqrt(f) * np.sqrt(g), k, order))


def _check_prep(pd: PDCorrelation, *xs: int) -> None:
    for x in xs:
        if not 0 <= x < pd.preparations:
            raise IndexError(f"preparation {x} out of range")


def fidelity_bound_trivial(pd: PDCorrelation, x: int, x2: int) -> float:
    """Non-adaptive bound: the best single joint setting for all Rogers at once."""
    _check_prep(pd, x, x2)
    k = pd.rogers
    h = np.sqrt(pd.probs[x]) * np.sqrt(pd.probs[x2])
    per_setting = h.sum(axis=tuple(range(k, 2 * k)))
    return float(per_setting.min())


def fidelity_bound_ams(pd: PDCorrelation, x: int, x2: int, opts: AmsOptions | None = None) -> float:
    """Upper bound on the fidelity of preparations ``x`` and ``x2``.

    The best value over the orderings allowed by ``opts`` is returned.
    """
    _check_prep(pd, x, x2)
    opts = opts or AmsOptions()
    k = pd.rogers
    h = np.sqrt(pd.probs[x]) * np.sqrt(pd.probs[x2])
    return float(min(_ams_reduce(h, k, o) for o in opts.orders(k)))


def _pair_terms(sqrt_p: np.ndarray, x: int, x2: int, k: int, orders) -> np.ndarray:
    """AMS values for every ``(a, a')`` and order, shape ``(orders, A, A')``."""
    # sqrt_p axes: (x, y.., a, b..); take slices as (a, y.., b..)
    px = np.moveaxis(sqrt_p[x], k, 0)
    px2 = np.moveaxis(sqrt_p[x2], k, 0)
    h = px[:, None] * px2[None, :]
    return np.stack([_ams_reduce(h, k, o) for o in orders])


def purity_bound(c: Correlation, x: int, x2: int, opts: AmsOptions | None = None) -> float:
    """Upper bound on the purity of the Bobs' joint reduced state.

    Sum over Alice's outcome pairs of the squared AMS on joint weights
    ``sqrt(p(a b|x y)) sqrt(p(a' b|x' y))``; orders are chosen per ``opts``.
    """
    opts = opts or AmsOptions()
    if not (0 <= x < c.settings[0] and 0 <= x2 < c.settings[0]):
        raise IndexError("Alice setting out of range")
    k = c.bobs
    terms = _pair_terms(np.sqrt(c.probs), x, x2, k, opts.orders(k))
    return _denominator(terms, opts)[0]


def _denominator(terms: np.ndarray, opts: AmsOptions):
    """Reduce an ``(orders, A, A')`` AMS stack to ``(value, table, order index)``."""
    if opts.strategy == "per-term":
        best = terms.argmin(axis=0)
        table = np.take_along_axis(terms, best[None], axis=0)[0]
        return float(np.sum(table**2)), table, best
    sums = np.sum(terms**2, axis=(1, 2))
    o = int(np.argmin(sums))
    return float(sums[o]), terms[o], o


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Outcome of a dimension bound computation.

    ``ams_table[a, a']`` holds the AMS values at the minimizing setting pair
    ``argmin``.  ``orderings`` is one order for ``fixed``/``global`` strategies
    and an ``A x A'`` grid of orders for ``per-term``.
    """

    bound: float
    denominator: float
    argmin: tuple[int, int]
    ams_table: np.ndarray
    orderings: object
    strategy: str
    target_party: int = 0
    grouped: bool = False
    pair_denominators: np.ndarray | None = field(default=None, repr=False)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.bound)

    @property
    def rounded(self) -> float:
        return round_bound(self.bound)

    def to_document(self) -> dict:
        orderings = self.orderings
        if isinstance(orderings, np.ndarray):
            orderings = orderings.tolist()
        return {
            "bound": "inf" if self.infinite else repr(self.bound),
            "rounded": "inf" if self.infinite else int(self.rounded),
            "denominator": repr(self.denominator),
            "argmin": list(self.argmin),
            "strategy": self.strategy,
            "orderings": _listify(orderings),
            "target_party": self.target_party,
            "grouped": self.grouped,
            "ams": self.ams_table.tolist(),
        }

    def format_table(self) -> str:
        label = "grouped bound" if self.grouped else "bound"
        rows = [
            (label, format_bound(self.bound)),
            ("rounded", "inf" if self.infinite else str(int(self.rounded))),
            ("denominator", f"{self.denominator:.12g}"),
            ("argmin (x, x')", f"{self.argmin}"),
            ("ordering", self.strategy if self.strategy != "fixed" else str(self.orderings)),
            ("target party", str(self.target_party)),
        ]
        w = max(len(r[0]) for r in rows)
        lines = [f"{name:<{w}}  {value}" for name, value in rows]
        lines.append("AMS at argmin (rows a, columns a'):")
        for row in self.ams_table:
            lines.append("  " + "  ".join(f"{v:12.9f}" for v in row))
        return "\n".join(lines)


def _listify(obj):
    if isinstance(obj, (list, tuple)):
        return [_listify(o) for o in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def round_bound(value: float) -> float:
    """Smallest integer dimension compatible with an exact bound."""
    if math.isinf(value):
        return value
    return float(math.ceil(value - ROUND_EPS))


def format_bound(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


def dimension_bound(
    c: Correlation,
    target_party: int = 0,
    opts: AmsOptions | None = None,
    inf_threshold: float = 0.0,
) -> BoundReport:
    """Lower bound on the local Hilbert-space dimension of ``target_party``.

    The target is swapped into Alice's slot; the denominator is the minimum
    over all ordered pairs ``(x, x')``, equal pairs included, of
    :func:`purity_bound`.  A denominator of exactly zero (or below
    ``inf_threshold``) yields an infinite bound.
    """
    opts = opts or AmsOptions()
    c = promote_party(c, target_party)
    k = c.bobs
    orders = opts.orders(k)
    sqrt_p = np.sqrt(c.probs)
    nx = c.settings[0]
    dens = np.empty((nx, nx))
    best = None
    for x in range(nx):
        for x2 in range(nx):
            terms = _pair_terms(sqrt_p, x, x2, k, orders)
            value, table, idx = _denominator(terms, opts)
            dens[x, x2] = value
            if best is None or value < best[0]:
                best = (value, (x, x2), table, idx)
    d, argmin, table, idx = best
    if opts.strategy == "per-term":
        used = [[orders[i] for i in row] for row in idx]
    else:
        used = orders[idx]
    infinite = d == 0.0 or d < inf_threshold
    return BoundReport(
        bound=math.inf if infinite else 1.0 / d,
        denominator=d,
        argmin=argmin,
        ams_table=table,
        orderings=used,
        strategy=opts.strategy,
        target_party=target_party,
        pair_denominators=dens,
    )


def dimension_bound_grouped(c: Correlation, target_party: int = 0, inf_threshold: float = 0.0) -> BoundReport:
    """Bipartite comparison bound: all non-target parties fused into one Bob."""
    g = group_bobs(promote_party(c, target_party))
    r = dimension_bound(g, 0, AmsOptions.fixed((1,)), inf_threshold)
    return BoundReport(
        bound=r.bound,
        denominator=r.denominator,
        argmin=r.argmin,
        ams_table=r.ams_table,
        orderings=r.orderings,
        strategy=r.strategy,
        target_party=target_party,
        grouped=True,
        pair_denominators=r.pair_denominators,
    )
