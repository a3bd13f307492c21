"""Dense correlation tensors for multiparty Bell and prepare-and-distribute data.

A :class:`Correlation` over ``k + 1`` parties stores ``p(a, b_1..b_k | x, y_1..y_k)``
as a numpy array of shape ``(|X|, |Y_1|, ..., |Y_k|, |A|, |B_1|, ..., |B_k|)``:
all setting axes first in party order, then all outcome axes in party order.
Party 0 is Alice, party ``j >= 1`` is Bob-j.  The C-order ravel of this array
is the flat layout used on disk.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np

CLAMP_TOL = 1e-12
NORM_TOL = 1e-9
NS_TOL = 1e-9


class CorrelationError(ValueError):
    """Raised when correlation data is malformed or violates its invariants."""


class CorrelationFormatError(CorrelationError):
    """Raised when a correlation document cannot be parsed."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Correlation:
    """Joint conditional probabilities of a ``parties``-party Bell experiment.

    The constructor only checks shapes.  Use :func:`new_correlation` to get
    clamping and normalization checks.
    """

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self):
        settings = tuple(int(s) for s in self.settings)
        outcomes = tuple(int(o) for o in self.outcomes)
        if len(settings) != len(outcomes):
            raise CorrelationError("settings and outcomes must list the same parties")
        if len(settings) < 2:
            raise CorrelationError("a correlation needs at least two parties")
        if min(settings + outcomes) < 1:
            raise CorrelationError("cardinalities must be >= 1")
        probs = np.asarray(self.probs, dtype=float)
        shape = settings + outcomes
        if probs.shape != shape:
            if probs.size != int(np.prod(shape)):
                raise CorrelationError(
                    f"expected {int(np.prod(shape))} entries for shape {shape}, got {probs.size}"
                )
            probs = probs.reshape(shape)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", _readonly(probs))

    @property
    def parties(self) -> int:
        return len(self.settings)

    @property
    def bobs(self) -> int:
        return self.parties - 1

    def __eq__(self, other):
        if not isinstance(other, Correlation):
            return NotImplemented
        return (
            self.settings == other.settings
            and self.outcomes == other.outcomes
            and np.array_equal(self.probs, other.probs)
        )

    def __repr__(self):
        return f"Correlation(settings={self.settings}, outcomes={self.outcomes})"


@dataclass(frozen=True, eq=False)
class PDCorrelation:
    """Prepare-and-distribute data ``p(b_1..b_k | x, y_1..y_k)``.

    ``probs`` has shape ``(|X|, |Y_1|, ..., |Y_k|, |B_1|, ..., |B_k|)``.  When
    ``labels`` is given, preparation ``i`` came from the Bell pair
    ``labels[i] = (x, a)`` and the stored rows are joint weights
    ``p(a, b | x, y)`` rather than conditionals (``joint=True``).
    """

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]
    probs: np.ndarray
    labels: tuple[tuple[int, int], ...] | None = None
    joint: bool = False

    def __post_init__(self):
        settings = tuple(int(s) for s in self.settings)
        outcomes = tuple(int(o) for o in self.outcomes)
        if len(settings) != len(outcomes) or not settings:
            raise CorrelationError("need matching, non-empty settings and outcomes per Roger")
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 + 2 * len(settings) or probs.shape[1:] != settings + outcomes:
            raise CorrelationError(f"probs shape {probs.shape} does not match {settings + outcomes}")
        if self.labels is not None and len(self.labels) != probs.shape[0]:
            raise CorrelationError("one label per preparation required")
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", _readonly(probs))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple((int(x), int(a)) for x, a in self.labels))

    @property
    def rogers(self) -> int:
        return len(self.settings)

    @property
    def preparations(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    norm_deviation: float
    clamped: int = 0
    negative: int = 0
    ns_deviation: float | None = None
    messages: tuple[str, ...] = field(default=())

    def lines(self) -> list[str]:
        out = [
            f"ok: {self.ok}",
            f"normalization deviation: {self.norm_deviation:.3g}",
            f"clamped entries: {self.clamped}",
            f"negative entries: {self.negative}",
        ]
        if self.ns_deviation is not None:
            out.append(f"no-signalling deviation: {self.ns_deviation:.3g}")
        out.extend(self.messages)
        return out


def _clamp(values: np.ndarray, clamp_tol: float) -> tuple[np.ndarray, int]:
    neg = values < 0
    if np.any(values < -clamp_tol):
        worst = float(values.min())
        raise CorrelationError(f"negative probability {worst:g} below -{clamp_tol:g}")
    n = int(np.count_nonzero(neg))
    if n:
        values = np.where(neg, 0.0, values)
    return values, n


def _norm_deviation(probs: np.ndarray, n_settings_axes: int) -> float:
    if probs.size == 0:
        return 0.0
    axes = tuple(range(n_settings_axes, probs.ndim))
    return float(np.max(np.abs(probs.sum(axis=axes) - 1.0)))


def new_correlation(
    settings: Sequence[int],
    outcomes: Sequence[int],
    values,
    *,
    norm_tol: float = NORM_TOL,
    clamp_tol: float = CLAMP_TOL,
) -> Correlation:
    """Build a checked :class:`Correlation` from a flat or shaped array.

    Entries in ``[-clamp_tol, 0)`` are set to zero; anything more negative,
    or any setting row whose sum is off by more than ``norm_tol``, raises
    :class:`CorrelationError`.
    """
    settings = tuple(int(s) for s in settings)
    outcomes = tuple(int(o) for o in outcomes)
    values = np.asarray(values, dtype=float)
    expected = int(np.prod(settings + outcomes)) if settings else 0
    if values.size != expected:
        raise CorrelationError(f"expected {expected} entries, got {values.size}")
    values, _ = _clamp(values.reshape(settings + outcomes), clamp_tol)
    dev = _norm_deviation(values, len(settings))
    if dev > norm_tol:
        raise CorrelationError(f"normalization deviation {dev:g} exceeds {norm_tol:g}")
    return Correlation(settings, outcomes, values)


def validate(c: Correlation, norm_tol: float = NORM_TOL, clamp_tol: float = CLAMP_TOL) -> ValidationReport:
    """Report normalization and negativity of ``c`` without modifying it."""
    p = c.probs
    negative = int(np.count_nonzero(p < -clamp_tol))
    clamped = int(np.count_nonzero((p < 0) & (p >= -clamp_tol)))
    dev = _norm_deviation(np.maximum(p, 0.0), c.parties)
    messages = []
    if negative:
        messages.append(f"{negative} entries below -{clamp_tol:g}")
    if dev > norm_tol:
        messages.append(f"normalization deviation {dev:g} exceeds {norm_tol:g}")
    return ValidationReport(
        ok=not messages, norm_deviation=dev, clamped=clamped, negative=negative, messages=tuple(messages)
    )


def _ns_deviation(probs: np.ndarray, n: int) -> float:
    """Largest dependence of any marginal on the settings of the parties summed out."""
    worst = 0.0
    for r in range(1, n):
        for rest in itertools.combinations(range(n), r):
            marg = probs.sum(axis=tuple(n + j for j in rest), keepdims=True)
            ref = marg[tuple(slice(0, 1) if j in rest else slice(None) for j in range(n))]
            worst = max(worst, float(np.max(np.abs(marg - ref))))
    return worst


def check_no_signalling(c: Correlation, tol: float = NS_TOL) -> ValidationReport:
    """Check that every party subset's marginal ignores the other parties' settings."""
    base = validate(c)
    dev = _ns_deviation(c.probs, c.parties)
    messages = list(base.messages)
    if dev > tol:
        messages.append(f"no-signalling deviation {dev:g} exceeds {tol:g}")
    return ValidationReport(
        ok=not messages,
        norm_deviation=base.norm_deviation,
        clamped=base.clamped,
        negative=base.negative,
        ns_deviation=dev,
        messages=tuple(messages),
    )


def permute_parties(c: Correlation, order: Sequence[int]) -> Correlation:
    """New party ``j`` is old party ``order[j]``."""
    order = [int(i) for i in order]
    n = c.parties
    if sorted(order) != list(range(n)):
        raise CorrelationError(f"{order} is not a permutation of the {n} parties")
    axes = order + [n + i for i in order]
    return Correlation(
        tuple(c.settings[i] for i in order),
        tuple(c.outcomes[i] for i in order),
        np.transpose(c.probs, axes),
    )


def promote_party(c: Correlation, i: int) -> Correlation:
    """Swap party ``i`` into Alice's slot (index 0)."""
    if not 0 <= i < c.parties:
        raise IndexError(f"party {i} out of range for {c.parties} parties")
    order = list(range(c.parties))
    order[0], order[i] = order[i], order[0]
    return permute_parties(c, order)


def reorder_bobs(c: Correlation, perm: Sequence[int]) -> Correlation:
    """Rearrange Bobs so that new Bob-j is old Bob-``perm[j-1]`` (labels 1..k)."""
    perm = [int(j) for j in perm]
    if sorted(perm) != list(range(1, c.parties)):
        raise CorrelationError(f"{perm} is not a permutation of Bobs 1..{c.bobs}")
    return permute_parties(c, [0] + perm)


def tensor_product(c1: Correlation, c2: Correlation) -> Correlation:
    """Parallel composition: each party's settings and outcomes become pairs.

    A pair ``(s1, s2)`` is flattened to ``s1 * n2 + s2``.
    """
    if c1.parties != c2.parties:
        raise CorrelationError("tensor product needs equal party counts")
    m = c1.probs.ndim
    outer = np.multiply.outer(c1.probs, c2.probs)
    # interleave axes so each (c1 axis, c2 axis) pair is adjacent
    axes = [ax for i in range(m) for ax in (i, m + i)]
    shape1 = c1.settings + c1.outcomes
    shape2 = c2.settings + c2.outcomes
    probs = np.transpose(outer, axes).reshape([a * b for a, b in zip(shape1, shape2)])
    return Correlation(
        tuple(a * b for a, b in zip(c1.settings, c2.settings)),
        tuple(a * b for a, b in zip(c1.outcomes, c2.outcomes)),
        probs,
    )


def group_bobs(c: Correlation) -> Correlation:
    """Fuse all Bobs into a single party with joint settings and outcomes."""
    ys = int(np.prod(c.settings[1:]))
    bs = int(np.prod(c.outcomes[1:]))
    probs = c.probs.reshape((c.settings[0], ys, c.outcomes[0], bs))
    return Correlation((c.settings[0], ys), (c.outcomes[0], bs), probs)


def bell_to_pd(c: Correlation) -> PDCorrelation:
    """View Alice's measurement as preparing states for the Bobs.

    Preparation ``x * |A| + a`` carries the joint weights ``p(a, b | x, y)``;
    no division by ``p(a|x)`` takes place.
    """
    nx, na = c.settings[0], c.outcomes[0]
    k = c.bobs
    # (x, y.., a, b..) -> (x, a, y.., b..)
    axes = [0, 1 + k] + list(range(1, 1 + k)) + list(range(2 + k, 2 + 2 * k))
    probs = np.transpose(c.probs, axes).reshape((nx * na,) + c.settings[1:] + c.outcomes[1:])
    labels = tuple((x, a) for x in range(nx) for a in range(na))
    return PDCorrelation(c.settings[1:], c.outcomes[1:], probs, labels=labels, joint=True)


def validate_pd(pd: PDCorrelation, norm_tol: float = NORM_TOL) -> ValidationReport:
    """Check a prepare-and-distribute tensor.

    Joint tensors from :func:`bell_to_pd` are normalized per Alice setting
    (summing over all preparations with the same ``x``), not per preparation.
    """
    p = pd.probs
    k = pd.rogers
    rows = p.sum(axis=tuple(range(1 + k, 1 + 2 * k)))
    if pd.joint and pd.labels is not None:
        xs = np.array([x for x, _ in pd.labels])
        rows = np.stack([rows[xs == x].sum(axis=0) for x in np.unique(xs)])
    dev = float(np.max(np.abs(rows - 1.0))) if rows.size else 0.0
    negative = int(np.count_nonzero(p < 0))
    messages = []
    if negative:
        messages.append(f"{negative} negative entries")
    if dev > norm_tol:
        messages.append(f"normalization deviation {dev:g} exceeds {norm_tol:g}")
    return ValidationReport(ok=not messages, norm_deviation=dev, negative=negative, messages=tuple(messages))


# -- serialization -----------------------------------------------------------

_REQUIRED = ("parties", "settings", "outcomes", "values")


def to_document(c: Correlation) -> dict:
    return {
        "parties": c.parties,
        "settings": list(c.settings),
        "outcomes": list(c.outcomes),
        "values": c.probs.ravel().tolist(),
    }


def dumps(c: Correlation) -> str:
    """Serialize ``c``; every value is written with 17 significant digits."""
    values = ", ".join(format(v, ".17g") for v in c.probs.ravel())
    return (
        "{\n"
        f'  "parties": {c.parties},\n'
        f'  "settings": {json.dumps(list(c.settings))},\n'
        f'  "outcomes": {json.dumps(list(c.outcomes))},\n'
        f'  "entries": {c.probs.size},\n'
        f'  "values": [{values}]\n'
        "}\n"
    )


def from_document(doc: dict, *, norm_tol: float = NORM_TOL, check: bool = True) -> Correlation:
    if not isinstance(doc, dict):
        raise CorrelationFormatError("correlation document must be an object")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise CorrelationFormatError(f"missing field(s): {', '.join(missing)}")
    try:
        parties = int(doc["parties"])
        settings = [int(s) for s in doc["settings"]]
        outcomes = [int(o) for o in doc["outcomes"]]
        values = np.asarray(doc["values"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise CorrelationFormatError(f"bad field type: {exc}") from exc
    if values.ndim != 1:
        raise CorrelationFormatError("values must be a flat array")
    if len(settings) != parties or len(outcomes) != parties:
        raise CorrelationError("settings/outcomes length must equal parties")
    if "entries" in doc and int(doc["entries"]) != values.size:
        raise CorrelationError(f"entry count {doc['entries']} does not match {values.size} values")
    if check:
        return new_correlation(settings, outcomes, values, norm_tol=norm_tol)
    expected = int(np.prod(settings + outcomes))
    if values.size != expected:
        raise CorrelationError(f"expected {expected} entries, got {values.size}")
    return Correlation(settings, outcomes, values)


def loads(text: str, **kwargs) -> Correlation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorrelationFormatError(f"not a valid document: {exc}") from exc
    return from_document(doc, **kwargs)


def write(c: Correlation, dest: str | Path | IO[str]) -> None:
    text = dumps(c)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def read(src: str | Path | IO[str], **kwargs) -> Correlation:
    text = src.read() if hasattr(src, "read") else Path(src).read_text()
    return loads(text, **kwargs)
