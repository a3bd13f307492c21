"""Born-rule simulation of Bell and prepare-and-distribute experiments.

States carry their local dimensions; multi-party operators are handled as
tensors with axes ``(row_1..row_n, col_1..col_n)``.  Besides producing
correlations, the functions here (fidelity, purity, partial trace, collapse)
serve as ground-truth oracles for the bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .correlation import Correlation, PDCorrelation

STATE_TOL = 1e-12
EIG_TOL = 1e-10
POVM_TOL = 1e-10
RANK_TOL = 1e-10


class ScenarioError(ValueError):
    """Inconsistent dimensions or invalid quantum objects."""


def _prod(dims) -> int:
    return int(np.prod(dims, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != _prod(dims):
            raise ScenarioError(f"{amps.size} amplitudes do not fit dimensions {dims}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > STATE_TOL:
            raise ScenarioError(f"state has squared norm {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, dims, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(dims, amps / np.linalg.norm(amps))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    @property
    def parties(self) -> int:
        return len(self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        n = _prod(dims)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (n, n):
            if m.size != n * n:
                raise ScenarioError(f"matrix of shape {m.shape} does not fit dimensions {dims}")
            m = m.reshape(n, n)
        if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
            raise ScenarioError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise ScenarioError(f"density matrix has trace {tr!r}")
        if np.linalg.eigvalsh(m)[0] < -EIG_TOL:
            raise ScenarioError("density matrix is not positive semidefinite")
        m = np.array(m)
        m.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    def density(self) -> "DensityMatrix":
        return self

    @property
    def parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)


State = Union[PureState, DensityMatrix]


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """All measurement settings of one party.

    ``effects`` has shape ``(settings, outcomes, d, d)``.  Projective sets built
    from orthonormal bases also keep ``vectors`` with shape
    ``(settings, outcomes, d)``, where ``vectors[s, o]`` is the ket for outcome
    ``o`` of setting ``s``.
    """

    effects: np.ndarray
    vectors: np.ndarray | None = None

    def __post_init__(self):
        e = np.asarray(self.effects, dtype=complex)
        if e.ndim != 4 or e.shape[2] != e.shape[3]:
            raise ScenarioError("effects must have shape (settings, outcomes, d, d)")
        d = e.shape[2]
        herm = np.max(np.abs(e - np.conj(np.swapaxes(e, -1, -2))))
        if herm > POVM_TOL:
            raise ScenarioError("effects must be Hermitian")
        if np.min(np.linalg.eigvalsh(e)) < -POVM_TOL:
            raise ScenarioError("effects must be positive semidefinite")
        if np.max(np.abs(e.sum(axis=1) - np.eye(d))) > POVM_TOL:
            raise ScenarioError("effects of a setting must sum to the identity")
        e.flags.writeable = False
        object.__setattr__(self, "effects", e)
        if self.vectors is not None:
            v = np.asarray(self.vectors, dtype=complex)
            v.flags.writeable = False
            object.__setattr__(self, "vectors", v)

    @classmethod
    def projective(cls, bases) -> "MeasurementSet":
        """One orthonormal basis per setting, given as a sequence of kets."""
        v = np.asarray(bases, dtype=complex)
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise ScenarioError("each basis must list d kets of length d")
        gram = np.einsum("soi,spi->sop", v.conj(), v)
        if np.max(np.abs(gram - np.eye(v.shape[1]))) > POVM_TOL:
            raise ScenarioError("basis vectors are not orthonormal")
        effects = np.einsum("soi,soj->soij", v, v.conj())
        return cls(effects, v)

    @property
    def dim(self) -> int:
        return self.effects.shape[2]

    @property
    def settings(self) -> int:
        return self.effects.shape[0]

    @property
    def outcomes(self) -> int:
        return self.effects.shape[1]

    @property
    def is_projective(self) -> bool:
        return self.vectors is not None


def computational(d: int) -> MeasurementSet:
    return MeasurementSet.projective([np.eye(d)])


_S = 1 / np.sqrt(2)
PAULI_X_BASIS = np.array([[_S, _S], [_S, -_S]], dtype=complex)
PAULI_Y_BASIS = np.array([[_S, 1j * _S], [_S, -1j * _S]], dtype=complex)
PAULI_Z_BASIS = np.eye(2, dtype=complex)


def pauli_xy() -> MeasurementSet:
    """Setting 0 is Pauli-X, setting 1 is Pauli-Y; outcome 0 is ``|+>`` / ``|+i>``."""
    return MeasurementSet.projective([PAULI_X_BASIS, PAULI_Y_BASIS])


@dataclass(frozen=True, eq=False)
class QuantumScenario:
    state: State
    measurements: tuple[MeasurementSet, ...]

    def __post_init__(self):
        ms = tuple(self.measurements)
        if len(ms) != self.state.parties:
            raise ScenarioError(f"{len(ms)} measurement sets for {self.state.parties} parties")
        for i, (m, d) in enumerate(zip(ms, self.state.dims)):
            if m.dim != d:
                raise ScenarioError(f"party {i}: measurement dimension {m.dim} != local dimension {d}")
        object.__setattr__(self, "measurements", ms)

    @property
    def parties(self) -> int:
        return len(self.measurements)


# -- Born rule ---------------------------------------------------------------


def _trace_tensor(rho: DensityMatrix, measurements: Sequence[MeasurementSet]) -> np.ndarray:
    """``Tr((E_1 ⊗ ... ⊗ E_n) rho)`` for every setting/outcome, axes (s.., o..)."""
    n = rho.parties
    operands: list = [rho.tensor(), list(range(2 * n))]
    for i, m in enumerate(measurements):
        # E[r, c] pairs with rho[c, r]
        operands += [m.effects, [2 * n + i, 3 * n + i, n + i, i]]
    out = list(range(2 * n, 4 * n))
    t = np.einsum(*operands, out, optimize="greedy")
    return t.real


def _amplitude_tensor(psi: PureState, measurements: Sequence[MeasurementSet]) -> np.ndarray:
    n = psi.parties
    operands: list = [psi.amplitudes.reshape(psi.dims), list(range(n))]
    for i, m in enumerate(measurements):
        operands += [m.vectors.conj(), [n + i, 2 * n + i, i]]
    amp = np.einsum(*operands, list(range(n, 3 * n)), optimize="greedy")
    return np.abs(amp) ** 2


def _branch_tensor(rho: DensityMatrix, measurements: Sequence[MeasurementSet]) -> np.ndarray:
    w, v = np.linalg.eigh(rho.matrix)
    total = 0.0
    for weight, vec in zip(w, v.T):
        if weight <= EIG_TOL:
            continue
        psi = PureState.normalized(rho.dims, vec)
        if all(m.is_projective for m in measurements):
            total = total + weight * _amplitude_tensor(psi, measurements)
        else:
            total = total + weight * _trace_tensor(psi.density(), measurements)
    return total


def born_tensor(state: State, measurements: Sequence[MeasurementSet], method: str = "auto") -> np.ndarray:
    """Outcome probabilities with axes (settings of each party, outcomes of each party).

    ``method`` is ``"trace"`` (density-matrix formula), ``"branches"``
    (eigen-decomposition into pure branches) or ``"auto"``.
    """
    if method == "auto":
        if isinstance(state, PureState) and all(m.is_projective for m in measurements):
            return _amplitude_tensor(state, measurements)
        method = "trace"
    if method == "trace":
        return _trace_tensor(state.density(), measurements)
    if method == "branches":
        if isinstance(state, PureState):
            state = state.density()
        return _branch_tensor(state, measurements)
    raise ValueError(f"unknown method {method!r}")


def born_correlation(s: QuantumScenario, method: str = "auto") -> Correlation:
    """Bell correlation ``p(a, b | x, y) = Tr((M ⊗ N ...) rho)`` of a scenario."""
    p = born_tensor(s.state, s.measurements, method)
    p = np.where((p < 0) & (p > -1e-12), 0.0, p)
    return Correlation(
        tuple(m.settings for m in s.measurements), tuple(m.outcomes for m in s.measurements), p
    )


def pd_correlation(states: Sequence[State], measurements: Sequence[MeasurementSet]) -> PDCorrelation:
    """Prepare-and-distribute data for preparations ``states[x]``."""
    if not states:
        raise ScenarioError("need at least one preparation")
    dims = states[0].dims
    for st in states:
        if st.dims != dims:
            raise ScenarioError("all preparations must share local dimensions")
    QuantumScenario(states[0], tuple(measurements))  # dimension check
    rows = [born_tensor(st, measurements) for st in states]
    p = np.stack(rows)
    p = np.where((p < 0) & (p > -1e-12), 0.0, p)
    return PDCorrelation(
        tuple(m.settings for m in measurements), tuple(m.outcomes for m in measurements), p
    )


# -- oracles -----------------------------------------------------------------


def partial_trace(state: State, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (returned in ascending order)."""
    rho = state.density()
    n = rho.parties
    keep = sorted({int(i) for i in keep})
    if not keep:
        raise ValueError("must keep at least one party")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"party index out of range for {n} parties")
    rows = list(range(n))
    cols = [i if i not in keep else n + i for i in range(n)]
    out = keep + [n + i for i in keep]
    t = np.einsum(rho.tensor(), rows + cols, out)
    kd = tuple(rho.dims[i] for i in keep)
    m = t.reshape(_prod(kd), _prod(kd))
    return DensityMatrix(kd, (m + m.conj().T) / 2)


def collapse(s: QuantumScenario, party: int, setting: int, outcome: int):
    """Measure one party and return ``(p(outcome|setting), state of the rest)``.

    The state is ``None`` when the outcome has probability zero.
    """
    n = s.parties
    if not 0 <= party < n:
        raise IndexError(f"party {party} out of range")
    m = s.measurements[party]
    if not (0 <= setting < m.settings and 0 <= outcome < m.outcomes):
        raise IndexError("setting or outcome out of range")
    if n < 2:
        raise ValueError("collapse needs at least two parties")
    rho = s.state.density()
    e = m.effects[setting, outcome]
    rows = list(range(n))
    cols = [n + i for i in range(n)]
    rows[party], cols[party] = 2 * n, 2 * n + 1
    rest = [i for i in range(n) if i != party]
    out = rest + [n + i for i in rest]
    # Tr_party((E ⊗ 1) rho): E[r, c] pairs with rho[c, r] on the measured party
    t = np.einsum(rho.tensor(), rows + cols, e, [2 * n + 1, 2 * n], out)
    dims = tuple(rho.dims[i] for i in rest)
    mat = t.reshape(_prod(dims), _prod(dims))
    p = float(np.trace(mat).real)
    if p <= 1e-14:
        return 0.0, None
    mat = mat / p
    return p, DensityMatrix(dims, (mat + mat.conj().T) / 2)


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _rank_one_vector(state: State):
    if isinstance(state, PureState):
        return state.amplitudes
    w, v = np.linalg.eigh(state.matrix)
    if w[-1] >= 1.0 - RANK_TOL:
        return v[:, -1]
    return None


def fidelity(s1: State, s2: State) -> float:
    """``|| sqrt(s1) sqrt(s2) ||_1`` (not squared)."""
    if s1.dims != s2.dims:
        raise ScenarioError(f"dimension mismatch {s1.dims} vs {s2.dims}")
    v1, v2 = _rank_one_vector(s1), _rank_one_vector(s2)
    if v1 is not None and v2 is not None:
        return float(min(abs(np.vdot(v1, v2)), 1.0))
    a = _sqrt_psd(s1.density().matrix)
    b = _sqrt_psd(s2.density().matrix)
    f = np.linalg.svd(a @ b, compute_uv=False).sum()
    return float(min(f, 1.0))


def purity(state: State) -> float:
    if isinstance(state, PureState):
        return 1.0
    m = state.matrix
    return float(np.sum(np.abs(m) ** 2))


def classical_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(np.sqrt(p * q)))


# -- sampling and named states ----------------------------------------------


def _fix_sign(vecs: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude component real and positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    lead = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(lead) / lead)


MATRIX_ENTRIES = ("uniform", "normal")


def random_measurement_set(
    d: int, num_settings: int, seed=None, *, entries: str = "uniform", hermitian: bool = False
) -> MeasurementSet:
    """Projective measurements in eigenbases of random symmetric matrices.

    Matrix entries are i.i.d. uniform on ``[0, 1)`` (``entries="uniform"``) or
    standard normal (``entries="normal"``, the GOE), symmetrized as
    ``(A + A^T) / 2``.  Outcomes follow ascending eigenvalue and each
    eigenvector's largest-magnitude component is made positive.  With
    ``hermitian=True`` an independent imaginary part is added and the matrix
    is Hermitian-symmetrized.  ``seed`` is anything
    :func:`numpy.random.default_rng` accepts.
    """
    if d < 2 or num_settings < 1:
        raise ValueError("need d >= 2 and at least one setting")
    if entries not in MATRIX_ENTRIES:
        raise ValueError(f"entries must be one of {MATRIX_ENTRIES}")
    rng = np.random.default_rng(seed)
    draw = rng.random if entries == "uniform" else rng.standard_normal
    bases = []
    for _ in range(num_settings):
        a = draw((d, d))
        if hermitian:
            a = a + 1j * draw((d, d))
            h = (a + a.conj().T) / 2
        else:
            h = (a + a.T) / 2
        _, vecs = np.linalg.eigh(h)
        vecs = _fix_sign(vecs.astype(complex))
        if not hermitian:
            vecs = vecs.real.astype(complex)
        bases.append(vecs.T)
    return MeasurementSet.projective(bases)


def random_pure_state(dims: Sequence[int], seed=None) -> PureState:
    """Haar-random pure state on the given local dimensions."""
    rng = np.random.default_rng(seed)
    n = _prod(dims)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState.normalized(dims, v)


BUILTIN_STATES = ("maxent", "weighted", "classical", "dicke3", "ghz-qubit")


def _diag_ket(d: int, parties: int, weights) -> np.ndarray:
    amps = np.zeros(d**parties, dtype=complex)
    step = sum(d**j for j in range(parties))  # flat index of |i i ... i> is i * step
    amps[np.arange(d) * step] = weights
    return amps


def builtin_state(name: str, d: int = 2, parties: int = 3) -> State:
    """Named states used in the numerical tables.

    ``maxent``: ``sum_i |i..i> / sqrt(d)``; ``weighted``: ``sum_i i |i..i>``
    normalized (i = 1..d); ``classical``: ``(1/d) sum_i |i..i><i..i|``;
    ``dicke3``: uniform superposition of the six permutations of ``|012>``;
    ``ghz-qubit``: ``(|0..0> + |1..1>) / sqrt(2)``.
    """
    if parties < 2:
        raise ValueError("need at least two parties")
    dims = (d,) * parties
    if name == "maxent":
        return PureState.normalized(dims, _diag_ket(d, parties, np.ones(d)))
    if name == "weighted":
        return PureState.normalized(dims, _diag_ket(d, parties, np.arange(1, d + 1)))
    if name == "classical":
        step = sum(d**j for j in range(parties))
        diag = np.zeros(d**parties)
        diag[np.arange(d) * step] = 1.0 / d
        return DensityMatrix(dims, np.diag(diag))
    if name == "dicke3":
        if d != 3 or parties != 3:
            raise ValueError("dicke3 is defined for d=3, parties=3 only")
        amps = np.zeros((3, 3, 3), dtype=complex)
        for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            amps[perm] = 1.0
        return PureState.normalized(dims, amps)
    if name == "ghz-qubit":
        if d != 2:
            raise ValueError("ghz-qubit requires d=2")
        return PureState.normalized(dims, _diag_ket(2, parties, np.ones(2)))
    raise ValueError(f"unknown state {name!r}; choose from {', '.join(BUILTIN_STATES)}")


# -- scenario documents --------------------------------------------------------


def _complex_array(node) -> np.ndarray:
    if isinstance(node, dict):
        re = np.asarray(node["real"], dtype=float)
        im = np.asarray(node.get("imag", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    return np.asarray(node, dtype=complex)


_NAMED_SETTINGS = {
    "pauli-x": PAULI_X_BASIS,
    "pauli-y": PAULI_Y_BASIS,
    "pauli-z": PAULI_Z_BASIS,
}


def _parse_setting(node, d: int):
    if isinstance(node, str):
        if node == "computational":
            return "basis", np.eye(d, dtype=complex)
        if node in _NAMED_SETTINGS:
            if d != 2:
                raise ScenarioError(f"{node} needs a qubit, party has d={d}")
            return "basis", _NAMED_SETTINGS[node]
        raise ScenarioError(f"unknown named setting {node!r}")
    if "basis" in node:
        return "basis", _complex_array(node["basis"])
    if "effects" in node:
        return "effects", _complex_array(node["effects"])
    raise ScenarioError("setting needs 'basis' or 'effects'")


def _parse_party(settings, d: int) -> MeasurementSet:
    parsed = [_parse_setting(node, d) for node in settings]
    if all(kind == "basis" for kind, _ in parsed):
        return MeasurementSet.projective([arr for _, arr in parsed])
    effects = []
    for kind, arr in parsed:
        if kind == "basis":
            arr = np.einsum("oi,oj->oij", arr, arr.conj())
        effects.append(arr)
    return MeasurementSet(np.stack(effects))


def scenario_from_document(doc: dict) -> QuantumScenario:
    """Build a scenario from a parsed scenario document.

    Layout::

        {"dims": [2, 2, 2],
         "state": {"builtin": "ghz-qubit"}                 # or "maxent", ... with optional "d"
                | {"amplitudes": {"real": [...], "imag": [...]}}
                | {"matrix": {"real": [[...]], "imag": [[...]]}},
         "measurements": [[setting, ...], ...]}            # one list per party

    A setting is ``"computational"``, ``"pauli-x"``, ``"pauli-y"``,
    ``"pauli-z"``, ``{"basis": kets}`` or ``{"effects": matrices}``.
    """
    try:
        dims = tuple(int(d) for d in doc["dims"])
        st = doc["state"]
        if "builtin" in st:
            d = int(st.get("d", dims[0]))
            state = builtin_state(st["builtin"], d, len(dims))
            if state.dims != dims:
                raise ScenarioError(f"builtin state has dims {state.dims}, scenario declares {dims}")
        elif "amplitudes" in st:
            state = PureState(dims, _complex_array(st["amplitudes"]))
        elif "matrix" in st:
            state = DensityMatrix(dims, _complex_array(st["matrix"]))
        else:
            raise ScenarioError("state needs 'builtin', 'amplitudes' or 'matrix'")
        parties = doc["measurements"]
        if len(parties) != len(dims):
            raise ScenarioError(f"{len(parties)} measurement lists for {len(dims)} parties")
        ms = tuple(_parse_party(settings, d) for settings, d in zip(parties, dims))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc!r}") from exc
    return QuantumScenario(state, ms)


def read_scenario(path: str | Path) -> QuantumScenario:
    return scenario_from_document(json.loads(Path(path).read_text()))
