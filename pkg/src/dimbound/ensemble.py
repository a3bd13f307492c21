"""Random tripartite ensembles and the averaged bound tables.

Each trial draws ``d`` random real projective measurements per party and
simulates a fixed named state.  Trial ``t`` of a run seeded with ``seed``
draws from ``SeedSequence(seed, spawn_key=(t,))``, so a trial's correlation
does not depend on which other trials run or in what order.  Set
``DIMBOUND_WORKERS`` to spread trials over processes.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

import numpy as np

from .bounds import AmsOptions, dimension_bound, dimension_bound_grouped, round_bound
from .correlation import Correlation
from .quantum import QuantumScenario, born_correlation, builtin_state, random_measurement_set

OUTPERFORM_MARGIN = 0.001
WORKERS_ENV = "DIMBOUND_WORKERS"

TABLE_STATES = {1: "maxent", 2: "weighted", 3: "classical", 4: "dicke3", 5: "maxent"}
TABLE_DIMS = {1: (2, 3, 4), 2: (2, 3, 4), 3: (2, 3, 4), 4: (3,), 5: (2, 3, 4)}


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(trial,))


def trial_scenario(
    state: str, d: int, parties: int, seed: int, trial: int, entries: str = "uniform"
) -> QuantumScenario:
    party_seeds = trial_seed(seed, trial).spawn(parties)
    ms = tuple(random_measurement_set(d, d, s, entries=entries) for s in party_seeds)
    return QuantumScenario(builtin_state(state, d, parties), ms)


def trial_correlation(
    state: str, d: int, parties: int, seed: int, trial: int, entries: str = "uniform"
) -> Correlation:
    return born_correlation(trial_scenario(state, d, parties, seed, trial, entries))


@dataclass(frozen=True)
class TrialResult:
    trial: int
    exact: float
    grouped: float

    @property
    def rounded(self) -> float:
        return round_bound(self.exact)

    @property
    def grouped_rounded(self) -> float:
        return round_bound(self.grouped)


def _run_trial(args) -> TrialResult:
    state, d, parties, seed, trial, opts, entries = args
    c = trial_correlation(state, d, parties, seed, trial, entries)
    exact = dimension_bound(c, 0, opts).bound
    grouped = dimension_bound_grouped(c, 0).bound
    return TrialResult(trial, exact, grouped)


@dataclass(frozen=True)
class EnsembleResult:
    state: str
    d: int
    parties: int
    seed: int
    trials: tuple[TrialResult, ...]

    def _mean(self, values) -> float:
        # fixed trial order keeps the sum reproducible
        total = 0.0
        for v in values:
            total += v
        return total / len(self.trials)

    @property
    def mean_exact(self) -> float:
        return self._mean(t.exact for t in self.trials)

    @property
    def mean_rounded(self) -> float:
        return self._mean(t.rounded for t in self.trials)

    @property
    def mean_grouped(self) -> float:
        return self._mean(t.grouped for t in self.trials)

    @property
    def mean_grouped_rounded(self) -> float:
        return self._mean(t.grouped_rounded for t in self.trials)

    @property
    def outperform_exact(self) -> int:
        """Trials where the multiparty bound beats the grouped one by at least the margin."""
        return sum(t.exact >= t.grouped + OUTPERFORM_MARGIN for t in self.trials)

    @property
    def outperform_rounded(self) -> int:
        return sum(t.rounded > t.grouped_rounded for t in self.trials)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def ensemble_run(
    state: str,
    d: int,
    parties: int = 3,
    trials: int = 100,
    seed: int = 0,
    opts: AmsOptions | None = None,
    workers: int | None = None,
    entries: str = "uniform",
) -> EnsembleResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    opts = opts or AmsOptions()
    jobs = [(state, d, parties, seed, t, opts, entries) for t in range(trials)]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_run_trial(j) for j in jobs]
    return EnsembleResult(state, d, parties, seed, tuple(results))


def truncate3(value: float) -> str:
    if np.isinf(value):
        return "inf"
    return str(Decimal(repr(float(value))).quantize(Decimal("0.001"), rounding=ROUND_DOWN))


def _fmt2(value: float) -> str:
    return "inf" if np.isinf(value) else f"{value:.2f}"


def table_rows(
    table_id: int, dims=None, trials: int = 100, seed: int = 0, opts=None, entries: str = "uniform"
) -> list[dict]:
    """One row per dimension with the averaged bounds, formatted as strings."""
    if table_id not in TABLE_STATES:
        raise ValueError(f"unsupported table {table_id}; choose 1-5")
    state = TABLE_STATES[table_id]
    dims = tuple(dims) if dims else TABLE_DIMS[table_id]
    if table_id == 4 and dims != (3,):
        raise ValueError("table 4 uses the d=3 Dicke state only")
    rows = []
    for d in dims:
        r = ensemble_run(state, d, 3, trials, seed, opts, entries=entries)
        row = {
            "table": table_id,
            "state": state,
            "d": d,
            "trials": trials,
            "mean_rounded": _fmt2(r.mean_rounded),
            "mean_exact": truncate3(r.mean_exact),
        }
        if table_id == 5:
            row.update(
                grouped_mean_rounded=_fmt2(r.mean_grouped_rounded),
                outperform_rounded=r.outperform_rounded,
                grouped_mean_exact=truncate3(r.mean_grouped),
                outperform_exact=r.outperform_exact,
            )
        rows.append(row)
    return rows


def render_rows(rows: list[dict], fmt: str = "csv") -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in keys}
    lines = ["  ".join(k.ljust(widths[k]) for k in keys)]
    lines.append("  ".join("-" * widths[k] for k in keys))
    for r in rows:
        lines.append("  ".join(str(r[k]).ljust(widths[k]) for k in keys))
    return "\n".join(lines) + "\n"
