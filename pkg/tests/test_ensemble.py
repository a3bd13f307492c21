import numpy as np
import pytest

from dimbound.correlation import check_no_signalling
from dimbound.ensemble import (
    ensemble_run,
    render_rows,
    table_rows,
    trial_correlation,
    truncate3,
)


def test_trial_is_reproducible_and_order_free():
    a = trial_correlation("maxent", 3, 3, 7, 4)
    b = trial_correlation("maxent", 3, 3, 7, 4)
    assert a == b
    assert a != trial_correlation("maxent", 3, 3, 7, 5)
    assert check_no_signalling(a, 1e-9).ok


def test_single_trial_deterministic():
    r1 = ensemble_run("maxent", 2, trials=1, seed=3)
    r2 = ensemble_run("maxent", 2, trials=1, seed=3)
    assert r1.trials == r2.trials
    assert r1.mean_exact == r1.trials[0].exact


def test_subset_of_trials_unchanged():
    short = ensemble_run("weighted", 2, trials=3, seed=11)
    long = ensemble_run("weighted", 2, trials=6, seed=11)
    assert long.trials[:3] == short.trials


def test_parallel_matches_serial():
    serial = ensemble_run("maxent", 2, trials=6, seed=5, workers=1)
    parallel = ensemble_run("maxent", 2, trials=6, seed=5, workers=2)
    assert serial.trials == parallel.trials


def test_statistics():
    r = ensemble_run("maxent", 3, trials=10, seed=0)
    exact = np.array([t.exact for t in r.trials])
    grouped = np.array([t.grouped for t in r.trials])
    assert np.all(exact >= grouped - 1e-12)
    assert r.outperform_exact == int(np.sum(exact >= grouped + 0.001))
    assert r.mean_rounded == np.mean(np.ceil(exact - 1e-9))


def test_classical_d2_rounds_to_two():
    r = ensemble_run("classical", 2, trials=100, seed=0)
    assert r.mean_rounded == 2.0


def test_bad_trials():
    with pytest.raises(ValueError):
        ensemble_run("maxent", 2, trials=0)


def test_truncation():
    assert truncate3(1.8769999) == "1.876"
    assert truncate3(1.876) == "1.876"
    assert truncate3(2.0) == "2.000"
    assert truncate3(float("inf")) == "inf"


def test_table_rows_and_rendering():
    rows = table_rows(5, [2], trials=3, seed=1)
    assert set(rows[0]) >= {"mean_exact", "grouped_mean_exact", "outperform_exact", "outperform_rounded"}
    csv_text = render_rows(rows, "csv")
    assert csv_text.splitlines()[0].startswith("table,state,d,trials")
    assert "maxent" in render_rows(rows, "table")
    assert render_rows(rows, "json").lstrip().startswith("[")
    with pytest.raises(ValueError):
        table_rows(6)
    with pytest.raises(ValueError):
        table_rows(4, [2])
