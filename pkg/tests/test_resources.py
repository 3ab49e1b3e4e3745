import numpy as np
import pytest

from qstrings.fingerprint import hash_width, nth_prime, universe_size
from qstrings.resources import (
    ANCILLA_COMPARE_BSEARCH,
    ANCILLA_MATCH,
    CSV_HEADER,
    ResourceLedger,
    SweepConfig,
    charge,
    fit_loglog_slope,
    index_width,
    nominal_hash_width,
    qubit_count_compare_bsearch,
    qubit_count_compare_grover,
    qubit_count_match,
    run_sweep,
    sweep_csv,
)


def test_charge_examples():
    ledger = ResourceLedger()
    assert ledger.counters() == {k: 0 for k in ledger.counters()}  # fresh all-zero
    charge(ledger, "diffusion", 5)
    assert ledger.diffusion_units == 5
    charge(ledger, "diffusion", 3)
    charge(ledger, "diffusion", 4)
    other = ResourceLedger()
    charge(other, "diffusion", 12)
    assert ledger.diffusion_units == other.diffusion_units  # additivity
    with pytest.raises(ValueError):
        charge(ledger, "diffusion", -1)
    with pytest.raises(ValueError):
        charge(ledger, "teleportation", 1)


def test_gate_units_total_composition():
    ledger = ResourceLedger()
    charge(ledger, "diffusion", 10)
    charge(ledger, "oracle_query", 4)
    charge(ledger, "access", 6)
    charge(ledger, "hash_eval", 30)
    charge(ledger, "inner_iterations", 99)  # diagnostic count, priced via hash_eval
    assert ledger.gate_units_total == 10 + 4 + 6 + 30


def test_phase_breakdown():
    ledger = ResourceLedger()
    before = ledger.snapshot()
    charge(ledger, "access", 3)
    ledger.close_phase("readout", before)
    label, delta = ledger.phase_breakdown[0]
    assert label == "readout" and delta["access_units"] == 3


def test_index_width():
    assert index_width(1) == 0
    assert index_width(2) == 1
    assert index_width(57) == 6
    assert index_width(64) == 6


def test_nominal_hash_width_matches_universe_max():
    r = universe_size(29, 4, 0.1)
    assert nominal_hash_width(29, 4, 0.1) == hash_width(nth_prime(r))


def test_qubit_count_match_formula():
    # n=8, m=3, p=13: width 4, N=6 -> index width 3, 3 copies
    assert qubit_count_match(8, 3, 0.5, p=13) == 4 + 3 * (3 + 4) + ANCILLA_MATCH


def test_qubit_count_match_single_window():
    # N=1: one copy of a width-0 index register, two hash registers total
    assert qubit_count_match(4, 4, 0.5, p=13) == 2 * 4 + ANCILLA_MATCH


def test_qubit_count_match_growth():
    counts = [qubit_count_match(n, 8, 0.1) for n in (64, 128, 256, 512)]
    deltas = np.diff(counts)
    assert (deltas > 0).all()
    # doubling n grows the count by Theta(log n) additively
    assert max(deltas) <= 4 * index_width(512) + index_width(512) ** 2


def test_qubit_count_compare_bsearch_formula():
    lk = 4
    lp = hash_width(251)
    expected = lk * (lk + 2 * lp) + lk + 1 + ANCILLA_COMPARE_BSEARCH
    assert qubit_count_compare_bsearch(16, 0.5, p=251) == expected


def test_qubit_count_compare_grover_cubic_growth():
    small = qubit_count_compare_grover(16)
    big = qubit_count_compare_grover(256)
    # (log k)^3 leading term: doubling log k multiplies copies by ~8
    assert 4 < big / small < 12


def test_fit_loglog_slope():
    xs = [64, 128, 256, 512]
    assert abs(fit_loglog_slope(xs, [x**0.5 for x in xs]) - 0.5) < 1e-9
    assert abs(fit_loglog_slope(xs, [7.0] * 4)) < 1e-9
    with pytest.raises(ValueError):
        fit_loglog_slope([1], [1])


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(algo="teleport", grid=(8,))
    with pytest.raises(ValueError):
        SweepConfig(algo="match", grid=())
    with pytest.raises(ValueError):
        SweepConfig(algo="match", grid=(8,), trials=0)


def test_run_sweep_match_rows(tmp_path):
    out = tmp_path / "sweep.csv"
    config = SweepConfig(
        algo="match", grid=(16, 32), m=4, epsilon=0.1, trials=3, seed=5,
        output_path=str(out),
    )
    rows = run_sweep(config)
    assert len(rows) == 2
    for row, n in zip(rows, (16, 32)):
        assert row["qubits"] == qubit_count_match(n, 4, 0.1)
        assert row["oracle_queries"] > 0
        assert 0 <= row["success_rate"] <= 1
    text = out.read_text()
    assert text.splitlines()[0] == CSV_HEADER


def test_run_sweep_compare_rows():
    rows = run_sweep(SweepConfig(algo="compare_bsearch", grid=(8,), trials=2, seed=1))
    assert rows[0]["qubits"] == qubit_count_compare_bsearch(8, 0.1)
    rows = run_sweep(SweepConfig(algo="compare_grover", grid=(8,), trials=2, seed=1))
    assert rows[0]["qubits"] == qubit_count_compare_grover(8)


def test_sweep_deterministic():
    config = SweepConfig(algo="match", grid=(16,), m=4, trials=3, seed=9)
    a = run_sweep(config)
    b = run_sweep(config)
    assert sweep_csv(a) == sweep_csv(b)


def test_sweep_parallel_matches_serial():
    serial = run_sweep(SweepConfig(algo="match", grid=(16, 32), m=4, trials=2, seed=3))
    parallel = run_sweep(
        SweepConfig(algo="match", grid=(16, 32), m=4, trials=2, seed=3, jobs=2)
    )
    assert sweep_csv(serial) == sweep_csv(parallel)


def test_backend_ledgers_identical_in_sweep():
    s = run_sweep(SweepConfig(algo="match", grid=(16,), m=3, trials=2, seed=7,
                              backend="structured"))
    d = run_sweep(SweepConfig(algo="match", grid=(16,), m=3, trials=2, seed=7,
                              backend="dense"))
    for key in ("diffusion_units", "oracle_queries", "hash_eval_units", "gate_units_total"):
        assert s[0][key] == d[0][key]
