import math

import numpy as np
import pytest

from qstrings.grover import (
    CopiesExhausted,
    DenseSearchState,
    GroverOutcome,
    OracleSpec,
    bbht_search,
    bounded_error_search,
    doubling_schedule,
    durr_hoyer_min,
    grover_run,
    optimal_iterations,
    success_probability,
)
from qstrings.resources import ResourceLedger
from qstrings.sim import (
    DenseState,
    Register,
    RegisterLayout,
    StructuredState,
    prepare_minus,
    prepare_uniform,
)


def _structured(domain):
    width = max(1, (domain - 1).bit_length())
    layout = RegisterLayout([Register("idx", width, "index")])
    return StructuredState(layout, domain)


def _dense(domain):
    width = max(1, (domain - 1).bit_length())
    layout = RegisterLayout([Register("idx", width, "index"), Register("xi", 1, "flag")])
    state = DenseState(layout)
    prepare_uniform(state, "idx")
    prepare_minus(state, "xi")
    return DenseSearchState(state, "idx", "xi")


def test_optimal_iterations_examples():
    assert optimal_iterations(4, 1) == 1
    assert optimal_iterations(1, 1) == 1
    assert optimal_iterations(1024, 1) == 25
    with pytest.raises(ValueError):
        optimal_iterations(4, 0)
    with pytest.raises(ValueError):
        optimal_iterations(4, 5)


def test_success_probability_known_values():
    assert abs(success_probability(4, 1, 1) - 1.0) < 1e-12
    # sin^2(7 asin(1/4)) = (251/256)^2 = 63001/65536
    assert abs(success_probability(16, 1, 3) - 63001 / 65536) < 1e-12


@pytest.mark.parametrize("backend", ["structured", "dense"])
@pytest.mark.parametrize("domain,targets,iterations", [(4, (2,), 1), (8, (5,), 2), (16, (1, 9), 3)])
def test_amplitude_success_matches_closed_form(backend, domain, targets, iterations):
    search = _structured(domain) if backend == "structured" else _dense(domain)
    truth = np.zeros(domain, dtype=bool)
    truth[list(targets)] = True
    oracle = OracleSpec(domain, truth)
    for _ in range(iterations):
        search.apply_phase_pattern(oracle.query_pattern(np.random.default_rng(0), 1))
        search.diffuse()
    probs = search.index_probabilities()
    got = float(probs[list(targets)].sum())
    assert abs(got - success_probability(domain, len(targets), iterations)) < 1e-9


def test_grover_run_exact_case():
    # one target among four, one iteration: certain success
    for seed in range(10):
        search = _structured(4)
        oracle = OracleSpec(4, np.array([0, 0, 1, 0], dtype=bool))
        outcome = grover_run(search, oracle, 1, np.random.default_rng(seed))
        assert outcome.found_index == 2 and outcome.verified


def test_grover_run_zero_iterations_uniform():
    oracle = OracleSpec(8, np.array([0] * 8, dtype=bool))
    rng = np.random.default_rng(0)
    counts = np.zeros(8)
    for _ in range(4000):
        outcome = grover_run(_structured(8), oracle, 0, rng)
        counts[outcome.found_index] += 1
    assert np.all(np.abs(counts / 4000 - 0.125) < 0.03)


def test_grover_run_charges_ledger():
    ledger = ResourceLedger()
    oracle = OracleSpec(8, np.array([0, 1] + [0] * 6, dtype=bool), evaluation_cost=7)
    grover_run(_structured(8), oracle, 3, np.random.default_rng(1), ledger)
    assert ledger.oracle_queries == 3
    assert ledger.diffusion_units == 3 * 3  # width-3 index register
    assert ledger.hash_eval_units == 3 * 7
    assert ledger.phase_breakdown[-1][0] == "grover_run[3]"


def test_doubling_schedule():
    assert doubling_schedule(8) == [1, 2, 4]
    assert doubling_schedule(64) == [1, 2, 4, 8]
    assert doubling_schedule(64, max_repetitions=2) == [1, 2]
    assert doubling_schedule(1) == [1, 2]  # single-element domains pad to one qubit


def test_bbht_verified_hit_rate():
    truth = np.zeros(8, dtype=bool)
    truth[5] = True
    oracle = OracleSpec(8, truth)
    rng = np.random.default_rng(77)
    hits = 0
    for _ in range(2000):
        outcome = bbht_search(oracle, rng, lambda rep: _structured(8))
        if outcome.verified:
            assert outcome.found_index == 5
            hits += 1
    assert hits / 2000 >= 0.5


def test_bbht_no_targets_never_returns():
    oracle = OracleSpec(8, np.zeros(8, dtype=bool))
    rng = np.random.default_rng(3)
    for _ in range(50):
        outcome = bbht_search(oracle, rng, lambda rep: _structured(8))
        assert outcome.found_index is None
        assert outcome.predicate_value_at_found == 0


def test_bbht_returns_only_targets():
    truth = np.zeros(8, dtype=bool)
    truth[[1, 4, 6]] = True
    oracle = OracleSpec(8, truth)
    rng = np.random.default_rng(4)
    for _ in range(200):
        outcome = bbht_search(oracle, rng, lambda rep: _structured(8))
        if outcome.found_index is not None:
            assert outcome.found_index in (1, 4, 6)


def test_bbht_factory_exhaustion():
    oracle = OracleSpec(8, np.zeros(8, dtype=bool))

    def factory(rep):
        raise CopiesExhausted("none")

    with pytest.raises(CopiesExhausted):
        bbht_search(oracle, np.random.default_rng(0), factory)


def test_padding_never_verified():
    truth = np.zeros(8, dtype=bool)
    truth[4] = True
    oracle = OracleSpec(5, truth)  # domain 5 padded to 8
    rng = np.random.default_rng(9)
    for _ in range(100):
        outcome = bbht_search(oracle, rng, lambda rep: _structured(5))
        if outcome.found_index is not None:
            assert outcome.found_index < 5


def test_padding_targets_rejected():
    truth = np.zeros(8, dtype=bool)
    truth[6] = True
    with pytest.raises(ValueError):
        OracleSpec(5, truth)


def test_amplification_policy():
    exact = OracleSpec(8, np.zeros(8, dtype=bool))
    assert exact.amplification(64) == 1
    noisy = OracleSpec(8, np.zeros(8, dtype=bool), error_prob=0.25, one_sided=True)
    # miss^rho <= 1/(10*j)
    for j in (1, 4, 64):
        rho = noisy.amplification(j)
        assert 0.25**rho <= 1 / (10 * j)
    two_sided = OracleSpec(8, np.zeros(8, dtype=bool), error_prob=0.2)
    assert two_sided.amplification(8) % 2 == 1


def test_bounded_error_exact_oracle_identical_trajectory():
    truth = np.zeros(8, dtype=bool)
    truth[3] = True
    oracle = OracleSpec(8, truth)
    a = bounded_error_search(oracle, np.random.default_rng(5), lambda rep: _structured(8), iterations=2)
    b = grover_run(_structured(8), oracle, 2, np.random.default_rng(5))
    assert a.found_index == b.found_index
    assert a.iterations_used == b.iterations_used == 2


def test_bounded_error_success_close_to_exact():
    truth = np.zeros(8, dtype=bool)
    truth[2] = True
    exact = OracleSpec(8, truth)
    noisy = OracleSpec(8, truth, error_prob=0.1)
    iterations = optimal_iterations(8, 1)
    rng = np.random.default_rng(21)
    exact_hits = noisy_hits = 0
    for _ in range(2000):
        a = bounded_error_search(exact, rng, lambda rep: _structured(8), iterations=iterations)
        b = bounded_error_search(
            noisy, rng, lambda rep: _structured(8), iterations=iterations, rho=5
        )
        exact_hits += int(a.verified)
        noisy_hits += int(b.verified)
    assert abs(noisy_hits - exact_hits) / 2000 <= 0.1


def test_bounded_error_ledger_records_rho_times_cost():
    truth = np.zeros(8, dtype=bool)
    truth[2] = True
    oracle = OracleSpec(8, truth, evaluation_cost=7, error_prob=0.2)
    ledger = ResourceLedger()
    bounded_error_search(
        oracle,
        np.random.default_rng(0),
        lambda rep: _structured(8),
        iterations=2,
        rho=3,
        ledger=ledger,
    )
    assert ledger.hash_eval_units == 2 * 3 * 7


def _dh_factory(domain):
    def factory(phase, rep):
        return _structured(domain)

    return factory


def test_durr_hoyer_small_list():
    values = [3, 1, 2]
    rng = np.random.default_rng(31)
    hits = sum(
        durr_hoyer_min(values, 3, rng, _dh_factory(3))[0] == 1 for _ in range(1000)
    )
    assert hits / 1000 >= 0.5


def test_durr_hoyer_all_equal():
    values = [5, 5, 5, 5]
    rng = np.random.default_rng(8)
    for _ in range(50):
        found, phases, _ = durr_hoyer_min(values, 4, rng, _dh_factory(4))
        assert found in range(4)
        assert phases == 1  # the first phase already finds nothing smaller


def test_durr_hoyer_identity_permutation():
    values = list(range(8))
    rng = np.random.default_rng(13)
    hits = sum(
        durr_hoyer_min(values, 8, rng, _dh_factory(8))[0] == 0 for _ in range(1000)
    )
    assert hits / 1000 >= 0.5


def test_durr_hoyer_phase_cap():
    values = list(range(16))
    rng = np.random.default_rng(2)
    for _ in range(50):
        _, phases, _ = durr_hoyer_min(values, 16, rng, _dh_factory(16))
        assert phases <= 3 * math.ceil(math.log2(16))


def test_durr_hoyer_sentinel_start():
    # pair keys with a sentinel threshold no real key can beat
    keys = [(1, 0), (1, 1), (1, 2)]
    rng = np.random.default_rng(1)
    found, _, _ = durr_hoyer_min(keys, 3, rng, _dh_factory(3), initial_key=(1, 0))
    assert found is None


def test_oracle_error_bound_enforced():
    with pytest.raises(ValueError):
        OracleSpec(8, np.zeros(8, dtype=bool), error_prob=0.6)


def test_grover_outcome_verified_property():
    assert GroverOutcome(3, 1, 2).verified
    assert not GroverOutcome(None, 0, 2).verified
    assert not GroverOutcome(3, 0, 2).verified
