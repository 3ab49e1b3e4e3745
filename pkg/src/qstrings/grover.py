"""Grover-search primitives over either state backend.

Includes fixed-iteration search, the doubling schedule for unknown
target counts (2^j iterations on repetition j, first verified hit
wins), a bounded-error-oracle wrapper that amplifies each query by
independent re-evaluation, and threshold-descent minimum finding.

Noisy oracles are modeled stochastically: each query samples a fresh
marked-index pattern from the oracle's per-index evaluation error,
post-amplification.  Exact oracles always use their truth pattern, so
their trajectories are fully deterministic given the measurement rng.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .resources import ResourceLedger, charge
from .sim import (
    DenseState,
    StructuredState,
    bind_data,
    diffusion,
    padded_size,
    phase_oracle,
)


class CopiesExhausted(RuntimeError):
    """A state factory ran out of fresh copies before the schedule ended."""


def optimal_iterations(domain: int, targets: int) -> int:
    """floor((pi/4) * sqrt(M/t)), clamped to at least one iteration."""
    if targets == 0:
        raise ValueError("no targets: use the doubling schedule instead")
    if not 1 <= targets <= domain:
        raise ValueError("target count out of range")
    return max(1, math.floor(math.pi / 4 * math.sqrt(domain / targets)))


def success_probability(domain: int, targets: int, iterations: int) -> float:
    """Closed-form sin^2((2j+1) * asin(sqrt(t/M))) for exact oracles."""
    theta = math.asin(math.sqrt(targets / domain))
    return math.sin((2 * iterations + 1) * theta) ** 2


class OracleSpec:
    """A predicate over a search domain with its cost and error model.

    `predicate` is exact ground truth, total on [0, padded) and 0 on
    padding.  `eval_error_probs` gives the per-index probability that a
    single evaluation disagrees with the truth; `one_sided` marks
    witness-verified evaluators whose errors can only report false
    targets, which the amplifier suppresses exponentially.
    """

    def __init__(
        self,
        domain_size: int,
        predicate: Callable[[int], int] | np.ndarray,
        evaluation_cost: int = 1,
        error_prob: float = 0.0,
        eval_error_probs: np.ndarray | None = None,
        one_sided: bool = False,
        inner_iterations_per_eval: int = 0,
    ):
        if not 0 <= error_prob < 0.5:
            raise ValueError("declared error probability must lie in [0, 1/2)")
        self.domain_size = domain_size
        self.padded = padded_size(domain_size)
        if isinstance(predicate, np.ndarray):
            truth = predicate.astype(bool)
            if truth.size != self.padded:
                raise ValueError("truth vector must cover the padded domain")
        else:
            truth = np.fromiter(
                (bool(predicate(a)) for a in range(self.padded)), bool, self.padded
            )
        if truth[domain_size:].any():
            raise ValueError("padding indices must be non-targets")
        self.truth = truth
        self.evaluation_cost = evaluation_cost
        self.error_prob = error_prob
        self.one_sided = one_sided
        self.inner_iterations_per_eval = inner_iterations_per_eval
        if eval_error_probs is not None:
            probs = np.asarray(eval_error_probs, dtype=float)
            if probs.shape != (self.padded,):
                raise ValueError("eval_error_probs must cover the padded domain")
            self.eval_error_probs = probs
        elif error_prob > 0:
            self.eval_error_probs = np.full(self.padded, error_prob)
        else:
            self.eval_error_probs = None

    @property
    def target_count(self) -> int:
        return int(self.truth.sum())

    def amplification(self, iterations: int) -> int:
        """Evaluations per query so the query error is <= 1/(10*iterations)."""
        if self.error_prob <= 0:
            return 1
        rho = math.ceil(math.log(10 * max(1, iterations)) / math.log(1 / self.error_prob))
        rho = max(1, rho)
        if not self.one_sided and rho % 2 == 0:
            rho += 1  # odd majority, no ties
        return rho

    def query_error(self, rho: int) -> np.ndarray | None:
        """Per-index probability the amplified query output is wrong."""
        if self.eval_error_probs is None:
            return None
        e = self.eval_error_probs
        if self.one_sided:
            return np.where(self.truth, 0.0, e**rho)
        wrong = np.zeros_like(e)
        for i in range((rho + 1) // 2, rho + 1):
            wrong += math.comb(rho, i) * e**i * (1 - e) ** (rho - i)
        return wrong

    def query_pattern(self, rng: np.random.Generator, rho: int) -> np.ndarray:
        """Sample the marked-index pattern seen by one query."""
        err = self.query_error(rho)
        if err is None:
            return self.truth
        flips = rng.random(self.padded) < err
        if self.one_sided:
            return self.truth | flips
        return self.truth ^ flips

    def truth_at(self, index: int) -> int:
        return int(self.truth[index])


@dataclass
class GroverOutcome:
    """Result of one search: measured index plus run accounting."""

    found_index: int | None
    predicate_value_at_found: int
    iterations_used: int
    copies_used: int = 1
    ledger_delta: dict[str, int] | None = None

    @property
    def verified(self) -> bool:
        return self.found_index is not None and self.predicate_value_at_found == 1


class DenseSearchState:
    """Adapter presenting a DenseState as a Grover search space.

    The phase oracle kicks back off the |-> flag register; diffusion
    unbinds any data registers, reflects the index register, and rebinds,
    so the index amplitudes evolve exactly as in the structured backend.
    Index measurement samples the index marginal (consuming one draw,
    keeping rng streams aligned across backends) and collapses.
    """

    def __init__(
        self,
        state: DenseState,
        index_register: str = "idx",
        flag_register: str | None = "xi",
        data_tables: dict[str, np.ndarray] | None = None,
    ):
        self.state = state
        self.index_register = index_register
        self.flag_register = flag_register
        self.data_tables = data_tables or {}
        self.size = 1 << state.layout.width(index_register)

    def apply_phase_pattern(self, pattern: np.ndarray) -> None:
        phase_oracle(self.state, pattern, self.index_register, ancilla=self.flag_register)

    def diffuse(self) -> None:
        for name, table in self.data_tables.items():
            bind_data(self.state, name, table)
        diffusion(self.state, self.index_register)
        for name, table in self.data_tables.items():
            bind_data(self.state, name, table)

    def index_probabilities(self) -> np.ndarray:
        probs = np.abs(self.state.amps) ** 2
        values = self.state.register_values(self.index_register)
        return np.bincount(values, weights=probs, minlength=self.size)

    def measure_index(self, rng: np.random.Generator) -> int:
        probs = self.index_probabilities()
        probs /= probs.sum()
        outcome = int(rng.choice(self.size, p=probs))
        keep = self.state.register_values(self.index_register) == outcome
        amps = np.where(keep, self.state.amps, 0.0)
        self.state.amps = amps / math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        return outcome


SearchState = StructuredState | DenseSearchState


def _index_width_of(search: SearchState) -> int:
    if isinstance(search, StructuredState):
        return search.layout.width(search.index_register)
    return search.state.layout.width(search.index_register)


def grover_run(
    search: SearchState,
    oracle: OracleSpec,
    iterations: int,
    rng: np.random.Generator,
    ledger: ResourceLedger | None = None,
    rho: int | None = None,
) -> GroverOutcome:
    """Alternate query and diffusion `iterations` times, then measure.

    The caller supplies a uniform index superposition.  For exact oracles
    on power-of-two domains the pre-measurement success probability is
    exactly sin^2((2*iterations+1) * asin(sqrt(t/M_padded))).
    """
    ledger = ledger if ledger is not None else ResourceLedger()
    before = ledger.snapshot()
    rho = oracle.amplification(iterations) if rho is None else rho
    width = _index_width_of(search)
    for _ in range(iterations):
        pattern = oracle.query_pattern(rng, rho)
        search.apply_phase_pattern(pattern)
        search.diffuse()
        charge(ledger, "oracle_query", 1)
        charge(ledger, "hash_eval", rho * oracle.evaluation_cost)
        charge(ledger, "inner_iterations", rho * oracle.inner_iterations_per_eval)
        charge(ledger, "diffusion", width)
    found = search.measure_index(rng)
    ledger.close_phase(f"grover_run[{iterations}]", before)
    return GroverOutcome(
        found_index=found,
        predicate_value_at_found=oracle.truth_at(found),
        iterations_used=iterations,
        ledger_delta=ledger.phase_breakdown[-1][1],
    )


def doubling_schedule(domain: int, max_repetitions: int | None = None) -> list[int]:
    """Iteration counts 2^j for j = 0 .. ceil(log2 sqrt(M)), optionally capped."""
    reps = math.ceil(math.log2(math.sqrt(padded_size(domain)))) + 1
    if max_repetitions is not None:
        reps = min(reps, max_repetitions)
    return [2**j for j in range(max(1, reps))]


def bbht_search(
    oracle: OracleSpec,
    rng: np.random.Generator,
    state_factory: Callable[[int], SearchState],
    ledger: ResourceLedger | None = None,
    max_repetitions: int | None = None,
) -> GroverOutcome:
    """Doubling-schedule search for an unknown target count.

    Each repetition consumes one fresh state from the factory and its
    measured index is classically checked against the exact predicate;
    the first verified hit is returned.  With at least one target the
    hit probability is at least 1/2.  found_index None means every
    repetition failed verification.
    """
    ledger = ledger if ledger is not None else ResourceLedger()
    total = 0
    schedule = doubling_schedule(oracle.domain_size, max_repetitions)
    for rep, iterations in enumerate(schedule):
        try:
            search = state_factory(rep)
        except CopiesExhausted:
            if rep == 0:
                raise
            break
        outcome = grover_run(search, oracle, iterations, rng, ledger)
        total += iterations
        if outcome.verified:
            return GroverOutcome(
                found_index=outcome.found_index,
                predicate_value_at_found=1,
                iterations_used=total,
                copies_used=rep + 1,
                ledger_delta=ledger.counters(),
            )
    return GroverOutcome(
        found_index=None,
        predicate_value_at_found=0,
        iterations_used=total,
        copies_used=len(schedule),
        ledger_delta=ledger.counters(),
    )


def bounded_error_search(
    oracle: OracleSpec,
    rng: np.random.Generator,
    state_factory: Callable[[int], SearchState],
    iterations: int | None = None,
    rho: int | None = None,
    ledger: ResourceLedger | None = None,
) -> GroverOutcome:
    """Search with a bounded-error oracle via per-query re-evaluation.

    Every query is answered by rho independent evaluations (one-sided
    evaluators keep any verified witness; otherwise majority vote), with
    rho sized so the per-query error is at most 1/(10 * iterations).
    With `iterations` given, runs a single fixed-length pass and
    classically verifies the outcome; otherwise runs the doubling
    schedule.  Exact oracles reduce to the unwrapped search (rho = 1).
    """
    if oracle.error_prob >= 0.5:
        raise ValueError("oracle error probability must be below 1/2")
    ledger = ledger if ledger is not None else ResourceLedger()
    if iterations is None:
        return bbht_search(oracle, rng, state_factory, ledger)
    search = state_factory(0)
    outcome = grover_run(search, oracle, iterations, rng, ledger, rho=rho)
    return GroverOutcome(
        found_index=outcome.found_index,
        predicate_value_at_found=outcome.predicate_value_at_found,
        iterations_used=outcome.iterations_used,
        copies_used=1,
        ledger_delta=outcome.ledger_delta,
    )


def durr_hoyer_min(
    keys: Callable[[int], object] | Sequence,
    domain: int,
    rng: np.random.Generator,
    state_factory: Callable[[int, int], SearchState],
    ledger: ResourceLedger | None = None,
    initial_key: object | None = None,
    on_phase: Callable[[int, int | None, object], None] | None = None,
) -> tuple[int | None, int, int]:
    """Threshold-descent minimum finding.

    Each phase searches for an index with key strictly below the current
    threshold (ties never improve) and adopts any verified hit; the run
    stops after 3 * ceil(log2 M) phases or when a phase finds nothing.
    Returns (argmin_estimate, phases_used, total_grover_iterations); the
    estimate is correct with probability at least 1/2.  With
    `initial_key` given, the threshold starts above every real key and
    the estimate is None if no phase ever improved on it.
    """
    key_of = keys if callable(keys) else (lambda a, _seq=tuple(keys): _seq[a])
    ledger = ledger if ledger is not None else ResourceLedger()
    if initial_key is None:
        best_index: int | None = int(rng.integers(0, domain))
        best_key = key_of(best_index)
    else:
        best_index = None
        best_key = initial_key
    log_m = max(1, math.ceil(math.log2(max(2, domain))))
    phase_cap = 3 * log_m
    total_iterations = 0
    phases = 0
    for phase in range(phase_cap):
        threshold = best_key
        truth = np.zeros(padded_size(domain), dtype=bool)
        for a in range(domain):
            truth[a] = key_of(a) < threshold
        oracle = OracleSpec(domain, truth, evaluation_cost=1)
        phases += 1
        outcome = bbht_search(
            oracle,
            rng,
            lambda rep, _phase=phase: state_factory(_phase, rep),
            ledger,
            max_repetitions=log_m,
        )
        total_iterations += outcome.iterations_used
        if outcome.found_index is None:
            if on_phase is not None:
                on_phase(phase, None, best_key)
            break
        best_index = outcome.found_index
        best_key = key_of(best_index)
        if on_phase is not None:
            on_phase(phase, best_index, best_key)
    return best_index, phases, total_iterations
