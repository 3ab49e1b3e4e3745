"""Backend-equivalence battery over tiny instances.

Runs every search step (oracle phase + diffusion) of the matching and
comparison algorithms in both backends with shared query patterns and
compares amplitudes after each step: the dense state, with its phase
flag projected out, must equal the expanded structured state to within
1e-9, and the two ledgers must agree exactly.  Binary-search comparator
instances additionally check preparation, element access, and readout
equivalence between the backends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fingerprint import HashParams, universe_size
from .grover import doubling_schedule, optimal_iterations
from .qcompare import access_element, bsearch_readout, build_compare_state
from .qmatch import prepare_match_state
from .resources import ResourceLedger, charge
from .sim import expand_structured, project_flag_minus
from .strings_core import BitString, MatchInstance

TOLERANCE = 1e-9


@dataclass
class InstanceReport:
    name: str
    max_deviation: float
    passed: bool
    detail: str = ""


@dataclass
class CrosscheckReport:
    instances: list[InstanceReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.instances)

    @property
    def max_deviation(self) -> float:
        return max((r.max_deviation for r in self.instances), default=0.0)

    def render(self) -> str:
        lines = []
        for r in self.instances:
            status = "pass" if r.passed else "FAIL"
            line = f"{status}  {r.name}  max_dev={r.max_deviation:.3e}"
            if r.detail:
                line += f"  {r.detail}"
            lines.append(line)
        lines.append(
            f"{'pass' if self.passed else 'FAIL'}  battery of {len(self.instances)} "
            f"instances, overall max_dev={self.max_deviation:.3e}"
        )
        return "\n".join(lines)


def _small_params(num_comparisons: int, max_len: int, p: int) -> HashParams:
    epsilon = 0.5
    r = universe_size(num_comparisons, max_len, epsilon)
    return HashParams(p=p, epsilon=epsilon, delta=num_comparisons, r=r, max_len=max_len)


def _deviation(dense_search, structured) -> tuple[float, int]:
    reduced = project_flag_minus(dense_search.state, "xi")
    expanded = expand_structured(structured)
    diff = np.abs(reduced - expanded.amps)
    worst = int(np.argmax(diff))
    return float(diff[worst]), worst


def _step_battery(
    name: str,
    dense_search,
    structured,
    oracle,
    iterations: int,
    rng: np.random.Generator,
    perturb=None,
) -> InstanceReport:
    """Drive both backends through `iterations` shared search steps."""
    led_dense = ResourceLedger()
    led_struct = ResourceLedger()
    width = structured.layout.width(structured.index_register)
    max_dev, worst_idx = _deviation(dense_search, structured)
    rho = oracle.amplification(iterations)
    for step in range(iterations):
        pattern = oracle.query_pattern(rng, rho)
        dense_search.apply_phase_pattern(pattern)
        structured.apply_phase_pattern(pattern)
        dense_search.diffuse()
        structured.diffuse()
        for led in (led_dense, led_struct):
            charge(led, "oracle_query", 1)
            charge(led, "hash_eval", rho * oracle.evaluation_cost)
            charge(led, "diffusion", width)
        if perturb is not None:
            perturb(name, structured)
        dev, idx = _deviation(dense_search, structured)
        if dev > max_dev:
            max_dev, worst_idx = dev, idx
    if led_dense.counters() != led_struct.counters():
        return InstanceReport(name, max_dev, False, "ledger mismatch between backends")
    if max_dev > TOLERANCE:
        return InstanceReport(
            name, max_dev, False, f"amplitude mismatch at basis index {worst_idx}"
        )
    return InstanceReport(name, max_dev, True)


def _match_instance(name, text, pattern, p, schedule, rng, perturb) -> InstanceReport:
    inst = MatchInstance(BitString.from_text(text), BitString.from_text(pattern))
    params = _small_params(inst.num_windows, inst.m, p)
    spec = prepare_match_state(inst, params)
    oracle = spec.oracle()
    reports = []
    for rep_iters in schedule:
        dense_search = spec.make_copy("dense")
        structured = spec.make_copy("structured")
        reports.append(
            _step_battery(name, dense_search, structured, oracle, rep_iters, rng, perturb)
        )
    max_dev = max(r.max_deviation for r in reports)
    failed = [r for r in reports if not r.passed]
    if failed:
        return InstanceReport(name, max_dev, False, failed[0].detail)
    return InstanceReport(name, max_dev, True)


def _compare_grover_instance(name, u_text, v_text, rng, perturb) -> InstanceReport:
    u = BitString.from_text(u_text)
    v = BitString.from_text(v_text)
    state = build_compare_state(u, v)
    k = state.k
    differs = state.u_bits[: k] != state.v_bits[: k]
    truth = np.zeros(state.padded, dtype=bool)
    truth[:k] = differs
    from .grover import OracleSpec

    oracle = OracleSpec(k, truth, evaluation_cost=1)
    iterations = optimal_iterations(state.padded, max(1, int(truth.sum())))
    dense_search = state.symbol_copy("dense")
    structured = state.symbol_copy("structured")
    return _step_battery(name, dense_search, structured, oracle, iterations, rng, perturb)


def _compare_bsearch_instance(name, u_text, v_text, p, perturb) -> InstanceReport:
    u = BitString.from_text(u_text)
    v = BitString.from_text(v_text)
    k = min(len(u), len(v))
    params = _small_params(k, k, p)
    state = build_compare_state(u, v, params)
    structured = state.symbol_copy("structured")
    if perturb is not None:
        perturb(name, structured)
    dense_search = state.symbol_copy("dense")
    max_dev, worst_idx = _deviation(dense_search, structured)
    if max_dev > TOLERANCE:
        return InstanceReport(
            name, max_dev, False, f"amplitude mismatch at basis index {worst_idx}"
        )
    led_dense = ResourceLedger()
    led_struct = ResourceLedger()
    dense_readout = bsearch_readout(state, "dense")
    struct_readout = bsearch_readout(state, "structured")
    for i in range(k):
        dense_vals = access_element(dense_readout, i, ("u", "v"), led_dense, domain=k)
        struct_vals = access_element(struct_readout, i, ("u", "v"), led_struct, domain=k)
        if dense_vals != struct_vals:
            return InstanceReport(
                name, max_dev, False, f"element access mismatch at index {i}"
            )
    if led_dense.counters() != led_struct.counters():
        return InstanceReport(name, max_dev, False, "ledger mismatch between backends")
    return InstanceReport(name, max_dev, True)


def run_crosscheck(seed: int, max_width: int = 24, perturb=None) -> CrosscheckReport:
    """The default battery: 22 tiny instances across all four algorithms."""
    if max_width > 24:
        raise ValueError("dense cross-checks are capped at 24 qubits")
    rng = np.random.default_rng(seed)
    report = CrosscheckReport()

    unique_cases = [
        ("match_unique n4 m1 p5", "0010", "1", 5),
        ("match_unique n5 m2 p7", "01100", "11", 7),
        ("match_unique n6 m3 p11", "010110", "101", 11),
        ("match_unique n7 m2 p13", "0000100", "10", 13),
        ("match_unique n8 m3 p5", "00101100", "110", 5),
        ("match_unique n6 m2 p13", "011010", "01", 13),
        ("match_unique n8 m2 p7", "10000010", "11", 7),
        ("match_unique n7 m3 p5", "0101000", "010", 5),
        ("match_unique n8 m1 p11", "00010000", "1", 11),
        ("match_unique n5 m1 p3", "00100", "1", 3),
    ]
    for name, text, pattern, p in unique_cases:
        inst = MatchInstance(BitString.from_text(text), BitString.from_text(pattern))
        iters = optimal_iterations(1 << max(1, (inst.num_windows - 1).bit_length()), 1)
        report.instances.append(
            _match_instance(name, text, pattern, p, [iters], rng, perturb)
        )

    search_cases = [
        ("match_search n6 m2 p7", "010101", "01", 7),
        ("match_search n8 m3 p11", "10110110", "011", 11),
        ("match_search n7 m3 p5", "1110111", "111", 5),
        ("match_search n8 m2 p13", "01010101", "10", 13),
    ]
    for name, text, pattern, p in search_cases:
        inst = MatchInstance(BitString.from_text(text), BitString.from_text(pattern))
        schedule = doubling_schedule(inst.num_windows)
        report.instances.append(
            _match_instance(name, text, pattern, p, schedule, rng, perturb)
        )

    grover_cases = [
        ("compare_grover k4", "1011", "1111"),
        ("compare_grover k6", "101100", "101010"),
        ("compare_grover k8", "10110100", "10110101"),
        ("compare_grover k5", "11111", "11011"),
    ]
    for name, u_text, v_text in grover_cases:
        report.instances.append(_compare_grover_instance(name, u_text, v_text, rng, perturb))

    bsearch_cases = [
        ("compare_bsearch k4 p5", "0110", "0100", 5),
        ("compare_bsearch k6 p7", "011010", "011011", 7),
        ("compare_bsearch k8 p13", "01101001", "01101001", 13),
        ("compare_bsearch k5 p11", "10010", "10110", 11),
    ]
    for name, u_text, v_text, p in bsearch_cases:
        report.instances.append(_compare_bsearch_instance(name, u_text, v_text, p, perturb))

    return report
