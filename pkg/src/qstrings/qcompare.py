"""Two lexicographic string comparators over the first k = min(|u|, |v|) symbols.

The search comparator runs threshold-descent minimum finding over the
pairs (1 - [u_a != v_a], a), so the minimum key names the first
differing position; a sentinel threshold above every real key encodes
"no differing position found yet".  The binary-search comparator keeps
prefix hashes of both strings bound to a position register and locates
the first hash-unequal prefix with exactly ceil(log2 k) quantum
equality tests, then reads the symbol pair at the candidate position to
settle the verdict.  Length cases are decided classically in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fingerprint
from .fingerprint import HashParams, HashValue
from .grover import CopiesExhausted, DenseSearchState, durr_hoyer_min
from .qmatch import (
    hash_equality_eval,
    inner_eval_gate_cost,
    inner_schedule,
    miss_probability_table,
    worst_eval_miss,
)
from .resources import (
    ResourceLedger,
    charge,
    index_width,
    qubit_count_compare_bsearch,
    qubit_count_compare_grover,
)
from .sim import (
    DenseState,
    Register,
    RegisterLayout,
    StructuredState,
    bind_data,
    padded_size,
    prepare_minus,
    prepare_uniform,
)
from .strings_core import BitString


def comp_pairs(q: int, i: int, q2: int, i2: int) -> int:
    """1 iff (q, i) precedes (q2, i2) lexicographically."""
    return int(q < q2 or (q == q2 and i < i2))


@dataclass(frozen=True)
class PhaseRecord:
    """Running-best snapshot after one minimum-finding phase."""

    phi: int  # 1 - [symbols differ] at the current best index
    psi: int  # current best index
    phase: int


@dataclass(frozen=True)
class CompareResult:
    """Verdict plus per-run diagnostics and accounting."""

    verdict: int
    first_difference: int | None  # 1-indexed position within the compared prefix
    phases: int
    hash_comparisons: int
    copies_used: int
    records: tuple[PhaseRecord, ...]
    ledger: ResourceLedger


def compare_params(
    u: BitString, v: BitString, epsilon: float, rng: np.random.Generator
) -> HashParams:
    """Hash parameters sized for one comparison per prefix position."""
    k = min(len(u), len(v))
    if k < 1:
        raise ValueError("both strings must be non-empty to size hash parameters")
    return fingerprint.choose_prime(rng, delta=k, max_len=k, epsilon=epsilon)


def _length_verdict(u: BitString, v: BitString) -> int:
    if len(u) == len(v):
        return 0
    return -1 if len(u) < len(v) else 1


@dataclass(frozen=True)
class CompareInstanceState:
    """Bindings and copy budget for one comparator run.

    For the search comparator the data registers hold the symbol pair
    (u_a, v_a); for the binary-search comparator they hold the prefix
    hash pair of length a+1.  Padding entries bind equal sentinels so a
    padded index can never look like a differing position.
    """

    k: int
    u_bits: np.ndarray
    v_bits: np.ndarray
    prefix_u: np.ndarray | None = None
    prefix_v: np.ndarray | None = None
    hash_width: int | None = None

    @property
    def padded(self) -> int:
        return padded_size(self.k)

    @property
    def index_register_width(self) -> int:
        return max(1, index_width(self.k))

    def symbol_layout(self) -> RegisterLayout:
        return RegisterLayout(
            [
                Register("idx", self.index_register_width, "index"),
                Register("u", 1, "data", depends_on="idx"),
                Register("v", 1, "data", depends_on="idx"),
            ]
        )

    def symbol_copy(self, mode: str) -> StructuredState | DenseSearchState:
        tables = {"u": self.u_bits, "v": self.v_bits}
        if mode == "structured":
            return StructuredState(self.symbol_layout(), self.k, bindings=tables)
        if mode != "dense":
            raise ValueError(f"unknown mode {mode!r}")
        layout = RegisterLayout(
            [
                Register("idx", self.index_register_width, "index"),
                Register("u", 1, "data", depends_on="idx"),
                Register("v", 1, "data", depends_on="idx"),
                Register("xi", 1, "flag"),
            ]
        )
        state = DenseState(layout)
        prepare_uniform(state, "idx")
        bind_data(state, "u", self.u_bits)
        bind_data(state, "v", self.v_bits)
        prepare_minus(state, "xi")
        return DenseSearchState(state, "idx", "xi", data_tables=tables)

    def hash_pair(self, prefix_len: int) -> tuple[HashValue, HashValue]:
        return (
            HashValue(int(self.prefix_u[prefix_len]), self.hash_width),
            HashValue(int(self.prefix_v[prefix_len]), self.hash_width),
        )


def build_compare_state(
    u: BitString, v: BitString, params: HashParams | None = None
) -> CompareInstanceState:
    """Bind symbols (and with params, prefix-hash pairs) over the padded domain."""
    k = min(len(u), len(v))
    padded = padded_size(k)
    u_bits = np.zeros(padded, dtype=np.int64)
    v_bits = np.zeros(padded, dtype=np.int64)
    u_bits[:k] = u.bits[:k]
    v_bits[:k] = v.bits[:k]
    prefix_u = prefix_v = None
    width = None
    if params is not None:
        width = params.width
        prefix_u = np.array(
            [h.residue for h in fingerprint.prefix_hashes(u, params.p)], dtype=np.int64
        )
        prefix_v = np.array(
            [h.residue for h in fingerprint.prefix_hashes(v, params.p)], dtype=np.int64
        )
    return CompareInstanceState(
        k=k,
        u_bits=u_bits,
        v_bits=v_bits,
        prefix_u=prefix_u,
        prefix_v=prefix_v,
        hash_width=width,
    )


def access_element(
    state: StructuredState | DenseState,
    i: int,
    registers: tuple[str, ...],
    ledger: ResourceLedger | None = None,
    domain: int | None = None,
) -> tuple[int, ...]:
    """Bound data values at index i, charged at ceil(log2 k) units per access.

    The swap-to-front access trick costs the same for every index, so the
    charge is uniform and independent of i.
    """
    if isinstance(state, StructuredState):
        size = state.size
        if not 0 <= i < size:
            raise IndexError(f"index {i} outside padded domain {size}")
        values = tuple(int(state.bindings[name][i]) for name in registers)
    else:
        index_reg = next(r.name for r in state.layout.registers if r.role == "index")
        idx_values = state.register_values(index_reg)
        support = np.flatnonzero((np.abs(state.amps) > 0) & (idx_values == i))
        if support.size == 0:
            raise IndexError(f"index {i} has no amplitude support")
        basis = int(support[0])
        values = tuple(int(state.layout.extract(name, basis)) for name in registers)
        size = 1 << state.layout.width(index_reg)
    if ledger is not None:
        charge(ledger, "access", index_width(domain if domain is not None else size))
    return values


def compare_grover(
    u: BitString,
    v: BitString,
    rng: np.random.Generator,
    mode: str = "structured",
) -> CompareResult:
    """Minimum-finding comparator; agrees with the classical order with
    probability at least 1/2 (exactly 0 on equal prefixes of equal-length
    strings, where no differing position exists to find)."""
    k = min(len(u), len(v))
    ledger = ResourceLedger()
    if k == 0:
        return CompareResult(_length_verdict(u, v), None, 0, 0, 0, (), ledger)
    ledger.qubits_total = qubit_count_compare_grover(k)
    state = build_compare_state(u, v)
    differs = state.u_bits[:k] != state.v_bits[:k]

    def key_of(a: int) -> tuple[int, int]:
        return (int(not differs[a]), a)

    log_k = max(1, index_width(k))
    budget = {"used": 0}
    cap = 3 * log_k * log_k

    def factory(_phase: int, _rep: int):
        if budget["used"] >= cap:
            raise CopiesExhausted(f"all {cap} comparator copies consumed")
        budget["used"] += 1
        return state.symbol_copy(mode)

    records: list[PhaseRecord] = []

    def on_phase(phase: int, found: int | None, new_key) -> None:
        if found is not None:
            records.append(PhaseRecord(phi=new_key[0], psi=new_key[1], phase=phase))

    best, phases, _ = durr_hoyer_min(
        key_of,
        k,
        rng,
        factory,
        ledger,
        initial_key=(1, k),
        on_phase=on_phase,
    )
    if best is None or key_of(best)[0] == 1:
        # No differing position was adopted: equal within the compared
        # prefix, so string length decides.
        verdict = _length_verdict(u, v)
        return CompareResult(verdict, None, phases, 0, budget["used"], tuple(records), ledger)
    readout = state.symbol_copy(mode)
    readout_state = readout if isinstance(readout, StructuredState) else readout.state
    u_bit, v_bit = access_element(readout_state, best, ("u", "v"), ledger, domain=k)
    verdict = -1 if u_bit < v_bit else 1
    return CompareResult(verdict, best + 1, phases, 0, budget["used"] + 1, tuple(records), ledger)


def compare_bsearch(
    u: BitString,
    v: BitString,
    params: HashParams,
    rng: np.random.Generator,
    mode: str = "structured",
) -> CompareResult:
    """Prefix-hash binary-search comparator.

    Performs exactly ceil(log2 k) quantum hash-equality tests, one fresh
    state copy each, then reads the symbol pair at the candidate first
    difference.  Each test's error is held below 1/(10 ceil(log2 k)) by
    independent re-evaluation, and a found differing hash bit is certain,
    so the verdict errs only through hash collisions (budget epsilon)
    or a missed difference (budget 1/10 overall).
    """
    k = min(len(u), len(v))
    ledger = ResourceLedger()
    if k == 0:
        return CompareResult(_length_verdict(u, v), None, 0, 0, 0, (), ledger)
    if params.delta < k:
        raise ValueError("hash parameters sized for fewer comparisons than k")
    ledger.qubits_total = qubit_count_compare_bsearch(k, params.epsilon, p=params.p)
    state = build_compare_state(u, v, params)
    log_k = index_width(k)
    bit_domain = padded_size(params.width)
    rho = _bsearch_amplification(log_k, bit_domain)

    # lo: longest prefix believed hash-equal; hi: candidate first difference.
    # A reported inequality carries a verified differing bit, so it always
    # wins; once the bracket closes, the remaining budget re-tests the
    # candidate, keeping the comparison count exact.
    lo, hi = 0, k
    tests = 0
    for _ in range(log_k):
        mid = (lo + hi) // 2 if hi - lo > 1 else hi
        charge(ledger, "access", index_width(k))  # swap-to-front fetch of mid
        href, hcand = state.hash_pair(mid)
        equal = _amplified_equality_test(href, hcand, rho, rng, mode, ledger)
        tests += 1
        if equal:
            if mid < hi:
                lo = mid
        else:
            hi = mid
    a0 = hi
    readout = bsearch_readout(state, mode)
    u_bit, v_bit = access_element(readout, a0 - 1, ("u", "v"), ledger, domain=k)
    if u_bit == v_bit:
        # The candidate position does not actually differ: equal within
        # the compared prefix, so string length decides.
        verdict = _length_verdict(u, v)
        return CompareResult(verdict, None, tests, tests, tests, (), ledger)
    verdict = -1 if u_bit < v_bit else 1
    return CompareResult(verdict, a0, tests, tests, tests, (), ledger)


def _bsearch_amplification(log_k: int, bit_domain: int) -> int:
    worst = worst_eval_miss(bit_domain)
    if worst <= 0:
        return 1
    return max(1, math.ceil(math.log(10 * max(1, log_k)) / math.log(1 / worst)))


def _amplified_equality_test(
    href: HashValue,
    hcand: HashValue,
    rho: int,
    rng: np.random.Generator,
    mode: str,
    ledger: ResourceLedger,
) -> bool:
    """rho-fold equality evaluation; any verified differing bit settles it."""
    equal = True
    for _ in range(rho):
        if hash_equality_eval(href, hcand, rng, mode, ledger) == 0:
            equal = False
    return equal


def bsearch_readout(
    state: CompareInstanceState, mode: str
) -> StructuredState | DenseState:
    layout = RegisterLayout(
        [
            Register("idx", state.index_register_width, "index"),
            Register("u", 1, "data", depends_on="idx"),
            Register("v", 1, "data", depends_on="idx"),
        ]
    )
    if mode == "structured":
        return StructuredState(
            layout, state.k, bindings={"u": state.u_bits, "v": state.v_bits}
        )
    dense = DenseState(layout)
    prepare_uniform(dense, "idx")
    bind_data(dense, "u", state.u_bits)
    bind_data(dense, "v", state.v_bits)
    return dense
