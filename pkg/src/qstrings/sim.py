"""Two interchangeable quantum-state backends.

DenseState holds the full 2^q amplitude vector and evolves under the
four-gate set {H, X, Z, CNOT}, phase oracles, and index-register
diffusion.  StructuredState exploits the shape shared by every state in
this package: a superposition over an index register whose other
registers hold deterministic functions of the index.  It stores one
amplitude per (padded) index and the function tables ("bindings"), so
the two backends must agree amplitude-for-amplitude after expansion.

Dense diffusion acts on the index register only (identity elsewhere),
so algorithms that keep data registers entangled with the index must
unbind the data (XOR the binding out), diffuse, and rebind; the
structured backend gets the same effect for free.

Conventions: qubit 0 is the least-significant bit of the flat basis
index, and each register occupies a contiguous run of qubits with its
own LSB first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

NORM_TOL = 1e-9
DENSE_WIDTH_CAP = 24

_SQRT2_INV = 1.0 / math.sqrt(2.0)
GATES_1Q: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ROLES = ("index", "data", "ancilla", "flag")


@dataclass(frozen=True)
class Register:
    """A named run of qubits with a role tag.

    Data registers declare the index register they depend on; their
    evaluation map lives in the owning StructuredState (or is XORed into
    a DenseState by bind_data).
    """

    name: str
    width: int
    role: str
    depends_on: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown register role {self.role!r}")
        if self.width < 1:
            raise ValueError("register width must be at least 1")
        if self.role == "data" and self.depends_on is None:
            raise ValueError(f"data register {self.name!r} must declare its index register")


class RegisterLayout:
    """Ordered registers; total width is the sum of the widths."""

    def __init__(self, registers: Sequence[Register]):
        names = [r.name for r in registers]
        if len(set(names)) != len(names):
            raise ValueError("register names must be unique")
        self.registers = tuple(registers)
        self._by_name = {r.name: r for r in registers}
        self._offsets: dict[str, int] = {}
        off = 0
        for r in registers:
            self._offsets[r.name] = off
            off += r.width
        self.total_width = off
        for r in registers:
            if r.role == "data" and (
                r.depends_on not in self._by_name
                or self._by_name[r.depends_on].role != "index"
            ):
                raise ValueError(f"data register {r.name!r} depends on a non-index register")

    def register(self, name: str) -> Register:
        return self._by_name[name]

    def offset(self, name: str) -> int:
        return self._offsets[name]

    def width(self, name: str) -> int:
        return self._by_name[name].width

    def extract(self, name: str, basis_index: int | np.ndarray):
        """Value of a register within a flat basis index (vectorized)."""
        return (basis_index >> self._offsets[name]) & ((1 << self.width(name)) - 1)


def padded_size(domain: int) -> int:
    """Smallest power of two >= domain coverable by a register (so >= 2)."""
    if domain < 1:
        raise ValueError("domain must be positive")
    return 1 << max(1, (domain - 1).bit_length())


class DenseState:
    """Exact 2^q statevector over a register layout."""

    def __init__(self, layout: RegisterLayout, amps: np.ndarray | None = None):
        if layout.total_width > DENSE_WIDTH_CAP:
            raise ValueError(
                f"dense state of {layout.total_width} qubits exceeds cap {DENSE_WIDTH_CAP}"
            )
        self.layout = layout
        size = 1 << layout.total_width
        if amps is None:
            self.amps = np.zeros(size, dtype=complex)
            self.amps[0] = 1.0
        else:
            self.amps = np.asarray(amps, dtype=complex).reshape(size)
        self.check_norm()

    def check_norm(self) -> None:
        norm = float(np.sum(np.abs(self.amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} drifted beyond tolerance")

    def copy(self) -> "DenseState":
        return DenseState(self.layout, self.amps.copy())

    def register_values(self, name: str) -> np.ndarray:
        return self.layout.extract(name, np.arange(self.amps.size))


def apply_gate(state: DenseState, gate: str, targets: Sequence[int]) -> DenseState:
    """Apply one of H, X, Z (single target) or CNOT (control, target) in place."""
    q = state.layout.total_width
    if len(set(targets)) != len(targets):
        raise ValueError("gate targets must be distinct")
    for t in targets:
        if not 0 <= t < q:
            raise ValueError(f"qubit {t} out of range for width {q}")
    if gate in GATES_1Q:
        (qubit,) = targets
        tensor = state.amps.reshape([2] * q)
        axis = q - 1 - qubit
        tensor = np.moveaxis(tensor, axis, -1)
        tensor = np.tensordot(tensor, GATES_1Q[gate], axes=([-1], [1]))
        state.amps = np.moveaxis(tensor, -1, axis).reshape(-1)
    elif gate == "CNOT":
        control, target = targets
        idx = np.arange(state.amps.size)
        sel = ((idx >> control) & 1).astype(bool)
        out = state.amps.copy()
        out[idx[sel]] = state.amps[idx[sel] ^ (1 << target)]
        state.amps = out
    else:
        raise ValueError(f"unknown gate {gate!r}")
    state.check_norm()
    return state


def prepare_uniform(state: DenseState, register: str) -> DenseState:
    """Equal superposition over a register, one Hadamard per qubit."""
    off = state.layout.offset(register)
    for qubit in range(off, off + state.layout.width(register)):
        apply_gate(state, "H", [qubit])
    return state


def prepare_minus(state: DenseState, register: str) -> DenseState:
    """Put a width-1 register into (|0> - |1>)/sqrt(2) via X then H."""
    if state.layout.width(register) != 1:
        raise ValueError("minus preparation expects a single-qubit register")
    off = state.layout.offset(register)
    apply_gate(state, "X", [off])
    apply_gate(state, "H", [off])
    return state


def _pattern_over_index(
    predicate: Callable[[int], int] | np.ndarray, domain: int
) -> np.ndarray:
    if isinstance(predicate, np.ndarray):
        if predicate.size != domain:
            raise ValueError("pattern length does not match index domain")
        return predicate.astype(bool)
    return np.fromiter((bool(predicate(a)) for a in range(domain)), dtype=bool, count=domain)


def phase_oracle(
    state: DenseState,
    predicate: Callable[[int], int] | np.ndarray,
    index_register: str = "idx",
    ancilla: str | None = None,
) -> DenseState:
    """Multiply the amplitude of index value a by (-1)^predicate(a).

    With `ancilla` given (a flag qubit prepared in |->), the oracle is
    realized as the XOR permutation on that qubit, which kicks the phase
    back onto the index register; without it the phase is applied
    directly.  Both act identically on |-> ancillas.
    """
    pattern = _pattern_over_index(predicate, 1 << state.layout.width(index_register))
    values = state.register_values(index_register)
    hit = pattern[values]
    if ancilla is None:
        state.amps[hit] = -state.amps[hit]
    else:
        bit = 1 << state.layout.offset(ancilla)
        idx = np.arange(state.amps.size)
        out = state.amps.copy()
        out[idx[hit]] = state.amps[idx[hit] ^ bit]
        state.amps = out
    state.check_norm()
    return state


def diffusion(state: DenseState, index_register: str) -> DenseState:
    """Reflect amplitudes about their mean over the index register.

    Acts as identity on all other registers (sector-wise reflection), so
    callers keeping data registers bound to the index must unbind first.
    """
    off = state.layout.offset(index_register)
    w = state.layout.width(index_register)
    low = 1 << off
    dim = 1 << w
    high = state.amps.size // (low * dim)
    tensor = state.amps.reshape(high, dim, low)
    mean = tensor.mean(axis=1, keepdims=True)
    state.amps = (2.0 * mean - tensor).reshape(-1)
    state.check_norm()
    return state


def bind_data(state: DenseState, data_register: str, table: np.ndarray) -> DenseState:
    """XOR table[a] into a data register (self-inverse: also unbinds)."""
    reg = state.layout.register(data_register)
    values = state.register_values(reg.depends_on)
    shift = state.layout.offset(data_register)
    src = np.arange(state.amps.size) ^ (table[values].astype(np.int64) << shift)
    state.amps = state.amps[src]
    state.check_norm()
    return state


def measure(state: DenseState, rng: np.random.Generator) -> dict[str, int]:
    """Sample all registers from the Born distribution and collapse."""
    probs = np.abs(state.amps) ** 2
    probs /= probs.sum()
    outcome = int(rng.choice(state.amps.size, p=probs))
    collapsed = np.zeros_like(state.amps)
    collapsed[outcome] = 1.0
    state.amps = collapsed
    return {r.name: int(state.layout.extract(r.name, outcome)) for r in state.layout.registers}


def project_flag_minus(state: DenseState, flag_register: str) -> np.ndarray:
    """Amplitudes over the remaining registers given the flag sits in |->.

    Raises if the flag is not exactly |->-factored (beyond NORM_TOL).
    """
    off = state.layout.offset(flag_register)
    bit = 1 << off
    idx = np.arange(state.amps.size)
    keep = (idx & bit) == 0
    a0 = state.amps[idx[keep]]
    a1 = state.amps[idx[keep] ^ bit]
    reduced = (a0 - a1) * _SQRT2_INV
    residual = float(np.sum(np.abs((a0 + a1) * _SQRT2_INV) ** 2))
    if residual > NORM_TOL:
        raise ValueError("flag register is not in the |-> state")
    return reduced


class StructuredState:
    """Amplitudes over a padded index domain plus classical binding tables.

    Bindings map every padded index value to the content of the
    corresponding data register; padding entries carry whatever sentinel
    the caller installed.
    """

    def __init__(
        self,
        layout: RegisterLayout,
        domain_size: int,
        bindings: Mapping[str, np.ndarray] | None = None,
        index_register: str = "idx",
        amps: np.ndarray | None = None,
    ):
        self.layout = layout
        self.domain_size = domain_size
        self.index_register = index_register
        self.size = padded_size(domain_size)
        if (1 << layout.width(index_register)) != self.size:
            raise ValueError("index register width does not cover the padded domain")
        self.bindings: dict[str, np.ndarray] = {}
        for r in layout.registers:
            if r.role != "data":
                continue
            if bindings is None or r.name not in bindings:
                raise ValueError(f"missing binding for data register {r.name!r}")
            table = np.asarray(bindings[r.name], dtype=np.int64)
            if table.shape != (self.size,):
                raise ValueError(f"binding for {r.name!r} must cover the padded domain")
            if table.max(initial=0) >= (1 << r.width):
                raise ValueError(f"binding for {r.name!r} overflows its register width")
            self.bindings[r.name] = table
        if amps is None:
            self.amps = np.full(self.size, 1.0 / math.sqrt(self.size), dtype=complex)
        else:
            self.amps = np.asarray(amps, dtype=complex).reshape(self.size)
        self.check_norm()

    def check_norm(self) -> None:
        norm = float(np.sum(np.abs(self.amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} drifted beyond tolerance")

    def copy(self) -> "StructuredState":
        return StructuredState(
            self.layout,
            self.domain_size,
            bindings=self.bindings,
            index_register=self.index_register,
            amps=self.amps.copy(),
        )

    def apply_phase_pattern(self, pattern: np.ndarray) -> "StructuredState":
        hit = _pattern_over_index(pattern, self.size)
        self.amps[hit] = -self.amps[hit]
        return self

    def diffuse(self) -> "StructuredState":
        self.amps = 2.0 * self.amps.mean() - self.amps
        self.check_norm()
        return self

    def measure_index(self, rng: np.random.Generator) -> int:
        probs = np.abs(self.amps) ** 2
        probs /= probs.sum()
        outcome = int(rng.choice(self.size, p=probs))
        self.amps = np.zeros_like(self.amps)
        self.amps[outcome] = 1.0
        return outcome

    def index_probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def binding_value(self, register: str, a: int) -> int:
        return int(self.bindings[register][a])


def expand_structured(state: StructuredState, cap: int = DENSE_WIDTH_CAP) -> DenseState:
    """Dense state with amplitude of |a>|f1(a)>... equal to the structured amplitude.

    Covers the index and data registers of the layout; ancilla and flag
    registers are algorithm-managed and excluded from expansion.
    """
    regs = [r for r in state.layout.registers if r.role in ("index", "data")]
    layout = RegisterLayout(regs)
    if layout.total_width > cap:
        raise ValueError(f"expansion of {layout.total_width} qubits exceeds cap {cap}")
    amps = np.zeros(1 << layout.total_width, dtype=complex)
    for a in range(state.size):
        basis = a << layout.offset(state.index_register)
        for name, table in state.bindings.items():
            basis |= int(table[a]) << layout.offset(name)
        amps[basis] = state.amps[a]
    return DenseState(layout, amps)


def dump_state(state: DenseState, path: str) -> None:
    """Write `basis_index,re,im` lines for debugging."""
    with open(path, "w", encoding="ascii") as fh:
        for i, amp in enumerate(state.amps):
            fh.write(f"{i},{amp.real!r},{amp.imag!r}\n")
