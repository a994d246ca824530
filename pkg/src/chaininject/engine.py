"""Dense statevector engine with a single reusable measurement ancilla.

Qubit ``q`` is bit ``q`` of the amplitude index (little-endian).  Data qubits
are 0-based here; the ancilla is the last qubit of the register.

Stabilizer measurements come in two flavours that agree exactly on noiseless
input:

* the ancilla circuit (CNOTs from the support into the ancilla for Z checks,
  Hadamard-conjugated CNOTs out of the ancilla for X checks), used whenever
  stochastic noise has to be placed between gates;
* a direct projection ``(1 +/- S)/2`` onto the stabilizer eigenspace, used for
  noiseless runs because it skips the per-gate passes over the register.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AncillaNotResetError, ImpossibleOutcomeError, RegisterTooLargeError
from .noise import NoiseSpec, sample_1q, sample_2q

MAX_QUBITS = 26
IMPOSSIBLE = 1e-14
_ANCILLA_TOL = 1e-12

__all__ = [
    "StateVector",
    "MeasurementRecord",
    "init_register",
    "apply_rz",
    "apply_pauli",
    "measure_stabilizer",
    "trajectory_probability",
]


class StateVector:
    """Normalized amplitude array over ``num_qubits`` qubits.  Gates act in place."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, num_qubits: int | None = None):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if num_qubits is None:
            num_qubits = int(amplitudes.size).bit_length() - 1
        if num_qubits > MAX_QUBITS:
            raise RegisterTooLargeError(f"{num_qubits} qubits exceed the {MAX_QUBITS}-qubit limit")
        if amplitudes.shape != (1 << num_qubits,):
            raise ValueError(f"expected {1 << num_qubits} amplitudes, got shape {amplitudes.shape}")
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.num_qubits)

    @property
    def ancilla(self) -> int:
        return self.num_qubits - 1

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _check(self, q: int) -> None:
        if not 0 <= q < self.num_qubits:
            raise IndexError(f"qubit {q} outside register of {self.num_qubits}")

    def _view(self, q: int) -> np.ndarray:
        self._check(q)
        return self.amplitudes.reshape(1 << (self.num_qubits - q - 1), 2, 1 << q)

    # single-qubit gates

    def rz(self, q: int, theta: float) -> "StateVector":
        v = self._view(q)
        v[:, 0, :] *= complex(math.cos(theta / 2), math.sin(theta / 2))
        v[:, 1, :] *= complex(math.cos(theta / 2), -math.sin(theta / 2))
        return self

    def x(self, q: int) -> "StateVector":
        v = self._view(q)
        tmp = v[:, 0, :].copy()
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = tmp
        return self

    def z(self, q: int) -> "StateVector":
        self._view(q)[:, 1, :] *= -1
        return self

    def y(self, q: int) -> "StateVector":
        v = self._view(q)
        tmp = v[:, 0, :].copy()
        v[:, 0, :] = -1j * v[:, 1, :]
        v[:, 1, :] = 1j * tmp
        return self

    def h(self, q: int) -> "StateVector":
        v = self._view(q)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = (a + b) * _SQRT_HALF
        v[:, 1, :] = (a - b) * _SQRT_HALF
        return self

    def pauli(self, name: str, q: int) -> "StateVector":
        if name == "I":
            self._check(q)
            return self
        return {"X": self.x, "Y": self.y, "Z": self.z}[name](q)

    def cx(self, control: int, target: int) -> "StateVector":
        self._check(control)
        self._check(target)
        if control == target:
            raise ValueError("control and target coincide")
        n = self.num_qubits
        hi, lo = max(control, target), min(control, target)
        v = self.amplitudes.reshape(1 << (n - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
        if control > target:
            block = v[:, 1]
            tmp = block[:, :, 0, :].copy()
            block[:, :, 0, :] = block[:, :, 1, :]
            block[:, :, 1, :] = tmp
        else:
            block = v[:, :, :, 1, :]
            tmp = block[:, 0].copy()
            block[:, 0] = block[:, 1]
            block[:, 1] = tmp
        return self

    # measurement primitives

    def prob_one(self, q: int) -> float:
        v = self._view(q)[:, 1, :]
        return float(np.vdot(v, v).real)

    def project(self, q: int, bit: int, probability: float) -> "StateVector":
        v = self._view(q)
        v[:, 1 - bit, :] = 0.0
        self.amplitudes /= math.sqrt(probability)
        return self

    def pauli_string(self, kind: str, qubits: Iterable[int]) -> np.ndarray:
        """Amplitudes of ``P_S |self>`` for an all-X or all-Z string (copy)."""
        qubits = tuple(qubits)
        for q in qubits:
            self._check(q)
        if kind == "Z":
            out = self.copy()
            for q in qubits:
                out.z(q)
            return out.amplitudes
        # X string: flip the tensor axes of the targeted qubits (axis n-1-q holds qubit q)
        n = self.num_qubits
        tensor = self.amplitudes.reshape((2,) * n)
        return np.flip(tensor, axis=tuple(n - 1 - q for q in qubits)).reshape(-1)

    def expectation(self, kind: str, qubits: Iterable[int]) -> float:
        return float(np.vdot(self.amplitudes, self.pauli_string(kind, qubits)).real)


_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class MeasurementRecord:
    stabilizer_id: int
    outcome: int
    conditional_probability: float


def init_register(num_data: int, basis: Sequence[str] | str = "plus") -> StateVector:
    """Product state of ``num_data`` data qubits plus one ancilla in |0>.

    ``basis`` holds ``"zero"`` or ``"plus"`` per data qubit (0-based order),
    or a single value for all of them.
    """
    n = num_data + 1
    if n > MAX_QUBITS:
        raise RegisterTooLargeError(f"{num_data} data qubits + ancilla exceed {MAX_QUBITS} qubits")
    if isinstance(basis, str):
        basis = [basis] * num_data
    if len(basis) != num_data:
        raise ValueError("basis assignment length mismatch")
    single = {
        "zero": np.array([1.0, 0.0], dtype=np.complex128),
        "plus": np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128),
    }
    amps = single["zero"]  # ancilla, highest bit
    for b in reversed(basis):
        amps = np.kron(amps, single[b])
    return StateVector(amps, n)


def apply_rz(state: StateVector, qubit: int, theta: float) -> StateVector:
    """``R_z(theta) = cos(theta/2) I + i sin(theta/2) Z``: |0> gains ``e^{+i theta/2}``."""
    return state.rz(qubit, theta)


def apply_pauli(state: StateVector, pauli: str, qubit: int) -> StateVector:
    return state.pauli(pauli, qubit)


def _choose(p1: float, outcome: int | None, rng) -> int:
    if outcome is not None:
        return int(outcome)
    if rng is None:
        raise ValueError("sampling a measurement needs an rng")
    return int(rng.random() < p1)


def _finish(state: StateVector, stabilizer, actual: int, p1: float, recorded: int):
    p = p1 if actual else 1.0 - p1
    if p < IMPOSSIBLE:
        raise ImpossibleOutcomeError(
            f"outcome {actual} of stabilizer {stabilizer.id} has probability {p:.3g}", p
        )
    return p, MeasurementRecord(stabilizer.id, recorded, p)


def _measure_projective(state: StateVector, stabilizer, outcome, rng):
    # Ancilla (highest bit) is |0>, so the data half of the array is the whole state.
    data = StateVector(state.amplitudes[: 1 << (state.num_qubits - 1)], state.num_qubits - 1)
    image = data.pauli_string(stabilizer.kind, stabilizer.indices)
    overlap = float(np.vdot(data.amplitudes, image).real)
    p1 = min(1.0, max(0.0, 0.5 * (1.0 - overlap)))
    bit = _choose(p1, outcome, rng)
    p, record = _finish(state, stabilizer, bit, p1, bit)
    if bit:
        np.subtract(data.amplitudes, image, out=data.amplitudes)
    else:
        np.add(data.amplitudes, image, out=data.amplitudes)
    data.amplitudes *= 0.5 / math.sqrt(p)
    state.amplitudes[1 << (state.num_qubits - 1):] = 0.0
    return record


def _measure_circuit(state: StateVector, stabilizer, outcome, rng, noise: NoiseSpec):
    anc = state.ancilla

    def depolarize(*qubits):
        if len(qubits) == 1:
            fault = sample_1q(rng, noise.depolarizing1q)
            if fault:
                state.pauli(fault, qubits[0])
        else:
            fault = sample_2q(rng, noise.depolarizing2q)
            if fault:
                state.pauli(fault[0], qubits[0]).pauli(fault[1], qubits[1])

    if noise.reset_flip and rng.random() < noise.reset_flip:
        state.x(anc)
    if stabilizer.kind == "Z":
        for q in stabilizer.indices:
            state.cx(q, anc)
            depolarize(q, anc)
    else:
        state.h(anc)
        depolarize(anc)
        for q in stabilizer.indices:
            state.cx(anc, q)
            depolarize(anc, q)
        state.h(anc)
        depolarize(anc)
    flip = int(bool(noise.measure_flip) and rng.random() < noise.measure_flip)
    p1 = state.prob_one(anc)
    if outcome is None:
        actual = _choose(p1, None, rng)
        recorded = actual ^ flip
    else:
        recorded = int(outcome)
        actual = recorded ^ flip
    p, record = _finish(state, stabilizer, actual, p1, recorded)
    state.project(anc, actual, p)
    if actual:
        state.x(anc)
    return record


def measure_stabilizer(
    state: StateVector,
    stabilizer,
    *,
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
    noise: NoiseSpec | None = None,
) -> tuple[StateVector, MeasurementRecord]:
    """Measure one stabilizer through the ancilla and project the register.

    ``outcome=None`` samples with ``rng``; an explicit bit forces that outcome
    and records its exact conditional probability.  Outcome 0 is the +1
    eigenvalue.  The ancilla must be in |0> and is returned to |0>.
    """
    if state.prob_one(state.ancilla) > _ANCILLA_TOL:
        raise AncillaNotResetError("ancilla must be reset to |0> before measuring")
    if noise is not None and noise.stochastic:
        if rng is None:
            raise ValueError("noisy measurement needs an rng")
        record = _measure_circuit(state, stabilizer, outcome, rng, noise)
    else:
        record = _measure_projective(state, stabilizer, outcome, rng)
    return state, record


def measure_stabilizer_circuit(state: StateVector, stabilizer, *, outcome=None, rng=None):
    """Noiseless ancilla-circuit measurement; the reference the projector path is tested against."""
    if state.prob_one(state.ancilla) > _ANCILLA_TOL:
        raise AncillaNotResetError("ancilla must be reset to |0> before measuring")
    return state, _measure_circuit(state, stabilizer, outcome, rng, NoiseSpec())


def trajectory_probability(state: StateVector, stabilizers: Sequence, outcomes: Sequence[int]) -> float:
    """Probability of forcing ``outcomes`` along ``stabilizers``; leaves ``state`` projected."""
    if len(stabilizers) != len(outcomes):
        raise ValueError("stabilizer and outcome sequences differ in length")
    total = 1.0
    for stab, bit in zip(stabilizers, outcomes):
        _, rec = measure_stabilizer(state, stab, outcome=bit)
        total *= rec.conditional_probability
    return total
