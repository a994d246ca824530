"""Circuit noise description and Pauli sampling helpers."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidSpecError

PAULIS = ("X", "Y", "Z")
TWO_QUBIT_PAULIS = tuple((a, b) for a in "IXYZ" for b in "IXYZ")[1:]

# Where deterministic insertions may be placed in a protocol run.
LOCATIONS = ("before_injection", "after_injection", "after_cycle1")


@dataclass(frozen=True)
class Insertion:
    location: str
    pauli: str
    qubit: int  # 1-based data qubit

    def __post_init__(self):
        if self.location not in LOCATIONS:
            raise InvalidSpecError(f"unknown insertion location {self.location!r}")
        if self.pauli not in PAULIS:
            raise InvalidSpecError(f"unknown Pauli {self.pauli!r}")


@dataclass(frozen=True)
class NoiseSpec:
    """Circuit-level Pauli noise.

    Stochastic channels act on the injection rotations and on every gate of
    the stabilizer-measurement circuits; preparation of |+>_L is ideal.
    ``over_rotation_epsilon`` rescales every injection angle by ``1 + eps``.
    """

    depolarizing1q: float = 0.0
    depolarizing2q: float = 0.0
    measure_flip: float = 0.0
    reset_flip: float = 0.0
    insertions: tuple[Insertion, ...] = field(default_factory=tuple)
    over_rotation_epsilon: float = 0.0

    def __post_init__(self):
        for name in ("depolarizing1q", "depolarizing2q", "measure_flip", "reset_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidSpecError(f"{name}={p} is not a probability")
        object.__setattr__(self, "insertions", tuple(self.insertions))
        if self.over_rotation_epsilon <= -1:
            raise InvalidSpecError("over-rotation epsilon must exceed -1")

    @classmethod
    def depolarizing(cls, p: float, **kwargs) -> "NoiseSpec":
        """Uniform circuit noise of strength ``p`` on every location."""
        return cls(depolarizing1q=p, depolarizing2q=p, measure_flip=p, reset_flip=p, **kwargs)

    @classmethod
    def z_errors(cls, *qubits: int, location: str = "before_injection") -> "NoiseSpec":
        return cls(insertions=tuple(Insertion(location, "Z", q) for q in qubits))

    @property
    def stochastic(self) -> bool:
        return any((self.depolarizing1q, self.depolarizing2q, self.measure_flip, self.reset_flip))

    def at(self, location: str) -> list[Insertion]:
        return [ins for ins in self.insertions if ins.location == location]


NOISELESS = NoiseSpec()


def sample_1q(rng, p: float) -> str | None:
    if p > 0.0 and rng.random() < p:
        return PAULIS[rng.integers(3)]
    return None


def sample_2q(rng, p: float) -> tuple[str, str] | None:
    if p > 0.0 and rng.random() < p:
        return TWO_QUBIT_PAULIS[rng.integers(15)]
    return None
