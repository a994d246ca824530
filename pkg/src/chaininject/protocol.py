"""End-to-end injection protocol on the statevector engine.

A run prepares |+>_L (recording the stabilizer trajectory), rotates the
selected chains, then measures every stabilizer twice, post-selecting both
cycles against the preparation trajectory.  Runs abort at the first
mismatching stabilizer.

Logical basis convention
------------------------
``|+>_L`` is the prepared state itself (the reference X_L column is +1 by
construction).  ``|->_L = i^(cols-1) Z_ref |+>_L`` where ``Z_ref`` is the
Z-string on :attr:`Lattice.reference_row`.  The phase ``i^(cols-1)`` makes a
single odd-length chain on the reference row produce ``+theta_c`` for
positive physical angles, so the extracted angle is
``cos(theta/2)|+>_L + i sin(theta/2)|->_L``.  Any other row differs from
``Z_ref`` by the Z stabilizers between them, which is where the trajectory
sign rule comes from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import analytics
from .analytics import AngleSchedule, ErrorSpec
from .engine import IMPOSSIBLE, StateVector, init_register, measure_stabilizer
from .errors import (
    ImpossibleOutcomeError,
    InvalidSpecError,
    ModeMismatchError,
    OutOfSubspaceError,
    RegisterTooLargeError,
)
from .lattice import ChainSet, Lattice, LogicalChain, validate_chain_set
from .noise import NOISELESS, NoiseSpec, sample_1q

__all__ = [
    "Trajectory",
    "InjectionPlan",
    "RunRecord",
    "OverheadEstimate",
    "prepare_plus_L",
    "logical_basis",
    "logical_state",
    "chain_sign",
    "adjacent_sign",
    "build_plan",
    "plan_from_angles",
    "expected_angle",
    "run_protocol",
    "extract_logical_state",
    "logical_coefficients",
    "chain_equivalent_z",
    "estimate_overhead_mc",
    "sample_acceptance",
    "mean_acceptance_probability",
    "derive_seed",
]

MIXED_ZERO_QUBITS = (1, 4, 6, 9)
RESIDUAL_TOL = 1e-10
_DETERMINISTIC = 1.0 - 1e-12
_CACHE_QUBITS = 12
_BASIS_SLOTS = 16


@dataclass(frozen=True)
class Trajectory:
    """Stabilizer outcomes in lattice order plus which of them were forced by the preparation."""

    values: tuple[int, ...]
    deterministic: tuple[bool, ...]
    probability: float = field(default=1.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "deterministic", tuple(bool(v) for v in self.deterministic))
        if len(self.values) != len(self.deterministic):
            raise ValueError("values and deterministic mask differ in length")

    @classmethod
    def from_bits(cls, bits: str | Sequence[int], deterministic: Sequence[bool] | None = None) -> "Trajectory":
        values = tuple(int(b) for b in bits)
        mask = tuple(deterministic) if deterministic is not None else (False,) * len(values)
        return cls(values, mask)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def bits(self) -> str:
        return "".join(map(str, self.values))

    @property
    def pattern(self) -> str:
        """Outcome string with preparation-random positions shown as ``M``."""
        return "".join(str(v) if d else "M" for v, d in zip(self.values, self.deterministic))


@dataclass(frozen=True)
class InjectionPlan:
    chain_set: ChainSet
    schedules: tuple[AngleSchedule, ...]
    sign_corrections: tuple[bool, ...]
    target_angle: float | None = None
    trajectory: Trajectory | None = None

    def __post_init__(self):
        if not (len(self.schedules) == len(self.sign_corrections) == len(self.chain_set)):
            raise InvalidSpecError("one schedule and one correction flag per chain")
        for chain, sched in zip(self.chain_set, self.schedules):
            if len(sched) != len(chain.qubits):
                raise InvalidSpecError(f"schedule for row {chain.row} has wrong length")

    @property
    def rows(self) -> tuple[int, ...]:
        return self.chain_set.rows

    def applied_schedules(self) -> tuple[AngleSchedule, ...]:
        return tuple(s.negated() if flip else s for s, flip in zip(self.schedules, self.sign_corrections))

    def retarget(self, trajectory: Trajectory) -> "InjectionPlan":
        """Recompute sign corrections for a new preparation trajectory."""
        if self.target_angle is None:
            return replace(self, trajectory=trajectory)
        want = _sign_of(self.target_angle)
        flags = tuple(chain_sign(trajectory, ch) != want for ch in self.chain_set)
        return replace(self, sign_corrections=flags, trajectory=trajectory)


@dataclass
class RunRecord:
    seed: int | None
    prep_trajectory: Trajectory
    cycle1: tuple[int, ...]
    cycle2: tuple[int, ...]
    accepted: bool
    acceptance_probability: float | None
    logical_angle: float | None
    stabilizer_measurements_consumed: int
    qubit_time_cost: int
    weighted_cost: int
    residual: float | None = None
    state: StateVector | None = field(default=None, repr=False, compare=False)

    @property
    def verify_trajectory(self) -> Trajectory | None:
        if len(self.cycle2) != len(self.prep_trajectory):
            return None
        return Trajectory(self.cycle2, self.prep_trajectory.deterministic)

    FIELDS = (
        "seed", "accepted", "acceptance_probability", "logical_angle", "consumed",
        "qubit_time_cost", "weighted_cost", "prep_bits", "prep_pattern", "cycle1", "cycle2",
    )

    def to_line(self) -> str:
        """Tab-separated record in :attr:`FIELDS` order; ``-`` marks missing values."""

        def num(x):
            return "-" if x is None else repr(float(x))

        def bits(b):
            return "".join(map(str, b)) or "-"

        return "\t".join([
            "-" if self.seed is None else str(self.seed),
            str(int(self.accepted)),
            num(self.acceptance_probability),
            num(self.logical_angle),
            str(self.stabilizer_measurements_consumed),
            str(self.qubit_time_cost),
            str(self.weighted_cost),
            self.prep_trajectory.bits,
            self.prep_trajectory.pattern,
            bits(self.cycle1),
            bits(self.cycle2),
        ])

    @classmethod
    def from_line(cls, line: str) -> "RunRecord":
        parts = line.rstrip("\n").split("\t")
        if len(parts) != len(cls.FIELDS):
            raise ValueError(f"expected {len(cls.FIELDS)} fields, got {len(parts)}")
        seed, acc, prob, angle, consumed, qtime, wcost, pbits, pattern, c1, c2 = parts

        def num(x):
            return None if x == "-" else float(x)

        def bits(b):
            return () if b == "-" else tuple(int(c) for c in b)

        traj = Trajectory(bits(pbits), tuple(c != "M" for c in pattern))
        return cls(
            seed=None if seed == "-" else int(seed),
            prep_trajectory=traj,
            cycle1=bits(c1),
            cycle2=bits(c2),
            accepted=acc == "1",
            acceptance_probability=num(prob),
            logical_angle=num(angle),
            stabilizer_measurements_consumed=int(consumed),
            qubit_time_cost=int(qtime),
            weighted_cost=int(wcost),
        )


def _sign_of(x: float) -> int:
    return -1 if x < 0 else 1


def derive_seed(master: int, index: int) -> int:
    """Per-run 64-bit seed: first word of ``SeedSequence(master, spawn_key=(index,))``."""
    seq = np.random.SeedSequence(master, spawn_key=(index,))
    return int(seq.generate_state(1, np.uint64)[0])


# preparation


def _resolve_prep(lattice: Lattice, mode: str) -> str:
    if mode == "auto":
        return "mixed" if (lattice.rows, lattice.cols) == (3, 3) else "generic"
    if mode not in ("mixed", "generic"):
        raise ModeMismatchError(f"unknown preparation mode {mode!r}")
    if mode == "mixed" and (lattice.rows, lattice.cols) != (3, 3):
        raise ModeMismatchError("the mixed |0>/|+> preparation exists only for the 3x3 lattice")
    return mode


def _initial_register(lattice: Lattice, mode: str) -> StateVector:
    if mode == "mixed":
        basis = ["zero" if q + 1 in MIXED_ZERO_QUBITS else "plus" for q in range(lattice.num_data)]
    else:
        basis = "plus"
    return init_register(lattice.num_data, basis)


class _PrepTree:
    """Memoized branch states of the noiseless preparation cycle.

    Node ``prefix`` holds the state after forcing ``prefix`` and the
    probability that the next stabilizer reads 1.
    """

    def __init__(self, lattice: Lattice, mode: str):
        self.lattice = lattice
        self.mode = mode
        self.cache = lattice.num_data + 1 <= _CACHE_QUBITS
        self.nodes: dict[tuple[int, ...], tuple[StateVector, float]] = {}

    def _p1(self, state: StateVector, depth: int) -> float:
        if depth == self.lattice.num_stabilizers:
            return 0.0
        stab = self.lattice.stabilizers[depth]
        return min(1.0, max(0.0, 0.5 * (1.0 - state.expectation(stab.kind, stab.indices))))

    def node(self, prefix: tuple[int, ...]) -> tuple[StateVector, float]:
        hit = self.nodes.get(prefix)
        if hit is not None:
            return hit
        if not prefix:
            state = _initial_register(self.lattice, self.mode)
        else:
            parent, _ = self.node(prefix[:-1])
            state = parent.copy()
            measure_stabilizer(state, self.lattice.stabilizers[len(prefix) - 1], outcome=prefix[-1])
        entry = (state, self._p1(state, len(prefix)))
        if self.cache:
            self.nodes[prefix] = entry
        return entry

    def walk(self, forced: Sequence[int] | None, rng) -> tuple[StateVector, Trajectory]:
        if forced is not None and len(forced) != self.lattice.num_stabilizers:
            raise ValueError("forced trajectory has the wrong length")
        prefix: tuple[int, ...] = ()
        mask = []
        prob = 1.0
        if not self.cache:
            state = _initial_register(self.lattice, self.mode)
            for k, stab in enumerate(self.lattice.stabilizers):
                bit = None if forced is None else forced[k]
                _, rec = measure_stabilizer(state, stab, outcome=bit, rng=rng)
                prefix += (rec.outcome,)
                mask.append(rec.conditional_probability >= _DETERMINISTIC)
                prob *= rec.conditional_probability
            return state, Trajectory(prefix, tuple(mask), prob)
        for k in range(self.lattice.num_stabilizers):
            _, p1 = self.node(prefix)
            bit = int(rng.random() < p1) if forced is None else int(forced[k])
            p = p1 if bit else 1.0 - p1
            if p < IMPOSSIBLE:
                raise ImpossibleOutcomeError(
                    f"preparation outcome {bit} at stabilizer {k + 1} has probability {p:.3g}", p
                )
            mask.append(p >= _DETERMINISTIC)
            prob *= p
            prefix += (bit,)
        state, _ = self.node(prefix)
        return state.copy(), Trajectory(prefix, tuple(mask), prob)


_TREES: dict[tuple, _PrepTree] = {}


def _tree(lattice: Lattice, mode: str) -> _PrepTree:
    key = (lattice.spec, mode)
    tree = _TREES.get(key)
    if tree is None:
        tree = _TREES[key] = _PrepTree(lattice, mode)
    return tree


def prepare_plus_L(
    lattice: Lattice,
    mode: str = "auto",
    *,
    trajectory: Trajectory | Sequence[int] | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[StateVector, Trajectory]:
    """Prepare |+>_L by measuring every stabilizer once on a product state.

    ``mode="mixed"`` (3x3 only) starts from qubits 1, 4, 6, 9 in |0> and the
    rest in |+>, which leaves the four weight-2 stabilizers deterministic and
    the four weight-4 ones random.  ``mode="generic"`` starts from all |+>,
    making X stabilizers deterministic.  Pass ``trajectory`` to force the
    outcomes, otherwise they are sampled from ``rng``.
    """
    mode = _resolve_prep(lattice, mode)
    forced = None
    if trajectory is not None:
        forced = trajectory.values if isinstance(trajectory, Trajectory) else tuple(trajectory)
    elif rng is None:
        raise ValueError("sampling a preparation needs an rng")
    return _tree(lattice, mode).walk(forced, rng)


_BASES: dict[tuple, tuple[StateVector, StateVector]] = {}


def logical_basis(lattice: Lattice, trajectory: Trajectory, mode: str = "auto") -> tuple[StateVector, StateVector]:
    """Gauge-fixed ``(|+>_L, |->_L)`` for the given preparation trajectory."""
    mode = _resolve_prep(lattice, mode)
    key = (lattice.spec, mode, trajectory.values)
    hit = _BASES.get(key)
    if hit is not None:
        return hit
    plus, _ = prepare_plus_L(lattice, mode, trajectory=trajectory.values)
    minus = plus.copy()
    for q in lattice.row_qubits(lattice.reference_row):
        minus.z(q - 1)
    minus.amplitudes *= 1j ** ((lattice.cols - 1) % 4)
    if len(_BASES) >= _BASIS_SLOTS:
        _BASES.pop(next(iter(_BASES)))
    _BASES[key] = (plus, minus)
    return plus, minus


def logical_state(lattice: Lattice, trajectory: Trajectory, theta: float, mode: str = "auto") -> StateVector:
    """``cos(theta/2)|+>_L + i sin(theta/2)|->_L`` in the trajectory's gauge."""
    plus, minus = logical_basis(lattice, trajectory, mode)
    amps = math.cos(theta / 2) * plus.amplitudes + 1j * math.sin(theta / 2) * minus.amplitudes
    return StateVector(amps, plus.num_qubits)


def logical_coefficients(state: StateVector, lattice: Lattice, trajectory: Trajectory, mode: str = "auto"):
    """Return ``(a, b, residual)`` with ``a = <+_L|psi>``, ``b = <-_L|psi>``."""
    plus, minus = logical_basis(lattice, trajectory, mode)
    a = plus.inner(state)
    b = minus.inner(state)
    residual = max(0.0, state.norm() - abs(a) ** 2 - abs(b) ** 2)
    return a, b, residual


def extract_logical_state(
    state: StateVector, lattice: Lattice, trajectory: Trajectory, mode: str = "auto"
) -> float:
    """Logical angle ``theta`` with ``|psi> ~ cos(theta/2)|+>_L + i sin(theta/2)|->_L``.

    Raises :class:`OutOfSubspaceError` when the state has weight outside the
    logical span or its coefficients are not those of a Z rotation.
    """
    a, b, residual = logical_coefficients(state, lattice, trajectory, mode)
    if residual > RESIDUAL_TOL:
        raise OutOfSubspaceError(f"state leaves the logical span (residual {residual:.3g})", residual)
    # Fix the global phase so the |+> coefficient is real and non-negative.
    phase = a / abs(a) if abs(a) >= abs(b) else b / (1j * abs(b))
    a, b = a / phase, b / phase
    if abs(a.imag) > 1e-8 or abs(b.real) > 1e-8:
        raise OutOfSubspaceError("logical coefficients are not a Z rotation of |+>_L", residual)
    theta = 2.0 * math.atan2(b.imag, a.real)
    # R_z(theta + 2 pi) = -R_z(theta): only theta mod 2 pi is observable.
    return theta - 2.0 * math.pi if theta > math.pi else theta


# signs and plans


def chain_sign(trajectory: Trajectory, chain: LogicalChain) -> int:
    """+1 or -1 from the parity of the Z stabilizers between ``chain`` and the reference row."""
    parity = 0
    for sid in chain.sign_stabilizers:
        parity ^= trajectory.values[sid - 1]
    return -1 if parity else 1


def adjacent_sign(trajectory: Trajectory, chain: LogicalChain) -> int:
    """Parity over every Z stabilizer touching the row.  Kept for comparison only."""
    parity = 0
    for sid in chain.adjacent_z_stabilizers:
        parity ^= trajectory.values[sid - 1]
    return -1 if parity else 1


def build_plan(lattice: Lattice, trajectory: Trajectory, rows: Iterable[int], target_angle: float) -> InjectionPlan:
    """Split ``target_angle`` evenly over ``rows`` and flip chains whose sign disagrees."""
    chain_set = validate_chain_set(lattice, rows)
    n = len(chain_set)
    theta_p = analytics.solve_physical_angle(abs(target_angle) / n, lattice.cols)
    schedule = AngleSchedule.uniform(theta_p, lattice.cols)
    plan = InjectionPlan(chain_set, (schedule,) * n, (False,) * n, target_angle, None)
    return plan.retarget(trajectory)


def plan_from_angles(
    lattice: Lattice,
    rows: Iterable[int],
    theta_p: float | Sequence[float],
    *,
    trajectory: Trajectory | None = None,
    sign_corrections: Sequence[bool] | None = None,
) -> InjectionPlan:
    """Plan with explicit physical angles and no adaptive sign handling."""
    chain_set = validate_chain_set(lattice, rows)
    n = len(chain_set)
    if np.isscalar(theta_p):
        schedules = (AngleSchedule.uniform(float(theta_p), lattice.cols),) * n
    else:
        schedules = tuple(AngleSchedule.uniform(float(t), lattice.cols) for t in theta_p)
    flags = tuple(sign_corrections) if sign_corrections is not None else (False,) * n
    return InjectionPlan(chain_set, schedules, flags, None, trajectory)


def expected_angle(
    plan: InjectionPlan,
    trajectory: Trajectory,
    errors: dict[int, ErrorSpec] | None = None,
    *,
    arcsin: bool = False,
) -> float:
    """Analytic logical angle of a noiseless accepted run.

    ``errors`` maps a row to the error acting on that chain; chain angles then
    come from :func:`analytics.chain_angle_with_error`, with the sign flip a
    Pauli-Z error imprints on its chain unless ``arcsin`` is set.
    """
    errors = errors or {}
    results = []
    for chain, sched in zip(plan.chain_set, plan.applied_schedules()):
        results.append(analytics.chain_result(sched, chain_sign(trajectory, chain), errors.get(chain.row), arcsin=arcsin))
    return analytics.compose_logical_angle(results)


def chain_equivalent_z(lattice: Lattice, rows: Iterable[int], qubits: Iterable[int]) -> tuple[int, ...] | None:
    """Chain-supported Z operator equal to ``Z_qubits`` up to Z stabilizers.

    Searches products of Z stabilizers for one that moves every support qubit
    onto the injected ``rows``; returns the sorted 1-based support or ``None``.
    """
    allowed = set()
    for r in rows:
        allowed.update(lattice.row_qubits(r))
    base = 0
    for q in qubits:
        base ^= 1 << (q - 1)
    masks = []
    for stab in lattice.z_stabilizers:
        m = 0
        for q in stab.support:
            m ^= 1 << (q - 1)
        masks.append(m)
    if len(masks) > 20:
        raise RegisterTooLargeError("too many Z stabilizers for an exhaustive search")
    outside = ~sum(1 << (q - 1) for q in allowed)
    best = None
    for subset in range(1 << len(masks)):
        m = base
        for i, mask in enumerate(masks):
            if subset >> i & 1:
                m ^= mask
        if m & outside == 0 and (best is None or bin(m).count("1") < bin(best).count("1")):
            best = m
    if best is None:
        return None
    return tuple(q for q in range(1, lattice.num_data + 1) if best >> (q - 1) & 1)


# running


class _Aborted(Exception):
    pass


def _apply_insertions(state: StateVector, noise: NoiseSpec, location: str) -> None:
    for ins in noise.at(location):
        state.pauli(ins.pauli, ins.qubit - 1)


def run_protocol(
    lattice: Lattice,
    plan: InjectionPlan,
    noise: NoiseSpec | None = None,
    mode: str = "exact",
    *,
    seed: int | None = None,
    prep: str = "auto",
    extract: bool = True,
    keep_state: bool = False,
) -> RunRecord:
    """Run preparation, injection and two post-selected cycles.

    ``mode="exact"`` forces every outcome onto ``plan.trajectory`` and reports
    the exact acceptance probability (conditioned on any sampled noise).
    ``mode="sampled"`` samples the preparation, re-derives sign corrections
    when the plan has a target angle, and samples both cycles.
    """
    noise = noise or NOISELESS
    if mode not in ("exact", "sampled"):
        raise InvalidSpecError(f"unknown engine mode {mode!r}")
    rng = np.random.default_rng(seed)
    if mode == "exact":
        if plan.trajectory is None:
            raise InvalidSpecError("exact mode needs a plan built for a reference trajectory")
        state, traj = prepare_plus_L(lattice, prep, trajectory=plan.trajectory)
    else:
        state, traj = prepare_plus_L(lattice, prep, rng=rng)
        plan = plan.retarget(traj)

    _apply_insertions(state, noise, "before_injection")
    scale = 1.0 + noise.over_rotation_epsilon
    for chain, sched in zip(plan.chain_set, plan.applied_schedules()):
        for q, theta in zip(chain.qubits, sched.angles):
            state.rz(q - 1, scale * theta)
            fault = sample_1q(rng, noise.depolarizing1q)
            if fault:
                state.pauli(fault, q - 1)
    _apply_insertions(state, noise, "after_injection")

    cycles: list[list[int]] = [[], []]
    weights = 0
    probability = 1.0
    accepted = True
    try:
        for c in range(2):
            if c == 1:
                _apply_insertions(state, noise, "after_cycle1")
            for stab, ref in zip(lattice.stabilizers, traj.values):
                weights += stab.weight
                try:
                    _, rec = measure_stabilizer(
                        state, stab, outcome=ref if mode == "exact" else None, rng=rng, noise=noise
                    )
                except ImpossibleOutcomeError:
                    cycles[c].append(1 - ref)
                    probability = 0.0
                    raise _Aborted
                cycles[c].append(rec.outcome)
                probability *= rec.conditional_probability
                if rec.outcome != ref:
                    raise _Aborted
    except _Aborted:
        accepted = False

    consumed = len(cycles[0]) + len(cycles[1])
    angle = residual = None
    if accepted and extract:
        a, b, residual = logical_coefficients(state, lattice, traj, prep)
        try:
            angle = extract_logical_state(state, lattice, traj, prep)
        except OutOfSubspaceError:
            angle = float("nan")
    return RunRecord(
        seed=seed,
        prep_trajectory=traj,
        cycle1=tuple(cycles[0]),
        cycle2=tuple(cycles[1]),
        accepted=accepted,
        acceptance_probability=probability if mode == "exact" else None,
        logical_angle=angle,
        stabilizer_measurements_consumed=consumed,
        qubit_time_cost=consumed * lattice.num_data,
        weighted_cost=weights,
        residual=residual,
        state=state if keep_state else None,
    )


@dataclass(frozen=True)
class OverheadEstimate:
    shots: int
    mean_repetitions: float
    sem_repetitions: float
    mean_measurements: float
    sem_measurements: float
    mean_weighted_cost: float
    sem_weighted_cost: float
    mean_qubit_time: float
    sem_qubit_time: float


def _mean_sem(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def estimate_overhead_mc(
    lattice: Lattice,
    plan: InjectionPlan,
    noise: NoiseSpec | None = None,
    shots: int = 1000,
    seed: int = 0,
    *,
    prep: str = "auto",
    max_repetitions: int = 100_000,
) -> OverheadEstimate:
    """Monte-Carlo cost of producing one accepted state, restarting on every mismatch.

    Per shot: repetitions until acceptance, stabilizer measurements consumed,
    the same weighted by stabilizer weight (N_s), and measurements times the
    number of data qubits.  Run ``k`` overall uses seed ``derive_seed(seed, k)``.
    """
    if shots < 1:
        raise InvalidSpecError("shots must be >= 1")
    reps, meas, weighted, qtime = [], [], [], []
    k = 0
    for _ in range(shots):
        r = m = w = t = 0
        while True:
            rec = run_protocol(lattice, plan, noise, "sampled", seed=derive_seed(seed, k), prep=prep, extract=False)
            k += 1
            r += 1
            m += rec.stabilizer_measurements_consumed
            w += rec.weighted_cost
            t += rec.qubit_time_cost
            if rec.accepted:
                break
            if r >= max_repetitions:
                raise RuntimeError(f"no accepted run within {max_repetitions} repetitions")
        reps.append(r)
        meas.append(m)
        weighted.append(w)
        qtime.append(t)
    return OverheadEstimate(shots, *_mean_sem(reps), *_mean_sem(meas), *_mean_sem(weighted), *_mean_sem(qtime))


def sample_acceptance(
    lattice: Lattice,
    plan: InjectionPlan,
    noise: NoiseSpec | None = None,
    shots: int = 1000,
    seed: int = 0,
    *,
    prep: str = "auto",
) -> int:
    """Number of accepted runs out of ``shots`` sampled runs."""
    return sum(
        run_protocol(lattice, plan, noise, "sampled", seed=derive_seed(seed, k), prep=prep, extract=False).accepted
        for k in range(shots)
    )


def mean_acceptance_probability(
    lattice: Lattice,
    plan: InjectionPlan,
    noise: NoiseSpec | None = None,
    samples: int = 1000,
    seed: int = 0,
    *,
    prep: str = "auto",
) -> tuple[float, float]:
    """Exact-mode acceptance probability averaged over noise realizations: ``(mean, sem)``."""
    probs = [
        run_protocol(lattice, plan, noise, "exact", seed=derive_seed(seed, k), prep=prep, extract=False)
        .acceptance_probability
        for k in range(samples)
    ]
    return _mean_sem(probs)
