"""Closed-form chain-injection analytics.

Physical rotations follow ``R_z(t) = cos(t/2) I + i sin(t/2) Z``.  Injecting
a chain of such rotations onto |+>_L and post-selecting the original
stabilizer trajectory keeps only the identity and full-chain Z terms, so a
chain is fully described by the two products ``prod cos(t_j/2)`` and
``prod sin(t_j/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, InvalidSpecError, ZeroAcceptanceError

__all__ = [
    "AngleSchedule",
    "ChainResult",
    "ErrorSpec",
    "OverheadParams",
    "success_probability",
    "chain_angle",
    "exact_chain_angle",
    "chain_angle_with_error",
    "error_sign",
    "chain_result",
    "compose_logical_angle",
    "total_success_probability",
    "solve_physical_angle",
    "infidelity_single",
    "infidelity_multiple",
    "overhead",
    "default_overhead_params",
    "scheme_overhead",
    "even_d_coefficients",
    "logical_fidelity",
    "brute_force_chain",
]

# Below this, rounding residue of an exactly-zero branch.
_ZERO_P = 1e-28


@dataclass(frozen=True)
class AngleSchedule:
    angles: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.angles:
            raise InvalidSpecError("an angle schedule needs at least one angle")
        if not all(math.isfinite(a) for a in self.angles):
            raise InvalidSpecError(f"non-finite angle in {self.angles}")

    @classmethod
    def uniform(cls, theta_p: float, length: int) -> "AngleSchedule":
        return cls((theta_p,) * length)

    def __len__(self) -> int:
        return len(self.angles)

    def negated(self) -> "AngleSchedule":
        return AngleSchedule(tuple(-a for a in self.angles))


def _as_schedule(schedule) -> AngleSchedule:
    return schedule if isinstance(schedule, AngleSchedule) else AngleSchedule(tuple(schedule))


@dataclass(frozen=True)
class ChainResult:
    success_probability: float
    chain_angle: float
    sign: int = 1

    @property
    def signed_angle(self) -> float:
        return self.sign * self.chain_angle


@dataclass(frozen=True)
class ErrorSpec:
    """Error acting on one chain.

    ``kind`` is ``"none"``, ``"pauliZ"`` (Z on the listed 0-based chain
    positions) or ``"overRotation"`` (every angle scaled by ``1 + epsilon``).
    """

    kind: str = "none"
    positions: tuple[int, ...] = ()
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "pauliZ", "overRotation"):
            raise InvalidSpecError(f"unknown error kind {self.kind!r}")
        object.__setattr__(self, "positions", tuple(self.positions))
        if self.kind == "pauliZ" and not self.positions:
            raise InvalidSpecError("pauliZ error needs at least one position")
        if self.epsilon <= -1:
            raise InvalidSpecError("over-rotation epsilon must exceed -1")

    @classmethod
    def pauli_z(cls, *positions: int) -> "ErrorSpec":
        return cls("pauliZ", positions)

    @classmethod
    def over_rotation(cls, epsilon: float) -> "ErrorSpec":
        return cls("overRotation", (), epsilon)

    def apply(self, schedule: AngleSchedule) -> AngleSchedule:
        angles = list(schedule.angles)
        if self.kind == "pauliZ":
            for k in self.positions:
                if not 0 <= k < len(angles):
                    raise InvalidSpecError(f"error position {k} outside chain of length {len(angles)}")
                angles[k] += math.pi
        elif self.kind == "overRotation":
            angles = [(1.0 + self.epsilon) * a for a in angles]
        return AngleSchedule(tuple(angles))


@dataclass(frozen=True)
class OverheadParams:
    m: int
    d: int
    n_s: float | tuple[float, ...]
    p_n: float
    n_rep: float

    def __post_init__(self):
        if not 0.0 < self.p_n <= 1.0:
            raise InvalidSpecError(f"per-stabilizer pass probability {self.p_n} not in (0, 1]")
        if self.m < 1:
            raise InvalidSpecError("m must be >= 1")
        if self.n_rep < 1.0 - 1e-12:
            raise InvalidSpecError("expected repetitions must be >= 1")
        if not np.isscalar(self.n_s):
            object.__setattr__(self, "n_s", tuple(self.n_s))
            if len(self.n_s) != self.m:
                raise InvalidSpecError("per-stabilizer N_s list must have length m")


def _products(schedule: AngleSchedule) -> tuple[float, float]:
    half = np.asarray(schedule.angles) / 2.0
    return float(np.prod(np.cos(half))), float(np.prod(np.sin(half)))


def success_probability(schedule) -> float:
    """Probability that a chain of rotations passes post-selection."""
    cos_prod, sin_prod = _products(_as_schedule(schedule))
    return sin_prod**2 + cos_prod**2


def chain_angle(schedule, sign: int = 1) -> float:
    """Logical angle contributed by one chain, ``sign * 2 asin(prod sin / sqrt(P_c))``."""
    schedule = _as_schedule(schedule)
    p = success_probability(schedule)
    if p < _ZERO_P:
        raise ZeroAcceptanceError(f"schedule {schedule.angles} never passes post-selection")
    cos_prod, sin_prod = _products(schedule)
    # Same value as the arcsin form, but well conditioned near |ratio| = 1.
    return sign * 2.0 * math.atan2(sin_prod, abs(cos_prod))


def exact_chain_angle(schedule, sign: int = 1) -> float:
    """Angle of the post-selected state itself, wrapped into (-pi, pi].

    Equals :func:`chain_angle` whenever ``prod cos(t_j/2) > 0``.  When the
    cosine product is negative (a Z error inside the chain, say) the
    arcsin form loses the sign that the state actually carries.
    """
    schedule = _as_schedule(schedule)
    cos_prod, sin_prod = _products(schedule)
    if cos_prod**2 + sin_prod**2 < _ZERO_P:
        raise ZeroAcceptanceError(f"schedule {schedule.angles} never passes post-selection")
    angle = 2.0 * math.atan2(sin_prod, cos_prod)
    if angle > math.pi:
        angle -= 2.0 * math.pi
    elif angle <= -math.pi:
        angle += 2.0 * math.pi
    return sign * angle


def chain_angle_with_error(
    schedule, error: ErrorSpec, sign: int = 1, *, exact: bool = False
) -> tuple[float, float]:
    """Chain angle and acceptance probability with ``error`` applied.

    Returns ``(theta_c_e, P_c_e)`` where the normalization uses the erroneous
    branch's own acceptance probability.  With ``exact=True`` the angle is the
    true angle of the post-selected state (see :func:`exact_chain_angle`).
    """
    modified = error.apply(_as_schedule(schedule))
    p = success_probability(modified)
    if p < _ZERO_P:
        raise ZeroAcceptanceError("the erroneous branch can never pass post-selection")
    angle = exact_chain_angle(modified, sign) if exact else chain_angle(modified, sign)
    return angle, p


def error_sign(error: ErrorSpec) -> int:
    """Sign flip a Pauli-Z error imprints on a chain with angles in ``(0, pi)``.

    Each Z error trades one ``cos`` factor for ``-sin``, making the cosine
    product negative once per error.
    """
    if error.kind != "pauliZ":
        return 1
    return -1 if len(error.positions) % 2 else 1


def chain_result(
    schedule, sign: int = 1, error: ErrorSpec | None = None, *, arcsin: bool = False
) -> ChainResult:
    """Outcome of one chain, optionally with ``error`` applied.

    By default the erroneous angle is the one the post-selected state really
    carries.  ``arcsin=True`` instead keeps the clean chain's direction and
    takes the magnitude from the arcsin form.
    """
    schedule = _as_schedule(schedule)
    if error is None or error.kind == "none":
        return ChainResult(success_probability(schedule), chain_angle(schedule), sign)
    if arcsin:
        angle, p = chain_angle_with_error(schedule, error)
        angle = math.copysign(abs(angle), chain_angle(schedule))
    else:
        angle, p = chain_angle_with_error(schedule, error, exact=True)
    return ChainResult(p, angle, sign)


def compose_logical_angle(results: Sequence[ChainResult]) -> float:
    if not results:
        raise InvalidSpecError("nothing to compose")
    return float(sum(r.signed_angle for r in results))


def total_success_probability(results: Iterable[ChainResult]) -> float:
    return float(np.prod([r.success_probability for r in results]))


def solve_physical_angle(target: float, length: int, *, xtol: float = 1e-12, maxiter: int = 200) -> float:
    """Uniform physical angle in [0, pi) whose chain angle equals ``target``."""
    if not 0.0 <= target < math.pi:
        raise InvalidSpecError(f"target chain angle {target} outside [0, pi)")
    if target == 0.0:
        return 0.0

    def residual(theta_p: float) -> float:
        return chain_angle(AngleSchedule.uniform(theta_p, length)) - target

    try:
        root, info = optimize.bisect(
            residual, 0.0, math.pi, xtol=xtol, rtol=4 * np.finfo(float).eps,
            maxiter=maxiter, full_output=True, disp=False,
        )
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(f"bisection did not converge after {info.iterations} iterations")
    return float(root)


def infidelity_single(theta_c: float, theta_c_e: float) -> float:
    """``1 - |<psi_e|psi>|^2`` for two Z-rotated |+> states, ``sin^2(delta/2)``."""
    return math.sin((theta_c - theta_c_e) / 2.0) ** 2


def infidelity_multiple(n: int, n_e: int, theta_c: float, theta_c_e: float) -> float:
    """Infidelity when ``n_e`` of ``n`` identical chains carry the erroneous angle.

    The erroneous total angle is ``(n - n_e) theta_c + n_e theta_c_e``, so the
    angle gap is ``n_e (theta_c - theta_c_e)``.
    """
    if not 0 <= n_e <= n:
        raise InvalidSpecError(f"n_e={n_e} must lie in [0, n={n}]")
    return math.sin(n_e * (theta_c - theta_c_e) / 2.0) ** 2


def logical_fidelity(theta_a: float, theta_b: float) -> float:
    return math.cos((theta_a - theta_b) / 2.0) ** 2


def single_qubit_fidelity(theta_a: float, theta_b: float) -> float:
    """``|<+|R_z(theta_a)^dag R_z(theta_b)|+>|^2`` from two explicit one-qubit states."""

    def state(theta):
        return np.array([np.exp(0.5j * theta), np.exp(-0.5j * theta)]) / math.sqrt(2.0)

    return float(abs(np.vdot(state(theta_a), state(theta_b))) ** 2)


def overhead(params: OverheadParams) -> float:
    """Space-time overhead ``sum_i i (d-1) N_s N P_n^i (1-P_n)^(m-i)``."""
    m, p = params.m, params.p_n
    i = np.arange(1, m + 1, dtype=float)
    n_s = np.full(m, float(params.n_s)) if np.isscalar(params.n_s) else np.asarray(params.n_s, float)
    terms = i * (params.d - 1) * n_s * params.n_rep * p**i * (1.0 - p) ** (m - i)
    return float(terms.sum())


def default_overhead_params(d: int, p_t: float, n_s: float | Sequence[float] = 4.0) -> OverheadParams:
    """Default parameterization: ``m = d^2 - 1``, ``P_n = P_t^(1/m)``, ``N = 1/P_t``."""
    if not 0.0 < p_t <= 1.0:
        raise InvalidSpecError(f"total pass probability {p_t} not in (0, 1]")
    m = d * d - 1
    if not np.isscalar(n_s):
        n_s = tuple(n_s)
        m = len(n_s)
    return OverheadParams(m=m, d=d, n_s=n_s, p_n=p_t ** (1.0 / m), n_rep=1.0 / p_t)


def scheme_overhead(theta_l: float, d: int, n_chains: int) -> tuple[float, float]:
    """Return ``(P_t, R_o)`` for ``n_chains`` identical chains hitting ``theta_l``."""
    theta_p = solve_physical_angle(abs(theta_l) / n_chains, d)
    p_t = success_probability(AngleSchedule.uniform(theta_p, d)) ** n_chains
    return p_t, overhead(default_overhead_params(d, p_t))


def even_d_coefficients(theta_c: float, d: int) -> tuple[float, float]:
    """Real coefficients on (|+>_L, |->_L) for an even-length chain."""
    if d % 2:
        raise InvalidSpecError("odd d yields a plain logical Z rotation; use chain_angle")
    return math.cos(theta_c / 2.0), (-1) ** (d // 2) * math.sin(theta_c / 2.0)


def brute_force_chain(angles: Sequence[float]) -> tuple[complex, complex]:
    """Identity and full-Z coefficients of ``prod_j R_z(t_j)`` by explicit expansion.

    Builds the ``2^L x 2^L`` operator with Kronecker products and reads the
    two coefficients off as normalized traces.  Intended as an oracle for the
    closed forms above, so it shares no code with them.
    """
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    op = np.ones((1, 1), dtype=complex)
    zz = np.ones((1, 1), dtype=complex)
    for t in angles:
        op = np.kron(op, math.cos(t / 2) * eye + 1j * math.sin(t / 2) * z)
        zz = np.kron(zz, z)
    dim = op.shape[0]
    return complex(np.trace(op) / dim), complex(np.trace(zz @ op) / dim)
