"""Self-check suite cross-validating the closed forms against the engine.

Every check looks up the analytic functions through the module at call time,
so patching one of them makes the corresponding check fail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analytics
from .analytics import AngleSchedule, ErrorSpec
from .lattice import build_lattice
from .noise import Insertion, NoiseSpec
from .protocol import (
    Trajectory,
    chain_equivalent_z,
    derive_seed,
    estimate_overhead_mc,
    expected_angle,
    plan_from_angles,
    prepare_plus_L,
    run_protocol,
)

WORKED_TRAJECTORY = "00000110"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _worked_plan(rows=(1, 3), theta_p=math.pi / 3):
    lattice = build_lattice((3, 3))
    traj = Trajectory.from_bits(WORKED_TRAJECTORY)
    return lattice, plan_from_angles(lattice, rows, theta_p, trajectory=traj), traj


def check_bruteforce(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(40):
        angles = rng.uniform(-math.pi, math.pi, size=int(rng.integers(1, 6)))
        c_i, c_z = analytics.brute_force_chain(angles)
        p_ref = abs(c_i) ** 2 + abs(c_z) ** 2
        worst = max(worst, abs(analytics.success_probability(angles) - p_ref))
        theta = analytics.chain_angle(angles)
        worst = max(worst, abs(abs(theta) - 2 * math.atan2(abs(c_z), abs(c_i))))
    return CheckResult("closed form vs Kronecker expansion", worst < 1e-10, f"max deviation {worst:.2e}")


def check_length_reduction(seed: int) -> CheckResult:
    worst = 0.0
    for d in range(3, 16, 2):
        for theta_p in np.linspace(0.05, 1.5, 7):
            want = 2 * math.atan(math.tan(theta_p / 2) ** d)
            worst = max(worst, abs(analytics.chain_angle(AngleSchedule.uniform(theta_p, d)) - want))
    return CheckResult("uniform chain reduces to tan^d", worst < 1e-12, f"max deviation {worst:.2e}")


def check_error_identity(seed: int) -> CheckResult:
    """One Z error on a length-d chain acts like a clean chain of length d-2."""
    worst = 0.0
    for d in (3, 5, 7, 9):
        for theta_p in np.linspace(0.01, 3.1, 200):
            sched = AngleSchedule.uniform(theta_p, d)
            bad, _ = analytics.chain_angle_with_error(sched, ErrorSpec.pauli_z(0))
            short = AngleSchedule.uniform(theta_p, d - 2)
            worst = max(worst, abs(bad - analytics.chain_angle(short)))
    return CheckResult("Z error: theta_c^e(d) = theta_c(d-2), incl. d=3", worst < 1e-12, f"max deviation {worst:.2e}")


def check_single_chain(seed: int) -> CheckResult:
    worst = 0.0
    for theta_p in (math.pi / 2, math.pi / 3, 0.4):
        lattice, plan, _ = _worked_plan((1,), theta_p)
        rec = run_protocol(lattice, plan, mode="exact")
        want = analytics.success_probability(AngleSchedule.uniform(theta_p, 3))
        worst = max(worst, abs(rec.acceptance_probability - want))
        worst = max(worst, abs(rec.logical_angle - expected_angle(plan, plan.trajectory)))
    return CheckResult("engine vs closed form, one chain", worst < 1e-9, f"max deviation {worst:.2e}")


def check_worked_example(seed: int) -> CheckResult:
    lattice, plan, traj = _worked_plan()
    rec = run_protocol(lattice, plan, mode="exact")
    sched = AngleSchedule.uniform(math.pi / 3, 3)
    p_t = analytics.success_probability(sched) ** 2
    want = expected_angle(plan, traj)
    dev = max(abs(rec.acceptance_probability - p_t), abs(rec.logical_angle - want))
    ok = dev < 1e-9 and rec.accepted and rec.residual < 1e-10
    return CheckResult("two-chain worked example", ok, f"angle {rec.logical_angle:.6f} vs {want:.6f}")


def check_chain_errors(seed: int) -> CheckResult:
    lattice, plan, traj = _worked_plan()
    worst = 0.0
    for row in plan.rows:
        for pos, q in enumerate(lattice.row_qubits(row)):
            rec = run_protocol(lattice, plan, NoiseSpec.z_errors(q), "exact")
            want = expected_angle(plan, traj, {row: ErrorSpec.pauli_z(pos)})
            worst = max(worst, abs(rec.logical_angle - want))
    return CheckResult("Z on a chain qubit vs sign-aware composition", worst < 1e-9, f"max deviation {worst:.2e}")


def check_detection(seed: int) -> CheckResult:
    """Single Paulis before injection are rejected or act as a chain Z error."""
    lattice, plan, _ = _worked_plan()
    bad = []
    for q in range(1, lattice.num_data + 1):
        for pauli in "XYZ":
            noise = NoiseSpec(insertions=(Insertion("before_injection", pauli, q),))
            rec = run_protocol(lattice, plan, noise, "exact", keep_state=True, extract=False)
            if rec.acceptance_probability < 1e-12:
                continue
            support = chain_equivalent_z(lattice, plan.rows, [q]) if pauli == "Z" else None
            if support is None:
                bad.append(f"{pauli}{q}")
                continue
            twin = run_protocol(lattice, plan, NoiseSpec.z_errors(*support), "exact", keep_state=True, extract=False)
            overlap = abs(rec.state.inner(twin.state))
            if abs(overlap - 1) > 1e-9 or abs(rec.acceptance_probability - twin.acceptance_probability) > 1e-12:
                bad.append(f"{pauli}{q}")
    return CheckResult("single-Pauli detection up to stabilizers", not bad, "violations: " + (",".join(bad) or "none"))


def check_overhead_mc(seed: int) -> CheckResult:
    lattice, plan, _ = _worked_plan()
    plan = plan.__class__(plan.chain_set, plan.schedules, plan.sign_corrections, 2.0, None)
    est = estimate_overhead_mc(lattice, plan, None, shots=300, seed=derive_seed(seed, 7))
    p_t = analytics.success_probability(AngleSchedule.uniform(math.pi / 3, 3)) ** 2
    z = abs(est.mean_repetitions - 1 / p_t) / max(est.sem_repetitions, 1e-12)
    return CheckResult("restart count vs 1/P_t", z < 4, f"{est.mean_repetitions:.2f} vs {1 / p_t:.2f} ({z:.1f} sigma)")


def check_sampled_prep(seed: int) -> CheckResult:
    lattice = build_lattice((3, 3))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        state, traj = prepare_plus_L(lattice, rng=rng)
        for stab, v in zip(lattice.stabilizers, traj.values):
            worst = max(worst, abs(state.expectation(stab.kind, stab.indices) - (1 - 2 * v)))
    return CheckResult("prepared state in the recorded stabilizer frame", worst < 1e-10, f"max deviation {worst:.2e}")


CHECKS: tuple[Callable[[int], CheckResult], ...] = (
    check_bruteforce,
    check_length_reduction,
    check_error_identity,
    check_single_chain,
    check_worked_example,
    check_chain_errors,
    check_detection,
    check_sampled_prep,
    check_overhead_mc,
)


def run_checks(seed: int = 0) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            results.append(check(seed))
        except Exception as exc:  # a crashing check is a failing check
            results.append(CheckResult(check.__name__, False, f"{type(exc).__name__}: {exc}"))
    return results
