"""Figure-reproduction sweeps and simulation grids producing CSV rows."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from . import analytics
from .analytics import AngleSchedule, ErrorSpec
from .errors import ConfigError, InvalidSpecError, ZeroAcceptanceError
from .lattice import LatticeSpec, build_lattice, max_chains
from .noise import Insertion, NoiseSpec
from .protocol import (
    build_plan,
    derive_seed,
    expected_angle,
    plan_from_angles,
    prepare_plus_L,
    run_protocol,
)

CSV_COLUMNS = (
    "experiment", "d", "n_chains", "theta_L", "theta_p", "n_e", "error_kind", "epsilon",
    "infidelity", "P_t", "overhead", "method", "seed",
)
AUX_COLUMNS = ("infidelity_signed", "error_weight", "accepted", "shots", "status")
HEADER = CSV_COLUMNS + AUX_COLUMNS

EXPERIMENTS = ("fig2a", "fig2b", "fig3", "fig4", "custom")
ODD_DISTANCES = tuple(range(3, 16, 2))
FIG2_THETA = 2 * math.pi * 1e-2
FIG4_THETA = 2 * math.pi * 1e-3
THETA_GRID = tuple(2 * math.pi * 10.0 ** e for e in np.linspace(-3, -1, 9))
FIG3_EPSILON = 0.2


@dataclass(frozen=True)
class SweepConfig:
    experiment: str = "fig2a"
    distances: tuple[int, ...] = ()
    theta_l_values: tuple[float, ...] = ()
    n_chains_rule: str | tuple[int, ...] = "max"
    error_kind: str = "pauliZ"
    epsilon: float = FIG3_EPSILON
    n_errors: int = 1
    shots: int = 1000
    seed: int = 0
    output_path: str | None = None
    mode: str = "exact"
    lattices: tuple[str, ...] = ()
    rows: tuple[int, ...] = ()
    theta_p: float | None = None
    z_errors: tuple[int, ...] = ()
    noise_p: float = 0.0
    jobs: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.mode not in ("exact", "sampled", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.error_kind not in ("none", "pauliZ", "overRotation"):
            raise ConfigError(f"unknown error kind {self.error_kind!r}")
        if any(d < 3 for d in self.distances):
            raise ConfigError("distances must be >= 3")


@dataclass(frozen=True)
class Point:
    experiment: str
    d: int
    theta_l: float
    n_chains: int
    n_e: int
    error_kind: str
    epsilon: float
    seed: int


def empty_row(**values) -> dict:
    row = {k: "" for k in HEADER}
    row.update(values)
    return row


def analytic_row(p: Point) -> dict:
    """One analytic sweep point.

    ``infidelity`` follows the arcsin convention (erroneous chain angle from the
    arcsin form); ``infidelity_signed`` uses the angle the post-selected
    state really carries, which flips sign under a Pauli-Z error.
    """
    row = empty_row(
        experiment=p.experiment, d=p.d, n_chains=p.n_chains, theta_L=p.theta_l, n_e=p.n_e,
        error_kind=p.error_kind, epsilon=p.epsilon if p.error_kind == "overRotation" else 0.0,
        method="analytic", seed=p.seed, status="ok",
    )
    per_chain = abs(p.theta_l) / p.n_chains
    if per_chain >= math.pi:
        row["status"] = "error: unreachable target angle"
        return row
    if p.n_e > p.n_chains:
        row["status"] = "error: more errored chains than chains"
        return row
    theta_p = analytics.solve_physical_angle(per_chain, p.d)
    schedule = AngleSchedule.uniform(theta_p, p.d)
    p_c = analytics.success_probability(schedule)
    theta_c = analytics.chain_angle(schedule)
    p_t = p_c**p.n_chains
    row.update(theta_p=theta_p, P_t=p_t, overhead=analytics.overhead(analytics.default_overhead_params(p.d, p_t)))

    if p.error_kind == "none" or p.n_e == 0:
        row.update(infidelity=0.0, infidelity_signed=0.0, error_weight=1.0)
        return row
    error = ErrorSpec.pauli_z(0) if p.error_kind == "pauliZ" else ErrorSpec.over_rotation(p.epsilon)
    try:
        theta_e, p_e = analytics.chain_angle_with_error(schedule, error)
        theta_e_exact, _ = analytics.chain_angle_with_error(schedule, error, exact=True)
    except ZeroAcceptanceError:
        row["status"] = "error: errored branch never passes"
        return row
    if p.n_chains == 1:
        infid = analytics.infidelity_single(theta_c, theta_e)
        signed = analytics.infidelity_single(theta_c, theta_e_exact)
    else:
        infid = analytics.infidelity_multiple(p.n_chains, p.n_e, theta_c, theta_e)
        signed = analytics.infidelity_multiple(p.n_chains, p.n_e, theta_c, theta_e_exact)
    row.update(infidelity=infid, infidelity_signed=signed, error_weight=(p_e / p_c) ** p.n_e)
    return row


def _n_chains(rule, d: int) -> list[int]:
    if rule == "max":
        return [(d + 1) // 2]
    return [int(n) for n in rule]


def analytic_points(config: SweepConfig) -> list[Point]:
    exp = config.experiment
    seed = config.seed
    points: list[Point] = []
    if exp in ("fig2a", "fig4"):
        distances = config.distances or ODD_DISTANCES
        thetas = config.theta_l_values or ((FIG2_THETA,) if exp == "fig2a" else (FIG4_THETA,))
        for d in distances:
            for t in thetas:
                m = max_chains(d)
                points.append(Point(exp, d, t, 1, 1, "pauliZ", 0.0, seed))
                points.append(Point(exp, d, t, m, 1, "pauliZ", 0.0, seed))
                if exp == "fig2a" and d >= 9:
                    points.append(Point(exp, d, t, m, 2, "pauliZ", 0.0, seed))
    elif exp in ("fig2b", "fig3"):
        if exp == "fig2b" and not config.distances:
            raise ConfigError("fig2b needs an explicit distance (--distances)")
        distances = config.distances or (3, 5, 7)
        thetas = config.theta_l_values or THETA_GRID
        kind = "pauliZ" if exp == "fig2b" else "overRotation"
        eps = config.epsilon if exp == "fig3" else 0.0
        for d in distances:
            for t in thetas:
                points.append(Point(exp, d, t, 1, 1, kind, eps, seed))
                points.append(Point(exp, d, t, max_chains(d), 1, kind, eps, seed))
    else:
        if not config.distances or not config.theta_l_values:
            raise ConfigError("custom sweeps need distances and theta-l values")
        for d in config.distances:
            for t in config.theta_l_values:
                for n in _n_chains(config.n_chains_rule, d):
                    points.append(Point(exp, d, t, n, min(config.n_errors, n), config.error_kind, config.epsilon, seed))
    return points


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def cmd_analytic_sweep(config: SweepConfig) -> list[dict]:
    """Rows for every point of the experiment grid, in grid order."""
    return _map(analytic_row, analytic_points(config), config.jobs)


def overhead_gap(theta_l: float, d: int) -> float:
    """Single minus multiple (n = (d+1)/2) overhead at equal distance."""
    return analytics.scheme_overhead(theta_l, d, 1)[1] - analytics.scheme_overhead(theta_l, d, max_chains(d))[1]


def break_even_angles(d: int, lo: float = math.pi / 1000, hi: float = math.pi / 2, points: int = 400) -> list[float]:
    """Every theta_L in ``[lo, hi]`` where the two schemes' overhead curves cross."""
    grid = np.geomspace(lo, hi, points)
    gaps = [overhead_gap(t, d) for t in grid]
    roots = []
    for a, b, ga, gb in zip(grid, grid[1:], gaps, gaps[1:]):
        if ga == 0.0:
            roots.append(float(a))
        elif ga * gb < 0:
            roots.append(float(optimize.brentq(overhead_gap, a, b, args=(d,), xtol=1e-12)))
    return roots


# simulation


@dataclass(frozen=True)
class SimPoint:
    lattice: str
    rows: tuple[int, ...]
    theta_l: float | None
    theta_p: float | None
    z_errors: tuple[int, ...]
    noise_p: float
    epsilon: float
    mode: str
    shots: int
    seed: int
    index: int


def _sim_noise(pt: SimPoint) -> NoiseSpec:
    ins = tuple(Insertion("before_injection", "Z", q) for q in pt.z_errors)
    base = NoiseSpec.depolarizing(pt.noise_p) if pt.noise_p else NoiseSpec()
    return replace(base, insertions=ins, over_rotation_epsilon=pt.epsilon)


def _chain_errors(lattice, plan, z_errors) -> dict[int, ErrorSpec]:
    errors: dict[int, list[int]] = {}
    for q in z_errors:
        row = (q - 1) // lattice.cols + 1
        if row not in plan.rows:
            raise InvalidSpecError(f"qubit {q} is not on an injected chain; no closed form applies")
        errors.setdefault(row, []).append((q - 1) % lattice.cols)
    return {r: ErrorSpec.pauli_z(*pos) for r, pos in errors.items()}


def simulate_point(pt: SimPoint) -> tuple[list[dict], list[str]]:
    """Simulated rows (plus an analytic companion row) and the run log lines."""
    spec = LatticeSpec.parse(pt.lattice)
    lattice = build_lattice(spec)
    rows = pt.rows or tuple(range(1, lattice.rows + 1, 2))
    seed = derive_seed(pt.seed, pt.index)
    _, ref = prepare_plus_L(lattice, rng=np.random.default_rng(seed))
    if pt.theta_p is not None:
        theta_p = pt.theta_p
        chain_theta = analytics.chain_angle(AngleSchedule.uniform(theta_p, lattice.cols))
        target = len(rows) * chain_theta
    else:
        target = pt.theta_l
    if pt.theta_p is not None:
        plan = replace(plan_from_angles(lattice, rows, theta_p), target_angle=target).retarget(ref)
    else:
        plan = build_plan(lattice, ref, rows, target)
        theta_p = plan.schedules[0].angles[0]
    noise = _sim_noise(pt)
    n_e = len(pt.z_errors)
    kind = "pauliZ" if n_e else ("overRotation" if pt.epsilon else "none")
    if pt.noise_p:
        kind = "depolarizing"
    common = dict(
        experiment="simulate", d=pt.lattice, n_chains=len(rows), theta_L=target, theta_p=theta_p,
        n_e=n_e, error_kind=kind, epsilon=pt.epsilon, seed=seed,
    )
    out: list[dict] = []
    log: list[str] = []

    if n_e and not pt.noise_p and not pt.epsilon:
        try:
            errors = _chain_errors(lattice, plan, pt.z_errors)
            arcsin_angle = expected_angle(plan, ref, errors, arcsin=True)
            signed = expected_angle(plan, ref, errors)
            p_t = analytics.total_success_probability(
                analytics.chain_result(sched, 1, errors.get(ch.row))
                for ch, sched in zip(plan.chain_set, plan.applied_schedules())
            )
            out.append(empty_row(
                **common, method="analytic", status="ok", P_t=p_t,
                infidelity=1.0 - analytics.logical_fidelity(arcsin_angle, target),
                infidelity_signed=1.0 - analytics.logical_fidelity(signed, target),
            ))
        except (InvalidSpecError, ZeroAcceptanceError) as exc:
            out.append(empty_row(**common, method="analytic", status=f"error: {exc}"))

    if pt.mode in ("exact", "both"):
        rec = run_protocol(lattice, plan, noise, "exact", seed=seed)
        log.append(rec.to_line())
        row = empty_row(**common, method="sim", accepted="", shots=1, status="ok",
                        P_t=rec.acceptance_probability)
        if rec.acceptance_probability:
            row["overhead"] = analytics.overhead(analytics.default_overhead_params(
                lattice.cols, min(1.0, rec.acceptance_probability)))
        if rec.accepted and rec.logical_angle is not None and math.isfinite(rec.logical_angle):
            infid = 1.0 - analytics.logical_fidelity(rec.logical_angle, target)
            row.update(infidelity=infid, infidelity_signed=infid)
        elif rec.accepted:
            row["status"] = "accepted state outside logical span"
        else:
            row["status"] = "rejected"
        out.append(row)

    if pt.mode in ("sampled", "both"):
        accepted = 0
        infids = []
        for k in range(pt.shots):
            rec = run_protocol(lattice, plan, noise, "sampled", seed=derive_seed(seed, k))
            log.append(rec.to_line())
            if rec.accepted:
                accepted += 1
                if rec.logical_angle is not None and math.isfinite(rec.logical_angle):
                    infids.append(1.0 - analytics.logical_fidelity(rec.logical_angle, target))
        p_t = accepted / pt.shots
        row = empty_row(**common, method="sim", accepted=accepted, shots=pt.shots, P_t=p_t, status="ok")
        if infids:
            row.update(infidelity=float(np.mean(infids)), infidelity_signed=float(np.mean(infids)))
        if p_t > 0:
            row["overhead"] = analytics.overhead(analytics.default_overhead_params(lattice.cols, p_t))
        out.append(row)
    return out, log


def sim_points(config: SweepConfig) -> list[SimPoint]:
    lattices = config.lattices or tuple(str(d) for d in (config.distances or (3,)))
    for text in lattices:
        spec = LatticeSpec.parse(text)
        if spec.rows * spec.cols + 1 > 26:
            raise ConfigError(f"lattice {text} exceeds the 26-qubit engine limit")
    if config.theta_p is not None:
        angles: Sequence[tuple[float | None, float | None]] = [(None, config.theta_p)]
    else:
        angles = [(t, None) for t in (config.theta_l_values or (FIG2_THETA,))]
    eps = config.epsilon if config.error_kind == "overRotation" else 0.0
    points = []
    for lat in lattices:
        for theta_l, theta_p in angles:
            points.append(SimPoint(
                lat, tuple(config.rows), theta_l, theta_p, tuple(config.z_errors), config.noise_p,
                eps, config.mode, config.shots, config.seed, len(points),
            ))
    return points


def cmd_simulate(config: SweepConfig) -> tuple[list[dict], list[str]]:
    results = _map(simulate_point, sim_points(config), config.jobs)
    rows, log = [], []
    for r, l in results:
        rows.extend(r)
        log.extend(l)
    return rows, log


# CSV


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([_fmt(row.get(k, "")) for k in HEADER])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
