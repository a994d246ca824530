import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaininject import analytics
from chaininject.analytics import AngleSchedule, ErrorSpec
from chaininject.errors import InvalidSpecError, ModeMismatchError
from chaininject.lattice import build_lattice
from chaininject.noise import Insertion, NoiseSpec
from chaininject.protocol import (
    RunRecord,
    Trajectory,
    adjacent_sign,
    build_plan,
    chain_equivalent_z,
    chain_sign,
    derive_seed,
    estimate_overhead_mc,
    expected_angle,
    logical_coefficients,
    plan_from_angles,
    prepare_plus_L,
    run_protocol,
)

THETA_C = analytics.chain_angle(AngleSchedule.uniform(math.pi / 3, 3))


def prep_trajectories():
    """All 16 outcomes of the 3x3 preparation: X checks 2 and 3 are random."""
    for a, b in itertools.product((0, 1), repeat=2):
        for z6, z7 in itertools.product((0, 1), repeat=2):
            yield Trajectory.from_bits(f"0{a}{b}00{z6}{z7}0")


def test_mixed_preparation_pattern(lattice3):
    state, traj = prepare_plus_L(lattice3, "mixed", trajectory=Trajectory.from_bits("00000110"))
    assert traj.pattern == "0MM00MM0"
    assert traj.probability == pytest.approx(1 / 16)
    for stab, v in zip(lattice3.stabilizers, traj.values):
        assert state.expectation(stab.kind, stab.indices) == pytest.approx(1 - 2 * v)


def test_mixed_mode_needs_3x3():
    with pytest.raises(ModeMismatchError):
        prepare_plus_L(build_lattice((3, 5)), "mixed", rng=np.random.default_rng(0))


@pytest.mark.parametrize("traj", list(prep_trajectories()), ids=lambda t: t.bits)
@pytest.mark.parametrize("rows", [(1,), (2,), (3,), (1, 3)])
def test_sign_rule_all_trajectories(lattice3, traj, rows):
    plan = plan_from_angles(lattice3, rows, math.pi / 3, trajectory=traj)
    rec = run_protocol(lattice3, plan, mode="exact")
    want = sum(chain_sign(traj, c) for c in plan.chain_set) * THETA_C
    assert rec.accepted
    assert rec.logical_angle == pytest.approx(want, abs=1e-9)
    assert rec.acceptance_probability == pytest.approx(
        analytics.success_probability(AngleSchedule.uniform(math.pi / 3, 3)) ** len(rows), abs=1e-12
    )


@pytest.mark.parametrize("traj", list(prep_trajectories()), ids=lambda t: t.bits)
def test_middle_row_sign_is_trajectory_independent(lattice3, traj):
    # the middle row touches Z checks on both sides; its sign never depends on them
    middle = lattice3.z_chains[1]
    assert chain_sign(traj, middle) == 1
    plan = plan_from_angles(lattice3, (2,), 0.9, trajectory=traj)
    assert run_protocol(lattice3, plan, mode="exact").logical_angle > 0


@pytest.mark.parametrize("traj", list(prep_trajectories()), ids=lambda t: t.bits)
def test_adjacent_rule_on_boundary_rows(lattice3, traj):
    for chain in (lattice3.z_chains[0], lattice3.z_chains[2]):
        assert adjacent_sign(traj, chain) == chain_sign(traj, chain)


@pytest.mark.parametrize("shape", [(3, 5), (5, 3), (5, 4)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sign_rule_generic_lattices(shape, seed):
    lat = build_lattice(shape)
    _, traj = prepare_plus_L(lat, rng=np.random.default_rng(seed))
    for rows in ([r] for r in range(1, lat.rows + 1)):
        plan = plan_from_angles(lat, rows, 0.8, trajectory=traj)
        rec = run_protocol(lat, plan, mode="exact")
        theta = analytics.chain_angle(AngleSchedule.uniform(0.8, lat.cols))
        assert rec.logical_angle == pytest.approx(chain_sign(traj, plan.chain_set.chains[0]) * theta, abs=1e-9)


def test_worked_example(worked):
    lattice, plan, traj = worked
    assert [chain_sign(traj, c) for c in plan.chain_set] == [-1, -1]
    rec = run_protocol(lattice, plan, mode="exact")
    assert rec.acceptance_probability == pytest.approx(0.4375**2, abs=1e-12)
    assert rec.logical_angle == pytest.approx(-2 * THETA_C, abs=1e-9)
    assert rec.verify_trajectory.bits == "00000110"


@given(st.floats(-2.5, 2.5).filter(lambda t: abs(t) > 1e-3), st.sampled_from(list(prep_trajectories())))
@settings(max_examples=40, deadline=None)
def test_adaptive_plan_hits_target(target, traj):
    lat = build_lattice((3, 3))
    plan = build_plan(lat, traj, (1, 3), target)
    rec = run_protocol(lat, plan, mode="exact")
    assert rec.logical_angle == pytest.approx(target, abs=1e-9)


@pytest.mark.parametrize("q", range(1, 10))
@pytest.mark.parametrize("pauli", "XY")
def test_x_and_y_always_detected(worked, q, pauli):
    lattice, plan, _ = worked
    noise = NoiseSpec(insertions=(Insertion("before_injection", pauli, q),))
    rec = run_protocol(lattice, plan, noise, "exact")
    assert rec.acceptance_probability == 0.0 and not rec.accepted


@pytest.mark.parametrize("q", [1, 2, 3, 7, 8, 9])
def test_z_on_chain_matches_composition(worked, q):
    lattice, plan, traj = worked
    row, pos = (q - 1) // 3 + 1, (q - 1) % 3
    rec = run_protocol(lattice, plan, NoiseSpec.z_errors(q), "exact")
    err = ErrorSpec.pauli_z(pos)
    assert rec.logical_angle == pytest.approx(expected_angle(plan, traj, {row: err}), abs=1e-9)
    _, p_e = analytics.chain_angle_with_error(AngleSchedule.uniform(math.pi / 3, 3), err)
    assert rec.acceptance_probability == pytest.approx(p_e * 0.4375, abs=1e-12)


@pytest.mark.parametrize("q,weight", [(4, 1), (6, 1), (5, 3)])
def test_z_off_chain_equals_stabilizer_moved_error(worked, q, weight):
    # Z4 = Z1 (Z1 Z4) and Z5 = Z2 Z3 Z9 (Z2 Z3 Z5 Z6)(Z6 Z9): not detectable
    lattice, plan, _ = worked
    moved = chain_equivalent_z(lattice, plan.rows, [q])
    assert len(moved) == weight
    assert all((m - 1) // 3 + 1 in plan.rows for m in moved)
    a = run_protocol(lattice, plan, NoiseSpec.z_errors(q), "exact", keep_state=True)
    b = run_protocol(lattice, plan, NoiseSpec.z_errors(*moved), "exact", keep_state=True)
    assert a.acceptance_probability > 0
    assert a.acceptance_probability == pytest.approx(b.acceptance_probability, abs=1e-12)
    assert abs(a.state.inner(b.state)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("q", [4, 5, 6])
def test_z_off_chain_after_first_cycle_is_caught(worked, q):
    lattice, plan, _ = worked
    rec = run_protocol(lattice, plan, NoiseSpec.z_errors(q, location="after_cycle1"), "exact")
    assert rec.acceptance_probability == 0.0


def test_chain_equivalent_z_none_when_unreachable():
    lat = build_lattice((5, 3))
    # row 3 is two checks away from row 1, but Z on row 5 can only move to rows 4 and 5
    assert chain_equivalent_z(lat, (1,), [13]) is None
    assert chain_equivalent_z(lat, (1, 3), [4]) in {(1,), (7,)}


def test_even_length_chain_coefficients():
    lat = build_lattice((4, 4))
    _, traj = prepare_plus_L(lat, rng=np.random.default_rng(1))
    plan = plan_from_angles(lat, (1,), 0.7, trajectory=traj)
    rec = run_protocol(lat, plan, mode="exact", keep_state=True)
    a, b, residual = logical_coefficients(rec.state, lat, traj)
    phase = a / abs(a)
    # the logical |-> used internally carries a factor i^(cols-1) relative to Z_L|+>
    b_plain = b / phase * 1j ** (lat.cols - 1)
    theta_c = analytics.chain_angle(AngleSchedule.uniform(0.7, 4))
    ca, cb = analytics.even_d_coefficients(theta_c, 4)
    sign = chain_sign(traj, plan.chain_set.chains[0])
    assert residual < 1e-10
    assert (a / phase).real == pytest.approx(ca, abs=1e-12)
    assert b_plain.real == pytest.approx(sign * cb, abs=1e-12)


def test_record_round_trip(worked):
    lattice, plan, _ = worked
    for noise in (None, NoiseSpec.z_errors(4, location="after_cycle1")):
        rec = run_protocol(lattice, plan, noise, "exact", seed=11)
        back = RunRecord.from_line(rec.to_line())
        assert back.to_line() == rec.to_line()
        assert back.accepted == rec.accepted


def test_rejected_run_counts(worked):
    lattice, plan, _ = worked
    rec = run_protocol(lattice, plan, NoiseSpec.z_errors(5, location="after_cycle1"), "exact")
    # cycle 1 passes (8 checks), cycle 2 aborts at the first X check touching qubit 5
    assert rec.stabilizer_measurements_consumed == 8 + 2
    assert rec.qubit_time_cost == 10 * 9
    assert rec.weighted_cost == 24 + 2 + 4


def test_sampled_runs_are_reproducible(worked):
    lattice, plan, _ = worked
    plan = build_plan(lattice, plan.trajectory, (1, 3), 0.5)
    a = [run_protocol(lattice, plan, mode="sampled", seed=derive_seed(7, k)).to_line() for k in range(20)]
    b = [run_protocol(lattice, plan, mode="sampled", seed=derive_seed(7, k)).to_line() for k in range(20)]
    assert a == b


def test_sampled_accepted_runs_hit_target(worked):
    lattice, plan, _ = worked
    plan = build_plan(lattice, plan.trajectory, (1, 3), 0.5)
    for k in range(60):
        rec = run_protocol(lattice, plan, mode="sampled", seed=derive_seed(3, k))
        if rec.accepted:
            assert rec.logical_angle == pytest.approx(0.5, abs=1e-9)


def test_derive_seed():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert len({derive_seed(1, k) for k in range(100)}) == 100
    assert derive_seed(1, 0) != derive_seed(2, 0)


def test_exact_mode_needs_trajectory(lattice3):
    plan = plan_from_angles(lattice3, (1,), 0.3)
    with pytest.raises(InvalidSpecError):
        run_protocol(lattice3, plan, mode="exact")


def test_overhead_estimate_fields(worked):
    lattice, plan, _ = worked
    plan = build_plan(lattice, plan.trajectory, (1, 3), 0.5)
    est = estimate_overhead_mc(lattice, plan, shots=50, seed=1)
    assert est.mean_repetitions >= 1
    assert est.mean_qubit_time == pytest.approx(9 * est.mean_measurements)
    assert est.mean_measurements >= 16


@pytest.mark.parametrize("traj", list(prep_trajectories()), ids=lambda t: t.bits)
@pytest.mark.parametrize("target", [0.6, -0.6])
def test_z_error_on_sign_corrected_chain(lattice3, traj, target):
    # negated schedules keep a positive cosine product under a Z error
    plan = build_plan(lattice3, traj, (1, 3), target)
    for q, row, pos in ((1, 1, 0), (8, 3, 1)):
        rec = run_protocol(lattice3, plan, NoiseSpec.z_errors(q), "exact")
        want = expected_angle(plan, traj, {row: ErrorSpec.pauli_z(pos)})
        assert rec.logical_angle == pytest.approx(want, abs=1e-9)


def test_xor_of_all_intersecting_checks_mispredicts_middle_row(lattice3):
    middle = lattice3.z_chains[1]
    wrong = [t for t in prep_trajectories() if adjacent_sign(t, middle) == -1]
    assert wrong
    for traj in wrong:
        plan = plan_from_angles(lattice3, (2,), 0.9, trajectory=traj)
        assert run_protocol(lattice3, plan, mode="exact").logical_angle > 0
