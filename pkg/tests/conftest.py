import math
from pathlib import Path

import pytest

from chaininject.lattice import build_lattice
from chaininject.protocol import Trajectory, plan_from_angles

DATA = Path(__file__).parent / "data"


@pytest.fixture
def lattice3():
    return build_lattice((3, 3))


@pytest.fixture
def worked(lattice3):
    """3x3 lattice, reference trajectory 00000110, rows {1,3} at pi/3."""
    traj = Trajectory.from_bits("00000110")
    plan = plan_from_angles(lattice3, (1, 3), math.pi / 3, trajectory=traj)
    return lattice3, plan, traj


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
