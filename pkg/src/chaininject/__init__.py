"""Multi-chain Z-rotation injection on rotated surface codes with post-selection.

Modules: :mod:`lattice` (geometry), :mod:`analytics` (closed forms),
:mod:`engine` (statevector simulator), :mod:`protocol` (runs), and
:mod:`sweeps`/:mod:`cli` (experiments and CSV output).
"""
from .analytics import AngleSchedule, ErrorSpec, OverheadParams
from .lattice import Lattice, LatticeSpec, build_lattice
from .noise import NoiseSpec
from .protocol import InjectionPlan, RunRecord, Trajectory, build_plan, run_protocol

__all__ = [
    "AngleSchedule",
    "ErrorSpec",
    "InjectionPlan",
    "Lattice",
    "LatticeSpec",
    "NoiseSpec",
    "OverheadParams",
    "RunRecord",
    "Trajectory",
    "build_lattice",
    "build_plan",
    "run_protocol",
]
__version__ = "0.1.0"
