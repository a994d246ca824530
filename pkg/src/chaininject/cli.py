"""Command-line front end: ``analytic``, ``simulate`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import fields
from pathlib import Path

from .errors import ConfigError, InvalidSpecError, RegisterTooLargeError
from .sweeps import SweepConfig, cmd_analytic_sweep, cmd_simulate, rows_to_csv

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2

_INT_LISTS = {"distances", "rows", "z_errors"}
_FLOAT_LISTS = {"theta_l_values"}
_STR_LISTS = {"lattices"}
_INTS = {"n_errors", "shots", "seed", "jobs"}
_FLOATS = {"epsilon", "theta_p", "noise_p"}
# config-file spellings that differ from field names
_ALIASES = {"theta_l": "theta_l_values", "theta-l": "theta_l_values", "out": "output_path", "n_chains": "n_chains_rule"}


def _angle(text: str) -> float:
    """Parse a float, allowing ``pi`` expressions such as ``2*pi*1e-2`` or ``pi/50``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    allowed = set("0123456789.e+-*/() ")
    body = text.replace("pi", "")
    if not set(body) <= allowed:
        raise ConfigError(f"cannot parse angle {text!r}")
    try:
        return float(eval(text, {"__builtins__": {}}, {"pi": math.pi}))  # noqa: S307 - restricted charset
    except Exception as exc:
        raise ConfigError(f"cannot parse angle {text!r}") from exc


def _split(text: str) -> list[str]:
    return [t for t in text.replace(";", ",").split(",") if t.strip()]


def _convert(key: str, value: str):
    try:
        if key in _INT_LISTS:
            return tuple(int(v) for v in _split(value))
        if key in _FLOAT_LISTS:
            return tuple(_angle(v) for v in _split(value))
        if key in _STR_LISTS:
            return tuple(v.strip() for v in _split(value))
        if key in _INTS:
            return int(value)
        if key in _FLOATS:
            return _angle(value)
        if key == "n_chains_rule":
            return "max" if value.strip() == "max" else tuple(int(v) for v in _split(value))
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value.strip()


def read_config(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(SweepConfig)}
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key.replace("-", "_"))
        if key not in known:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaininject", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--experiment", choices=("fig2a", "fig2b", "fig3", "fig4", "custom"))
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", help="CSV path (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--shots", type=int)
        p.add_argument("--distances", help="comma-separated code distances")
        p.add_argument("--theta-l", help="comma-separated target angles; 'pi' allowed")
        p.add_argument("--mode", choices=("exact", "sampled", "both"))
        p.add_argument("--jobs", type=int, help="worker processes for sweep points")
        p.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")

    a = sub.add_parser("analytic", help="closed-form figure sweeps")
    common(a)
    a.add_argument("--error-kind", choices=("none", "pauliZ", "overRotation"))
    a.add_argument("--epsilon", type=float)
    a.add_argument("--n-chains", help="'max' or comma-separated chain counts (custom)")

    s = sub.add_parser("simulate", help="statevector protocol runs")
    common(s)
    s.add_argument("--lattices", help="comma-separated lattices, e.g. 3x3,3x5")
    s.add_argument("--rows", help="comma-separated injected rows (default: 1,3,...)")
    s.add_argument("--theta-p", help="explicit physical angle instead of --theta-l")
    s.add_argument("--z-errors", help="comma-separated data qubits with a Z before injection")
    s.add_argument("--noise-p", type=float, help="uniform circuit depolarizing strength")
    s.add_argument("--epsilon", type=float, help="over-rotation of every injection angle")

    v = sub.add_parser("verify", help="run the cross-check suite")
    v.add_argument("--seed", type=int, default=0)
    return parser


_FLAG_FIELDS = {
    "experiment": "experiment", "out": "output_path", "seed": "seed", "shots": "shots",
    "distances": "distances", "theta_l": "theta_l_values", "mode": "mode", "jobs": "jobs",
    "error_kind": "error_kind", "epsilon": "epsilon", "n_chains": "n_chains_rule",
    "lattices": "lattices", "rows": "rows", "theta_p": "theta_p", "z_errors": "z_errors", "noise_p": "noise_p",
}


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for attr, key in _FLAG_FIELDS.items():
        raw = getattr(args, attr, None)
        if raw is None:
            continue
        values[key] = _convert(key, raw) if isinstance(raw, str) else raw
    if args.command == "simulate":
        values.setdefault("experiment", "custom")
        if "error_kind" not in values:
            values["error_kind"] = "overRotation" if values.get("epsilon") else "none"
    return SweepConfig(**values)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _run_verify(seed: int) -> int:
    from .verify import run_checks

    results = run_checks(seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _run_verify(args.seed)
    try:
        config = config_from_args(args)
        if args.command == "analytic":
            rows = cmd_analytic_sweep(config)
            experiment = config.experiment
        else:
            rows, log = cmd_simulate(config)
            experiment = "simulate"
            if config.output_path:
                Path(config.output_path).with_suffix(".runs.tsv").write_text("".join(line + "\n" for line in log))
    except (ConfigError, InvalidSpecError, RegisterTooLargeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(rows_to_csv(rows), config.output_path)
    if args.plot:
        if not config.output_path:
            print("configuration error: --plot needs --out", file=sys.stderr)
            return EXIT_CONFIG
        from .plotting import plot_rows

        plot_rows(rows, experiment, Path(config.output_path).with_suffix(".png"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
