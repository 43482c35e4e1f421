"""Command-line driver: ``tripwell {simulate,sweep,nogo,measures}``.

Data goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 success, 1 invalid arguments, 2 bad input matrix or state file, 3 unwritable
output, 4 a GHZ-type outcome was found by ``nogo``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import protocol, su3
from .fock import NotAntisymmetricError, PureState, SlaterExpansion, from_slater_expansion
from .measures import measure_report
from .qubitmap import freeze, verify_measure_identity

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_OUTPUT, EXIT_GHZ = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _round(x: float) -> float:
    return float(f"{x:.15g}") + 0.0  # folds -0.0 into 0.0


def _clean(obj: Any) -> Any:
    """Recursively round floats to 15 significant digits for JSON output."""
    if isinstance(obj, float):
        return _round(obj)
    if isinstance(obj, complex):
        return [_round(obj.real), _round(obj.imag)]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def _parse_complex_list(text: str, count: int, what: str) -> np.ndarray:
    try:
        values = [complex(tok.strip().replace(" ", "")) for tok in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse {what}: {exc}") from None
    if len(values) != count:
        raise UsageError(f"{what} needs {count} comma-separated entries, got {len(values)}")
    return np.array(values, dtype=np.complex128)


_EULER_KEYS = {f"theta{i}": i - 1 for i in range(1, 9)} | {f"t{i}": i - 1 for i in range(1, 9)}
_EULER_KEYS |= {f"θ{sub}": i for i, sub in enumerate("₁₂₃₄₅₆₇₈")}


def _parse_euler(text: str) -> su3.EulerAngles:
    """Either eight comma-separated angles or ``theta2=0.5,theta3=...`` (missing ones are 0)."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    values = [0.0] * 8
    try:
        if all("=" in p for p in parts):
            for part in parts:
                key, val = part.split("=", 1)
                if key.strip() not in _EULER_KEYS:
                    raise UsageError(f"unknown Euler angle {key!r}")
                values[_EULER_KEYS[key.strip()]] = float(val)
        elif len(parts) == 8:
            values = [float(p) for p in parts]
        else:
            raise UsageError("--euler takes 8 angles or name=value pairs")
    except ValueError as exc:
        raise UsageError(f"cannot parse --euler: {exc}") from None
    try:
        return su3.EulerAngles(*values).validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def load_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; keys mirror long flag names."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {output}: {exc}") from exc


def _dump_json(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


# -- subcommands --------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    chosen = [name for name in ("optimal", "identity", "euler", "symmetric", "tunneling") if getattr(args, name)]
    if len(chosen) != 1:
        raise UsageError("choose exactly one of --optimal, --identity, --euler, --symmetric, --tunneling")
    if args.format not in (None, "json"):
        raise UsageError("simulate only emits json")
    source = chosen[0]
    if source == "optimal":
        t = su3.symmetric_solution(math.pi / 4).matrix()
    elif source == "identity":
        t = np.eye(3, dtype=np.complex128)
    elif source == "symmetric":
        theta2 = float(args.symmetric)
        try:
            t = su3.symmetric_solution(theta2).matrix()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif source == "euler":
        t = su3.euler_to_matrix(_parse_euler(args.euler))
    else:
        t = _parse_complex_list(args.tunneling, 9, "--tunneling").reshape(3, 3)
    s = np.eye(2, dtype=np.complex128)
    if args.spin_flip:
        s = _parse_complex_list(args.spin_flip, 4, "--spin-flip").reshape(2, 2)
    try:
        outcome = protocol.run_protocol(t, s)
    except protocol.NotUnitaryError as exc:
        raise InputError(str(exc)) from None
    report = outcome.to_dict()
    report["c3f"] = outcome.measures.cNf
    report["tau_f"] = outcome.measures.tau_f
    report["tunneling"] = [[complex(x) for x in row] for row in t]
    report["spin_flip"] = [[complex(x) for x in row] for row in s]
    _write(_dump_json(report), args.output)
    return EXIT_OK


def sweep_rows(grid_points: int) -> list[dict[str, float]]:
    curves = su3.probability_curves(su3.default_grid(grid_points))
    columns = list(su3.CURVE_COLUMNS) + ["c3f"]
    return [{c: float(curves[c][i]) for c in columns} for i in range(grid_points)]


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    rows = sweep_rows(args.grid)
    if args.format in (None, "csv"):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([repr(_round(v)) for v in row.values()])
        text = buf.getvalue()
    else:
        text = _dump_json(rows)
    _write(text, args.output)
    return EXIT_OK


def cmd_nogo(args: argparse.Namespace) -> int:
    if args.format not in (None, "json"):
        raise UsageError("nogo only emits json")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    report = protocol.ghz_no_go_scan(args.samples, args.seed, n_jobs=args.jobs)
    _write(_dump_json(report.to_dict()), args.output)
    if not report.ok:
        print(f"GHZ-type outcome found in {len(report.failures)} case(s)", file=sys.stderr)
        return EXIT_GHZ
    return EXIT_OK


def _pair(value, where: str) -> complex:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value)):
        raise InputError(f"{where}: complex numbers are [re, im] pairs")
    return complex(value[0], value[1])


def load_state(path: str | Path) -> PureState:
    """Read a state file: ``{"n", "d", "slater": {"235": [re, im]}}`` or ``{"n", "d", "amplitudes": [...]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read state file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("state file must hold a JSON object")
    n, d = data.get("n", 3), data.get("d", 6)
    if not (isinstance(n, int) and isinstance(d, int)) or n not in (2, 3) or d < n:
        raise InputError("n must be 2 or 3 and d an integer >= n")
    if ("slater" in data) == ("amplitudes" in data):
        raise InputError('state file needs exactly one of "slater" or "amplitudes"')
    if "slater" in data:
        coeffs = {}
        for key, value in data["slater"].items():
            try:
                triple = tuple(int(ch) for ch in key)
            except ValueError:
                raise InputError(f"bad Slater key {key!r}") from None
            if len(triple) != n or list(triple) != sorted(set(triple)) or not all(1 <= i <= d for i in triple):
                raise InputError(f"Slater key {key!r} must be {n} increasing labels in 1..{d}")
            coeffs[triple] = _pair(value, f"slater[{key}]")
        state = from_slater_expansion(SlaterExpansion(coeffs, n, d))
    else:
        amps = data["amplitudes"]
        if not isinstance(amps, list) or len(amps) != d**n:
            raise InputError(f"amplitudes must be a list of {d ** n} [re, im] pairs")
        state = PureState(n, d, [_pair(a, f"amplitudes[{i}]") for i, a in enumerate(amps)])
        state = PureState(n, d, state.amplitudes, antisymmetric=state.is_antisymmetric())
    if state.norm() == 0:
        raise InputError("state is the zero vector")
    return state.normalize()


def cmd_measures(args: argparse.Namespace) -> int:
    if args.format not in (None, "json"):
        raise UsageError("measures only emits json")
    state = load_state(args.state)
    if not state.antisymmetric:
        raise InputError("fermionic measures need an antisymmetric state")
    try:
        out: dict[str, Any] = measure_report(state).to_dict()
        if args.freeze:
            qubits = freeze(state)
            out["qubit_state"] = [complex(q) for q in qubits]
            if state.n_particles == 3:
                out["identity"] = verify_measure_identity(state).to_dict()
            else:
                from .measures import concurrence2

                out["c2"] = concurrence2(qubits, dims=(2, 2))
    except (ValueError, NotAntisymmetricError) as exc:
        raise InputError(str(exc)) from None
    _write(_dump_json(out), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="write data here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="default json (csv for sweep)")
    common.add_argument("--config", help="flat key = value file; command-line flags win")

    parser = _Parser(prog="tripwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run the three-well protocol once")
    p.add_argument("--optimal", action="store_true", help="symmetric solution at theta2 = pi/4")
    p.add_argument("--identity", action="store_true", help="T = identity")
    p.add_argument("--symmetric", metavar="THETA2", help="symmetric equal-weight solution at THETA2")
    p.add_argument("--euler", metavar="ANGLES", help="8 angles, or theta2=...,theta4=...")
    p.add_argument("--tunneling", metavar="ENTRIES", help="9 complex entries of T, row-major, e.g. 0.5+0.1j")
    p.add_argument("--spin-flip", metavar="ENTRIES", help="4 complex entries of the spin flip (default identity)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="curves of the symmetric W family over theta2")
    p.add_argument("--grid", type=int, default=su3.DEFAULT_GRID_POINTS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("nogo", parents=[common], help="search for GHZ-type outcomes")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_nogo)

    p = sub.add_parser("measures", parents=[common], help="entanglement measures of a state file")
    p.add_argument("state", help="JSON state file")
    p.add_argument("--freeze", action="store_true", help="also map to qubits and check the measure identity")
    p.set_defaults(func=cmd_measures)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args: argparse.Namespace):
    config = load_config(args.config)
    sub_parser = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest: a for a in sub_parser._actions}  # noqa: SLF001
    defaults = {}
    for key, raw in config.items():
        if key not in known or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(raw) if action.type else raw
    sub_parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, args)
        return args.func(args)
    except UsageError as exc:
        print(f"tripwell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"tripwell: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"tripwell: error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())
