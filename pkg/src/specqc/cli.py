"""Command-line interface: ``specqc {lpps,bv,fidelity,run}``.

Frequencies on the command line are in Hz, angles accept ``pi``, ``pi/2``
or plain radians. Outputs go to ``--out`` (default: ``$SPECQC_OUTDIR`` or
the current directory). Exit codes: 0 ok, 1 invalid input, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import gates, tse
from .evolution import (
    GRADIENT_MODES,
    Gaussian,
    Rectangular,
    SequenceError,
    load_sequence,
    parse_angle,
    run_sequence,
)
from .operators import lpps_state, thermal_equilibrium
from .spectra import (
    NoSignalError,
    decode_answer,
    decode_json,
    frequency_grid,
    readout_spectrum,
    render_lorentzian,
    rendered_csv,
    sticks_csv,
)
from .spin_system import ConfigError, SpinSystem, check_bits, check_label, get_preset, load_system

OUTDIR_ENV = "SPECQC_OUTDIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_ratios(text: str) -> list[float]:
    """``0.01:2:200log``, ``0.1:0.5:5lin`` or a comma list like ``0.1,0.179``."""
    text = text.strip()
    if not text:
        raise ValueError("empty ratio list")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad ratio range {text!r}; use start:stop:N[log|lin]")
        start, stop, spec = float(parts[0]), float(parts[1]), parts[2].strip()
        kind = "log"
        for suffix in ("log", "lin"):
            if spec.endswith(suffix):
                spec, kind = spec[: -len(suffix)], suffix
        count = int(spec)
        if count < 1:
            raise ValueError("ratio count must be >= 1")
        if count == 1:
            return [start]
        if kind == "log":
            return [float(x) for x in np.geomspace(start, stop, count)]
        return [float(x) for x in np.linspace(start, stop, count)]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty ratio list")
    return values


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"bad grid {text!r}; use start:stop:step in Hz") from None
    grid = frequency_grid(start, stop, step)
    if grid.size == 0:
        raise ValueError("empty frequency grid")
    return grid


def _load_system(args) -> tuple[SpinSystem, str]:
    if args.system:
        path = Path(args.system)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read system file: {exc}") from None
        return load_system(text), path.stem
    return get_preset(args.preset), args.preset


def _envelope(args):
    if args.envelope == "rectangular":
        return Rectangular()
    return Gaussian(args.truncation, args.slices)


def _spectrum_files(prefix: str, spec, args) -> dict[str, str]:
    grid = parse_grid(args.grid) if args.grid else None
    rendered = render_lorentzian(spec, args.linewidth, grid)
    return {f"{prefix}sticks.csv": sticks_csv(spec),
            f"{prefix}spectrum.csv": rendered_csv(rendered)}


def _output_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUTDIR_ENV) or ".")
    if out.exists() and not out.is_dir():
        raise ConfigError(f"output path {out} is not a directory")
    return out


def _write(outdir: Path, files: dict[str, str]):
    outdir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (outdir / name).write_text(text, encoding="utf-8", newline="")


def _pulsed_lpps(system, args, label):
    seq = gates.lpps_pulse_sequence(system, label, args.ratio, args.alpha,
                                    _envelope(args), args.gradient)
    return run_sequence(system, seq, thermal_equilibrium(system), t2=args.t2)


def cmd_lpps(args) -> dict[str, str]:
    system, _ = _load_system(args)
    check_label(system, args.label)
    thermal = readout_spectrum(thermal_equilibrium(system), system)
    lpps = readout_spectrum(_pulsed_lpps(system, args, args.label), system)
    files = _spectrum_files("thermal_", thermal, args)
    files.update(_spectrum_files("lpps_", lpps, args))
    return files


def cmd_bv(args) -> dict[str, str]:
    system, _ = _load_system(args)
    a = check_bits(args.a, system.nqubits, "a")
    zeros = "0" * system.nqubits
    if args.mode == "ideal":
        rho = lpps_state(system, zeros)
    else:
        rho = _pulsed_lpps(system, args, zeros)
    seq = gates.bv_pulse_sequence(a, system.nqubits)
    if len(seq):
        rho = run_sequence(system, seq, rho)
    spec = readout_spectrum(rho, system)
    decoded = decode_answer(spec)
    files = _spectrum_files("bv_", spec, args)
    files["bv_decode.json"] = json.dumps(decode_json(spec, decoded), indent=2) + "\n"
    return files


def cmd_fidelity(args) -> dict[str, str]:
    system, sid = _load_system(args)
    ratios = parse_ratios(args.ratios)
    label = args.label or "0" * system.nqubits
    check_label(system, label)
    alphas = args.alpha or [math.pi / 2]
    curves = [tse.fidelity_sweep(system, a, ratios, label, args.system_id or sid)
              for a in alphas]
    return {"fidelity.csv": tse.curves_to_csv(curves)}


def _state_json(rho: np.ndarray) -> str:
    diag = np.diag(rho)
    off = rho - np.diag(diag)
    info = {
        "dim": int(rho.shape[0]),
        "trace": [float(np.trace(rho).real), float(np.trace(rho).imag)],
        "hermitian_error": float(np.abs(rho - rho.conj().T).max()),
        "max_offdiagonal": float(np.abs(off).max()),
        "frobenius_norm": float(np.linalg.norm(rho)),
        "diagonal": [float(v) for v in diag.real],
    }
    return json.dumps(info, indent=2) + "\n"


def cmd_run(args) -> dict[str, str]:
    system, _ = _load_system(args)
    try:
        text = Path(args.sequence).read_text(encoding="utf-8")
    except OSError as exc:
        raise SequenceError(f"cannot read sequence file: {exc}") from None
    seq = load_sequence(text, system)
    if args.initial == "thermal":
        rho0 = thermal_equilibrium(system)
    elif args.initial.startswith("lpps:"):
        rho0 = lpps_state(system, args.initial[5:])
    else:
        raise ConfigError("initial state must be 'thermal' or 'lpps:<label>'")
    rho = run_sequence(system, seq, rho0, t2=args.t2)
    files = _spectrum_files("", readout_spectrum(rho, system), args)
    files["state.json"] = _state_json(rho)
    return files


def _add_system_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="built-in system: alanine, alanine-carbons")
    src.add_argument("--system", metavar="PATH", help="JSON spin-system file")
    p.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUTDIR_ENV} or .)")


def _add_spectrum_args(p):
    p.add_argument("--linewidth", type=float, default=1.0, help="Lorentzian FWHM in Hz")
    p.add_argument("--grid", metavar="START:STOP:STEP", help="frequency grid in Hz")


def _add_pulse_args(p):
    p.add_argument("--ratio", type=float, default=0.179, help="Omega0 / (pi J01)")
    p.add_argument("--alpha", type=parse_angle, default=math.pi / 2, help="TSE flip angle")
    p.add_argument("--t2", action="store_true", help="apply T2 damping during timed events")
    p.add_argument("--gradient", choices=GRADIENT_MODES, default="crush_all")
    p.add_argument("--envelope", choices=("gaussian", "rectangular"), default="gaussian")
    p.add_argument("--slices", type=int, default=64, help="gaussian slices")
    p.add_argument("--truncation", type=float, default=2.5, help="gaussian half-width in sigma")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lpps", help="prepare a labeled pseudo-pure state and read it out")
    _add_system_args(p)
    p.add_argument("--label", required=True, help="register bit string, e.g. 000")
    _add_pulse_args(p)
    _add_spectrum_args(p)
    p.set_defaults(func=cmd_lpps)

    p = sub.add_parser("bv", help="Bernstein-Vazirani on an LPPS")
    _add_system_args(p)
    p.add_argument("--a", required=True, help="hidden bit string")
    p.add_argument("--mode", choices=("ideal", "pulsed"), default="ideal")
    _add_pulse_args(p)
    _add_spectrum_args(p)
    p.set_defaults(func=cmd_bv)

    p = sub.add_parser("fidelity", help="sweep Q = 1 - F(U0, U2) over power ratios")
    _add_system_args(p)
    p.add_argument("--alpha", type=parse_angle, action="append",
                   help="flip angle; repeat for several curves (default pi/2)")
    p.add_argument("--ratios", default="0.01:2:200log",
                   help="start:stop:N[log|lin] or comma list")
    p.add_argument("--label", help="irradiated line (default all zeros)")
    p.add_argument("--system-id", help="value for the system_id column")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("run", help="run a sequence file")
    _add_system_args(p)
    p.add_argument("--sequence", required=True, metavar="PATH",
                   help="one JSON event per line")
    p.add_argument("--initial", default="thermal", help="thermal or lpps:<label>")
    p.add_argument("--t2", action="store_true")
    _add_spectrum_args(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        outdir = _output_dir(args)
        files = args.func(args)
        _write(outdir, files)
    except (UsageError, ConfigError, SequenceError, NoSignalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2
    for name in files:
        print(outdir / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
