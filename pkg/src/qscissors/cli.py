"""Command-line entry point: ``qscissors <subcommand> ...``.

Exit codes: 0 success, 1 malformed arguments, 2 the computation has no valid
result (zero-probability herald, failed oracle check).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

import numpy as np

from .detection import DetectorModel, conditioned_density, fidelity, povm_element
from .devices import (
    DEFAULT_DIM,
    DeviceParams,
    auto_cutoffs,
    max_abs_difference,
    output_state_closed_form,
    output_state_oracle,
)
from .exceptions import ScissorsError, ZeroProbabilityHeraldError
from .fock import FockVector, coherent_coefficients
from .metrics import metric_report
from .scissors import HeraldPattern, truncate_max, truncate_min
from .sweep import PRESETS, Axis, SweepSpec, coherent_input, preset, run_sweep, write_csv

EXIT_OK, EXIT_USAGE, EXIT_NO_RESULT = 0, 1, 2

ORACLE_GRID = {
    "s": (0.0, 0.25, 0.5, 0.8),
    "theta": (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2),
    "phi": (0.0, math.pi / 2, math.pi),
    "alpha": (0.0, 1.0, 1.5),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _device_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=float, default=0.5, help="amplifier strength (>= 0)")
    p.add_argument("--phi-minus-beta", type=float, default=math.pi / 2,
                   help="pump phase relative to the coherent-state phase, radians")
    p.add_argument("--theta", type=float, default=math.pi / 4, help="beamsplitter angle, radians")


def _input_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=float, default=1.0, help="coherent input amplitude |alpha|")
    group.add_argument("--vacuum-input", action="store_true", help="vacuum in the beamsplitter port")
    group.add_argument("--amplitudes", help="explicit input amplitudes, comma separated (e.g. '0.6,0.8j')")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM, help="Fock cutoff of the input mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qscissors", description="Amplifier + beamsplitter quantum scissors simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("truncate", help="heralded state for one parameter point")
    p.add_argument("--config", choices=("max", "min"), default="max")
    p.add_argument("--N", type=int, default=1, help="photon count on the N-detector")
    _device_flags(p)
    _input_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="CSV grid sweep (presets fig2..fig14 or custom axes)")
    p.add_argument("--preset", choices=sorted(PRESETS, key=lambda k: int(k[3:])))
    p.add_argument("--axis", action="append", default=[], metavar="NAME:START:STOP:COUNT",
                   help="sweep axis; give once or twice")
    p.add_argument("--mode", choices=("metrics", "probability", "fidelity", "state"))
    p.add_argument("--config", choices=("max", "min"))
    p.add_argument("--N", type=int, nargs="+")
    for name in ("s", "theta", "phi-minus-beta", "alpha", "eta", "nu"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("fidelity", help="imperfect-detector state and fidelity at one point")
    p.add_argument("--config", choices=("max", "min"), default="max")
    p.add_argument("--N", type=int, default=1)
    _device_flags(p)
    _input_flags(p)
    p.add_argument("--eta", type=float, default=0.7)
    p.add_argument("--nu", type=float, default=1e-4)
    p.add_argument("--out")

    p = sub.add_parser("povm", help="dump the diagonal of a POVM element")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--out")

    p = sub.add_parser("oracle-check", help="closed form vs numerical unitaries on the reference grid")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    return parser


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit_json(payload: dict, path: Optional[str]) -> None:
    with _output(path) as fh:
        json.dump(payload, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _input_state(args) -> FockVector:
    if args.dim < 1:
        raise UsageError("--dim must be >= 1")
    if args.amplitudes is not None:
        try:
            values = [complex(tok.strip().replace(" ", "")) for tok in args.amplitudes.split(",") if tok.strip()]
        except ValueError as exc:
            raise UsageError(f"cannot parse --amplitudes: {exc}") from None
        if not values:
            raise UsageError("--amplitudes is empty")
        vec = FockVector(np.array(values))
        if vec.norm_squared() == 0:
            raise UsageError("--amplitudes is the zero vector")
        return vec.normalize()
    if args.vacuum_input:
        return coherent_coefficients(0.0, args.dim)
    if args.alpha < 0:
        raise UsageError("--alpha is a modulus and must be >= 0")
    return coherent_input(args.alpha, args.dim)


def _device(args) -> DeviceParams:
    try:
        return DeviceParams(args.s, args.phi_minus_beta, args.theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params_json(params: DeviceParams) -> dict:
    return {"s": params.s, "phi_minus_beta": params.phi, "theta": params.theta}


def _report_json(state: FockVector) -> dict:
    return metric_report(state).as_dict()


def cmd_truncate(args) -> int:
    if args.N < 0:
        raise UsageError("--N must be >= 0")
    psi = _input_state(args)
    params = _device(args)
    fn = truncate_max if args.config == "max" else truncate_min
    heralded = fn(psi, params, args.N)
    _emit_json(
        {
            "config": args.config,
            "N": args.N,
            "params": _params_json(params),
            "probability": heralded.probability,
            "state": heralded.state.to_json(),
            "metrics": _report_json(heralded.state),
        },
        args.out,
    )
    return EXIT_OK


def cmd_fidelity(args) -> int:
    if args.N < 0:
        raise UsageError("--N must be >= 0")
    try:
        model = DetectorModel(args.eta, args.nu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    psi = _input_state(args)
    params = _device(args)
    if args.config == "max":
        ideal, pattern = truncate_max(psi, params, args.N), HeraldPattern.max_config(args.N)
    else:
        ideal, pattern = truncate_min(psi, params, args.N), HeraldPattern.min_config(args.N)
    full = output_state_closed_form(psi, params, auto_cutoffs(psi, params))
    rho, p_det = conditioned_density(full, pattern, model)
    target = ideal.state
    target = target.resize(rho.dim) if target.dim <= rho.dim else FockVector(target.amplitudes[: rho.dim])
    _emit_json(
        {
            "config": args.config,
            "N": args.N,
            "params": _params_json(params),
            "detector": {"eta": model.eta, "nu": model.nu},
            "fidelity": fidelity(rho, target),
            "probability_detected": p_det,
            "probability_ideal": ideal.probability,
            "ideal_state": ideal.state.to_json(),
            "density_matrix": rho.to_json(),
        },
        args.out,
    )
    return EXIT_OK


def cmd_povm(args) -> int:
    if args.N < 0 or args.dim < 1:
        raise UsageError("--N must be >= 0 and --dim >= 1")
    try:
        model = DetectorModel(args.eta, args.nu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    el = povm_element(model, args.N, args.dim)
    _emit_json(
        {
            "eta": model.eta,
            "nu": model.nu,
            "N": el.count,
            "dim": el.dim,
            "diagonal": [float(x) for x in el.diagonal],
            "tail_bound": el.tail_bound,
        },
        args.out,
    )
    return EXIT_OK


def _sweep_spec(args) -> SweepSpec:
    overrides = {}
    fixed = {}
    for flag, key in (("s", "s"), ("theta", "theta"), ("phi_minus_beta", "phi_minus_beta"),
                      ("alpha", "alpha_mod"), ("eta", "eta"), ("nu", "nu")):
        value = getattr(args, flag)
        if value is not None:
            fixed[key] = value
    try:
        axes = tuple(Axis.parse(text) for text in args.axis)
        if args.preset:
            base = preset(args.preset)
            if axes:
                overrides["axes"] = axes
            if fixed:
                overrides["fixed"] = {**base.fixed, **fixed}
        else:
            if not axes:
                raise UsageError("give --preset or at least one --axis")
            base = None
            overrides = {"axes": axes, "fixed": fixed}
        if args.mode:
            overrides["mode"] = args.mode
        if args.config:
            overrides["config"] = args.config
        if args.N:
            overrides["counts"] = tuple(args.N)
        if args.dim is not None:
            overrides["dim"] = args.dim
        if base is None:
            return SweepSpec(**overrides)
        return preset(args.preset, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_sweep(args) -> int:
    spec = _sweep_spec(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    header, rows = run_sweep(spec, workers=args.workers)
    with _output(args.out) as fh:
        write_csv(header, rows, fh)
    return EXIT_OK


def oracle_check(dim: int = DEFAULT_DIM) -> dict:
    worst, worst_at = 0.0, None
    count = 0
    for s, theta, phi, alpha in itertools.product(*ORACLE_GRID.values()):
        psi = coherent_coefficients(alpha, dim)
        params = DeviceParams(s, phi, theta)
        dev = max_abs_difference(output_state_closed_form(psi, params, dim), output_state_oracle(psi, params, dim))
        count += 1
        if dev >= worst:
            worst, worst_at = dev, {"s": s, "theta": theta, "phi": phi, "alpha": alpha}
    return {"points": count, "dim": dim, "max_deviation": worst, "worst_point": worst_at}


def cmd_oracle_check(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    result = oracle_check(args.dim)
    result["tolerance"] = args.tol
    result["passed"] = result["max_deviation"] < args.tol
    _emit_json(result, args.out)
    return EXIT_OK if result["passed"] else EXIT_NO_RESULT


COMMANDS = {
    "truncate": cmd_truncate,
    "sweep": cmd_sweep,
    "fidelity": cmd_fidelity,
    "povm": cmd_povm,
    "oracle-check": cmd_oracle_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qscissors: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroProbabilityHeraldError as exc:
        print(f"qscissors: zero-probability herald: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT
    except ScissorsError as exc:
        print(f"qscissors: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT


if __name__ == "__main__":
    sys.exit(main())
