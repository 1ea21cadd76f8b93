"""Grid sweeps over device/detector parameters and the figure presets.

A sweep evaluates one of four quantity sets on a one- or two-axis grid, for a
list of heralded photon numbers, and emits long-format CSV rows. Coherent
inputs are taken with ``beta = 0`` so the pump phase equals ``phi - beta``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import IO, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.special import gammainc

from .detection import DetectorModel, conditioned_density, fidelity
from .devices import DEFAULT_DIM, DeviceParams, auto_cutoffs, output_state_closed_form
from .exceptions import ZeroProbabilityHeraldError
from .fock import FockVector, coherent_coefficients
from .metrics import metric_report
from .scissors import (
    HeraldPattern,
    max_config_amplitudes,
    min_config_amplitudes,
    truncate_max,
    truncate_min,
)

__all__ = [
    "AXIS_NAMES",
    "DEFAULT_FIXED",
    "MODES",
    "PRESETS",
    "Axis",
    "SweepSpec",
    "coherent_input",
    "evaluate_point",
    "run_sweep",
    "write_csv",
    "format_cell",
    "preset",
]

AXIS_NAMES = ("s", "theta", "phi_minus_beta", "alpha_mod", "eta", "nu")
MODES = ("metrics", "probability", "fidelity", "state")
CONFIGS = ("max", "min")

DEFAULT_FIXED = {
    "s": 0.5,
    "theta": math.pi / 4,
    "phi_minus_beta": math.pi / 2,
    "alpha_mod": 1.0,
    "eta": 0.7,
    "nu": 1e-4,
}

INPUT_TAIL = 1e-15


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:start:stop:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis must look like name:start:stop:count, got {text!r}")
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[Axis, ...]
    counts: tuple[int, ...] = (1,)
    mode: str = "metrics"
    config: str = "max"
    fixed: Mapping[str, float] = field(default_factory=dict)
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        object.__setattr__(self, "fixed", {**DEFAULT_FIXED, **dict(self.fixed)})
        self.validate()

    def validate(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis in {names}")
        for ax in self.axes:
            if ax.name not in AXIS_NAMES:
                raise ValueError(f"unknown axis {ax.name!r}; choose from {AXIS_NAMES}")
            if ax.count < 2:
                raise ValueError(f"axis {ax.name} needs at least 2 points")
            if not ax.start < ax.stop:
                raise ValueError(f"axis {ax.name} needs start < stop")
            _check_domain(ax.name, ax.start)
            _check_domain(ax.name, ax.stop)
        for name, value in self.fixed.items():
            if name not in AXIS_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
            _check_domain(name, value)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.config not in CONFIGS:
            raise ValueError(f"config must be one of {CONFIGS}")
        if not self.counts or min(self.counts) < 0:
            raise ValueError("photon counts must be a non-empty list of non-negative integers")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def columns(self) -> list[str]:
        head = [ax.name for ax in self.axes] + ["N"]
        return head + quantity_columns(self.mode, self._state_width())

    def _state_width(self) -> int:
        top = max(self.counts)
        return top + 1 if self.config == "max" else top + self.dim

    def points(self) -> list[dict]:
        """Grid points, photon count outermost, then row-major over the axes."""
        out = []
        for count in self.counts:
            for combo in product(*(ax.values() for ax in self.axes)):
                point = dict(self.fixed)
                point.update({ax.name: float(v) for ax, v in zip(self.axes, combo)})
                point["N"] = count
                out.append(point)
        return out


def _check_domain(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    if name in ("s", "alpha_mod", "nu") and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    if name == "theta" and not 0 <= value <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/2], got {value}")
    if name == "eta" and not 0 <= value <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {value}")


def quantity_columns(mode: str, width: int = 0) -> list[str]:
    if mode == "metrics":
        return ["probability", "mean_n", "mandel_q", "var_x", "skew_w"]
    if mode == "probability":
        return ["probability"]
    if mode == "fidelity":
        return ["fidelity", "probability_detected", "probability_ideal"]
    if mode == "state":
        cols = ["probability"]
        for k in range(width):
            cols += [f"re_{k}", f"im_{k}"]
        return cols
    raise ValueError(f"unknown mode {mode!r}")


def coherent_input(alpha_mod: float, dim: int = DEFAULT_DIM) -> FockVector:
    """Coherent input with real amplitude, using at least ``dim`` levels and enough to hold the state."""
    lam = alpha_mod * alpha_mod
    size = max(dim, 1)
    while gammainc(size, lam) > INPUT_TAIL:
        size += 5
    return coherent_coefficients(alpha_mod, size)


def _params(point: Mapping[str, float]) -> DeviceParams:
    return DeviceParams(point["s"], point["phi_minus_beta"], point["theta"])


def _ideal(psi: FockVector, params: DeviceParams, count: int, config: str):
    return (truncate_max if config == "max" else truncate_min)(psi, params, count)


def _ideal_probability(psi: FockVector, params: DeviceParams, count: int, config: str) -> float:
    fn = max_config_amplitudes if config == "max" else min_config_amplitudes
    return float(np.sum(np.abs(fn(psi.amplitudes, params, count)) ** 2))


def evaluate_point(point: Mapping[str, float], mode: str, config: str = "max", dim: int = DEFAULT_DIM,
                   width: int = 0) -> list[Optional[float]]:
    """Quantities for one grid point, ``None`` where undefined."""
    count = int(point["N"])
    params = _params(point)
    psi = coherent_input(point["alpha_mod"], dim)
    prob = _ideal_probability(psi, params, count, config)

    if mode == "probability":
        return [prob]
    try:
        heralded = _ideal(psi, params, count, config)
    except ZeroProbabilityHeraldError:
        if mode == "fidelity":
            return [None, None, prob]
        return [prob] + [None] * (len(quantity_columns(mode, width)) - 1)

    if mode == "metrics":
        rep = metric_report(heralded.state)
        return [heralded.probability, rep.mean_n, rep.mandel_q, rep.var_x, rep.skew_w]
    if mode == "state":
        amps = heralded.state.amplitudes
        row: list[Optional[float]] = [heralded.probability]
        for k in range(width):
            z = amps[k] if k < amps.size else 0j
            row += [float(z.real), float(z.imag)]
        return row
    # fidelity
    model = DetectorModel(point["eta"], point["nu"])
    full = output_state_closed_form(psi, params, auto_cutoffs(psi, params))
    pattern = HeraldPattern.max_config(count) if config == "max" else HeraldPattern.min_config(count)
    try:
        rho, p_det = conditioned_density(full, pattern, model)
    except ZeroProbabilityHeraldError:
        return [None, None, heralded.probability]
    target = _fit_target(heralded.state, rho.dim)
    return [fidelity(rho, target), p_det, heralded.probability]


def _fit_target(state: FockVector, dim: int) -> FockVector:
    if state.dim <= dim:
        return state.resize(dim)
    # mass the density matrix cannot represent is already below the cutoff tail
    return FockVector(state.amplitudes[:dim])


def _evaluate_job(job):
    return evaluate_point(*job)


def run_sweep(spec: SweepSpec, workers: int = 1) -> tuple[list[str], list[list]]:
    """Evaluate every grid point; rows come back in grid order regardless of ``workers``."""
    width = spec._state_width()
    points = spec.points()
    jobs = [(p, spec.mode, spec.config, spec.dim, width) for p in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_evaluate_job(job) for job in jobs]
    rows = []
    for point, values in zip(points, results):
        rows.append([point[ax.name] for ax in spec.axes] + [point["N"]] + values)
    return spec.columns(), rows


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".17g")


def write_csv(header: Sequence[str], rows: Iterable[Sequence], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


_HALF_PI = math.pi / 2
_QUARTER_PI = math.pi / 4
_NS = (1, 2, 3)

# Axis ranges are covering choices; the figures only show curves.
PRESETS: dict[str, SweepSpec] = {
    "fig2": SweepSpec((Axis("s", 0.0, 1.0, 101),), _NS, "metrics",
                      fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig3": SweepSpec((Axis("theta", 0.0, _HALF_PI, 91),), _NS, "metrics",
                      fixed={"s": 0.5, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig4": SweepSpec((Axis("alpha_mod", 0.0, 3.0, 61), Axis("s", 0.0, 1.0, 51)), (1,), "metrics",
                      fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI}),
    "fig5": SweepSpec((Axis("s", 0.0, 1.0, 101),), _NS, "metrics",
                      fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig6": SweepSpec((Axis("phi_minus_beta", 0.0, 2 * math.pi, 121),), _NS, "metrics",
                      fixed={"s": 0.5, "theta": _QUARTER_PI, "alpha_mod": 1.0}),
    "fig7": SweepSpec((Axis("theta", 0.0, _HALF_PI, 91),), _NS, "metrics",
                      fixed={"s": 0.5, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig8": SweepSpec((Axis("alpha_mod", 0.0, 3.0, 61), Axis("s", 0.0, 1.0, 51)), (1,), "metrics",
                      fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI}),
    "fig9": SweepSpec((Axis("s", 0.0, 1.0, 101),), _NS, "metrics",
                      fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig10": SweepSpec((Axis("theta", 0.0, _HALF_PI, 91),), _NS, "metrics",
                       fixed={"s": 0.5, "phi_minus_beta": _HALF_PI, "alpha_mod": 1.0}),
    "fig11": SweepSpec((Axis("alpha_mod", 0.0, 3.0, 61), Axis("s", 0.0, 1.0, 51)), (1,), "probability",
                       fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI}),
    "fig12": SweepSpec((Axis("alpha_mod", 0.0, 3.0, 61), Axis("s", 0.0, 1.0, 51)), (3,), "probability",
                       fixed={"theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI}),
    "fig13": SweepSpec((Axis("alpha_mod", 0.2, 3.0, 29),), _NS, "fidelity",
                       fixed={"s": 0.5, "theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI, "eta": 0.7, "nu": 1e-4}),
    "fig14": SweepSpec((Axis("s", 0.0, 1.0, 21),), _NS, "fidelity",
                       fixed={"alpha_mod": 1.0, "theta": _QUARTER_PI, "phi_minus_beta": _HALF_PI,
                              "eta": 0.7, "nu": 1e-4}),
}


def preset(name: str, **overrides) -> SweepSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(spec, **overrides) if overrides else spec
