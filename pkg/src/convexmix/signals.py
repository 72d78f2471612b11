"""Benchmark sequences and CSV input/output.

Synthetic sequence kinds cover the two benchmark setups (a clean expert
paired with an alternating one, with and without a small systematic offset)
plus simple building blocks, and external sequences load from CSV with
out-of-cap values clipped and counted.  Trajectory files round-trip through
a fixed 16-column schema with 17-significant-digit floats, so reloading is
exact.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .mixture import SignalSample

__all__ = [
    "KINDS",
    "TRAJECTORY_COLUMNS",
    "SequenceSpec",
    "TrajectoryFrame",
    "ParseError",
    "resolve",
    "generate",
    "load_csv",
    "write_trajectory",
    "read_trajectory",
    "samples_from_frame",
    "clip_samples",
]

KINDS = (
    "case1",
    "case2",
    "constant",
    "alternating",
    "square_wave",
    "piecewise_switch",
    "custom_file",
)

INPUT_COLUMNS = ("y", "yhat1", "yhat2")

TRAJECTORY_COLUMNS = (
    "t",
    "y",
    "yhat1",
    "yhat2",
    "lambda",
    "rho",
    "yhat",
    "e",
    "cum_loss",
    "best_beta_prefix",
    "best_loss_prefix",
    "regret",
    "norm_regret",
    "bound_norm",
    "in_range",
    "projected",
)


class ParseError(ValueError):
    """A CSV file did not match the expected schema; messages carry row numbers."""


@dataclass(frozen=True)
class SequenceSpec:
    """Recipe for a benchmark sequence.

    ``n`` is the horizon (for ``custom_file`` it may be 0, meaning all rows).
    ``y_bound`` and the kind-specific fields default per kind at resolve
    time.  Signs alternate starting negative at t = 1.
    """

    kind: str
    n: int = 0
    y_bound: float | None = None
    amplitude: float | None = None
    period: int | None = None
    switch_at: int | None = None
    path: str | None = None


def resolve(spec: SequenceSpec) -> SequenceSpec:
    """Fill kind-specific defaults and validate the spec."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown sequence kind {spec.kind!r}; expected one of {KINDS}")
    if spec.kind == "custom_file":
        if not spec.path:
            raise ValueError("custom_file sequences need a path")
        if spec.n < 0:
            raise ValueError(f"horizon must be nonnegative, got {spec.n}")
        y_bound = 1.0 if spec.y_bound is None else spec.y_bound
        if not (math.isfinite(y_bound) and y_bound > 0.0):
            raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")
        return replace(spec, y_bound=y_bound)

    if spec.n < 1:
        raise ValueError(f"horizon must be at least 1, got {spec.n}")
    if spec.kind == "case1":
        y_bound = 0.5 if spec.y_bound is None else spec.y_bound
    elif spec.kind == "case2":
        y_bound = 0.54 if spec.y_bound is None else spec.y_bound
    else:
        y_bound = 1.0 if spec.y_bound is None else spec.y_bound
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")

    amplitude = spec.amplitude
    if spec.kind in ("case1", "case2"):
        amplitude = None
    elif amplitude is None:
        amplitude = y_bound
    if amplitude is not None and abs(amplitude) > y_bound:
        raise ValueError(f"amplitude {amplitude} exceeds the magnitude cap {y_bound}")

    period = spec.period
    if spec.kind == "square_wave":
        period = 100 if period is None else period
        if period < 2:
            raise ValueError(f"period must be at least 2, got {period}")
    switch_at = spec.switch_at
    if spec.kind == "piecewise_switch":
        switch_at = spec.n // 2 if switch_at is None else switch_at
        if not 1 <= switch_at <= spec.n:
            raise ValueError(f"switch step must lie in [1, {spec.n}], got {switch_at}")
    return replace(spec, y_bound=y_bound, amplitude=amplitude, period=period, switch_at=switch_at)


def _sign(t: int) -> float:
    # alternation starts negative: -1 at t = 1, +1 at t = 2, ...
    return -1.0 if t % 2 == 1 else 1.0


def generate(spec: SequenceSpec) -> list[SignalSample]:
    """Materialize the sequence described by ``spec``."""
    spec = resolve(spec)
    y_bound = spec.y_bound
    if spec.kind == "case1":
        return [
            SignalSample(y=y_bound, yhat1=y_bound, yhat2=_sign(t) * y_bound)
            for t in range(1, spec.n + 1)
        ]
    if spec.kind == "case2":
        level = 0.5
        if y_bound < level:
            raise ValueError(f"magnitude cap {y_bound} is below the fixed target level {level}")
        return [
            SignalSample(y=level, yhat1=y_bound, yhat2=_sign(t) * level)
            for t in range(1, spec.n + 1)
        ]
    if spec.kind == "constant":
        a = spec.amplitude
        return [SignalSample(y=a, yhat1=a, yhat2=a) for _ in range(spec.n)]
    if spec.kind == "alternating":
        a = spec.amplitude
        return [SignalSample(y=a, yhat1=a, yhat2=_sign(t) * a) for t in range(1, spec.n + 1)]
    if spec.kind == "square_wave":
        a = spec.amplitude
        half = spec.period // 2
        out = []
        for t in range(1, spec.n + 1):
            sign = 1.0 if ((t - 1) // half) % 2 == 0 else -1.0
            out.append(SignalSample(y=sign * a, yhat1=a, yhat2=-a))
        return out
    if spec.kind == "piecewise_switch":
        a = spec.amplitude
        out = []
        for t in range(1, spec.n + 1):
            clean, noisy = a, _sign(t) * a
            if t <= spec.switch_at:
                out.append(SignalSample(y=a, yhat1=clean, yhat2=noisy))
            else:
                out.append(SignalSample(y=a, yhat1=noisy, yhat2=clean))
        return out
    # custom_file: delegate to the loader; clipping must never be silent
    samples, clipped = load_csv(spec.path, spec.y_bound)
    if clipped:
        warnings.warn(f"clipped {clipped} out-of-cap fields while loading {spec.path}")
    if spec.n >= 1:
        samples = samples[: spec.n]
    if not samples:
        raise ValueError(f"no samples left after truncation to n={spec.n}")
    return samples


def _clip(value: float, cap: float) -> float:
    return min(max(value, -cap), cap)


def load_csv(path: str, y_bound: float) -> tuple[list[SignalSample], int]:
    """Load a sequence from CSV, clipping fields into [-y_bound, y_bound].

    Accepts either the 3-column input schema (y, yhat1, yhat2) or a full
    trajectory file, whose input-echo columns are extracted.  Returns the
    samples and the number of clipped fields.
    """
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: row 1: empty file, expected a header") from None
        if tuple(header) == INPUT_COLUMNS:
            picks = (0, 1, 2)
        elif tuple(header) == TRAJECTORY_COLUMNS:
            picks = (1, 2, 3)
        else:
            raise ParseError(
                f"{path}: row 1: expected columns {','.join(INPUT_COLUMNS)} "
                f"(or a full trajectory header), got {','.join(header)}"
            )
        width = len(header)
        samples: list[SignalSample] = []
        clipped = 0
        for i, row in enumerate(reader, start=2):
            if len(row) != width:
                raise ParseError(f"{path}: row {i}: expected {width} columns, found {len(row)}")
            values = []
            for j in picks:
                cell = row[j].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{path}: row {i}: non-numeric value {cell!r}") from None
                if not math.isfinite(v):
                    raise ParseError(f"{path}: row {i}: non-finite value {cell!r}")
                c = _clip(v, y_bound)
                if c != v:
                    clipped += 1
                values.append(c)
            samples.append(SignalSample(*values))
        if not samples:
            raise ParseError(f"{path}: row 2: no data rows after the header")
    return samples, clipped


@dataclass
class TrajectoryFrame:
    """Column store of one run, matching TRAJECTORY_COLUMNS."""

    t: np.ndarray
    y: np.ndarray
    yhat1: np.ndarray
    yhat2: np.ndarray
    lam: np.ndarray
    rho: np.ndarray
    yhat: np.ndarray
    e: np.ndarray
    cum_loss: np.ndarray
    best_beta_prefix: np.ndarray
    best_loss_prefix: np.ndarray
    regret: np.ndarray
    norm_regret: np.ndarray
    bound_norm: np.ndarray
    in_range: np.ndarray
    projected: np.ndarray

    _FIELD_OF = {name: name for name in TRAJECTORY_COLUMNS}
    _FIELD_OF["lambda"] = "lam"

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in self._FIELD_OF:
            raise KeyError(f"unknown trajectory column {name!r}")
        return getattr(self, self._FIELD_OF[name])


def write_trajectory(frame: TrajectoryFrame, path: str) -> None:
    """Write the frame as CSV with full float precision (17 significant digits)."""
    if len(frame) == 0:
        raise ValueError("refusing to write an empty trajectory")
    cols = [frame.column(name) for name in TRAJECTORY_COLUMNS]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for i in range(len(frame)):
            row = [f"{int(cols[0][i])}"]
            row.extend(f"{float(c[i]):.17g}" for c in cols[1:14])
            row.append(f"{int(cols[14][i])}")
            row.append(f"{int(cols[15][i])}")
            writer.writerow(row)


def read_trajectory(path: str) -> TrajectoryFrame:
    """Read back a trajectory CSV written by :func:`write_trajectory`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: row 1: empty file, expected a header") from None
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ParseError(
                f"{path}: row 1: expected the trajectory columns "
                f"{','.join(TRAJECTORY_COLUMNS)}, got {','.join(header)}"
            )
        raw: list[list[str]] = []
        for i, row in enumerate(reader, start=2):
            if len(row) != len(TRAJECTORY_COLUMNS):
                raise ParseError(
                    f"{path}: row {i}: expected {len(TRAJECTORY_COLUMNS)} columns, found {len(row)}"
                )
            raw.append(row)
        if not raw:
            raise ParseError(f"{path}: row 2: no data rows after the header")
    data = {}
    for j, name in enumerate(TRAJECTORY_COLUMNS):
        cells = [r[j] for r in raw]
        try:
            if name == "t":
                data["t"] = np.array([int(c) for c in cells])
            elif name in ("in_range", "projected"):
                data[name] = np.array([int(c) for c in cells])
            else:
                key = "lam" if name == "lambda" else name
                data[key] = np.array([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"{path}: column {name}: {exc}") from None
    return TrajectoryFrame(**data)


def samples_from_frame(frame: TrajectoryFrame) -> list[SignalSample]:
    """Recover the input sequence echoed in a trajectory frame."""
    return [
        SignalSample(float(frame.y[i]), float(frame.yhat1[i]), float(frame.yhat2[i]))
        for i in range(len(frame))
    ]


def clip_samples(samples: Iterable[SignalSample], y_bound: float) -> tuple[list[SignalSample], int]:
    """Clip every field into [-y_bound, y_bound]; returns the clip count."""
    out: list[SignalSample] = []
    clipped = 0
    for s in samples:
        vals = []
        for v in (s.y, s.yhat1, s.yhat2):
            c = _clip(v, y_bound)
            if c != v:
                clipped += 1
            vals.append(c)
        out.append(SignalSample(*vals))
    return out, clipped
