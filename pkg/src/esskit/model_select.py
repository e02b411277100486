"""Effective number of components from monotone error curves.

A non-increasing error curve V(0..N) (e.g. validation error against the
number of variables kept) is turned into weights from its successive
drops; any G-ESS of those weights is an effective number of components.
The ENV index works on the curve directly.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import CurveFormatError, FlatCurve, NotMonotone
from .metrics import EssMethod, evaluate
from .simplex import ArrayLike, WeightVector, as_weight_vector

__all__ = [
    "Direction",
    "ErrorCurve",
    "EffectiveComponents",
    "weights_from_error_curve",
    "env_index",
    "ess_env_via_curve",
    "effective_components",
    "round_half_away",
    "read_curve_csv",
]

JITTER_TOL = 1e-12


class Direction(enum.Enum):
    NON_INCREASING = "non-increasing"
    NON_DECREASING = "non-decreasing"


@dataclass(frozen=True)
class ErrorCurve:
    """Monotone curve V(0), ..., V(N), translated so it ends (or starts) at 0.

    Steps against the declared direction of at most ``JITTER_TOL`` are
    flattened; larger ones raise :class:`NotMonotone`. A non-increasing
    curve is shifted so V(N) = 0 and a non-decreasing one so V(0) = 0; the
    amount subtracted is kept in ``shift``.
    """

    values: np.ndarray
    direction: Direction = Direction.NON_INCREASING
    shift: float = 0.0

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise CurveFormatError("an error curve needs at least two points")
        if not np.all(np.isfinite(v)):
            raise CurveFormatError("error curve values must be finite")
        direction = Direction(self.direction)
        # positive steps in the declared direction
        steps = v[:-1] - v[1:] if direction is Direction.NON_INCREASING else np.diff(v)
        if np.any(steps < -JITTER_TOL):
            k = int(np.argmin(steps)) + 1
            raise NotMonotone(f"curve is not {direction.value} at k={k}")
        if direction is Direction.NON_INCREASING:
            v = np.minimum.accumulate(v)
            shift = float(v[-1])
        else:
            v = np.maximum.accumulate(v)
            shift = float(v[0])
        v = v - shift
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "shift", self.shift + shift)

    @property
    def n(self) -> int:
        """Number of components, i.e. ``len(values) - 1``."""
        return self.values.size - 1

    def drops(self) -> np.ndarray:
        if self.direction is Direction.NON_INCREASING:
            return self.values[:-1] - self.values[1:]
        return np.diff(self.values)


@dataclass(frozen=True)
class EffectiveComponents:
    raw: float
    rounded: int
    method: EssMethod
    shift: float = 0.0


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def _as_curve(curve) -> ErrorCurve:
    return curve if isinstance(curve, ErrorCurve) else ErrorCurve(curve)


def weights_from_error_curve(curve) -> WeightVector:
    """Normalized drops ``d_k = V(k-1) - V(k)`` of a non-increasing curve."""
    curve = _as_curve(curve)
    if curve.direction is not Direction.NON_INCREASING:
        raise NotMonotone("weights are built from a non-increasing curve")
    d = curve.drops()
    total = float(d.sum())
    if total <= 0.0:
        raise FlatCurve("V(0) equals V(N); the curve has no drop")
    return WeightVector._trusted(d / total)


def env_index(curve) -> float:
    """ENV index ``1 + (2 / V_ref) * sum_{k=1}^{N-1} V(k)``.

    ``V_ref`` is V(0) for a non-increasing curve and V(N) for a
    non-decreasing one.
    """
    curve = _as_curve(curve)
    v = curve.values
    ref = v[0] if curve.direction is Direction.NON_INCREASING else v[-1]
    if ref == 0.0:
        raise FlatCurve("ENV normalizer is zero")
    return float(1.0 + 2.0 * v[1:-1].sum() / ref)


def ess_env_via_curve(w: ArrayLike) -> float:
    """ENV index of the cumulative curve of ``w`` sorted ascending."""
    w = as_weight_vector(w)
    lorenz = np.concatenate(([0.0], np.cumsum(np.sort(w.entries, kind="stable"))))
    return env_index(ErrorCurve(lorenz, Direction.NON_DECREASING))


def effective_components(curve, method: EssMethod) -> EffectiveComponents:
    curve = _as_curve(curve)
    raw = evaluate(method, weights_from_error_curve(curve)).value
    return EffectiveComponents(raw, round_half_away(raw), method, curve.shift)


def read_curve_csv(
    path: Union[str, Path], direction: Direction = Direction.NON_INCREASING
) -> ErrorCurve:
    """Read a two-column ``k,V`` CSV with k = 0..N, each exactly once."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["k", "V"]:
        raise CurveFormatError(f"{path}: header must be 'k,V'")
    points: dict[int, float] = {}
    for row in reader:
        try:
            k = int(row["k"])
            value = float(row["V"])
        except (TypeError, ValueError):
            raise CurveFormatError(f"{path}: bad row {row}") from None
        if k in points:
            raise CurveFormatError(f"{path}: duplicate k={k}")
        points[k] = value
    if sorted(points) != list(range(len(points))):
        raise CurveFormatError(f"{path}: k must run over 0..N without gaps")
    return ErrorCurve([points[k] for k in range(len(points))], direction)
