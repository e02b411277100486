"""Normalized weight vectors on the unit simplex.

A :class:`WeightVector` is an immutable, validated view of N nonnegative
entries summing to one. Everything else in the package consumes it.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import (
    AllZeroWeights,
    IndexOutOfRange,
    InvalidSize,
    InvalidWeight,
    NormalizationError,
)

__all__ = [
    "NORMALIZATION_TOL",
    "WeightVector",
    "as_weight_vector",
    "normalize",
    "uniform",
    "vertex",
    "replicate",
    "sort_ascending",
    "sample_simplex",
    "read_weights_csv",
    "write_weights_csv",
]

NORMALIZATION_TOL = 1e-9
# above this length sums are accumulated with math.fsum
_COMPENSATED_MIN_N = 10_000

ArrayLike = Union["WeightVector", Iterable[float], np.ndarray]


def _total(values: np.ndarray) -> float:
    if values.size > _COMPENSATED_MIN_N:
        return math.fsum(values)
    return float(values.sum())


def _as_float_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSize(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidSize("weight vector must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise InvalidWeight("weights must be finite")
    if np.any(arr < 0):
        raise InvalidWeight("weights must be nonnegative")
    return arr


class WeightVector:
    """Point on the unit simplex (normalized importance weights).

    Entries are stored in a read-only float64 array. Exact zeros are kept
    as they are; nothing is clipped or re-normalized on construction, so a
    vector that does not already sum to one within ``NORMALIZATION_TOL`` is
    rejected. Use :func:`normalize` for raw weights.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries) -> None:
        arr = _as_float_vector(entries)
        total = _total(arr)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(
                f"entries sum to {total!r}, not 1 within {NORMALIZATION_TOL}"
            )
        arr.setflags(write=False)
        self._entries = arr

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "WeightVector":
        # Internal constructor for arrays already known to be valid.
        obj = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        arr.setflags(write=False)
        obj._entries = arr
        return obj

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return int(self._entries.size)

    @property
    def n_zeros(self) -> int:
        """Number of entries that are exactly 0.0."""
        return int(np.count_nonzero(self._entries == 0.0))

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self._entries.tolist())

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self) -> int:
        return hash(self._entries.tobytes())

    def __repr__(self) -> str:
        return f"WeightVector({np.array2string(self._entries, separator=', ')})"

    def allclose(self, other: ArrayLike, atol: float = 1e-12) -> bool:
        other = np.asarray(other, dtype=np.float64)
        return other.shape == self._entries.shape and bool(
            np.allclose(self._entries, other, rtol=0.0, atol=atol)
        )


def as_weight_vector(w: ArrayLike) -> WeightVector:
    """Return ``w`` unchanged if it is a WeightVector, else validate it."""
    if isinstance(w, WeightVector):
        return w
    return WeightVector(w)


def normalize(raw) -> WeightVector:
    """Divide raw nonnegative weights by their sum.

    Raises
    ------
    InvalidSize
        Empty input.
    InvalidWeight
        A negative, NaN or infinite entry.
    AllZeroWeights
        Every entry is zero.
    """
    arr = _as_float_vector(raw)
    top = arr.max()
    if top == 0.0:
        raise AllZeroWeights("all raw weights are zero")
    # scale by the max first so the sum cannot overflow
    scaled = arr / top
    w = scaled / _total(scaled)
    return WeightVector._trusted(w)


def uniform(n: int) -> WeightVector:
    if n < 1:
        raise InvalidSize(f"n must be >= 1, got {n}")
    return WeightVector._trusted(np.full(n, 1.0 / n))


def vertex(n: int, j: int) -> WeightVector:
    """Simplex vertex with a one at position ``j`` (1-based)."""
    if n < 1:
        raise InvalidSize(f"n must be >= 1, got {n}")
    if not 1 <= j <= n:
        raise IndexOutOfRange(f"vertex index {j} outside 1..{n}")
    arr = np.zeros(n)
    arr[j - 1] = 1.0
    return WeightVector._trusted(arr)


def replicate(w: ArrayLike, m: int) -> WeightVector:
    """Concatenate ``m`` copies of ``w`` and rescale by ``1/m``."""
    w = as_weight_vector(w)
    if m < 1:
        raise InvalidSize(f"replication factor must be >= 1, got {m}")
    if m == 1:
        return w
    return WeightVector._trusted(np.tile(w.entries, m) / m)


def sort_ascending(w: ArrayLike) -> WeightVector:
    w = as_weight_vector(w)
    return WeightVector._trusted(np.sort(w.entries, kind="stable"))


def sample_simplex(
    rng: np.random.Generator, n: int, zero_prob: float = 0.0
) -> np.ndarray:
    """Draw a uniform point on the simplex from normalized exponentials.

    With probability ``zero_prob`` a random subset of entries (never all of
    them) is forced to exactly zero before normalizing.
    """
    e = rng.standard_exponential(n)
    if zero_prob > 0.0 and n > 1 and rng.random() < zero_prob:
        k = int(rng.integers(1, n))
        e[rng.choice(n, size=k, replace=False)] = 0.0
    return e / e.sum()


def read_weights_csv(path: Union[str, Path]) -> WeightVector:
    """Read a single-column CSV with header ``w`` or ``w_raw``.

    Lines starting with ``#`` are comments. ``w_raw`` columns are normalized;
    ``w`` columns must already lie on the simplex.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise InvalidSize(f"{path}: no header and no weights")
    header = rows[0][0].strip()
    if header not in ("w", "w_raw"):
        raise InvalidWeight(f"{path}: header must be 'w' or 'w_raw', got {header!r}")
    try:
        values = [float(r[0]) for r in rows[1:]]
    except ValueError as exc:
        raise InvalidWeight(f"{path}: {exc}") from None
    if not values:
        raise InvalidSize(f"{path}: no weights")
    if header == "w_raw":
        return normalize(values)
    return WeightVector(values)


def write_weights_csv(
    path: Union[str, Path], w, *, raw: bool = False, comment: str | None = None
) -> None:
    values = np.asarray(w, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["w_raw" if raw else "w"])
        for v in values:
            writer.writerow([repr(float(v))])
