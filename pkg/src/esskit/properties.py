"""Empirical checks of the five G-ESS conditions and the resulting class.

The checkers sample the simplex and can only refute a condition: a pass
means no counterexample was found in the trials that were run. Every
failure carries the offending weight vector so it can be replayed.

Conditions:

* C1 symmetry: invariant under permutations of the weights.
* C2 maximum: value N at the uniform vector.
* C3 minimum: value 1 at every vertex.
* C4 unicity: N only at uniform, 1 only at vertices.
* C5 stability: ``f_N(w) == f_{MN}(replicate(w, M)) / M``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .metrics import EssMethod, evaluate
from .simplex import WeightVector, replicate, sample_simplex, uniform, vertex

__all__ = [
    "GEssClass",
    "CheckResult",
    "AxiomReport",
    "check_symmetry",
    "check_extremes",
    "check_unicity",
    "check_stability",
    "classify",
    "unicity_probes",
]

EssFunction = Callable[[np.ndarray], float]
MethodLike = Union[EssMethod, EssFunction]

SYMMETRY_RTOL = 1e-9
EXTREMES_RTOL = 1e-9
STABILITY_RTOL = 1e-8
UNICITY_MARGIN = 1e-6
ZERO_PROBE_PROB = 0.3
DEFAULT_M_VALUES = (2, 3, 5)

# sub-stream tags so each condition draws from its own generator
_TAG_SYMMETRY, _TAG_UNICITY, _TAG_STABILITY = 1, 4, 5


class GEssClass(enum.Enum):
    DEGENERATE = "Degenerate"
    PROPER = "Proper"
    DEGENERATE_STABLE = "DegenerateStable"
    PROPER_STABLE = "ProperStable"
    NOT_A_G_ESS = "NotAGEss"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CheckResult:
    condition: str
    passed: bool
    note: str = ""
    counterexample: Optional[tuple] = None
    side: Optional[str] = None
    m: Optional[int] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None

    def __bool__(self) -> bool:
        return self.passed

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "FAIL"


@dataclass(frozen=True)
class AxiomReport:
    method: str
    n: int
    c1_symmetry: CheckResult
    c2_maximum: CheckResult
    c3_minimum: CheckResult
    c4_unicity: CheckResult
    c5_stability: CheckResult
    trials_used: int
    seed: int
    verdict: GEssClass = field(default=GEssClass.NOT_A_G_ESS)

    @property
    def checks(self) -> tuple[CheckResult, ...]:
        return (
            self.c1_symmetry,
            self.c2_maximum,
            self.c3_minimum,
            self.c4_unicity,
            self.c5_stability,
        )

    def to_table(self) -> str:
        lines = [
            f"method={self.method} n={self.n} trials={self.trials_used} seed={self.seed}",
            f"{'condition':<14}{'verdict':<9}detail",
        ]
        for c in self.checks:
            lines.append(f"{c.condition:<14}{c.verdict:<9}{_describe(c)}")
        lines.append(f"class: {self.verdict}")
        return "\n".join(lines)

    def csv_rows(self) -> list[dict]:
        return [
            {
                "method": self.method,
                "n": self.n,
                "condition": c.condition,
                "verdict": c.verdict,
                "detail": _describe(c),
                "class": str(self.verdict),
                "seed": self.seed,
            }
            for c in self.checks
        ]


def _describe(c: CheckResult) -> str:
    parts = [c.note] if c.note else []
    if c.counterexample is not None:
        w = ", ".join(f"{x:.6g}" for x in c.counterexample)
        parts.append(f"w=[{w}]")
    if c.side:
        parts.append(f"side={c.side}")
    if c.m is not None:
        parts.append(f"M={c.m} lhs={c.lhs:.10g} rhs={c.rhs:.10g}")
    return "; ".join(parts)


def _as_function(method: MethodLike) -> tuple[EssFunction, str]:
    if isinstance(method, EssMethod):

        def f(e: np.ndarray) -> float:
            return evaluate(method, WeightVector._trusted(e)).value

        return f, str(method)
    return method, getattr(method, "__name__", repr(method))


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), tag])


def check_symmetry(
    method: MethodLike, n: int, trials: int, seed: int
) -> CheckResult:
    f, _ = _as_function(method)
    rng = _rng(seed, _TAG_SYMMETRY)
    tol = SYMMETRY_RTOL * n
    for _ in range(trials):
        w = sample_simplex(rng, n, ZERO_PROBE_PROB)
        perm = rng.permutation(n)
        a, b = f(w), f(w[perm])
        if abs(a - b) > tol:
            return CheckResult(
                "C1 symmetry",
                False,
                note=f"f(w)={a:.10g} f(perm w)={b:.10g} perm={perm.tolist()}",
                counterexample=tuple(w.tolist()),
            )
    return CheckResult("C1 symmetry", True, note=f"{trials} random permutations")


def check_extremes(method: MethodLike, n: int) -> tuple[CheckResult, CheckResult]:
    """Check C2 at ``uniform(n)`` and C3 at all ``n`` vertices.

    Returns the pair ``(maximum, minimum)``; ``all(check_extremes(...))``
    is the combined verdict.
    """
    f, _ = _as_function(method)
    tol = EXTREMES_RTOL * n
    u = uniform(n).entries
    top = f(u)
    if abs(top - n) > tol:
        c2 = CheckResult(
            "C2 maximum", False, note=f"f(uniform)={top:.10g}", counterexample=tuple(u)
        )
    else:
        c2 = CheckResult("C2 maximum", True, note=f"f(uniform)={top:.10g}")
    c3 = CheckResult("C3 minimum", True, note=f"all {n} vertices give 1")
    for j in range(1, n + 1):
        v = vertex(n, j).entries
        val = f(v)
        if abs(val - 1.0) > tol:
            c3 = CheckResult(
                "C3 minimum",
                False,
                note=f"f(vertex {j})={val:.10g}",
                counterexample=tuple(v.tolist()),
            )
            break
    return c2, c3


def _near_extreme(w: np.ndarray, margin: float) -> bool:
    n = w.size
    if np.max(np.abs(w - 1.0 / n)) <= margin:
        return True
    j = int(np.argmax(w))
    rest = np.delete(w, j)
    far = max(abs(1.0 - w[j]), float(rest.max()) if rest.size else 0.0)
    return far <= margin


def unicity_probes(n: int) -> list[np.ndarray]:
    """Structured non-extreme points with one dominant entry.

    Each probe puts mass ``d`` on the first entry and spreads ``1 - d``
    evenly over the last ``k`` entries, leaving exact zeros in between.
    For ``n == 3`` the first probe is ``[0.8, 0, 0.2]``.
    """
    probes = []
    # (dominant, remainder) pairs written out so 0.8 + 0.2 is exact
    for d, rest in ((0.8, 0.2), (0.9, 0.1), (0.6, 0.4), (0.5, 0.5), (0.99, 0.01)):
        for k in range(1, n):
            w = np.zeros(n)
            w[0] = d
            w[n - k :] = rest / k
            probes.append(w)
    return probes


def check_unicity(
    method: MethodLike, n: int, trials: int, seed: int
) -> CheckResult:
    f, _ = _as_function(method)
    rng = _rng(seed, _TAG_UNICITY)
    hi, lo = n - UNICITY_MARGIN, 1.0 + UNICITY_MARGIN

    def violation(w: np.ndarray, origin: str) -> Optional[CheckResult]:
        val = f(w)
        side = "max" if val >= hi else "min" if val <= lo else None
        if side is None:
            return None
        return CheckResult(
            "C4 unicity",
            False,
            note=f"{origin} point gives {val:.10g}",
            counterexample=tuple(w.tolist()),
            side=side,
        )

    for w in unicity_probes(n):
        if not _near_extreme(w, UNICITY_MARGIN):
            bad = violation(w, "probe")
            if bad is not None:
                return bad
    accepted = 0
    attempts = 0
    while accepted < trials and attempts < 100 * trials:
        attempts += 1
        w = sample_simplex(rng, n, ZERO_PROBE_PROB)
        if _near_extreme(w, UNICITY_MARGIN):
            continue
        accepted += 1
        bad = violation(w, "random")
        if bad is not None:
            return bad
    return CheckResult(
        "C4 unicity", True, note=f"no counterexample found in {accepted} trials"
    )


def check_stability(
    method: MethodLike,
    n: int,
    m_values: Sequence[int] = DEFAULT_M_VALUES,
    trials: int = 500,
    seed: int = 0,
) -> CheckResult:
    f, _ = _as_function(method)
    rng = _rng(seed, _TAG_STABILITY)
    tol = STABILITY_RTOL * n
    for _ in range(trials):
        w = sample_simplex(rng, n, ZERO_PROBE_PROB)
        lhs = f(w)
        for m in m_values:
            rhs = f(replicate(WeightVector._trusted(w), m).entries) / m
            if abs(lhs - rhs) > tol:
                return CheckResult(
                    "C5 stability",
                    False,
                    counterexample=tuple(w.tolist()),
                    m=int(m),
                    lhs=lhs,
                    rhs=rhs,
                )
    return CheckResult(
        "C5 stability", True, note=f"{trials} vectors, M in {list(m_values)}"
    )


_CLASS_TABLE = {
    (True, True): GEssClass.PROPER_STABLE,
    (True, False): GEssClass.PROPER,
    (False, True): GEssClass.DEGENERATE_STABLE,
    (False, False): GEssClass.DEGENERATE,
}


def classify(
    method: MethodLike,
    n: int,
    trials: int,
    seed: int,
    m_values: Iterable[int] = DEFAULT_M_VALUES,
) -> tuple[GEssClass, AxiomReport]:
    """Run all checks and map the verdict pattern to a G-ESS class."""
    _, label = _as_function(method)
    c1 = check_symmetry(method, n, trials, seed)
    c2, c3 = check_extremes(method, n)
    c4 = check_unicity(method, n, trials, seed)
    c5 = check_stability(method, n, tuple(m_values), trials, seed)
    if c1 and c2 and c3:
        cls = _CLASS_TABLE[(c4.passed, c5.passed)]
    else:
        cls = GEssClass.NOT_A_G_ESS
    report = AxiomReport(label, n, c1, c2, c3, c4, c5, trials, int(seed), cls)
    return cls, report
