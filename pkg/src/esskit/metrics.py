"""Generalized effective sample size (G-ESS) formulas and related indices.

All functions take normalized weights (a :class:`~esskit.simplex.WeightVector`
or anything convertible to one) and are pure. ESS-valued functions return an
:class:`EssValue`; entropies and concentrations return plain floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameter
from .simplex import ArrayLike, WeightVector, as_weight_vector

__all__ = [
    "Family",
    "EssMethod",
    "EssValue",
    "evaluate",
    "ess_huggins_roy",
    "renyi_entropy",
    "shannon_entropy",
    "tsallis_entropy",
    "ess_tsallis",
    "gini_impurity",
    "q_exponential",
    "ess_lp_distance",
    "ess_plus",
    "ess_q",
    "ess_gini",
    "ess_env",
    "ess_golosov",
    "concentration",
    "ess_variance_form",
]

# relative slack on the 1/N threshold used by ess_plus / ess_q, so entries
# equal to 1/N in exact arithmetic are not split by a last-bit rounding
_THRESHOLD_RTOL = 1e-12


class Family(enum.Enum):
    """G-ESS families; the value is the CLI specifier prefix."""

    HUGGINS_ROY = "hr"
    TSALLIS = "ts"
    LP_DISTANCE = "lp"
    PLUS = "plus"
    Q = "q"
    GINI = "gini"
    GOLOSOV = "gol"
    ENV = "env"

    @property
    def parametric(self) -> bool:
        return self in (Family.HUGGINS_ROY, Family.TSALLIS, Family.LP_DISTANCE)


@dataclass(frozen=True)
class EssValue:
    """An effective sample count together with the vector size."""

    value: float
    n: int

    @property
    def rate(self) -> float:
        return self.value / self.n

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class EssMethod:
    """A G-ESS family plus its real parameter (0.0 for non-parametric ones).

    >>> EssMethod.parse("hr:inf")
    EssMethod(family=<Family.HUGGINS_ROY: 'hr'>, parameter=inf)
    """

    family: Family
    parameter: float = 0.0

    def __post_init__(self) -> None:
        p = float(self.parameter)
        object.__setattr__(self, "parameter", p)
        if math.isnan(p):
            raise InvalidParameter(f"{self.family.name}: parameter is NaN")
        if self.family is Family.HUGGINS_ROY:
            if p < 0:
                raise InvalidParameter(f"beta must be in [0, inf], got {p}")
        elif self.family is Family.TSALLIS:
            if not 0 < p < math.inf:
                raise InvalidParameter(f"alpha must be in (0, inf), got {p}")
        elif self.family is Family.LP_DISTANCE:
            if not 0 < p < math.inf:
                raise InvalidParameter(f"p must be positive and finite, got {p}")
        elif p != 0.0:
            raise InvalidParameter(f"{self.family.value} takes no parameter")

    @classmethod
    def parse(cls, spec: str) -> "EssMethod":
        """Parse ``hr:<beta|inf>``, ``ts:<alpha>``, ``lp:<p>``, ``plus``,
        ``q``, ``gini``, ``env`` or ``gol``."""
        head, sep, tail = spec.strip().partition(":")
        try:
            family = Family(head.lower())
        except ValueError:
            raise InvalidParameter(f"unknown method specifier {spec!r}") from None
        if family.parametric:
            if not sep or not tail:
                raise InvalidParameter(f"{spec!r}: {head} needs a parameter")
            try:
                value = float(tail)
            except ValueError:
                raise InvalidParameter(f"{spec!r}: bad parameter {tail!r}") from None
            return cls(family, value)
        if sep:
            raise InvalidParameter(f"{spec!r}: {head} takes no parameter")
        return cls(family)

    def __str__(self) -> str:
        if not self.family.parametric:
            return self.family.value
        p = self.parameter
        return f"{self.family.value}:{'inf' if math.isinf(p) else format(p, 'g')}"

    def __call__(self, w: ArrayLike) -> float:
        return evaluate(self, w).value


def _positive(w: WeightVector) -> np.ndarray:
    e = w.entries
    return e[e > 0.0]


def shannon_entropy(w: ArrayLike) -> float:
    """Shannon entropy in nats, with 0 log 0 taken as 0."""
    p = _positive(as_weight_vector(w))
    return float(-np.sum(p * np.log(p)))


def renyi_entropy(w: ArrayLike, beta: float) -> float:
    """Rényi entropy of order ``beta`` in nats.

    ``beta`` may be ``math.inf`` (min-entropy); ``beta == 1`` gives the
    Shannon entropy. The power sum is evaluated as a log-sum-exp over the
    strictly positive entries.
    """
    beta = float(beta)
    if math.isnan(beta) or beta <= 0:
        raise InvalidParameter(f"Renyi order must be > 0, got {beta}")
    w = as_weight_vector(w)
    if beta == 1.0:
        return shannon_entropy(w)
    p = _positive(w)
    top = p.max()
    if math.isinf(beta):
        return float(-np.log(top))
    # log-sum-exp shifted by the largest term; every exponent is <= 0
    log_sum = beta * math.log(top) + math.log(np.exp(beta * np.log(p / top)).sum())
    return float(log_sum / (1.0 - beta))


def ess_huggins_roy(w: ArrayLike, beta: float) -> EssValue:
    r"""Huggins-Roy ESS, :math:`(\sum_n \bar w_n^\beta)^{1/(1-\beta)}`.

    Parameters
    ----------
    w : WeightVector or array_like
        Normalized weights.
    beta : float
        Order in ``[0, inf]``. Exactly 0, 1 and ``inf`` select the
        limiting forms: count of nonzero entries, perplexity and
        ``1 / max(w)``. No switching happens near those values.

    Returns
    -------
    EssValue
    """
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise InvalidParameter(f"beta must be in [0, inf], got {beta}")
    w = as_weight_vector(w)
    if beta == 0.0:
        return EssValue(float(w.n - w.n_zeros), w.n)
    return EssValue(math.exp(renyi_entropy(w, beta)), w.n)


def tsallis_entropy(w: ArrayLike, alpha: float) -> float:
    alpha = float(alpha)
    if math.isnan(alpha) or alpha <= 0:
        raise InvalidParameter(f"alpha must be > 0, got {alpha}")
    w = as_weight_vector(w)
    if alpha == 1.0:
        return shannon_entropy(w)
    p = _positive(w)
    return float((1.0 - np.sum(p**alpha)) / (alpha - 1.0))


def _tsallis_uniform(n: int, alpha: float) -> float:
    # Tsallis entropy of the uniform pmf on n points
    if alpha == 1.0:
        return math.log(n)
    return -math.expm1((1.0 - alpha) * math.log(n)) / (alpha - 1.0)


def ess_tsallis(w: ArrayLike, alpha: float) -> EssValue:
    """Tsallis-entropy ESS, rescaled so vertices give 1 and uniform gives N.

    Equivalent to ``1 + (N - 1) * T(w) / T(uniform)``; at ``alpha == 2``
    this is ``N * gini_impurity(w) + 1``.
    """
    alpha = float(alpha)
    if math.isnan(alpha) or alpha <= 0:
        raise InvalidParameter(f"alpha must be > 0, got {alpha}")
    w = as_weight_vector(w)
    n = w.n
    if n == 1:
        return EssValue(1.0, 1)
    t = tsallis_entropy(w, alpha)
    return EssValue(1.0 + (n - 1) * t / _tsallis_uniform(n, alpha), n)


def gini_impurity(w: ArrayLike) -> float:
    e = as_weight_vector(w).entries
    return float(1.0 - np.dot(e, e))


def q_exponential(t: float, alpha: float) -> float:
    """Deformed exponential ``(1 + (1 - alpha) t)^(1 / (1 - alpha))``."""
    alpha = float(alpha)
    if alpha == 1.0:
        return math.exp(t)
    base = 1.0 + (1.0 - alpha) * t
    if base < 0.0:
        raise DomainError(f"1 + (1 - alpha) * t = {base} < 0")
    expo = 1.0 / (1.0 - alpha)
    if base == 0.0:
        return 0.0 if expo > 0 else math.inf
    return math.exp(expo * math.log(base))


def _lp_norm(d: np.ndarray, p: float) -> float:
    a = np.abs(d)
    top = a.max()
    if top == 0.0:
        return 0.0
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def _lp_scale(n: int, p: float) -> float:
    # (N-1) / (N [(N-1 + (N-1)^p) / N^p]^(1/p)), in logs to survive large p
    lm = math.log(n - 1)
    inner = (np.logaddexp(lm, p * lm) - p * math.log(n)) / p
    return (n - 1) / (n * math.exp(inner))


def ess_lp_distance(w: ArrayLike, p: float) -> EssValue:
    """ESS from the L_p distance to the uniform pmf (proper, not stable)."""
    p = float(p)
    if math.isnan(p) or not 0 < p < math.inf:
        raise InvalidParameter(f"p must be positive and finite, got {p}")
    w = as_weight_vector(w)
    n = w.n
    if n == 1:
        return EssValue(1.0, 1)
    dist = _lp_norm(w.entries - 1.0 / n, p)
    return EssValue(1.0 / (_lp_scale(n, p) * dist + 1.0 / n), n)


def _split_at_mean(w: WeightVector) -> tuple[int, float]:
    e = w.entries
    thr = (1.0 / w.n) * (1.0 - _THRESHOLD_RTOL)
    big = e >= thr
    return int(np.count_nonzero(big)), float(e[~big].sum())


def ess_plus(w: ArrayLike) -> EssValue:
    """Number of weights at or above 1/N."""
    w = as_weight_vector(w)
    n_plus, _ = _split_at_mean(w)
    return EssValue(float(n_plus), w.n)


def ess_q(w: ArrayLike) -> EssValue:
    """``N+ + N * gamma`` with gamma the mass strictly below 1/N."""
    w = as_weight_vector(w)
    n_plus, gamma = _split_at_mean(w)
    return EssValue(n_plus + w.n * gamma, w.n)


def ess_gini(w: ArrayLike) -> EssValue:
    """ESS from the Gini inequality coefficient: ``N - N * G(w)``."""
    w = as_weight_vector(w)
    n = w.n
    ranked = np.sort(w.entries, kind="stable")
    s = float(np.dot(np.arange(1, n + 1, dtype=np.float64), ranked))
    return EssValue(-2.0 * s + 1.0 + 2.0 * n, n)


def ess_env(w: ArrayLike) -> EssValue:
    """Lorenz-curve (ENV) form: one plus twice the interior cumulative sums."""
    w = as_weight_vector(w)
    lorenz = np.cumsum(np.sort(w.entries, kind="stable"))
    return EssValue(1.0 + 2.0 * float(lorenz[:-1].sum()), w.n)


def ess_golosov(w: ArrayLike) -> EssValue:
    w = as_weight_vector(w)
    p = _positive(w)
    top2 = p.max() ** 2
    return EssValue(float(np.sum(p / (p + top2 - p * p))), w.n)


def concentration(w: ArrayLike, beta: float) -> float:
    """Reciprocal of the Huggins-Roy ESS (Herfindahl-Hirschman at beta=2)."""
    beta = float(beta)
    if math.isnan(beta) or beta <= 0:
        raise InvalidParameter(f"beta must be > 0, got {beta}")
    return 1.0 / ess_huggins_roy(w, beta).value


def ess_variance_form(w: ArrayLike) -> EssValue:
    w = as_weight_vector(w)
    n = w.n
    var = float(np.mean((w.entries - 1.0 / n) ** 2))
    return EssValue(1.0 / (1.0 / n + n * var), n)


def evaluate(method: EssMethod, w: ArrayLike) -> EssValue:
    fam = method.family
    if fam is Family.HUGGINS_ROY:
        return ess_huggins_roy(w, method.parameter)
    if fam is Family.TSALLIS:
        return ess_tsallis(w, method.parameter)
    if fam is Family.LP_DISTANCE:
        return ess_lp_distance(w, method.parameter)
    return _NONPARAMETRIC[fam](w)


_NONPARAMETRIC = {
    Family.PLUS: ess_plus,
    Family.Q: ess_q,
    Family.GINI: ess_gini,
    Family.GOLOSOV: ess_golosov,
    Family.ENV: ess_env,
}
