"""Shared test data and hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

# Table 2 columns (a)-(e), N = 5
TABLE2 = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 2, 1 / 2, 0.0, 0.0, 0.0],
    [1 / 3, 1 / 3, 1 / 3, 0.0, 0.0],
    [1 / 4, 1 / 4, 1 / 4, 1 / 4, 0.0],
    [1 / 5] * 5,
]

_positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def simplex_points(draw, min_n=1, max_n=12):
    """Normalized vectors, roughly a third of them with exact zeros."""
    n = draw(st.integers(min_n, max_n))
    raw = np.array(draw(st.lists(_positive, min_size=n, max_size=n)))
    if n > 1 and draw(st.integers(0, 2)) == 0:
        mask = np.array(draw(st.lists(st.booleans(), min_size=n, max_size=n)))
        if mask.all():
            mask[draw(st.integers(0, n - 1))] = False
        raw[mask] = 0.0
    return raw / raw.sum()


def random_simplex(rng, n, zero_prob=0.3):
    e = rng.standard_exponential(n)
    if n > 1 and rng.random() < zero_prob:
        k = int(rng.integers(1, n))
        e[rng.choice(n, size=k, replace=False)] = 0.0
    return e / e.sum()


# criterion number -> list of (label, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, list] = {}


def record(criterion, label, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed), detail))
    status = "pass" if passed else "FAIL"
    print(f"[criterion {criterion}] {label}: {status} {detail}".rstrip())
