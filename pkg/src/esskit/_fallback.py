"""Pure numpy implementation of the batched Huggins-Roy kernel.

Mirrors ``_kernels.pyx`` step for step (same recursion and re-anchoring
policy) minus the negligible-term truncation, so both backends agree to
~1e-13 relative.
"""

import math

import numpy as np

# recompute powers directly after this many multiplicative steps
ANCHOR_EVERY = 64
GAP_RTOL = 1e-12


def ess_h_batch(weights, betas):
    """Huggins-Roy ESS of each row of ``weights`` at every order in ``betas``.

    Parameters
    ----------
    weights : (B, N) array
        Rows are normalized weight vectors (nonnegative, summing to one).
    betas : (K,) array
        Orders in ``[0, inf]``. 0, 1 and inf use their limiting forms.
        Ascending grids are evaluated by repeated multiplication.

    Returns
    -------
    (B, K) array of ESS values.
    """
    w = np.ascontiguousarray(weights, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("weights must be 2-D")
    n_rows = w.shape[0]
    out = np.empty((n_rows, betas.size))
    if n_rows == 0:
        return out

    wmax = w.max(axis=1)
    log_wmax = np.log(wmax)
    pos = w > 0.0
    nnz = pos.sum(axis=1).astype(np.float64)
    safe = np.where(pos, w, 1.0)
    entropy = -np.sum(np.where(pos, w * np.log(safe), 0.0), axis=1)
    with np.errstate(divide="ignore"):
        lu = np.log(w / wmax[:, None])  # -inf at zero weights

    t = step = None
    prev = gap = math.nan
    since = 0
    for k, b in enumerate(betas):
        if b == 0.0:
            out[:, k] = nnz
            continue
        if math.isinf(b):
            out[:, k] = 1.0 / wmax
            continue
        g = b - prev
        if (
            t is not None
            and g > 0.0
            and since < ANCHOR_EVERY
            and abs(g - gap) <= GAP_RTOL * g
        ):
            t *= step
            since += 1
        else:
            t = np.exp(b * lu)
            since = 0
            if g > 0.0:
                gap = g
                step = np.exp(g * lu)
            else:
                gap = math.nan
        prev = b
        if b == 1.0:
            out[:, k] = np.exp(entropy)
        else:
            s = t.sum(axis=1)
            out[:, k] = np.exp((b * log_wmax + np.log(s)) / (1.0 - b))
    return out
