"""Pick the compiled kernel if it is importable, else the numpy fallback.

Set ``ESSKIT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
ess_h_batch = _fallback.ess_h_batch

if os.environ.get("ESSKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import ess_h_batch  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"
