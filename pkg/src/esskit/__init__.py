"""Generalized effective sample size (G-ESS) toolkit.

Submodules:

* :mod:`esskit.simplex` -- normalized weight vectors.
* :mod:`esskit.metrics` -- G-ESS formulas, entropies, concentration indices.
* :mod:`esskit.properties` -- empirical checks of conditions C1-C5.
* :mod:`esskit.harness` -- Gaussian importance-sampling experiments.
* :mod:`esskit.model_select` -- effective number of components from error curves.
"""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import EssError  # noqa: E402
from .metrics import (  # noqa: E402
    EssMethod,
    EssValue,
    Family,
    concentration,
    ess_env,
    ess_gini,
    ess_golosov,
    ess_huggins_roy,
    ess_lp_distance,
    ess_plus,
    ess_q,
    ess_tsallis,
    ess_variance_form,
    evaluate,
    gini_impurity,
    q_exponential,
    renyi_entropy,
    tsallis_entropy,
)
from .simplex import (  # noqa: E402
    WeightVector,
    normalize,
    replicate,
    sort_ascending,
    uniform,
    vertex,
)

__all__ = [
    "BACKEND",
    "EssError",
    "EssMethod",
    "EssValue",
    "Family",
    "WeightVector",
    "concentration",
    "ess_env",
    "ess_gini",
    "ess_golosov",
    "ess_huggins_roy",
    "ess_lp_distance",
    "ess_plus",
    "ess_q",
    "ess_tsallis",
    "ess_variance_form",
    "evaluate",
    "gini_impurity",
    "normalize",
    "q_exponential",
    "renyi_entropy",
    "replicate",
    "sort_ascending",
    "tsallis_entropy",
    "uniform",
    "vertex",
]
