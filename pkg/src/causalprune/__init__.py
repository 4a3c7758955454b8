"""Identification of causal effects in semi-Markovian graphs, with pruning.

The main entry point is :func:`identify`, which returns a symbolic formula
for ``P_x(y)`` in terms of the observational joint (or a hedge proving that
no such formula exists).  :mod:`causalprune.oracle` checks formulas
numerically against random discrete models.
"""

from .components import HedgeWitness, maximal_c_components
from .expression import Distribution, canonicalize, metrics, parse, render
from .graph import LatentDag, Smg, latent_project_dag, latent_project_smg
from .identify import IdentifyResult, id_algorithm, identify, pid_algorithm
from .separation import d_separated

__all__ = [
    "Smg",
    "LatentDag",
    "latent_project_dag",
    "latent_project_smg",
    "d_separated",
    "maximal_c_components",
    "HedgeWitness",
    "Distribution",
    "canonicalize",
    "metrics",
    "parse",
    "render",
    "IdentifyResult",
    "identify",
    "id_algorithm",
    "pid_algorithm",
]

__version__ = "0.1.0"
