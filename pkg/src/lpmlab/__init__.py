"""Latent position network models: analytic statistics, simulation and fitting."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .degree import (
    DegreeDistribution,
    FactorialMoments,
    annd_curve,
    annd_of_degree,
    annd_of_position,
    degree_pmf,
    degree_probabilities,
    dispersion_index,
    factorial_moments,
    latent_average,
    mean_degree,
    pgf_eval,
    skewness,
    theta,
)
from .fit import FitResult, InfeasibleFitError, fit_lpm, fit_lpmre_tail
from .graph import Graph, GraphReport, graph_report, read_edge_list, write_edge_list
from .kernel import (
    ErdosRenyi,
    GaussianLpcm,
    GaussianLpm,
    GaussianLpmre,
    LatentPoint,
    LogisticLpm,
    MixtureComponent,
    ModelError,
    connection_probability,
)
from .quadrature import McSpec, QuadratureError, QuadratureSpec
from .simulate import SimConfig, generate_graph, sample_latents
from .structure import (
    asymptotic_regime,
    average_path_length,
    clustering_coefficient,
    geodesic_distribution,
    mean_geodesic_distribution,
    path_integral,
    path_kernel,
)

__all__ = [name for name in dir() if not name.startswith("_")]
