"""Adaptive Laplacian-regularized tests for multivariate means on graphs."""

__version__ = "0.1.0"

from graphtest.errors import DataError, InfeasibleError  # noqa: E402
from graphtest.graph import (Graph, Spectrum, build_graph, closed_form_eigenvalues,  # noqa: E402
                             components, generate, graph_spectrum, laplacian, spectrum)
from graphtest.statistics import (OptimizerConfig, project_scores, smooth_scores,  # noqa: E402
                                  t_lambda, t_max)

__all__ = [
    "DataError", "InfeasibleError", "Graph", "Spectrum", "build_graph",
    "closed_form_eigenvalues", "components", "generate", "graph_spectrum",
    "laplacian", "spectrum", "OptimizerConfig", "project_scores", "smooth_scores",
    "t_lambda", "t_max",
]
