"""Chromatic vs cochromatic number of G(n, 1/2): exact solvers, moment
computations, colouring-profile optimisation and partition-pair machinery."""

from chizeta.logreal import LogReal, set_precision
from chizeta.graph import Graph, GnmParams, complement, sample_gnm, sample_gnp_half

__all__ = [
    "LogReal",
    "set_precision",
    "Graph",
    "GnmParams",
    "complement",
    "sample_gnm",
    "sample_gnp_half",
]

__version__ = "0.1.0"
