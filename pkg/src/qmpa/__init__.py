"""Asymptotic structure of finite-dimensional quantum Markov processes."""
from .errors import QMPAError
from .models import ContinuousModel, DiscreteModel, load_model, parse_model
from .operators import MonotoneFunction, Superoperator
from .spectral import AttractorDecomposition, decompose
from .tolerances import DEFAULT, Tolerances

__version__ = "0.1.0"
