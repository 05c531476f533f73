"""Numerical explicit formulae, truncated spectral terms and Weil positivity
checks for zeta and Dirichlet L-functions."""
from .errors import (
    DomainError,
    IncompleteScanError,
    NearZeroError,
    ParameterError,
    PoleError,
    QuadratureError,
    TailError,
    WeilTraceError,
    ZeroFileError,
)

__version__ = "0.1.0"
