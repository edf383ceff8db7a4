"""nambu-forge: exact Nambu brackets, star and sun products, and Zariski
quantization over the rationals, with a numeric Weyl-quantization oracle."""

from .errors import (
    ExprSyntaxError,
    IntegrationFailureError,
    InvalidArgumentError,
    NambuForgeError,
    ResourceLimitError,
)
from .poly import NuObject, Poly, TSeries, VarSpace

__version__ = "0.1.0"

__all__ = [
    "ExprSyntaxError",
    "IntegrationFailureError",
    "InvalidArgumentError",
    "NambuForgeError",
    "ResourceLimitError",
    "NuObject",
    "Poly",
    "TSeries",
    "VarSpace",
    "__version__",
]
