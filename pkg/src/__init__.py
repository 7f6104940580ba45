"""
AVWC MCP Server - Herramientas para canales wiretap cuántico-clásicos
arbitrariamente variables: simetrizabilidad, cotas de capacidad secreta,
simulación de códigos y super-activación
"""

__version__ = "1.0.0"
__description__ = "Servidor MCP y línea de comandos para canales wiretap cuántico-clásicos arbitrariamente variables"

from .config import config
from .errors import (
    CapacityError,
    InvariantError,
    ParseError,
    ShapeError,
    SolverIndeterminateError,
    ToolkitError,
)

__all__ = [
    "config",
    "ToolkitError",
    "ParseError",
    "InvariantError",
    "ShapeError",
    "CapacityError",
    "SolverIndeterminateError",
]
