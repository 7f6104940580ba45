"""
Excepciones del toolkit; cada una lleva el código de salida que usa la CLI
"""
from typing import Optional


class ToolkitError(Exception):
    """Error base del toolkit"""

    exit_code: int = 1

    def __init__(self, message: str, field: Optional[str] = None, residual: Optional[float] = None):
        super().__init__(message)
        self.field = field
        self.residual = residual


class ParseError(ToolkitError):
    "Documento mal formado: JSON inválido, campo faltante o tipo incorrecto."
    exit_code = 2


class InvariantError(ToolkitError):
    "Un estado, canal o código viola sus invariantes (traza, hermiticidad, PSD, POVM)."
    exit_code = 3


class ShapeError(InvariantError):
    "Dimensiones o soportes incompatibles."


class CapacityError(ToolkitError):
    "Se excedió un límite configurado de dimensión, enumeración o barrido."
    exit_code = 4


class SolverIndeterminateError(ToolkitError):
    "El programa lineal agotó sus iteraciones sin converger."
    exit_code = 5
