"""
Método símplex denso de dos fases con regla de Bland

Resuelve  min c·x  s.a.  A_ub x ≤ b_ub,  A_eq x = b_eq,  x ≥ 0
para problemas pequeños (decenas de variables); la regla de Bland evita ciclos
y hace el pivoteo determinista.
"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel

from .errors import SolverIndeterminateError, ToolkitError

PIVOT_EPS = 1e-12
FEASIBILITY_EPS = 1e-9


class UnboundedError(ToolkitError):
    "El objetivo no está acotado inferiormente."


class InfeasibleError(ToolkitError):
    "El conjunto factible es vacío."


class LPSolution(BaseModel):
    """Solución óptima del programa lineal"""
    x: list
    objective: float
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _iterate(T: np.ndarray, basis: np.ndarray, n_cols: int, max_iter: int) -> Tuple[int, bool]:
    """Pivotea hasta optimalidad de la última fila; devuelve (iteraciones, convergió)"""
    for it in range(max_iter):
        entering = np.flatnonzero(T[-1, :n_cols] < -PIVOT_EPS)
        if entering.size == 0:
            return it, True
        col = int(entering[0])

        column = T[:-1, col]
        rows = np.flatnonzero(column > PIVOT_EPS)
        if rows.size == 0:
            raise UnboundedError(f"simplex: columna {col} sin cota")
        ratios = T[rows, -1] / column[rows]
        ties = rows[ratios <= ratios.min() + PIVOT_EPS]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, col)
    return max_iter, False


def solve_lp(
    c: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    max_iter: int = 5000,
) -> LPSolution:
    """
    Resuelve el programa lineal con el método de dos fases.

    Args:
        c: Costos (n,)
        A_ub, b_ub: Restricciones ≤ con b_ub ≥ 0
        A_eq, b_eq: Restricciones de igualdad
        max_iter: Límite de pivoteos por fase

    Returns:
        LPSolution con el vértice óptimo

    Raises:
        InfeasibleError, UnboundedError, SolverIndeterminateError
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    if np.any(b_ub < 0):
        raise ToolkitError("simplex: se requiere b_ub ≥ 0")

    # Filas de igualdad con lado derecho no negativo
    flip = b_eq < 0
    A_eq = np.where(flip[:, None], -A_eq, A_eq)
    b_eq = np.abs(b_eq)

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    n_cols = n + m_ub + m_eq

    T = np.zeros((m + 1, n_cols + 1))
    T[:m_ub, :n] = A_ub
    T[:m_ub, n:n + m_ub] = np.eye(m_ub)
    T[:m_ub, -1] = b_ub
    T[m_ub:m, :n] = A_eq
    T[m_ub:m, n + m_ub:n_cols] = np.eye(m_eq)
    T[m_ub:m, -1] = b_eq
    basis = np.arange(n, n_cols)

    # Fase 1: minimizar la suma de artificiales
    T[-1, n + m_ub:n_cols] = 1.0
    T[-1] -= T[m_ub:m].sum(axis=0)
    it1, done = _iterate(T, basis, n_cols, max_iter)
    if not done:
        raise SolverIndeterminateError("simplex: fase 1 sin converger", residual=float("inf"))
    if -T[-1, -1] > FEASIBILITY_EPS:
        raise InfeasibleError(f"simplex: infactible (suma de artificiales {-T[-1, -1]:.3e})")

    # Sacar artificiales de la base; filas sin pivote posible son redundantes
    keep_rows = []
    for i in range(m):
        if basis[i] >= n + m_ub:
            candidates = np.flatnonzero(np.abs(T[i, :n + m_ub]) > PIVOT_EPS)
            if candidates.size == 0:
                continue
            _pivot(T, basis, i, int(candidates[0]))
        keep_rows.append(i)
    T = np.vstack([T[keep_rows], T[-1:]])
    T = np.hstack([T[:, :n + m_ub], T[:, -1:]])
    basis = basis[keep_rows]
    n_cols = n + m_ub

    # Fase 2: objetivo original
    cost = np.zeros(n_cols)
    cost[:n] = c
    T[-1, :] = 0.0
    T[-1, :n_cols] = cost
    for i, j in enumerate(basis):
        T[-1] -= cost[j] * T[i]
    it2, done = _iterate(T, basis, n_cols, max_iter)
    if not done:
        raise SolverIndeterminateError(
            f"simplex: fase 2 sin converger tras {max_iter} pivoteos",
            residual=float(-T[-1, -1]),
        )

    x = np.zeros(n_cols)
    x[basis] = T[:-1, -1]
    return LPSolution(x=x[:n].tolist(), objective=float(-T[-1, -1]), iterations=it1 + it2)
