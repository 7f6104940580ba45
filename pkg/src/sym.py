"""
Simetrizabilidad de canales cuántico-clásicos arbitrariamente variables

Una familia (W_t) es simetrizable si existen distribuciones τ(·|a) sobre θ con
Σ_t τ(t|a) W_t(a') = Σ_t τ(t|a') W_t(a) para todo par (a, a'). Se decide
minimizando la norma ∞ del residuo como programa lineal.
"""
import itertools
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from .avc import Family, family_stack
from .config import config
from .errors import ShapeError, SolverIndeterminateError
from .simplex import solve_lp

ZERO_ROW_EPS = 1e-15
CLAMP_EPS = 1e-12


class SymWitness(BaseModel):
    """Testigo τ: fila a = distribución τ(·|a) sobre θ"""
    tau: List[List[float]] = Field(..., description="Matriz (|A|, |θ|)")
    alphabet: List[str] = Field(default_factory=list)
    theta: List[str] = Field(default_factory=list)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.tau, dtype=float)


class SymResult(BaseModel):
    """Decisión de simetrizabilidad con testigo y residuo"""
    symmetrizable: bool
    witness: Optional[SymWitness] = None
    residual: float = Field(..., description="Residuo del testigo, o el óptimo del programa lineal si no hay testigo")
    tolerance: float
    lp_optimum: float = Field(..., description="Óptimo del problema de minimización del residuo")
    iterations: int = 0
    best_tau: List[List[float]] = Field(default_factory=list, description="τ de residuo mínimo aunque no sea testigo")


def _pair_mixtures(stack: np.ndarray, tau: np.ndarray) -> np.ndarray:
    # mix[a, b] = Σ_t τ(t|a) W_t(b)
    return np.einsum("at,tbij->abij", tau, stack)


def residual(family: Family, tau: Union[SymWitness, np.ndarray]) -> float:
    """
    Violación máxima de la igualdad de simetrización (módulo complejo).

    Args:
        family: Familia {t: W_t}
        tau: Testigo o matriz (|A|, |θ|)

    Returns:
        max_{a≠a', i, j} |Σ_t τ(t|a) W_t(a')[i,j] − Σ_t τ(t|a') W_t(a)[i,j]|
    """
    labels, alphabet, stack = family_stack(family)
    tau = tau.matrix() if isinstance(tau, SymWitness) else np.asarray(tau, dtype=float)
    if tau.shape != (len(alphabet), len(labels)):
        raise ShapeError(f"residual: τ de forma {tau.shape}, se esperaba ({len(alphabet)}, {len(labels)})", field="tau")
    if len(alphabet) < 2:
        return 0.0
    mix = _pair_mixtures(stack, tau)
    diff = mix - mix.transpose(1, 0, 2, 3)
    return float(np.max(np.abs(diff)))


def _constraint_rows(stack: np.ndarray) -> np.ndarray:
    """Una fila por par {a, a'}, entrada i ≤ j y parte real/imaginaria"""
    n_t, n_a, d, _ = stack.shape
    upper = np.triu_indices(d)
    rows = []
    for a, b in itertools.combinations(range(n_a), 2):
        # Σ_t τ(t|a) W_t(b) − Σ_t τ(t|b) W_t(a)
        coeff = np.zeros((n_a, n_t, len(upper[0])), dtype=np.complex128)
        coeff[a] = stack[:, b][:, upper[0], upper[1]]
        coeff[b] = -stack[:, a][:, upper[0], upper[1]]
        flat = coeff.reshape(n_a * n_t, -1).T
        rows.append(flat.real)
        rows.append(flat.imag)
    if not rows:
        return np.zeros((0, n_a * n_t))
    rows = np.vstack(rows)
    return rows[np.max(np.abs(rows), axis=1) > ZERO_ROW_EPS]


def clean_tau(tau: np.ndarray) -> np.ndarray:
    """Recorta entradas en [−1e−12, 0] a 0 y renormaliza filas"""
    tau = np.where(tau < CLAMP_EPS, np.maximum(tau, 0.0), tau)
    tau = np.clip(tau, 0.0, None)
    return tau / tau.sum(axis=1, keepdims=True)


def check_symmetrizable(family: Family, tol: Optional[float] = None) -> SymResult:
    """
    Decide la simetrizabilidad de la familia legal.

    Variables τ(t|a) ≥ 0 con Σ_t τ(t|a) = 1 y una cota s ≥ |fila·τ| para
    cada fila de restricción; se minimiza s.

    Args:
        family: Familia {t: W_t}
        tol: Umbral de decisión (default config.SYM_TOL)

    Returns:
        SymResult; si es simetrizable el residuo del testigo se verifica
        de nuevo fuera del solver. Si no lo es, residual es el óptimo del
        programa lineal (o el residuo en módulo de best_tau cuando ese
        óptimo no supera tol)

    Raises:
        SolverIndeterminateError: si el solver agota sus iteraciones
    """
    tol = config.SYM_TOL if tol is None else tol
    labels, alphabet, stack = family_stack(family)
    n_t, n_a = len(labels), len(alphabet)
    n_tau = n_a * n_t
    print(f"[SYM] 🔄 Programa lineal: {n_tau} variables τ, |A|={n_a}, |θ|={n_t}")

    rows = _constraint_rows(stack)
    m = rows.shape[0]
    s_col = -np.ones((m, 1))
    A_ub = np.vstack([np.hstack([rows, s_col]), np.hstack([-rows, s_col])])
    b_ub = np.zeros(2 * m)

    A_eq = np.zeros((n_a, n_tau + 1))
    for a in range(n_a):
        A_eq[a, a * n_t:(a + 1) * n_t] = 1.0
    b_eq = np.ones(n_a)

    c = np.zeros(n_tau + 1)
    c[-1] = 1.0

    try:
        solution = solve_lp(c, A_ub, b_ub, A_eq, b_eq, max_iter=config.SYM_MAX_ITER)
    except SolverIndeterminateError as e:
        print(f"[SYM] ❌ Solver indeterminado, mejor residuo {e.residual}")
        raise

    x = np.asarray(solution.x)
    tau = clean_tau(x[:n_tau].reshape(n_a, n_t))
    res = residual(family, tau)
    symmetrizable = res <= tol
    lp_opt = max(solution.objective, 0.0)
    if not symmetrizable and lp_opt > tol:
        # sin testigo se reporta el óptimo del problema de minimización
        res = lp_opt

    result = SymResult(
        symmetrizable=symmetrizable,
        witness=SymWitness(tau=tau.tolist(), alphabet=list(alphabet), theta=list(labels)) if symmetrizable else None,
        residual=res,
        tolerance=tol,
        lp_optimum=lp_opt,
        iterations=solution.iterations,
        best_tau=tau.tolist(),
    )
    verdict = "SIMETRIZABLE" if symmetrizable else "NO simetrizable"
    print(f"[SYM] ✅ {verdict} (residuo {res:.3e}, tol {tol:.1e}, {solution.iterations} pivoteos)")
    return result


def canonical_shift_witness(n_alphabet: int, n_theta: int, shift: int = 0) -> np.ndarray:
    """τ(t|a) = 1 si t = a + shift (índices); con shift 0 es el testigo de example1"""
    tau = np.zeros((n_alphabet, n_theta))
    for a in range(n_alphabet):
        tau[a, (a + shift) % n_theta] = 1.0
    return tau


def witness_document(result: SymResult) -> dict:
    """Exportación del testigo: tau por filas (orden del alfabeto) y columnas (orden de θ)"""
    tau = result.witness.tau if result.witness else result.best_tau
    return {
        "symmetrizable": result.symmetrizable,
        "alphabet": result.witness.alphabet if result.witness else [],
        "theta": result.witness.theta if result.witness else [],
        "tau": tau,
        "residual": result.residual,
        "tolerance": result.tolerance,
    }
