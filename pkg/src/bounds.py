"""
Cota inferior de la capacidad secreta asistida por aleatoriedad

    max_P ( min_Q χ(P, {U^Q(a)}) − max_{t^n} (1/n) χ(P^n, {V_{t^n}(a^n)}) )

evaluada por búsqueda en rejilla sobre símplices con refinamiento por
coordenadas, y el reporte de la dicotomía que combina simetrizabilidad y cota.
"""
import itertools
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .avc import AVWC, Family, family_stack
from .config import config
from .errors import CapacityError, InvariantError
from .qmath import EIG_CLAMP, SimplexDist, check_base, matrix_entropy
from .sym import check_symmetrizable

TIE_EPS = 1e-12
IMPROVE_EPS = 1e-15
MAX_REFINE_STEPS = 20000
BATCH = 4096


class BoundOptions(BaseModel):
    """Parámetros de la búsqueda minimax"""
    grid: int = Field(default_factory=lambda: config.GRID_POINTS, description="Puntos por dimensión del símplex de P")
    jammer_grid: int = Field(default_factory=lambda: config.JAMMER_GRID_POINTS, description="Puntos por dimensión del símplex de Q")
    jammer_grid_max_points: int = Field(5000, description="Máximo de puntos de la rejilla de Q")
    refine_tol: float = Field(default_factory=lambda: config.REFINE_TOL)
    leakage_order: int = Field(default_factory=lambda: config.LEAKAGE_ORDER)
    base: float = Field(default_factory=lambda: config.LOG_BASE)
    refine: bool = True


class BoundReport(BaseModel):
    """Resultado de la cota inferior (bits por defecto)"""
    value: float
    clamped_value: float
    argmax_P: List[float]
    argmin_Q: List[float]
    legal_term: float
    leakage_term: float
    leakage_order: int
    leakage_by_order: Dict[int, float] = Field(default_factory=dict)
    grid_spec: str
    evaluated_points: int = 0


class DichotomyReport(BaseModel):
    """Dicotomía: capacidad determinista 0 o igual a la asistida por aleatoriedad"""
    symmetrizable: bool
    sym_residual: float
    random_lb: BoundReport
    deterministic_secrecy_lb: float


# ====== REJILLAS ======

@lru_cache(maxsize=32)
def _compositions(total: int, parts: int) -> Tuple[Tuple[int, ...], ...]:
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        out.extend((first,) + rest for rest in _compositions(total - first, parts - 1))
    return tuple(out)


def simplex_grid(parts: int, resolution: int) -> np.ndarray:
    """Puntos {i/m : Σ i = m} del símplex, en orden lexicográfico de (i₁, …, i_k)"""
    return np.asarray(_compositions(resolution, parts), dtype=float) / resolution


def grid_size(parts: int, resolution: int) -> int:
    return comb(resolution + parts - 1, parts - 1)


def _jammer_resolution(parts: int, opts: BoundOptions) -> int:
    m = opts.jammer_grid
    while m > 1 and grid_size(parts, m) > opts.jammer_grid_max_points:
        m -= 1
    return m


def _nearest_grid_point(target: np.ndarray, resolution: int) -> np.ndarray:
    counts = np.floor(target * resolution).astype(int)
    remainder = resolution - counts.sum()
    order = np.argsort(-(target * resolution - counts), kind="stable")
    counts[order[:remainder]] += 1
    return counts / resolution


# ====== NÚCLEOS VECTORIZADOS ======

def _chi_rows(P: np.ndarray, mats: np.ndarray, base: float) -> np.ndarray:
    """χ(P_r, {mats_a}) para cada fila P_r; mats (k, d, d)"""
    k, d, _ = mats.shape
    avg = (P @ mats.reshape(k, -1)).reshape(-1, d, d)
    return matrix_entropy(avg, base) - P @ matrix_entropy(mats, base)


def _chi_over_jammers(p: np.ndarray, stack: np.ndarray, Q: np.ndarray, base: float) -> np.ndarray:
    """χ(P, U^Q) para cada fila de Q; stack (|θ|, |A|, d, d)"""
    mixed = np.einsum("qt,taij->qaij", Q, stack)
    avg = np.einsum("a,qaij->qij", p, mixed)
    return matrix_entropy(avg, base) - matrix_entropy(mixed, base) @ p


def _chi_over_inputs(P: np.ndarray, stack: np.ndarray, q: np.ndarray, base: float) -> np.ndarray:
    """χ(P_r, U^q) para cada fila P_r"""
    return _chi_rows(P, np.tensordot(q, stack, axes=1), base)


def _refine_on_simplex(x0: np.ndarray, f, step: float, tol: float, sign: float) -> Tuple[np.ndarray, float]:
    """
    Búsqueda por coordenadas: transfiere masa entre pares (i, j) con paso que
    se reduce a la mitad hasta tol. sign = +1 minimiza, −1 maximiza.
    """
    x = x0.copy()
    best = f(x)
    k = x.size
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    steps = 0
    while step >= tol and steps < MAX_REFINE_STEPS:
        improved = False
        for i, j in pairs:
            delta = min(step, x[i])
            if delta <= 0.0:
                continue
            cand = x.copy()
            cand[i] -= delta
            cand[j] += delta
            value = f(cand)
            steps += 1
            if sign * (value - best) < -IMPROVE_EPS:
                x, best, improved = cand, value, True
        if not improved:
            step /= 2.0
    return x, best


# ====== OPERACIONES ======

def min_chi_over_jammer(legal: Family, p: SimplexDist, opts: Optional[BoundOptions] = None) -> Tuple[SimplexDist, float]:
    """
    min_Q χ(P, {U^Q(a) : a ∈ A}) por rejilla exhaustiva sobre Q y refinamiento local.

    El valor devuelto nunca supera χ en ningún punto de la rejilla; como el
    problema no es convexo en Q es una cota superior del mínimo verdadero.

    Returns:
        (Q*, χ(P, U^{Q*}))
    """
    opts = opts or BoundOptions()
    labels, alphabet, stack = family_stack(legal)
    if p.support_size != len(alphabet):
        raise InvariantError(f"min_chi_over_jammer: P con soporte {p.support_size}, |A| = {len(alphabet)}", field="p")
    q_best, value = _min_chi(p.probs, stack, opts)
    return SimplexDist(q_best), value


def _min_chi(p: np.ndarray, stack: np.ndarray, opts: BoundOptions) -> Tuple[np.ndarray, float]:
    n_t = stack.shape[0]
    if n_t == 1:
        return np.ones(1), float(_chi_over_jammers(p, stack, np.ones((1, 1)), opts.base)[0])

    m = _jammer_resolution(n_t, opts)
    grid = simplex_grid(n_t, m)
    values = np.concatenate([
        _chi_over_jammers(p, stack, grid[i:i + BATCH], opts.base) for i in range(0, len(grid), BATCH)
    ])
    idx = int(np.argmin(values))
    q, best = grid[idx], float(values[idx])
    if opts.refine:
        f = lambda q_: float(_chi_over_jammers(p, stack, q_[None, :], opts.base)[0])
        q, best = _refine_on_simplex(q, f, 1.0 / m, opts.refine_tol, sign=1.0)
    return q, best


def _leakage_rows(wiretap: Family, P: np.ndarray, n: int, base: float) -> np.ndarray:
    """max_{t^n} (1/n) χ(P^{⊗n}, {V_{t^n}(a^n)}) para cada fila de P"""
    labels, alphabet, stack = family_stack(wiretap)
    k, d = len(alphabet), stack.shape[-1]
    if d ** n > config.LEAKAGE_DIM_CAP:
        raise CapacityError(f"leakage_term: dim^n = {d ** n} excede LEAKAGE_DIM_CAP={config.LEAKAGE_DIM_CAP}",
                            field="leakage_order")
    if len(labels) ** n > config.SWEEP_CAP:
        raise CapacityError(f"leakage_term: |θ|^n = {len(labels) ** n} excede SWEEP_CAP={config.SWEEP_CAP}",
                            field="leakage_order")

    # P^{⊗n} con a^n en orden lexicográfico
    weights = P
    for _ in range(n - 1):
        weights = np.einsum("ri,rj->rij", weights, P).reshape(P.shape[0], -1)

    best = np.full(P.shape[0], -np.inf)
    for t_seq in itertools.product(range(len(labels)), repeat=n):
        states = []
        for a_seq in itertools.product(range(k), repeat=n):
            m = np.ones((1, 1), dtype=np.complex128)
            for t, a in zip(t_seq, a_seq):
                m = np.kron(m, stack[t, a])
            states.append(m)
        states = np.stack(states)
        chi = np.concatenate([
            _chi_rows(weights[i:i + BATCH], states, base) for i in range(0, len(weights), BATCH)
        ])
        best = np.maximum(best, chi / n)
    return np.clip(best, 0.0, None)


def leakage_term(wiretap: Family, p: SimplexDist, n: int = 1, base: Optional[float] = None) -> float:
    """
    Sustituto de orden finito del término de fuga:
    max_{t^n ∈ θ^n} (1/n) χ(P^{⊗n}, {V_{t^n}(a^n)}), exhaustivo sobre t^n.
    """
    if n < 1:
        raise InvariantError(f"leakage_term: n debe ser positivo, no {n}", field="n")
    base = check_base(base)
    return float(_leakage_rows(wiretap, p.probs[None, :], n, base)[0])


def secrecy_lower_bound(channel: AVWC, opts: Optional[BoundOptions] = None) -> BoundReport:
    """
    Maximiza [min_Q χ − fuga de orden leakage_order] sobre P.

    La rejilla de P se recorre en orden decreciente de una cota superior
    barata (χ en unos pocos Q de la rejilla menos la fuga); se detiene cuando
    la cota cae debajo del mejor valor, lo que da el mismo resultado que la
    búsqueda exhaustiva. Empates: primer punto lexicográfico de la rejilla.
    """
    opts = opts or BoundOptions()
    k = len(channel.alphabet)
    if k > config.ALPHABET_GRID_CAP:
        raise CapacityError(f"secrecy_lower_bound: |A| = {k} excede ALPHABET_GRID_CAP={config.ALPHABET_GRID_CAP}",
                            field="alphabet")
    _, _, stack = family_stack(channel.legal)
    n_t = stack.shape[0]
    n = opts.leakage_order
    print(f"[BOUNDS] 🔄 Cota inferior para '{channel.name}': rejilla P m={opts.grid} "
          f"({grid_size(k, opts.grid)} puntos), fuga de orden {n}")

    P_grid = simplex_grid(k, opts.grid)
    leak = _leakage_rows(channel.wiretap, P_grid, n, opts.base)

    m_q = _jammer_resolution(n_t, opts)
    candidates = [np.eye(n_t)[t] for t in range(n_t)]
    candidates.append(_nearest_grid_point(np.full(n_t, 1.0 / n_t), m_q))
    upper = np.min([
        np.concatenate([_chi_over_inputs(P_grid[i:i + BATCH], stack, q, opts.base)
                        for i in range(0, len(P_grid), BATCH)])
        for q in candidates
    ], axis=0) - leak

    best_value, best_idx, best_q, evaluated = -np.inf, -1, None, 0
    for idx in np.argsort(-upper, kind="stable"):
        if upper[idx] < best_value - TIE_EPS:
            break
        q, chi = _min_chi(P_grid[idx], stack, opts)
        evaluated += 1
        value = chi - leak[idx]
        if value > best_value + TIE_EPS or (abs(value - best_value) <= TIE_EPS and idx < best_idx):
            best_value, best_idx, best_q = value, int(idx), q

    p_best = P_grid[best_idx]
    if opts.refine:
        def objective(p_):
            return _min_chi(p_, stack, opts)[1] - float(_leakage_rows(channel.wiretap, p_[None, :], n, opts.base)[0])

        p_best, best_value = _refine_on_simplex(p_best, objective, 1.0 / opts.grid, opts.refine_tol, sign=-1.0)
        best_q, _ = _min_chi(p_best, stack, opts)

    legal_value = float(_chi_over_jammers(p_best, stack, best_q[None, :], opts.base)[0])
    leak_by_order = {
        order: float(_leakage_rows(channel.wiretap, p_best[None, :], order, opts.base)[0])
        for order in range(1, n + 1)
    }
    leak_value = leak_by_order[n]
    value = legal_value - leak_value

    report = BoundReport(
        value=value,
        clamped_value=max(value, 0.0),
        argmax_P=p_best.tolist(),
        argmin_Q=best_q.tolist(),
        legal_term=legal_value,
        leakage_term=leak_value,
        leakage_order=n,
        leakage_by_order=leak_by_order,
        grid_spec=(f"lower bound, search-resolution limited: P-grid m={opts.grid} "
                   f"({grid_size(k, opts.grid)} points), Q-grid m={m_q} ({grid_size(n_t, m_q)} points), "
                   f"coordinate refinement to {opts.refine_tol:g}" if opts.refine else
                   f"lower bound, search-resolution limited: P-grid m={opts.grid}, Q-grid m={m_q}, no refinement"),
        evaluated_points=evaluated,
    )
    print(f"[BOUNDS] ✅ valor {report.value:.9f} bits (χ legal {legal_value:.9f}, fuga {leak_value:.9f}, "
          f"{evaluated} puntos evaluados a fondo)")
    return report


def dichotomy_report(channel: AVWC, opts: Optional[BoundOptions] = None, tol: Optional[float] = None) -> DichotomyReport:
    """
    Combina simetrizabilidad y cota: si la familia legal es simetrizable la
    capacidad secreta determinista es 0; si no, coincide con la asistida por
    aleatoriedad, acotada por max(valor, 0).
    """
    sym = check_symmetrizable(channel.legal, tol)
    bound = secrecy_lower_bound(channel, opts)
    deterministic = 0.0 if sym.symmetrizable else max(bound.value, 0.0)
    print(f"[BOUNDS] 📊 Dicotomía '{channel.name}': simetrizable={sym.symmetrizable}, "
          f"cota determinista {deterministic:.9f}")
    return DichotomyReport(
        symmetrizable=sym.symmetrizable,
        sym_residual=sym.residual,
        random_lb=bound,
        deterministic_secrecy_lb=deterministic,
    )


def _entropy_derivative(rho: np.ndarray, drho: np.ndarray, base: float) -> float:
    # d/dq S(ρ(q)) = −tr(ρ' ln ρ) / ln b, usando tr ρ' = 0; el núcleo de ρ no aporta
    lam, vecs = np.linalg.eigh(rho)
    log_lam = np.where(lam > EIG_CLAMP, np.log(np.where(lam > EIG_CLAMP, lam, 1.0)), 0.0)
    log_rho = (vecs * log_lam) @ vecs.conj().T
    return float(-np.trace(drho @ log_rho).real / np.log(base))


def chi_derivative(legal: Family, p: SimplexDist, q: float, base: Optional[float] = None) -> float:
    """Derivada analítica de q ↦ χ(P, U^{(q, 1−q)}) para |θ| = 2"""
    base = check_base(base)
    labels, _, stack = family_stack(legal)
    if len(labels) != 2:
        raise InvariantError(f"chi_derivative: requiere |θ| = 2, no {len(labels)}", field="legal")
    mixed = q * stack[0] + (1.0 - q) * stack[1]
    dmixed = stack[0] - stack[1]
    w = p.probs
    total = _entropy_derivative(np.tensordot(w, mixed, axes=1), np.tensordot(w, dmixed, axes=1), base)
    total -= sum(w[a] * _entropy_derivative(mixed[a], dmixed[a], base) for a in range(len(w)))
    return total


def chi_gradient_check(legal: Family, p: SimplexDist, q: SimplexDist, h: float = 1e-5,
                       base: Optional[float] = None) -> float:
    """
    |derivada analítica − diferencia central| de χ(P, U^{(q, 1−q)}) en q.

    Args:
        q: Mezcla (q, 1−q) sobre θ
        h: Paso en (0, 1e−3]
    """
    base = check_base(base)
    if not 0.0 < h <= 1e-3:
        raise InvariantError(f"chi_gradient_check: paso h={h} fuera de (0, 1e-3]", field="h")
    q1 = float(q.probs[0])
    if q1 - h <= 0.0 or q1 + h >= 1.0:
        raise InvariantError(f"chi_gradient_check: q={q1} demasiado cerca del borde para h={h}", field="q")
    _, _, stack = family_stack(legal)

    def chi_at(x: float) -> float:
        return float(_chi_over_jammers(p.probs, stack, np.array([[x, 1.0 - x]]), base)[0])

    finite = (chi_at(q1 + h) - chi_at(q1 - h)) / (2.0 * h)
    return abs(chi_derivative(legal, p, q1, base) - finite)
