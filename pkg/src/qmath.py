"""
Matemática de operadores densidad en dimensión finita: entropía, cantidad de
Holevo, distancias, álgebra tensorial y salidas complementarias (Stinespring)
"""
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import config
from .errors import CapacityError, InvariantError, ShapeError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
SIMPLEX_TOL = 1e-9
KRAUS_TOL = 1e-9
EIG_CLAMP = 1e-12

Kraus = List[np.ndarray]


# ====== TIPOS ======

class DensityOp:
    """
    Operador densidad inmutable: matriz compleja hermítica, PSD y de traza 1.

    La asimetría menor a 1e-10 se absorbe simetrizando (M + M†)/2;
    una asimetría mayor es un error.
    """

    __slots__ = ("_data",)

    def __init__(self, entries, field: str = "rho"):
        m = np.array(entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeError(f"{field}: se esperaba una matriz cuadrada, forma recibida {m.shape}", field=field)

        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > HERMITIAN_TOL:
            raise InvariantError(f"{field}: matriz no hermítica (asimetría {asym:.3e})", field=field, residual=asym)
        m = (m + m.conj().T) / 2

        trace_gap = abs(float(np.trace(m).real) - 1.0)
        if trace_gap > TRACE_TOL:
            raise InvariantError(f"{field}: traza distinta de 1 (desviación {trace_gap:.3e})", field=field, residual=trace_gap)

        lam_min = float(np.linalg.eigvalsh(m)[0])
        if lam_min < -PSD_TOL:
            raise InvariantError(f"{field}: matriz no PSD (autovalor mínimo {lam_min:.3e})", field=field, residual=-lam_min)

        m.setflags(write=False)
        self._data = m

    @classmethod
    def _trusted(cls, m: np.ndarray) -> "DensityOp":
        # Construcciones internas a partir de estados ya validados
        obj = cls.__new__(cls)
        m = np.array(m, dtype=np.complex128)
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        obj._data = m
        return obj

    @classmethod
    def pure(cls, vector) -> "DensityOp":
        v = np.asarray(vector, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls._trusted(np.outer(v, v.conj()))

    @classmethod
    def basis(cls, dim: int, index: int) -> "DensityOp":
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[index, index] = 1.0
        return cls._trusted(m)

    @classmethod
    def diagonal(cls, probs: Sequence[float]) -> "DensityOp":
        return cls(np.diag(np.asarray(probs, dtype=float)))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOp":
        return cls._trusted(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def allclose(self, other: "DensityOp", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self._data, other._data, atol=atol, rtol=0.0))

    def __repr__(self) -> str:
        return f"DensityOp(dim={self.dim})"


class SimplexDist:
    """Distribución de probabilidad finita (entradas P, mezclas Q del jammer, filas τ(·|a))"""

    __slots__ = ("_probs",)

    def __init__(self, probs, field: str = "dist"):
        p = np.array(probs, dtype=float).ravel()
        if p.size == 0:
            raise ShapeError(f"{field}: distribución vacía", field=field)
        if not np.all(np.isfinite(p)):
            raise InvariantError(f"{field}: entradas no finitas", field=field)
        if float(p.min()) < -EIG_CLAMP:
            raise InvariantError(f"{field}: probabilidad negativa ({p.min():.3e})", field=field, residual=-float(p.min()))
        gap = abs(float(p.sum()) - 1.0)
        if gap > SIMPLEX_TOL:
            raise InvariantError(f"{field}: la suma difiere de 1 en {gap:.3e}", field=field, residual=gap)
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        self._probs = p

    @classmethod
    def uniform(cls, size: int) -> "SimplexDist":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "SimplexDist":
        p = np.zeros(size)
        p[index] = 1.0
        return cls(p)

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def support_size(self) -> int:
        return self._probs.size

    def __repr__(self) -> str:
        return f"SimplexDist({np.array2string(self._probs, precision=6)})"


class Ensemble:
    """Ensamble {P(x), ρ_x} para la cantidad de Holevo"""

    __slots__ = ("dist", "states")

    def __init__(self, dist: SimplexDist, states: Sequence[DensityOp]):
        if dist.support_size != len(states):
            raise ShapeError(f"ensemble: {dist.support_size} probabilidades para {len(states)} estados", field="states")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ShapeError(f"ensemble: dimensiones distintas entre estados {sorted(dims)}", field="states")
        self.dist = dist
        self.states = tuple(states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def average(self) -> DensityOp:
        stack = np.stack([s.data for s in self.states])
        return DensityOp._trusted(np.tensordot(self.dist.probs, stack, axes=1))


# ====== NÚCLEOS NUMÉRICOS (sin validación) ======

def check_base(base: float) -> float:
    if base is None:
        base = config.LOG_BASE
    if not base > 1:
        raise InvariantError(f"base del logaritmo inválida: {base}", field="base")
    return float(base)


def spectrum_entropy(eigs: np.ndarray, base: float) -> np.ndarray:
    """Entropía de espectros (último eje); autovalores < 1e-12 cuentan como 0"""
    lam = np.where(eigs < EIG_CLAMP, 0.0, eigs)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0.0, lam * np.log(np.where(lam > 0.0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1) / np.log(base)


def matrix_entropy(mats: np.ndarray, base: float = 2.0) -> np.ndarray:
    """Entropía de von Neumann de una matriz o de una pila de matrices hermíticas"""
    return spectrum_entropy(np.linalg.eigvalsh(mats), base)


def chi_from_arrays(probs: np.ndarray, mats: np.ndarray, base: float = 2.0) -> float:
    """χ = S(Σ p_x ρ_x) − Σ p_x S(ρ_x) sobre arreglos crudos"""
    avg = np.tensordot(probs, mats, axes=1)
    return float(matrix_entropy(avg, base) - probs @ matrix_entropy(mats, base))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(m)
    lam = np.sqrt(np.clip(lam, 0.0, None))
    return (vecs * lam) @ vecs.conj().T


def partial_trace_matrix(m: np.ndarray, dims: Tuple[int, int], keep: str = "first") -> np.ndarray:
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ShapeError(f"partial_trace: dimensión {m.shape[0]} no factoriza como {d1}x{d2}", field="dims")
    t = m.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ijkj->ik", t)
    if keep == "second":
        return np.einsum("ijil->jl", t)
    raise ShapeError(f"partial_trace: keep debe ser 'first' o 'second', no '{keep}'", field="keep")


def check_dim_cap(dim: int, what: str = "tensor") -> None:
    if dim > config.DIM_CAP:
        raise CapacityError(f"{what}: dimensión {dim} excede el límite DIM_CAP={config.DIM_CAP}", field="dim")


def as_density(rho: Union[DensityOp, np.ndarray], field: str = "rho") -> DensityOp:
    return rho if isinstance(rho, DensityOp) else DensityOp(rho, field=field)


# ====== OPERACIONES ======

def von_neumann_entropy(rho: Union[DensityOp, np.ndarray], base: Optional[float] = None) -> float:
    """
    S(ρ) = −tr(ρ log ρ) en la base indicada (bits por defecto).

    Args:
        rho: Operador densidad (se valida si llega como arreglo)
        base: Base del logaritmo, > 1

    Returns:
        Entropía en [0, log_base dim]
    """
    base = check_base(base)
    rho = as_density(rho)
    return float(matrix_entropy(rho.data, base))


def normalized_entropy(rho: Union[DensityOp, np.ndarray]) -> float:
    """Entropía con logaritmo en base dim H; dim 1 da 0"""
    rho = as_density(rho)
    if rho.dim == 1:
        return 0.0
    return float(matrix_entropy(rho.data, float(rho.dim)))


def shannon_entropy(probs: Union[SimplexDist, Sequence[float]], base: Optional[float] = None) -> float:
    """H(P) clásica con 0 log 0 = 0"""
    base = check_base(base)
    p = probs.probs if isinstance(probs, SimplexDist) else SimplexDist(probs).probs
    return float(spectrum_entropy(p, base))


def holevo_chi(ens: Ensemble, base: Optional[float] = None) -> float:
    """
    χ(Q;Φ) = S(Σ Q(x) ρ_x) − Σ Q(x) S(ρ_x).

    Args:
        ens: Ensamble con estados de la misma dimensión
        base: Base del logaritmo

    Returns:
        Cantidad de Holevo en [0, log_base dim]
    """
    base = check_base(base)
    mats = np.stack([s.data for s in ens.states])
    return max(chi_from_arrays(ens.dist.probs, mats, base), 0.0)


def fidelity(rho: DensityOp, sigma: DensityOp) -> float:
    """F(ρ,σ) = ‖√ρ √σ‖₁² = (tr √(√ρ σ √ρ))²"""
    rho, sigma = as_density(rho, "rho"), as_density(sigma, "sigma")
    if rho.dim != sigma.dim:
        raise ShapeError(f"fidelity: dimensiones {rho.dim} y {sigma.dim}", field="sigma")
    s = psd_sqrt(rho.data)
    lam = np.clip(np.linalg.eigvalsh(s @ sigma.data @ s), 0.0, None)
    return float(min(np.sqrt(lam).sum() ** 2, 1.0))


def trace_distance(rho: DensityOp, sigma: DensityOp) -> float:
    """(1/2)‖ρ − σ‖₁"""
    rho, sigma = as_density(rho, "rho"), as_density(sigma, "sigma")
    if rho.dim != sigma.dim:
        raise ShapeError(f"trace_distance: dimensiones {rho.dim} y {sigma.dim}", field="sigma")
    lam = np.linalg.eigvalsh(rho.data - sigma.data)
    return float(min(0.5 * np.abs(lam).sum(), 1.0))


def tensor(a: DensityOp, b: DensityOp) -> DensityOp:
    """Producto de Kronecker a ⊗ b"""
    check_dim_cap(a.dim * b.dim)
    return DensityOp._trusted(np.kron(a.data, b.data))


def tensor_all(states: Sequence[DensityOp]) -> DensityOp:
    """ρ₁ ⊗ ⋯ ⊗ ρ_n; la lista vacía da el estado trivial [1]"""
    dim = int(np.prod([s.dim for s in states])) if states else 1
    check_dim_cap(dim)
    out = np.ones((1, 1), dtype=np.complex128)
    for s in states:
        out = np.kron(out, s.data)
    return DensityOp._trusted(out)


def partial_trace(rho: DensityOp, dims: Tuple[int, int], keep: str = "first") -> DensityOp:
    """Estado reducido del subsistema conservado ('first' o 'second')"""
    rho = as_density(rho)
    return DensityOp._trusted(partial_trace_matrix(rho.data, dims, keep))


def check_kraus(kraus: Sequence[np.ndarray]) -> Kraus:
    ops = [np.asarray(k, dtype=np.complex128) for k in kraus]
    if not ops:
        raise InvariantError("kraus: lista vacía", field="kraus")
    d_in = ops[0].shape[1]
    if any(k.ndim != 2 or k.shape != ops[0].shape for k in ops):
        raise ShapeError("kraus: operadores con formas distintas", field="kraus")
    completeness = sum(k.conj().T @ k for k in ops)
    gap = float(np.max(np.abs(completeness - np.eye(d_in))))
    if gap > KRAUS_TOL:
        raise InvariantError(f"kraus: el canal no preserva la traza (Σ K†K − I = {gap:.3e})", field="kraus", residual=gap)
    return ops


def apply_kraus(kraus: Sequence[np.ndarray], rho: DensityOp) -> DensityOp:
    """N(ρ) = Σ K ρ K†"""
    ops = check_kraus(kraus)
    rho = as_density(rho)
    if ops[0].shape[1] != rho.dim:
        raise ShapeError(f"kraus: entrada de dimensión {ops[0].shape[1]}, estado de dimensión {rho.dim}", field="rho")
    return DensityOp._trusted(sum(k @ rho.data @ k.conj().T for k in ops))


def complementary_outputs(kraus: Sequence[np.ndarray], rho: DensityOp) -> Tuple[DensityOp, DensityOp]:
    """
    Salidas del receptor y del entorno de la dilatación de Stinespring.

    Returns:
        (N(ρ) = Σ K_i ρ K_i†, E con E[i][j] = tr(K_i ρ K_j†))
    """
    receiver = apply_kraus(kraus, rho)
    ops = check_kraus(kraus)
    r = as_density(rho).data
    env = np.array([[np.trace(ki @ r @ kj.conj().T) for kj in ops] for ki in ops], dtype=np.complex128)
    return receiver, DensityOp._trusted(env)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityOp:
    """Estado aleatorio G G† / tr(G G†) con G gaussiana compleja dim × rank"""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityOp._trusted(m / np.trace(m).real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
