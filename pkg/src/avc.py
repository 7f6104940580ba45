"""
Álgebra de canales: canales cuántico-clásicos, familias arbitrariamente variables
con wiretap, mezclas del jammer, extensiones n-fold, productos y el canal
levantado por una correlación (X, Y)
"""
import itertools
import json
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .config import config
from .errors import CapacityError, InvariantError, ParseError, ShapeError
from .qmath import (
    DensityOp,
    Kraus,
    SimplexDist,
    SIMPLEX_TOL,
    check_base,
    check_dim_cap,
    complementary_outputs,
    spectrum_entropy,
    tensor_all,
)

Family = Mapping[str, "CQChannel"]


# ====== TIPOS ======

class CQChannel:
    """Canal cuántico-clásico W: A → S(H)"""

    __slots__ = ("alphabet", "out_dim", "states", "_stack")

    def __init__(self, alphabet: Sequence[str], states: Mapping[str, DensityOp], field: str = "channel"):
        alphabet = [str(a) for a in alphabet]
        if not alphabet:
            raise ShapeError(f"{field}: alfabeto vacío", field=field)
        if len(set(alphabet)) != len(alphabet):
            raise ParseError(f"{field}: símbolos repetidos en el alfabeto", field=field)
        missing = [a for a in alphabet if a not in states]
        if missing:
            raise ParseError(f"{field}: faltan estados para los símbolos {missing}", field=field)
        dims = {states[a].dim for a in alphabet}
        if len(dims) != 1:
            raise ShapeError(f"{field}: estados de dimensiones distintas {sorted(dims)}", field=field)

        self.alphabet = tuple(alphabet)
        self.states = {a: states[a] for a in alphabet}
        self.out_dim = dims.pop()
        stack = np.stack([self.states[a].data for a in self.alphabet])
        stack.setflags(write=False)
        self._stack = stack

    @classmethod
    def from_stack(cls, alphabet: Sequence[str], stack: np.ndarray) -> "CQChannel":
        return cls(alphabet, {a: DensityOp._trusted(m) for a, m in zip(alphabet, stack)})

    def stack(self) -> np.ndarray:
        """Arreglo (|A|, d, d) en el orden del alfabeto"""
        return self._stack

    def __call__(self, symbol: str) -> DensityOp:
        return self.states[str(symbol)]

    def __repr__(self) -> str:
        return f"CQChannel(|A|={len(self.alphabet)}, dim={self.out_dim})"


class AVWC:
    """Canal wiretap cuántico-clásico arbitrariamente variable (W_t, V_t)_{t∈θ}"""

    def __init__(
        self,
        name: str,
        alphabet: Sequence[str],
        state_labels: Sequence[str],
        legal: Mapping[str, CQChannel],
        wiretap: Mapping[str, CQChannel],
    ):
        self.name = name
        self.alphabet = tuple(str(a) for a in alphabet)
        self.state_labels = tuple(str(t) for t in state_labels)
        if not self.state_labels:
            raise ShapeError(f"{name}: θ vacío", field="theta")

        for label, family in (("legal", legal), ("wiretap", wiretap)):
            missing = [t for t in self.state_labels if t not in family]
            if missing:
                raise ParseError(f"{name}: falta {label} para los estados {missing}", field=label)
            for t in self.state_labels:
                if family[t].alphabet != self.alphabet:
                    raise ShapeError(f"{name}: {label}[{t}] no comparte el alfabeto", field=f"{label}[{t}]")

        self.legal = {t: legal[t] for t in self.state_labels}
        self.wiretap = {t: wiretap[t] for t in self.state_labels}
        self.legal_dim = family_dim(self.legal, "legal")
        self.wiretap_dim = family_dim(self.wiretap, "wiretap")

    def __repr__(self) -> str:
        return (f"AVWC('{self.name}', |A|={len(self.alphabet)}, |θ|={len(self.state_labels)}, "
                f"dims={self.legal_dim}/{self.wiretap_dim})")


class Correlation:
    """Fuente bipartita (X, Y) con distribución conjunta p(x, y)"""

    def __init__(self, x_alphabet: Sequence[str], y_alphabet: Sequence[str], joint):
        p = np.array(joint, dtype=float)
        self.x_alphabet = tuple(str(x) for x in x_alphabet)
        self.y_alphabet = tuple(str(y) for y in y_alphabet)
        if p.shape != (len(self.x_alphabet), len(self.y_alphabet)):
            raise ShapeError(f"correlation: joint de forma {p.shape}, se esperaba "
                             f"({len(self.x_alphabet)}, {len(self.y_alphabet)})", field="joint")
        if float(p.min()) < 0.0:
            raise InvariantError(f"correlation: probabilidad negativa {p.min():.3e}", field="joint", residual=-float(p.min()))
        gap = abs(float(p.sum()) - 1.0)
        if gap > SIMPLEX_TOL:
            raise InvariantError(f"correlation: la suma difiere de 1 en {gap:.3e}", field="joint", residual=gap)
        p.setflags(write=False)
        self.joint = p

    @property
    def x_marginal(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    @property
    def y_marginal(self) -> np.ndarray:
        return self.joint.sum(axis=0)


class LiftedAVC:
    """Canal Ũ_t(f) sobre el alfabeto de funciones 𝔉 = {f: 𝐗 → A}"""

    def __init__(self, function_alphabet, base: Family, correlation: Correlation, channels: Dict[str, CQChannel]):
        self.function_alphabet = function_alphabet
        self.base = base
        self.correlation = correlation
        self.channels = channels

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(function_label(f) for f in self.function_alphabet)


def function_label(values: Sequence[str]) -> str:
    return "f[" + ",".join(values) + "]"


# ====== UTILIDADES DE FAMILIAS ======

def family_dim(family: Family, field: str = "family") -> int:
    dims = {ch.out_dim for ch in family.values()}
    if len(dims) != 1:
        raise ShapeError(f"{field}: canales con dimensiones distintas {sorted(dims)}", field=field)
    return dims.pop()


def family_stack(family: Family) -> Tuple[Tuple[str, ...], Tuple[str, ...], np.ndarray]:
    """
    Apila una familia {t: W_t} como arreglo (|θ|, |A|, d, d).

    Returns:
        (etiquetas θ, alfabeto, arreglo)
    """
    if not family:
        raise ShapeError("family: familia vacía", field="family")
    labels = tuple(family.keys())
    alphabet = family[labels[0]].alphabet
    for t in labels:
        if family[t].alphabet != alphabet:
            raise ShapeError(f"family: W_{t} no comparte el alfabeto", field=f"family[{t}]")
    family_dim(family)
    return labels, alphabet, np.stack([family[t].stack() for t in labels])


# ====== CARGA Y SERIALIZACIÓN ======

Matrix = List[List[Tuple[float, float]]]


class ChannelDocument(BaseModel):
    """Esquema del archivo de canal"""
    name: str = Field("channel", description="Nombre del canal")
    alphabet: List[str] = Field(..., description="Alfabeto de entrada A")
    theta: List[str] = Field(..., description="Estados del canal θ")
    legal: Dict[str, Dict[str, Matrix]] = Field(..., description="W_t(a) por estado y símbolo")
    wiretap: Dict[str, Dict[str, Matrix]] = Field(..., description="V_t(a) por estado y símbolo")


class CorrelationDocument(BaseModel):
    """Esquema del archivo de correlación"""
    x_alphabet: List[str]
    y_alphabet: List[str]
    joint: List[List[float]]


def parse_document(document: Union[str, bytes, dict], model, what: str):
    try:
        data = json.loads(document) if isinstance(document, (str, bytes)) else document
        return model.model_validate(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"{what}: JSON inválido ({e})")
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first.get("loc", ()))
        raise ParseError(f"{what}: esquema inválido en '{field}': {first.get('msg')}", field=field)


def matrix_from_pairs(rows: Matrix) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def matrix_to_pairs(m: np.ndarray) -> Matrix:
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(m)]


def _family_from_document(doc: ChannelDocument, which: str) -> Dict[str, CQChannel]:
    raw = getattr(doc, which)
    family = {}
    for t in doc.theta:
        if t not in raw:
            raise ParseError(f"{doc.name}: falta {which}[{t}]", field=f"{which}.{t}")
        states = {}
        for a in doc.alphabet:
            if a not in raw[t]:
                raise ParseError(f"{doc.name}: falta {which}[{t}][{a}]", field=f"{which}.{t}.{a}")
            field = f"{which}[{t}][{a}]"
            try:
                states[a] = DensityOp(matrix_from_pairs(raw[t][a]), field=field)
            except ValueError as e:
                raise ParseError(f"{field}: matriz mal formada ({e})", field=field)
        family[t] = CQChannel(doc.alphabet, states, field=f"{which}[{t}]")
    return family


def load_avwc(document: Union[str, bytes, dict]) -> AVWC:
    """
    Carga y valida un AVWC desde el formato de archivo de canal.

    Args:
        document: Texto JSON (o diccionario ya decodificado)

    Returns:
        AVWC con todas las matrices validadas
    """
    doc = parse_document(document, ChannelDocument, "channel")
    print(f"[AVC] 🔄 Cargando canal '{doc.name}' (|A|={len(doc.alphabet)}, |θ|={len(doc.theta)})...")
    channel = AVWC(
        doc.name,
        doc.alphabet,
        doc.theta,
        _family_from_document(doc, "legal"),
        _family_from_document(doc, "wiretap"),
    )
    print(f"[AVC] ✅ Canal cargado: {channel}")
    return channel


def dump_avwc(channel: AVWC) -> dict:
    """Documento JSON (como diccionario) en el formato de archivo de canal"""
    def dump_family(family: Family) -> dict:
        return {
            t: {a: matrix_to_pairs(ch(a).data) for a in channel.alphabet}
            for t, ch in family.items()
        }

    return {
        "name": channel.name,
        "alphabet": list(channel.alphabet),
        "theta": list(channel.state_labels),
        "legal": dump_family(channel.legal),
        "wiretap": dump_family(channel.wiretap),
    }


def load_correlation(document: Union[str, bytes, dict]) -> Correlation:
    doc = parse_document(document, CorrelationDocument, "correlation")
    return Correlation(doc.x_alphabet, doc.y_alphabet, doc.joint)


# ====== OPERACIONES ======

def mixture_channel(family: Family, q: SimplexDist) -> CQChannel:
    """U^Q(a) = Σ_t Q(t) W_t(a)"""
    labels, alphabet, stack = family_stack(family)
    if q.support_size != len(labels):
        raise ShapeError(f"mixture_channel: Q tiene soporte {q.support_size}, |θ| = {len(labels)}", field="q")
    return CQChannel.from_stack(alphabet, np.tensordot(q.probs, stack, axes=1))


def n_fold_output(family: Family, t_seq: Sequence[str], a_seq: Sequence[str]) -> DensityOp:
    """⊗_i W_{t_i}(a_i)"""
    if len(t_seq) != len(a_seq):
        raise ShapeError(f"n_fold_output: |t^n| = {len(t_seq)} y |a^n| = {len(a_seq)}", field="t_seq")
    for t in t_seq:
        if str(t) not in family:
            raise ShapeError(f"n_fold_output: estado '{t}' no pertenece a θ", field="t_seq")
    d = family_dim(family)
    check_dim_cap(d ** len(t_seq), "n_fold_output")
    return tensor_all([family[str(t)](a) for t, a in zip(t_seq, a_seq)])


def _product_family(f1: Family, f2: Family, alphabet) -> Dict[str, CQChannel]:
    out = {}
    for t1, t2 in itertools.product(f1.keys(), f2.keys()):
        ch1, ch2 = f1[t1], f2[t2]
        states = {
            pair_label(a1, a2): DensityOp._trusted(np.kron(ch1(a1).data, ch2(a2).data))
            for a1, a2 in itertools.product(ch1.alphabet, ch2.alphabet)
        }
        out[pair_label(t1, t2)] = CQChannel(alphabet, states)
    return out


def pair_label(first: str, second: str) -> str:
    return f"({first},{second})"


def product_avwc(c1: AVWC, c2: AVWC) -> AVWC:
    """(W_{t₁} ⊗ W'_{t₂}, V_{t₁} ⊗ V'_{t₂}) indexado por (t₁, t₂) ∈ θ₁ × θ₂"""
    check_dim_cap(c1.legal_dim * c2.legal_dim, "product_avwc")
    check_dim_cap(c1.wiretap_dim * c2.wiretap_dim, "product_avwc")
    alphabet = [pair_label(a1, a2) for a1, a2 in itertools.product(c1.alphabet, c2.alphabet)]
    theta = [pair_label(t1, t2) for t1, t2 in itertools.product(c1.state_labels, c2.state_labels)]
    return AVWC(
        f"{c1.name}⊗{c2.name}",
        alphabet,
        theta,
        _product_family(c1.legal, c2.legal, alphabet),
        _product_family(c1.wiretap, c2.wiretap, alphabet),
    )


def lift_correlation(legal: Family, corr: Correlation) -> LiftedAVC:
    """
    Canal levantado de una letra: Ũ_t(f) = Σ_{x,y} p(x,y) κ_y ⊗ W_t(f(x)).

    Los κ_y son los proyectores de la base computacional de un espacio de
    dimensión |𝐘|, en el orden del archivo; 𝔉 se enumera en orden
    lexicográfico de las tuplas (f(x₁), …, f(x_|𝐗|)).
    """
    labels, alphabet, stack = family_stack(legal)
    n_x, n_y = len(corr.x_alphabet), len(corr.y_alphabet)
    n_functions = len(alphabet) ** n_x
    if n_functions > config.FUNCTION_CAP:
        raise CapacityError(f"lift_correlation: |A|^|𝐗| = {n_functions} excede FUNCTION_CAP={config.FUNCTION_CAP}",
                            field="x_alphabet")
    d = stack.shape[-1]
    check_dim_cap(n_y * d, "lift_correlation")

    index = {a: i for i, a in enumerate(alphabet)}
    functions = list(itertools.product(alphabet, repeat=n_x))
    f_labels = [function_label(f) for f in functions]
    channels = {}
    for ti, t in enumerate(labels):
        states = {}
        for f, label in zip(functions, f_labels):
            out = np.zeros((n_y * d, n_y * d), dtype=np.complex128)
            for yi in range(n_y):
                block = sum(corr.joint[xi, yi] * stack[ti, index[f[xi]]] for xi in range(n_x))
                out[yi * d:(yi + 1) * d, yi * d:(yi + 1) * d] = block
            states[label] = DensityOp._trusted(out)
        channels[t] = CQChannel(f_labels, states)
    return LiftedAVC(functions, legal, corr, channels)


def mutual_information(corr: Correlation, base: Optional[float] = None) -> float:
    """I(X;Y) = Σ p(x,y) log p(x,y) / (p(x) p(y))"""
    base = check_base(base)
    p = corr.joint
    h_x = spectrum_entropy(corr.x_marginal, base)
    h_y = spectrum_entropy(corr.y_marginal, base)
    h_xy = spectrum_entropy(p.ravel(), base)
    return float(max(h_x + h_y - h_xy, 0.0))


def avwc_from_kraus(
    name: str,
    alphabet: Sequence[str],
    inputs: Mapping[str, DensityOp],
    kraus_family: Mapping[str, Kraus],
) -> AVWC:
    """
    Par wiretap derivado de Stinespring: W_t(a) = N_t(ρ_a) y V_t(a) la salida
    del entorno de N_t sobre ρ_a.
    """
    legal, wiretap = {}, {}
    for t, kraus in kraus_family.items():
        w_states, v_states = {}, {}
        for a in alphabet:
            w_states[a], v_states[a] = complementary_outputs(kraus, inputs[a])
        legal[t] = CQChannel(alphabet, w_states, field=f"legal[{t}]")
        wiretap[t] = CQChannel(alphabet, v_states, field=f"wiretap[{t}]")
    return AVWC(name, alphabet, list(kraus_family.keys()), legal, wiretap)
