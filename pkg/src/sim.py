"""
Evaluación de códigos de longitud finita: probabilidad de error P_e(C, t^n) y
fuga χ(R_uni; Z_{t^n}) frente al peor jammer, composición con prefijo,
identidad de error bajo τ, códigos asistidos por correlación y por aleatoriedad
"""
import itertools
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from .avc import (
    AVWC,
    Correlation,
    Family,
    Matrix,
    matrix_from_pairs,
    matrix_to_pairs,
    mixture_channel,
    n_fold_output,
    parse_document,
)
from .config import config
from .errors import CapacityError, InvariantError, ParseError, ShapeError
from .qmath import SimplexDist, check_base, chi_from_arrays, random_unitary, spectrum_entropy

ENCODER_TOL = 1e-9
PSD_TOL = 1e-9
POVM_TOL = 1e-8
MIXABLE_TOL = 1e-9

ChannelSpec = Union[AVWC, Sequence[AVWC]]


# ====== TIPOS ======

class Code:
    """
    Código (n, J) con codificador estocástico E(a^n|j) y POVM {D_j}.

    Las columnas del codificador recorren A^n en orden lexicográfico.
    """

    def __init__(self, n: int, J: int, encoder, decoders, field: str = "code"):
        E = np.array(encoder, dtype=float)
        D = np.array(decoders, dtype=np.complex128)
        if n < 0 or J < 1:
            raise ShapeError(f"{field}: n={n}, J={J} inválidos", field=field)
        if E.ndim != 2 or E.shape[0] != J:
            raise ShapeError(f"{field}: codificador de forma {E.shape}, se esperaban {J} filas", field=f"{field}.encoder")
        if D.ndim != 3 or D.shape[0] != J or D.shape[1] != D.shape[2]:
            raise ShapeError(f"{field}: decodificadores de forma {D.shape}, se esperaban {J} matrices cuadradas",
                             field=f"{field}.decoders")
        if float(E.min()) < -ENCODER_TOL:
            raise InvariantError(f"{field}: probabilidad negativa en el codificador", field=f"{field}.encoder",
                                 residual=-float(E.min()))
        gap = float(np.max(np.abs(E.sum(axis=1) - 1.0)))
        if gap > ENCODER_TOL:
            raise InvariantError(f"{field}: filas del codificador no suman 1 (desviación {gap:.3e})",
                                 field=f"{field}.encoder", residual=gap)
        asym = float(np.max(np.abs(D - D.conj().transpose(0, 2, 1))))
        if asym > 1e-10:
            raise InvariantError(f"{field}: decodificador no hermítico ({asym:.3e})", field=f"{field}.decoders", residual=asym)
        D = (D + D.conj().transpose(0, 2, 1)) / 2
        lam_min = float(np.linalg.eigvalsh(D).min())
        if lam_min < -PSD_TOL:
            raise InvariantError(f"{field}: decodificador no PSD (autovalor {lam_min:.3e})", field=f"{field}.decoders",
                                 residual=-lam_min)

        E = np.clip(E, 0.0, None)
        E.setflags(write=False)
        D.setflags(write=False)
        self.n, self.J = n, J
        self.encoder, self.decoders = E, D
        self.verify_povm(field)

    @classmethod
    def deterministic(cls, n: int, codewords: Sequence[int], n_columns: int, decoders) -> "Code":
        """Codificador con una entrada unitaria por fila (índices lexicográficos de a^n)"""
        E = np.zeros((len(codewords), n_columns))
        E[np.arange(len(codewords)), list(codewords)] = 1.0
        return cls(n, len(codewords), E, decoders)

    @property
    def dim(self) -> int:
        return self.decoders.shape[1]

    def verify_povm(self, field: str = "code") -> None:
        gap = float(np.max(np.abs(self.decoders.sum(axis=0) - np.eye(self.dim))))
        if gap > POVM_TOL:
            raise InvariantError(f"{field}: Σ_j D_j ≠ I (desviación {gap:.3e})", field=f"{field}.decoders", residual=gap)

    def codeword_indices(self) -> Optional[List[int]]:
        """Índices de las palabras si el codificador es determinista"""
        if np.all((self.encoder == 0.0) | (self.encoder == 1.0)):
            return [int(i) for i in np.argmax(self.encoder, axis=1)]
        return None

    def __repr__(self) -> str:
        return f"Code(n={self.n}, J={self.J}, dim={self.dim})"


class CorrCode:
    """Código asistido por correlación: {E_{x^n}} y {D_j^{(y^n)}}"""

    def __init__(self, n: int, J: int, encoders: Mapping[Tuple[str, ...], np.ndarray],
                 decoders: Mapping[Tuple[str, ...], np.ndarray],
                 x_alphabet: Sequence[str], y_alphabet: Sequence[str]):
        self.n, self.J = n, J
        self.x_alphabet, self.y_alphabet = tuple(x_alphabet), tuple(y_alphabet)
        self.encoders, self.decoders = {}, {}
        for x_seq in itertools.product(self.x_alphabet, repeat=n):
            if x_seq not in encoders:
                raise ParseError(f"corr_code: falta el codificador para x^n={','.join(x_seq)}", field="encoders")
        for y_seq in itertools.product(self.y_alphabet, repeat=n):
            if y_seq not in decoders:
                raise ParseError(f"corr_code: falta el decodificador para y^n={','.join(y_seq)}", field="decoders")
        # Validación de cada par con la misma lógica que Code
        any_d = next(iter(decoders.values()))
        for x_seq in itertools.product(self.x_alphabet, repeat=n):
            self.encoders[x_seq] = Code(n, J, encoders[x_seq], any_d, field=f"encoders[{','.join(x_seq)}]").encoder
        any_e = self.encoders[next(iter(self.encoders))]
        for y_seq in itertools.product(self.y_alphabet, repeat=n):
            self.decoders[y_seq] = Code(n, J, any_e, decoders[y_seq], field=f"decoders[{','.join(y_seq)}]").decoders

    def code(self, x_seq: Tuple[str, ...], y_seq: Tuple[str, ...]) -> Code:
        return Code(self.n, self.J, self.encoders[x_seq], self.decoders[y_seq])


class JammerSweep(BaseModel):
    """Recorrido de secuencias t^n: exhaustivo o muestreado con semilla"""
    mode: Literal["exhaustive", "sampled"] = "exhaustive"
    cap: int = Field(default_factory=lambda: config.SWEEP_CAP, gt=0)
    seed: Optional[int] = None


class WorstCaseReport(BaseModel):
    t_seq: List[str]
    max_error: float
    max_leakage: float
    leakage_t_seq: List[str]
    mode: str
    evaluated: int
    lower_bound: bool = Field(..., description="True en modo muestreado: el máximo real puede ser mayor")


class CompositionRow(BaseModel):
    t_seq: List[str]
    composed: float
    prefix: float
    mean_inner: float
    slack: float


class CompositionReport(BaseModel):
    quantity: str
    rows: List[CompositionRow]
    min_slack: float


class TauErrorReport(BaseModel):
    mixable: bool
    value: Optional[float] = None
    expected: Optional[float] = None
    input_dependence_residual: float


class SweepRow(BaseModel):
    t_seq: List[str]
    error: float
    leakage: float


class RandomCodeReport(BaseModel):
    rows: List[SweepRow]
    max_error: float
    max_leakage: float
    draws: List[int] = Field(default_factory=list)
    max_individual_leakage: float = 0.0


# ====== DOCUMENTOS ======


class CodeDocument(BaseModel):
    n: int
    J: int
    encoder: List[List[float]]
    decoders: List[Matrix]


class CorrCodeDocument(BaseModel):
    n: int
    J: int
    x_alphabet: List[str]
    y_alphabet: List[str]
    encoders: Dict[str, List[List[float]]]
    decoders: Dict[str, List[Matrix]]


def load_code(document) -> Code:
    doc = parse_document(document, CodeDocument, "code")
    return Code(doc.n, doc.J, doc.encoder, [matrix_from_pairs(m) for m in doc.decoders])


def dump_code(code: Code) -> dict:
    return {
        "n": code.n,
        "J": code.J,
        "encoder": code.encoder.tolist(),
        "decoders": [matrix_to_pairs(d) for d in code.decoders],
    }


def _split_key(key: str) -> Tuple[str, ...]:
    return tuple(key.split(",")) if key else ()


def load_corr_code(document) -> CorrCode:
    doc = parse_document(document, CorrCodeDocument, "corr_code")
    encoders = {_split_key(k): np.asarray(v, dtype=float) for k, v in doc.encoders.items()}
    decoders = {_split_key(k): np.stack([matrix_from_pairs(m) for m in v]) for k, v in doc.decoders.items()}
    return CorrCode(doc.n, doc.J, encoders, decoders, doc.x_alphabet, doc.y_alphabet)


# ====== NÚCLEOS ======

def _letters(channel: ChannelSpec, n: int) -> List[AVWC]:
    if isinstance(channel, AVWC):
        return [channel] * n
    letters = list(channel)
    if len(letters) != n:
        raise ShapeError(f"sim: {len(letters)} canales por letra para n={n}", field="channel")
    return letters


def _letter_stacks(letters: Sequence[AVWC], t_seq: Sequence[str], which: str) -> List[np.ndarray]:
    if len(t_seq) != len(letters):
        raise ShapeError(f"sim: |t^n| = {len(t_seq)}, n = {len(letters)}", field="t_seq")
    stacks = []
    for ch, t in zip(letters, t_seq):
        family = getattr(ch, which)
        if str(t) not in family:
            raise ShapeError(f"sim: estado '{t}' no pertenece a θ de '{ch.name}'", field="t_seq")
        stacks.append(family[str(t)].stack())
    return stacks


def _check_code_shape(code: Code, letters: Sequence[AVWC], which: str) -> None:
    columns = int(np.prod([len(ch.alphabet) for ch in letters])) if letters else 1
    if code.encoder.shape[1] != columns:
        raise ShapeError(f"sim: el codificador tiene {code.encoder.shape[1]} columnas, |A^n| = {columns}",
                         field="encoder")
    dim = int(np.prod([getattr(ch, f"{which}_dim") for ch in letters])) if letters else 1
    if dim > config.DIM_CAP:
        raise CapacityError(f"sim: dimensión {dim} excede DIM_CAP={config.DIM_CAP}", field="n")
    if which == "legal" and code.dim != dim:
        raise ShapeError(f"sim: decodificadores de dimensión {code.dim}, salida de dimensión {dim}", field="decoders")


def povm_statistics(decoders: np.ndarray, stacks: Sequence[np.ndarray]) -> np.ndarray:
    """
    M[a^n, j] = tr(W_{t^n}(a^n) D_j) contrayendo letra por letra, sin formar
    las salidas n-fold completas.
    """
    J = decoders.shape[0]
    cur = decoders[:, None, :, :]
    for st in stacks:
        d = st.shape[1]
        P, R = cur.shape[1], cur.shape[2]
        rest = R // d
        cur = cur.reshape(J, P, d, rest, d, rest)
        cur = np.einsum("ayx,jpxrys->jpars", st, cur).reshape(J, P * st.shape[0], rest, rest)
    return cur[:, :, 0, 0].real.T


def wiretap_states(encoder: np.ndarray, stacks: Sequence[np.ndarray]) -> np.ndarray:
    """Z_j = Σ_{a^n} E(a^n|j) ⊗_i V_{t_i}(a_i) para cada mensaje j"""
    J = encoder.shape[0]
    sizes = [st.shape[0] for st in stacks]
    cur = encoder.reshape(J, -1, 1, 1).astype(np.complex128)
    # De la última letra a la primera
    for st, k in zip(reversed(stacks), reversed(sizes)):
        P = cur.shape[1] // k
        u = cur.shape[2]
        cur = cur.reshape(J, P, k, u, u)
        d = st.shape[1]
        cur = np.einsum("axy,jpauv->jpxuyv", st, cur).reshape(J, P, d * u, d * u)
    return cur[:, 0]


def _error_from_stats(encoder: np.ndarray, stats: np.ndarray) -> float:
    J = encoder.shape[0]
    success = np.einsum("ja,aj->", encoder, stats) / J
    return float(np.clip(1.0 - success, 0.0, 1.0))


def _leakage_from_states(states: np.ndarray, base: float) -> float:
    J = states.shape[0]
    chi = chi_from_arrays(np.full(J, 1.0 / J), states, base)
    return float(np.clip(chi, 0.0, np.log(J) / np.log(base) if J > 1 else 0.0))


# ====== OPERACIONES ======

def error_prob(code: Code, channel: ChannelSpec, t_seq: Sequence[str]) -> float:
    """
    P_e(C, t^n) = 1 − (1/J) Σ_j Σ_{a^n} E(a^n|j) tr(W_{t^n}(a^n) D_j).

    Args:
        code: Código (n, J)
        channel: AVWC, o una lista de n AVWC (uno por letra)
        t_seq: Secuencia de estados del jammer
    """
    letters = _letters(channel, code.n)
    _check_code_shape(code, letters, "legal")
    code.verify_povm()
    stats = povm_statistics(code.decoders, _letter_stacks(letters, t_seq, "legal"))
    return _error_from_stats(code.encoder, stats)


def error_prob_deterministic(code: Code, channel: AVWC, t_seq: Sequence[str]) -> float:
    """Forma determinista 1 − (1/J) Σ_j tr(W_{t^n}(a^n(j)) D_j), vía n_fold_output"""
    indices = code.codeword_indices()
    if indices is None:
        raise InvariantError("error_prob_deterministic: el codificador no es determinista", field="encoder")
    words = list(itertools.product(channel.alphabet, repeat=code.n))
    code.verify_povm()
    total = 0.0
    for j, idx in enumerate(indices):
        out = n_fold_output(channel.legal, t_seq, words[idx])
        total += float(np.trace(out.data @ code.decoders[j]).real)
    return float(np.clip(1.0 - total / code.J, 0.0, 1.0))


def leakage(code: Code, channel: ChannelSpec, t_seq: Sequence[str], normalized: bool = False,
            base: Optional[float] = None) -> float:
    """
    χ(R_uni; Z_{t^n}) con Z_{t^n} = {Σ_{a^n} E(a^n|j) V_{t^n}(a^n)}_j (criterio fuerte).

    Args:
        normalized: Si True devuelve χ/n (criterio débil)
    """
    base = check_base(base)
    letters = _letters(channel, code.n)
    _check_code_shape(code, letters, "wiretap")
    code.verify_povm()
    states = wiretap_states(code.encoder, _letter_stacks(letters, t_seq, "wiretap"))
    chi = _leakage_from_states(states, base)
    return chi / code.n if normalized and code.n > 0 else chi


def jammer_sequences(letters: Sequence[AVWC], sweep: JammerSweep) -> List[Tuple[str, ...]]:
    """t^n en orden lexicográfico (exhaustivo) o `cap` sorteos uniformes con semilla (PCG64)"""
    spaces = [ch.state_labels for ch in letters]
    total = int(np.prod([len(s) for s in spaces])) if spaces else 1
    if sweep.mode == "exhaustive":
        if total > sweep.cap:
            raise CapacityError(f"worst_case: |θ|^n = {total} excede el límite de barrido {sweep.cap}", field="cap")
        return list(itertools.product(*spaces))
    if sweep.seed is None:
        raise InvariantError("worst_case: el modo muestreado requiere semilla", field="seed")
    rng = np.random.default_rng(sweep.seed)
    draws = [rng.integers(0, len(s), size=sweep.cap) for s in spaces]
    return [tuple(spaces[i][draws[i][k]] for i in range(len(spaces))) for k in range(sweep.cap)]


def sweep_rows(code: Code, channel: ChannelSpec, sweep: Optional[JammerSweep] = None) -> List[SweepRow]:
    """Error y fuga del código en cada t^n del barrido, en el orden del barrido"""
    sweep = sweep or JammerSweep()
    letters = _letters(channel, code.n)
    return [
        SweepRow(t_seq=list(t_seq), error=error_prob(code, letters, t_seq), leakage=leakage(code, letters, t_seq))
        for t_seq in jammer_sequences(letters, sweep)
    ]


def summarize_sweep(rows: Sequence[SweepRow], mode: str) -> WorstCaseReport:
    if not rows:
        raise InvariantError("worst_case: barrido vacío", field="cap")
    # argmax devuelve el primer índice en empates
    worst_err = rows[int(np.argmax([r.error for r in rows]))]
    worst_leak = rows[int(np.argmax([r.leakage for r in rows]))]
    return WorstCaseReport(
        t_seq=worst_err.t_seq,
        max_error=worst_err.error,
        max_leakage=worst_leak.leakage,
        leakage_t_seq=worst_leak.t_seq,
        mode=mode,
        evaluated=len(rows),
        lower_bound=mode == "sampled",
    )


def worst_case(code: Code, channel: ChannelSpec, sweep: Optional[JammerSweep] = None) -> WorstCaseReport:
    """
    max_{t^n} P_e(C, t^n) y max_{t^n} χ(R_uni; Z_{t^n}); empates al primer t^n.
    En modo muestreado los máximos son cotas inferiores de los verdaderos.
    """
    sweep = sweep or JammerSweep()
    print(f"[SIM] 🔄 Barrido {sweep.mode} del jammer para {code}")
    report = summarize_sweep(sweep_rows(code, channel, sweep), sweep.mode)
    print(f"[SIM] ✅ error máximo {report.max_error:.9f} en {','.join(report.t_seq)}, "
          f"fuga máxima {report.max_leakage:.9f} ({report.evaluated} secuencias)")
    return report


def compose_prefix(outer: Code, inners: Sequence[Code]) -> Code:
    """
    Código compuesto de longitud n₀ + n₁: el prefijo transmite el índice i del
    código interno usado.

        E(a^{n₀} b^{n₁} | j) = (1/|inners|) Σ_i E₀(a^{n₀}|i) E_i(b^{n₁}|j)
        D_j = Σ_i D⁰_i ⊗ D_{i,j}

    El prefijo no necesita ser secreto.
    """
    if not inners:
        raise ShapeError("compose_prefix: lista de códigos internos vacía", field="inners")
    if outer.J != len(inners):
        raise ShapeError(f"compose_prefix: el prefijo tiene J={outer.J}, hay {len(inners)} códigos internos", field="outer")
    first = inners[0]
    for c in inners:
        if (c.n, c.J, c.encoder.shape, c.dim) != (first.n, first.J, first.encoder.shape, first.dim):
            raise ShapeError("compose_prefix: los códigos internos no comparten (n, J, dimensiones)", field="inners")
    dim = outer.dim * first.dim
    if dim > config.DIM_CAP:
        raise CapacityError(f"compose_prefix: dimensión {dim} excede DIM_CAP={config.DIM_CAP}", field="dim")

    k = len(inners)
    encoder = sum(np.einsum("a,jb->jab", outer.encoder[i], inners[i].encoder) for i in range(k)) / k
    encoder = encoder.reshape(first.J, -1)
    decoders = np.stack([
        sum(np.kron(outer.decoders[i], inners[i].decoders[j]) for i in range(k))
        for j in range(first.J)
    ])
    return Code(outer.n + first.n, first.J, encoder, decoders, field="composed")


def _composed_letters(outer: Code, inner: Code, channel: ChannelSpec,
                      inner_channel: Optional[ChannelSpec]) -> Tuple[List[AVWC], List[AVWC]]:
    if inner_channel is None:
        inner_channel = channel
    return _letters(channel, outer.n), _letters(inner_channel, inner.n)


def composed_error_check(outer: Code, inners: Sequence[Code], channel: ChannelSpec,
                         sweep: Optional[JammerSweep] = None,
                         inner_channel: Optional[ChannelSpec] = None) -> CompositionReport:
    """
    Verifica error(compuesto) ≤ error(prefijo) + media de errores internos
    en cada secuencia del barrido.
    """
    sweep = sweep or JammerSweep()
    composed = compose_prefix(outer, inners)
    prefix_letters, inner_letters = _composed_letters(outer, inners[0], channel, inner_channel)
    letters = prefix_letters + inner_letters
    rows = []
    for t_seq in jammer_sequences(letters, sweep):
        t_prefix, t_inner = t_seq[:outer.n], t_seq[outer.n:]
        err = error_prob(composed, letters, t_seq)
        prefix_err = error_prob(outer, prefix_letters, t_prefix)
        inner_err = float(np.mean([error_prob(c, inner_letters, t_inner) for c in inners]))
        rows.append(CompositionRow(t_seq=list(t_seq), composed=err, prefix=prefix_err, mean_inner=inner_err,
                                   slack=prefix_err + inner_err - err))
    report = CompositionReport(quantity="error", rows=rows, min_slack=min(r.slack for r in rows))
    print(f"[SIM] ✅ Cadena de error del código compuesto: holgura mínima {report.min_slack:.3e}")
    return report


def composed_leakage_check(outer: Code, inners: Sequence[Code], channel: ChannelSpec,
                           sweep: Optional[JammerSweep] = None,
                           inner_channel: Optional[ChannelSpec] = None) -> CompositionReport:
    """
    Evalúa ambos lados de la cadena de fuga del código compuesto:
    χ(R_uni; Z_compuesto) ≤ media_i χ(R_uni; Z_{C_i}) + (H(Y_uni) − χ(Y_uni; prefijo)).
    En cada fila `prefix` es el término entre paréntesis.
    """
    sweep = sweep or JammerSweep()
    base = config.LOG_BASE
    composed = compose_prefix(outer, inners)
    prefix_letters, inner_letters = _composed_letters(outer, inners[0], channel, inner_channel)
    letters = prefix_letters + inner_letters
    h_prefix = float(np.log(outer.J) / np.log(base))
    rows = []
    for t_seq in jammer_sequences(letters, sweep):
        t_prefix, t_inner = t_seq[:outer.n], t_seq[outer.n:]
        leak = leakage(composed, letters, t_seq)
        prefix_term = h_prefix - leakage(outer, prefix_letters, t_prefix)
        inner_leak = float(np.mean([leakage(c, inner_letters, t_inner) for c in inners]))
        rows.append(CompositionRow(t_seq=list(t_seq), composed=leak, prefix=prefix_term, mean_inner=inner_leak,
                                   slack=inner_leak + prefix_term - leak))
    report = CompositionReport(quantity="leakage", rows=rows, min_slack=min(r.slack for r in rows))
    print(f"[SIM] ✅ Cadena de fuga del código compuesto: holgura mínima {report.min_slack:.3e}")
    return report


def expected_error_under_tau(code: Code, legal: Family, sigma: SimplexDist) -> TauErrorReport:
    """
    Σ_{t^n} σ^{⊗n}(t^n) P_e(C, t^n), calculado con el canal mezclado Σ_t σ(t) W_t
    (mezcla y luego n-fold). Requiere que la mezcla no dependa de la entrada;
    en ese caso el valor es exactamente 1 − 1/J.
    """
    mixed = mixture_channel(legal, sigma)
    stack = mixed.stack()
    dependence = float(np.max(np.abs(stack - stack[0]))) if stack.shape[0] > 1 else 0.0
    if dependence > MIXABLE_TOL:
        print(f"[SIM] ⚠️  La mezcla depende de la entrada (residuo {dependence:.3e})")
        return TauErrorReport(mixable=False, input_dependence_residual=dependence)

    columns = stack.shape[0] ** code.n
    if code.encoder.shape[1] != columns:
        raise ShapeError(f"expected_error_under_tau: {code.encoder.shape[1]} columnas, |A^n| = {columns}", field="encoder")
    if mixed.out_dim ** code.n != code.dim:
        raise ShapeError("expected_error_under_tau: dimensión del decodificador incompatible", field="decoders")
    code.verify_povm()
    stats = povm_statistics(code.decoders, [stack] * code.n)
    value = _error_from_stats(code.encoder, stats)
    return TauErrorReport(mixable=True, value=value, expected=1.0 - 1.0 / code.J,
                          input_dependence_residual=dependence)


def corr_code_eval(code: CorrCode, channel: ChannelSpec, corr: Correlation,
                   t_seq: Sequence[str]) -> Tuple[float, float]:
    """
    Error y fuga promedio sobre (x^n, y^n) i.i.d. según p:
    Σ p(x^n,y^n) P_e(C(x^n,y^n), t^n) y Σ p(x^n) χ(R_uni; Z_{t^n,x^n}).

    Returns:
        (avg_error, avg_leakage)
    """
    n = code.n
    x_seqs = list(itertools.product(corr.x_alphabet, repeat=n))
    y_seqs = list(itertools.product(corr.y_alphabet, repeat=n))
    if len(x_seqs) * len(y_seqs) > config.CORR_ENUM_CAP:
        raise CapacityError(f"corr_code_eval: |𝐗|^n·|𝐘|^n = {len(x_seqs) * len(y_seqs)} excede "
                            f"CORR_ENUM_CAP={config.CORR_ENUM_CAP}", field="n")
    if (corr.x_alphabet, corr.y_alphabet) != (code.x_alphabet, code.y_alphabet):
        raise ShapeError("corr_code_eval: los alfabetos de la correlación y del código difieren", field="corr")

    letters = _letters(channel, n)
    legal_stacks = _letter_stacks(letters, t_seq, "legal")
    wiretap_stacks = _letter_stacks(letters, t_seq, "wiretap")
    x_index = {x: i for i, x in enumerate(corr.x_alphabet)}
    y_index = {y: i for i, y in enumerate(corr.y_alphabet)}

    stats = {y_seq: povm_statistics(code.decoders[y_seq], legal_stacks) for y_seq in y_seqs}
    avg_error, avg_leak = 0.0, 0.0
    for x_seq in x_seqs:
        encoder = code.encoders[x_seq]
        p_x = float(np.prod([corr.x_marginal[x_index[x]] for x in x_seq]))
        if p_x > 0.0:
            avg_leak += p_x * _leakage_from_states(wiretap_states(encoder, wiretap_stacks), config.LOG_BASE)
        for y_seq in y_seqs:
            p = float(np.prod([corr.joint[x_index[x], y_index[y]] for x, y in zip(x_seq, y_seq)]))
            if p > 0.0:
                avg_error += p * _error_from_stats(encoder, stats[y_seq])
    return avg_error, avg_leak


def random_code_eval(code_family: Sequence[Code], weights: SimplexDist, channel: ChannelSpec,
                     sweep: Optional[JammerSweep] = None) -> RandomCodeReport:
    """
    Criterio de códigos asistidos por aleatoriedad con una familia finita
    ponderada: max_{t^n} Σ_γ G(γ) P_e(C^γ, t^n) y max_{t^n} Σ_γ G(γ) χ(R_uni; Z_{C^γ,t^n}).
    """
    sweep = sweep or JammerSweep()
    if weights.support_size != len(code_family):
        raise ShapeError(f"random_code_eval: {weights.support_size} pesos para {len(code_family)} códigos", field="weights")
    n = code_family[0].n
    letters = _letters(channel, n)
    rows = []
    for t_seq in jammer_sequences(letters, sweep):
        err = sum(w * error_prob(c, letters, t_seq) for w, c in zip(weights.probs, code_family) if w > 0)
        leak = sum(w * leakage(c, letters, t_seq) for w, c in zip(weights.probs, code_family) if w > 0)
        rows.append(SweepRow(t_seq=list(t_seq), error=float(err), leakage=float(leak)))
    return RandomCodeReport(rows=rows, max_error=max(r.error for r in rows), max_leakage=max(r.leakage for r in rows))


def derandomize_experiment(code_family: Sequence[Code], weights: SimplexDist, channel: ChannelSpec, k: int,
                           seed: int, sweep: Optional[JammerSweep] = None) -> RandomCodeReport:
    """
    Sortea k códigos i.i.d. según los pesos y reporta, para cada t^n del
    barrido, el error y la fuga medios del multiconjunto sorteado, más sus
    máximos. Determinista dada la semilla.
    """
    sweep = sweep or JammerSweep()
    if weights.support_size != len(code_family):
        raise ShapeError(f"derandomize_experiment: {weights.support_size} pesos para {len(code_family)} códigos",
                         field="weights")
    if k < 1:
        raise InvariantError(f"derandomize_experiment: k={k} debe ser positivo", field="k")
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(code_family), size=k, p=weights.probs)
    counts = np.bincount(draws, minlength=len(code_family))
    used = np.flatnonzero(counts)
    print(f"[SIM] 🎲 {k} códigos sorteados (semilla {seed}), {used.size} distintos")

    n = code_family[0].n
    letters = _letters(channel, n)
    rows, max_individual = [], 0.0
    for t_seq in jammer_sequences(letters, sweep):
        errors = {i: error_prob(code_family[i], letters, t_seq) for i in used}
        leaks = {i: leakage(code_family[i], letters, t_seq) for i in used}
        max_individual = max(max_individual, max(leaks.values()))
        rows.append(SweepRow(
            t_seq=list(t_seq),
            error=float(sum(counts[i] * errors[i] for i in used) / k),
            leakage=float(sum(counts[i] * leaks[i] for i in used) / k),
        ))
    return RandomCodeReport(
        rows=rows,
        max_error=max(r.error for r in rows),
        max_leakage=max(r.leakage for r in rows),
        draws=counts.tolist(),
        max_individual_leakage=max_individual,
    )


def wiretapper_measured_information(code: Code, channel: ChannelSpec, t_seq: Sequence[str],
                                    base: Optional[float] = None) -> Tuple[float, float]:
    """
    Estrategia del espía: medir cada salida en la base computacional y
    reportar I(J; resultado) con J uniforme, junto con χ(R_uni; Z_{t^n}).
    Siempre I ≤ χ.

    Returns:
        (información medida, χ)
    """
    base = check_base(base)
    letters = _letters(channel, code.n)
    _check_code_shape(code, letters, "wiretap")
    code.verify_povm()
    states = wiretap_states(code.encoder, _letter_stacks(letters, t_seq, "wiretap"))
    outcome = np.clip(np.einsum("jii->ji", states).real, 0.0, None)
    outcome /= outcome.sum(axis=1, keepdims=True)
    J = code.J
    joint = outcome / J
    info = float(spectrum_entropy(joint.sum(axis=0), base) + np.log(J) / np.log(base) - spectrum_entropy(joint.ravel(), base))
    return max(info, 0.0), _leakage_from_states(states, base)


def random_deterministic_code(n: int, J: int, alphabet_size: int, d: int, rng: np.random.Generator,
                              stochastic: bool = False, distinct: bool = True,
                              decoder: Literal["basis", "rotated"] = "basis") -> Code:
    """
    Código aleatorio con semilla para suites de propiedades.

    Args:
        stochastic: Filas del codificador Dirichlet en vez de palabras únicas
        distinct: Palabras distintas (requiere J ≤ alphabet_size^n)
        decoder: "basis" reparte los proyectores de la base computacional entre
            mensajes; "rotated" los conjuga con un unitario aleatorio
    """
    columns = alphabet_size ** n
    D = d ** n
    if stochastic:
        encoder = rng.dirichlet(np.ones(columns), size=J)
    else:
        words = rng.choice(columns, size=J, replace=not distinct)
        encoder = np.zeros((J, columns))
        encoder[np.arange(J), words] = 1.0

    owner = rng.integers(0, J, size=D)
    decoders = np.zeros((J, D, D), dtype=np.complex128)
    decoders[owner, np.arange(D), np.arange(D)] = 1.0
    if decoder == "rotated":
        U = random_unitary(D, rng)
        decoders = np.einsum("ik,jkl,ml->jim", U, decoders, U.conj())
    return Code(n, J, encoder, decoders)
