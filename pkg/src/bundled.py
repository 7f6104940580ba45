"""
Canales y códigos de ejemplo incluidos con el paquete: los dos canales de la
demostración de super-activación, su producto, el canal mezclable y las
instancias pequeñas de composición con prefijo
"""
from typing import Dict, List, Tuple

import numpy as np

from .avc import AVWC, CQChannel, product_avwc
from .qmath import DensityOp
from .sim import Code

ALPHABET = ("0", "1")
THETA = ("1", "2")


def _diag(p0: float) -> DensityOp:
    return DensityOp.diagonal([p0, 1.0 - p0])


def _family(outputs: Dict[str, Tuple[float, float]]) -> Dict[str, CQChannel]:
    """outputs[t] = (peso de |0⟩ para a=0, peso de |0⟩ para a=1)"""
    return {
        t: CQChannel(ALPHABET, {"0": _diag(w0), "1": _diag(w1)}, field=f"family[{t}]")
        for t, (w0, w1) in outputs.items()
    }


def example1() -> AVWC:
    """Legal simetrizable con testigo τ(t|a) = 1 si t = a + 1; el espía siempre ve |0⟩⟨0|"""
    legal = _family({"1": (1.0, 0.5), "2": (0.5, 0.0)})
    wiretap = _family({"1": (1.0, 1.0), "2": (1.0, 1.0)})
    return AVWC("example1", ALPHABET, THETA, legal, wiretap)


def example2() -> AVWC:
    """Legal ruidoso e independiente de t; el espía recibe una copia clásica perfecta"""
    legal = _family({"1": (0.75, 0.25), "2": (0.75, 0.25)})
    wiretap = _family({"1": (1.0, 0.0), "2": (1.0, 0.0)})
    return AVWC("example2", ALPHABET, THETA, legal, wiretap)


def mixable() -> AVWC:
    """W₁(0) = W₂(1) = |0⟩⟨0|, W₁(1) = W₂(0) = |1⟩⟨1|: la mezcla uniforme no depende de a"""
    legal = _family({"1": (1.0, 0.0), "2": (0.0, 1.0)})
    wiretap = _family({"1": (1.0, 1.0), "2": (1.0, 1.0)})
    return AVWC("mixable", ALPHABET, THETA, legal, wiretap)


def bundled_examples() -> List[Tuple[str, AVWC]]:
    c1, c2 = example1(), example2()
    return [("example1", c1), ("example2", c2), ("product", product_avwc(c1, c2))]


def basis_code(order: Tuple[int, int] = (0, 1)) -> Code:
    """Código n=1, J=2: mensaje j envía el símbolo order[j] y se mide en la base computacional"""
    projectors = np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]).astype(np.complex128)
    return Code.deterministic(1, list(order), 2, projectors[list(order)])


def toy_instances() -> List[Tuple[str, Code, List[Code]]]:
    """
    (nombre, prefijo, internos): el prefijo va por example2 y los internos
    por example1.
    """
    outer = basis_code()
    return [
        ("identical", outer, [basis_code(), basis_code()]),
        ("swapped", outer, [basis_code(), basis_code((1, 0))]),
    ]
