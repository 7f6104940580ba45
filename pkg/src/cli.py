"""
Línea de comandos: carga canales y códigos, ejecuta las comprobaciones y
escribe un reporte JSON completo y un resumen TSV por comando.

Códigos de salida: 0 ok, 2 parseo, 3 invariante, 4 límite, 5 solver indeterminado.
"""
import argparse
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from .avc import AVWC, load_avwc, product_avwc
from .bounds import BoundOptions, chi_derivative, dichotomy_report, min_chi_over_jammer, secrecy_lower_bound
from .bundled import bundled_examples, basis_code, mixable, toy_instances
from .config import config
from .errors import InvariantError, ParseError, ToolkitError
from .qmath import SimplexDist
from .sim import (
    JammerSweep,
    composed_error_check,
    composed_leakage_check,
    expected_error_under_tau,
    leakage,
    load_code,
    random_deterministic_code,
    summarize_sweep,
    sweep_rows,
)
from .sym import canonical_shift_witness, check_symmetrizable, residual, witness_document

Command = Literal["check-sym", "bound", "dichotomy", "simulate", "superactivate", "reproduce"]
SIGNIFICANT = 9


class RunConfig(BaseModel):
    """Configuración de una ejecución de la línea de comandos"""
    command: Command
    inputs: List[str] = Field(default_factory=list, description="Archivos de canal")
    code: Optional[str] = Field(None, description="Archivo de código (simulate)")
    witness: Optional[str] = Field(None, description="Destino del testigo τ (check-sym)")
    tol: float = Field(default_factory=lambda: config.SYM_TOL)
    grid: int = Field(default_factory=lambda: config.GRID_POINTS)
    jammer_grid: int = Field(default_factory=lambda: config.JAMMER_GRID_POINTS)
    leakage_order: int = Field(default_factory=lambda: config.LEAKAGE_ORDER)
    base: float = Field(default_factory=lambda: config.LOG_BASE)
    sweep: Literal["exhaustive", "sampled"] = "exhaustive"
    cap: int = Field(default_factory=lambda: config.SWEEP_CAP)
    seed: Optional[int] = None
    out: str = Field(default_factory=lambda: config.OUTPUT_DIR)

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        invalid = [name for name in ("tol", "grid", "jammer_grid", "leakage_order", "cap")
                   if not getattr(self, name) > 0]
        if invalid:
            raise ValueError(f"valores no positivos: {', '.join(invalid)}")
        if not self.base > 1:
            raise ValueError(f"base del logaritmo inválida: {self.base}")
        if self.sweep == "sampled" and self.seed is None:
            raise ValueError("el modo muestreado requiere --seed")
        return self

    def bound_options(self) -> BoundOptions:
        return BoundOptions(grid=self.grid, jammer_grid=self.jammer_grid,
                            leakage_order=self.leakage_order, base=self.base)


# ====== UTILIDADES ======

def _round(value: Any) -> Any:
    """Redondea recursivamente a 9 cifras significativas"""
    if isinstance(value, float):
        return float(f"{value:.{SIGNIFICANT}g}") if math.isfinite(value) else value
    if isinstance(value, dict):
        return {str(k): _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, np.generic):
        return _round(value.item())
    return value


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"no se pudo leer '{path}': {e.strerror}", field=path)


def _channel(path: str) -> AVWC:
    return load_avwc(_read(path))


def _fmt(values: Sequence[float]) -> str:
    return "[" + ", ".join(f"{v:.{SIGNIFICANT}g}" for v in values) + "]"


def write_report(out: str, command: str, report: Dict[str, Any], rows: List[Dict[str, Any]]) -> Tuple[Path, Path]:
    """Escribe <out>/<command>.json y <out>/<command>.tsv"""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{command}.json"
    tsv_path = out_dir / f"{command}.tsv"
    json_path.write_text(json.dumps(_round(report), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    pd.DataFrame(_round(rows)).to_csv(tsv_path, sep="\t", index=False, float_format=f"%.{SIGNIFICANT}g")
    print(f"[CLI] 💾 Reportes: {json_path}, {tsv_path}")
    return json_path, tsv_path


# ====== COMANDOS ======

def cmd_check_sym(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    channel = _channel(cfg.inputs[0])
    result = check_symmetrizable(channel.legal, cfg.tol)
    if cfg.witness:
        Path(cfg.witness).write_text(json.dumps(_round(witness_document(result)), indent=2) + "\n", encoding="utf-8")
    report = {"channel": channel.name, **result.model_dump()}
    rows = [{"channel": channel.name, "symmetrizable": result.symmetrizable, "residual": result.residual,
             "tolerance": result.tolerance, "lp_optimum": result.lp_optimum}]
    return report, rows


def _bound_row(name: str, bound) -> dict:
    return {"channel": name, "value": bound.value, "clamped_value": bound.clamped_value,
            "legal_term": bound.legal_term, "leakage_term": bound.leakage_term,
            "argmax_P": _fmt(bound.argmax_P), "argmin_Q": _fmt(bound.argmin_Q), "grid_spec": bound.grid_spec}


def cmd_bound(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    channel = _channel(cfg.inputs[0])
    bound = secrecy_lower_bound(channel, cfg.bound_options())
    return {"channel": channel.name, **bound.model_dump()}, [_bound_row(channel.name, bound)]


def _dichotomy_row(name: str, report) -> dict:
    return {"channel": name, "symmetrizable": report.symmetrizable, "sym_residual": report.sym_residual,
            "random_lb": report.random_lb.value, "deterministic_secrecy_lb": report.deterministic_secrecy_lb}


def cmd_dichotomy(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    channel = _channel(cfg.inputs[0])
    report = dichotomy_report(channel, cfg.bound_options(), cfg.tol)
    return {"channel": channel.name, **report.model_dump()}, [_dichotomy_row(channel.name, report)]


def cmd_simulate(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    if not cfg.code:
        raise ParseError("simulate requiere --code", field="code")
    channel = _channel(cfg.inputs[0])
    code = load_code(_read(cfg.code))
    sweep = JammerSweep(mode=cfg.sweep, cap=cfg.cap, seed=cfg.seed)
    swept = sweep_rows(code, channel, sweep)
    report = summarize_sweep(swept, sweep.mode)
    print(f"[CLI] 📊 error máximo {report.max_error:.9g}, fuga máxima {report.max_leakage:.9g} "
          f"({report.evaluated} secuencias{', cota inferior' if report.lower_bound else ''})")
    rows = [{"t_seq": ",".join(r.t_seq), "error": r.error, "leakage": r.leakage} for r in swept]
    return {"channel": channel.name, "n": code.n, "J": code.J, **report.model_dump()}, rows


def superactivation(c1: AVWC, c2: AVWC, opts: BoundOptions, tol: float) -> Tuple[dict, List[dict]]:
    """Dicotomía de cada factor y del producto; super-activación si 0 + 0 > 0"""
    product = product_avwc(c1, c2)
    reports = {ch.name: dichotomy_report(ch, opts, tol) for ch in (c1, c2, product)}
    factors_zero = all(reports[ch.name].deterministic_secrecy_lb == 0.0 for ch in (c1, c2))
    activated = factors_zero and reports[product.name].deterministic_secrecy_lb > 0.0
    print(f"[CLI] {'✅' if activated else '⚠️ '} Super-activación: {activated}")
    report = {"superactivated": activated, "channels": {name: r.model_dump() for name, r in reports.items()}}
    return report, [_dichotomy_row(name, r) for name, r in reports.items()]


def cmd_superactivate(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    if len(cfg.inputs) != 2:
        raise ParseError("superactivate requiere dos archivos de canal", field="inputs")
    return superactivation(_channel(cfg.inputs[0]), _channel(cfg.inputs[1]), cfg.bound_options(), cfg.tol)


def reproduce(cfg: RunConfig) -> Tuple[dict, List[dict]]:
    """Tabla con las cantidades de los canales de ejemplo incluidos"""
    channels = dict(bundled_examples())
    ex1, ex2 = channels["example1"], channels["example2"]
    opts = cfg.bound_options()
    uniform = SimplexDist.uniform(2)
    rows: List[Dict[str, Any]] = []

    def add(quantity: str, value: Any, expected: Any = "") -> None:
        rows.append({"quantity": quantity, "value": value, "expected": expected})

    q_star, min_chi = min_chi_over_jammer(ex1.legal, uniform, opts)
    add("example1.min_chi", min_chi, 0.5 - 0.75 * math.log2(4.0 / 3.0))
    add("example1.argmin_q", float(q_star.probs[0]), 0.5)
    add("example1.stationarity", abs(chi_derivative(ex1.legal, uniform, 0.5, cfg.base)), 0.0)
    add("example1.canonical_witness_residual",
        residual(ex1.legal, canonical_shift_witness(len(ex1.alphabet), len(ex1.state_labels))), 0.0)

    for name, ch in channels.items():
        sym = check_symmetrizable(ch.legal, cfg.tol)
        add(f"{name}.symmetrizable", sym.symmetrizable, name == "example1")
        add(f"{name}.sym_residual", sym.residual)

    for name in ("example1", "example2"):
        bound = secrecy_lower_bound(channels[name], opts)
        add(f"{name}.random_lb", bound.value)

    rng = np.random.default_rng(cfg.seed if cfg.seed is not None else config.SEED)
    for J in (2, 4):
        code = random_deterministic_code(2, J, 2, 2, rng)
        add(f"example2.wiretap_leakage.J{J}", leakage(code, ex2, ("1", "2"), base=cfg.base), math.log(J, cfg.base))

    tau = expected_error_under_tau(basis_code(), mixable().legal, uniform)
    add("mixable.expected_error_under_tau", tau.value, tau.expected)
    tau1 = expected_error_under_tau(basis_code(), ex1.legal, uniform)
    add("example1.tau_input_dependence", tau1.input_dependence_residual, 0.5)

    for name, outer, inners in toy_instances():
        err = composed_error_check(outer, inners, ex2, inner_channel=ex1)
        leak = composed_leakage_check(outer, inners, ex2, inner_channel=ex1)
        add(f"toy.{name}.error_min_slack", err.min_slack)
        add(f"toy.{name}.leakage_min_slack", leak.min_slack)

    report = {"rows": rows, "grid": cfg.grid, "jammer_grid": cfg.jammer_grid, "base": cfg.base}
    return report, rows


COMMANDS = {
    "check-sym": cmd_check_sym,
    "bound": cmd_bound,
    "dichotomy": cmd_dichotomy,
    "simulate": cmd_simulate,
    "superactivate": cmd_superactivate,
    "reproduce": reproduce,
}


def run(cfg: RunConfig) -> int:
    """Ejecuta el comando y escribe los reportes; devuelve el código de salida"""
    print(f"[CLI] 🚀 {cfg.command} {' '.join(cfg.inputs)}")
    try:
        report, rows = COMMANDS[cfg.command](cfg)
        write_report(cfg.out, cfg.command, report, rows)
    except ToolkitError as e:
        where = f" (campo: {e.field})" if e.field else ""
        print(f"[CLI] ❌ {type(e).__name__}: {e}{where}")
        return e.exit_code
    print(f"[CLI] ✅ {cfg.command} completado")
    return 0


# ====== ARGUMENTOS ======

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avwc", description="Herramientas para canales wiretap cuántico-clásicos "
                                                               "arbitrariamente variables")
    # --out se acepta antes o después del subcomando
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="Directorio de reportes")
    parser.add_argument("--out", default=argparse.SUPPRESS, help="Directorio de reportes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-sym", parents=[common], help="Simetrizabilidad de la familia legal")
    p.add_argument("file")
    p.add_argument("--tol", type=float)
    p.add_argument("--witness", help="Archivo donde escribir τ")

    for name, text in (("bound", "Cota inferior de la capacidad secreta"), ("dichotomy", "Reporte de la dicotomía")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
        p.add_argument("--grid", type=int)
        p.add_argument("--jammer-grid", type=int)
        p.add_argument("--leakage-order", type=int)
        p.add_argument("--base", type=float)
        p.add_argument("--tol", type=float)

    p = sub.add_parser("simulate", parents=[common], help="Peor caso de un código frente al jammer")
    p.add_argument("file")
    p.add_argument("--code", required=True)
    p.add_argument("--sweep", choices=["exhaustive", "sampled"])
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("superactivate", parents=[common], help="Dicotomía de dos canales y de su producto")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--grid", type=int)
    p.add_argument("--jammer-grid", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("reproduce", parents=[common], help="Tabla de los ejemplos incluidos")
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None}
    inputs = [values.pop(k) for k in ("file", "file1", "file2") if k in values]
    try:
        return RunConfig(inputs=inputs, **values)
    except ValidationError as e:
        first = e.errors()[0]
        raise InvariantError(f"configuración inválida: {first.get('msg')}",
                             field=".".join(str(p) for p in first.get("loc", ())) or None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ToolkitError as e:
        print(f"[CLI] ❌ {e}")
        return e.exit_code
    return run(cfg)
