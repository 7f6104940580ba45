#!/usr/bin/env python3
"""
Servidor MCP para el análisis de canales wiretap cuántico-clásicos
arbitrariamente variables usando FastMCP
"""

import asyncio
from typing import Any, Callable, Dict, Literal, Optional

from fastmcp import FastMCP
from pydantic import BaseModel, Field

# Importar nuestros módulos
from .avc import AVWC, dump_avwc, load_avwc
from .bounds import BoundOptions, dichotomy_report, secrecy_lower_bound
from .bundled import bundled_examples, mixable
from .cli import RunConfig, reproduce, superactivation
from .config import config
from .errors import ToolkitError
from .sim import JammerSweep, load_code, worst_case
from .sym import check_symmetrizable, witness_document

# Crear instancia del servidor FastMCP
mcp = FastMCP("AVWC MCP Server", version="1.0.0")

# ====== MODELOS DE DATOS ======

class ChannelRequest(BaseModel):
    """Canal como documento JSON o por nombre de ejemplo incluido"""
    channel: Optional[Dict[str, Any]] = Field(None, description="Documento de canal (name, alphabet, theta, legal, wiretap)")
    bundled: Optional[str] = Field(None, description="Nombre de un canal incluido: example1, example2, product, mixable")


class SymRequest(ChannelRequest):
    """Solicitud de comprobación de simetrizabilidad"""
    tol: float = Field(default_factory=lambda: config.SYM_TOL, description="Umbral de decisión del residuo")


class BoundRequest(ChannelRequest):
    """Solicitud de cota inferior o de dicotomía"""
    grid: int = Field(default_factory=lambda: config.GRID_POINTS, description="Puntos por dimensión del símplex de P")
    jammer_grid: int = Field(default_factory=lambda: config.JAMMER_GRID_POINTS, description="Puntos por dimensión de Q")
    leakage_order: int = Field(default_factory=lambda: config.LEAKAGE_ORDER, description="n de la fuga")
    tol: float = Field(default_factory=lambda: config.SYM_TOL)


class SimulateRequest(ChannelRequest):
    """Solicitud de simulación de un código frente al peor jammer"""
    code: Dict[str, Any] = Field(..., description="Documento de código (n, J, encoder, decoders)")
    sweep: Literal["exhaustive", "sampled"] = Field("exhaustive", description="Modo del barrido de t^n")
    cap: int = Field(default_factory=lambda: config.SWEEP_CAP, gt=0, description="Límite de secuencias")
    seed: Optional[int] = Field(None, description="Semilla (modo muestreado)")


class SuperactivationRequest(BaseModel):
    """Dos canales cuyo producto se analiza"""
    first: ChannelRequest
    second: ChannelRequest
    grid: int = Field(default_factory=lambda: config.GRID_POINTS)
    jammer_grid: int = Field(default_factory=lambda: config.JAMMER_GRID_POINTS)
    tol: float = Field(default_factory=lambda: config.SYM_TOL)


# ====== FUNCIONES AUXILIARES ======

def _bundled() -> Dict[str, AVWC]:
    channels = dict(bundled_examples())
    channels["mixable"] = mixable()
    return channels


def _resolve_channel(request: ChannelRequest) -> AVWC:
    if request.channel is not None:
        return load_avwc(request.channel)
    channels = _bundled()
    if request.bundled not in channels:
        raise ToolkitError(f"Canal desconocido '{request.bundled}'. Disponibles: {', '.join(channels)}")
    return channels[request.bundled]


async def _run_tool(title: str, work: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    """Ejecuta el trabajo en un hilo y lo envuelve en la respuesta estándar"""
    print(f"\n{'='*60}")
    print(f"🔧 {title}")
    print(f"{'='*60}")
    try:
        payload = await asyncio.to_thread(work)
        print(f"✅ {title} completado")
        print(f"{'='*60}\n")
        return {"success": True, **payload}
    except ToolkitError as e:
        print(f"❌ ERROR: {e}")
        print(f"{'='*60}\n")
        return {
            "success": False,
            "error": str(e),
            "error_type": type(e).__name__,
            "field": e.field,
            "exit_code": e.exit_code,
        }
    except Exception as e:
        print(f"❌ ERROR: {e}")
        print(f"{'='*60}\n")
        return {
            "success": False,
            "error": f"Error en {title}: {e}"
        }


# ====== HERRAMIENTAS MCP ======

async def _check_symmetrizable_impl(request: SymRequest) -> Dict[str, Any]:
    def work():
        channel = _resolve_channel(request)
        result = check_symmetrizable(channel.legal, request.tol)
        return {"channel": channel.name, "result": result.model_dump(), "witness": witness_document(result)}

    return await _run_tool("Simetrizabilidad", work)


@mcp.tool()
async def check_symmetrizable_tool(request: SymRequest) -> Dict[str, Any]:
    """
    Decide si la familia legal (W_t) es simetrizable.

    Si lo es, la capacidad secreta determinista es cero; el testigo τ(·|a)
    se devuelve por filas (alfabeto) y columnas (estados θ).

    Args:
        request: Canal (documento o nombre incluido) y tolerancia

    Returns:
        Dict con la decisión, el residuo y el testigo
    """
    return await _check_symmetrizable_impl(request)


def _bound_options(request) -> BoundOptions:
    return BoundOptions(grid=request.grid, jammer_grid=request.jammer_grid,
                        leakage_order=getattr(request, "leakage_order", config.LEAKAGE_ORDER))


async def _secrecy_bound_impl(request: BoundRequest) -> Dict[str, Any]:
    def work():
        channel = _resolve_channel(request)
        return {"channel": channel.name, "bound": secrecy_lower_bound(channel, _bound_options(request)).model_dump()}

    return await _run_tool("Cota inferior de capacidad secreta", work)


@mcp.tool()
async def secrecy_bound_tool(request: BoundRequest) -> Dict[str, Any]:
    """
    Evalúa max_P (min_Q χ(P, U^Q) − fuga) por búsqueda en rejilla.

    El resultado es una cota inferior limitada por la resolución de la
    búsqueda; `value` puede ser negativo y `clamped_value` es max(value, 0).

    Args:
        request: Canal, resoluciones de rejilla y orden de la fuga

    Returns:
        Dict con el reporte completo de la cota
    """
    return await _secrecy_bound_impl(request)


async def _dichotomy_impl(request: BoundRequest) -> Dict[str, Any]:
    def work():
        channel = _resolve_channel(request)
        report = dichotomy_report(channel, _bound_options(request), request.tol)
        return {"channel": channel.name, "dichotomy": report.model_dump()}

    return await _run_tool("Dicotomía", work)


@mcp.tool()
async def dichotomy_tool(request: BoundRequest) -> Dict[str, Any]:
    """
    Combina simetrizabilidad y cota: capacidad determinista 0 si la familia
    legal es simetrizable, si no igual a la asistida por aleatoriedad.
    """
    return await _dichotomy_impl(request)


async def _simulate_code_impl(request: SimulateRequest) -> Dict[str, Any]:
    def work():
        channel = _resolve_channel(request)
        code = load_code(request.code)
        sweep = JammerSweep(mode=request.sweep, cap=request.cap, seed=request.seed)
        return {"channel": channel.name, "worst_case": worst_case(code, channel, sweep).model_dump()}

    return await _run_tool("Simulación de código", work)


@mcp.tool()
async def simulate_code_tool(request: SimulateRequest) -> Dict[str, Any]:
    """
    Error máximo y fuga máxima χ(R_uni; Z_{t^n}) de un código sobre las
    secuencias del jammer. En modo muestreado los máximos son cotas inferiores.
    """
    return await _simulate_code_impl(request)


async def _superactivation_impl(request: SuperactivationRequest) -> Dict[str, Any]:
    def work():
        first, second = _resolve_channel(request.first), _resolve_channel(request.second)
        report, rows = superactivation(first, second, _bound_options(request), request.tol)
        return {**report, "summary": rows}

    return await _run_tool("Super-activación", work)


@mcp.tool()
async def superactivation_tool(request: SuperactivationRequest) -> Dict[str, Any]:
    """
    Analiza dos canales y su producto: hay super-activación cuando ambos
    tienen capacidad secreta determinista cero y el producto no (0 + 0 > 0).
    """
    return await _superactivation_impl(request)


async def _reproduce_examples_impl(grid: int, seed: Optional[int]) -> Dict[str, Any]:
    def work():
        report, _ = reproduce(RunConfig(command="reproduce", grid=grid, seed=seed))
        return report

    return await _run_tool("Reproducción de ejemplos", work)


@mcp.tool()
async def reproduce_examples_tool(grid: int = 64, seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Tabla de cantidades de los canales incluidos: mínimo de χ y su argmin,
    decisiones de simetrizabilidad, fuga de la copia perfecta, identidad del
    error bajo τ y holguras de la composición con prefijo.

    Args:
        grid: Puntos por dimensión de la rejilla de P
        seed: Semilla de los códigos aleatorios (default config.SEED)
    """
    return await _reproduce_examples_impl(grid, seed)


async def _list_bundled_channels_impl() -> Dict[str, Any]:
    channels = _bundled()
    return {
        "success": True,
        "channels": [
            {
                "name": name,
                "alphabet": list(ch.alphabet),
                "theta": list(ch.state_labels),
                "legal_dim": ch.legal_dim,
                "wiretap_dim": ch.wiretap_dim,
                "document": dump_avwc(ch),
            }
            for name, ch in channels.items()
        ],
    }


@mcp.tool()
async def list_bundled_channels() -> Dict[str, Any]:
    """Lista los canales incluidos con su documento JSON"""
    return await _list_bundled_channels_impl()


# ====== FUNCIÓN PRINCIPAL ======

def main():
    """Función principal para ejecutar el servidor MCP"""
    try:
        print("🚀 Iniciando AVWC MCP Server con FastMCP...")
        print("📋 Herramientas registradas:")
        print("   ✅ check_symmetrizable_tool - Simetrizabilidad de la familia legal")
        print("   ✅ secrecy_bound_tool - Cota inferior de capacidad secreta")
        print("   ✅ dichotomy_tool - Dicotomía determinista / aleatoria")
        print("   ✅ simulate_code_tool - Peor caso de un código")
        print("   ✅ superactivation_tool - Super-activación de dos canales")
        print("   ✅ reproduce_examples_tool - Tabla de los ejemplos incluidos")
        print("   ✅ list_bundled_channels - Canales incluidos")
        print("🎯 Servidor MCP listo para recibir peticiones...")

        mcp.run()

    except Exception as error:
        print(f"❌ Error iniciando el servidor MCP: {error}")
        raise error

if __name__ == "__main__":
    main()
