#!/usr/bin/env python3
"""
Tests de simetrizabilidad: decisión por programa lineal, testigos, residuo y
acuerdo con búsqueda exhaustiva en rejilla
"""

import os

os.environ.setdefault("TESTING", "1")

import numpy as np
import pytest

from src.avc import CQChannel, product_avwc
from src.bundled import example1, example2, mixable
from src.config import config
from src.errors import ShapeError, SolverIndeterminateError
from src.qmath import DensityOp, random_density_matrix
from src.simplex import InfeasibleError, solve_lp
from src.sym import (
    SymWitness,
    canonical_shift_witness,
    check_symmetrizable,
    clean_tau,
    residual,
    witness_document,
)

ALPHABET = ["0", "1"]
BRUTE_FORCE_INSTANCES = 200
GRID = np.linspace(0.0, 1.0, 1001)


def _family(states):
    """states[t] = (W_t(0), W_t(1))"""
    return {t: CQChannel(ALPHABET, dict(zip(ALPHABET, pair))) for t, pair in states.items()}


def _symmetrizable_family(rng):
    # W_1(1) = W_2(0): el testigo desplazado anula el residuo
    shared = random_density_matrix(2, rng)
    return _family({"1": (random_density_matrix(2, rng), shared), "2": (shared, random_density_matrix(2, rng))})


def _random_family(rng):
    return _family({t: (random_density_matrix(2, rng), random_density_matrix(2, rng)) for t in ("1", "2")})


def _brute_force_min(family) -> float:
    """min sobre τ(·|0) = (u, 1−u), τ(·|1) = (v, 1−v) en rejilla de paso 1e−3"""
    w = {t: (family[t]("0").data, family[t]("1").data) for t in ("1", "2")}
    # Σ_t τ(t|0) W_t(1) − Σ_t τ(t|1) W_t(0) = u·A + B − v·C − D
    A = w["1"][1] - w["2"][1]
    B = w["2"][1]
    C = w["1"][0] - w["2"][0]
    D = w["2"][0]
    u, v = GRID[:, None], GRID[None, :]
    worst = np.zeros((GRID.size, GRID.size))
    for i, j in ((0, 0), (0, 1), (1, 1)):
        entry = np.abs(u * A[i, j] - v * C[i, j] + (B[i, j] - D[i, j]))
        np.maximum(worst, entry, out=worst)
    return float(worst.min())


def test_example1_is_symmetrizable():
    print("\n📝 Test 3.1: example1 es simetrizable")
    legal = example1().legal
    result = check_symmetrizable(legal)
    assert result.symmetrizable
    assert result.residual <= 1e-10
    assert result.witness is not None
    assert residual(legal, result.witness) <= config.SYM_TOL

    tau = result.witness.matrix()
    assert np.allclose(tau.sum(axis=1), 1.0)
    assert tau.min() >= 0.0

    canonical = canonical_shift_witness(2, 2)
    assert np.array_equal(canonical, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert residual(legal, canonical) == pytest.approx(0.0, abs=1e-12)
    print(f"   ✅ Residuo {result.residual:.2e}, τ = {result.witness.tau}")


def test_convex_combination_of_witnesses():
    legal = example1().legal
    canonical = canonical_shift_witness(2, 2)
    found = check_symmetrizable(legal).witness.matrix()
    for lam in (0.0, 0.25, 0.5, 1.0):
        assert residual(legal, lam * canonical + (1 - lam) * found) <= 1e-8


def test_example2_not_symmetrizable():
    print("\n📝 Test 3.2: example2 y el producto no son simetrizables")
    legal = example2().legal
    result = check_symmetrizable(legal)
    assert not result.symmetrizable
    assert result.witness is None
    assert result.lp_optimum >= 1e-3
    # W'(0) y W'(1) difieren en 1/2 en la diagonal
    assert result.residual >= 0.25 - 1e-9
    # sin testigo, el residuo reportado es el óptimo del programa lineal
    assert result.residual == pytest.approx(result.lp_optimum, abs=1e-12)
    assert result.residual > result.tolerance

    product = product_avwc(example1(), example2())
    result = check_symmetrizable(product.legal)
    assert not result.symmetrizable
    assert result.lp_optimum >= 1e-3
    assert result.residual == pytest.approx(result.lp_optimum, abs=1e-12)
    print(f"   ✅ Óptimos {result.lp_optimum:.4f}")


def test_residual_examples():
    print("\n📝 Test 3.3: Residuo")
    # |θ| = 1: τ trivial, residuo = max |W(0) − W(1)|
    single = _family({"1": (DensityOp.diagonal([0.75, 0.25]), DensityOp.diagonal([0.25, 0.75]))})
    assert residual(single, np.ones((2, 1))) == pytest.approx(0.5)

    one_symbol = {"1": CQChannel(["0"], {"0": DensityOp.diagonal([0.3, 0.7])}),
                  "2": CQChannel(["0"], {"0": DensityOp.diagonal([0.9, 0.1])})}
    assert residual(one_symbol, np.array([[0.4, 0.6]])) == 0.0
    assert check_symmetrizable(one_symbol).symmetrizable

    with pytest.raises(ShapeError):
        residual(example1().legal, np.ones((2, 3)) / 3)

    witness = SymWitness(tau=canonical_shift_witness(2, 2).tolist())
    assert residual(example1().legal, witness) == pytest.approx(0.0, abs=1e-12)


def test_self_symmetric_family():
    """W_t(a) independiente de a: τ uniforme es testigo"""
    rng = np.random.default_rng(41)
    for _ in range(20):
        states = {t: random_density_matrix(2, rng) for t in ("1", "2", "3")}
        family = _family({t: (rho, rho) for t, rho in states.items()})
        assert residual(family, np.full((2, 3), 1 / 3)) == pytest.approx(0.0, abs=1e-12)
        assert check_symmetrizable(family).symmetrizable


def test_mixable_family_is_symmetrizable():
    result = check_symmetrizable(mixable().legal)
    assert result.symmetrizable


def test_permutation_equivariance():
    print("\n📝 Test 3.4: Reetiquetar θ y A")
    rng = np.random.default_rng(8)
    for i in range(40):
        family = _symmetrizable_family(rng) if i % 2 == 0 else _random_family(rng)
        base = check_symmetrizable(family)

        swapped_theta = {"1": family["2"], "2": family["1"]}
        result = check_symmetrizable(swapped_theta)
        assert result.symmetrizable == base.symmetrizable
        assert result.lp_optimum == pytest.approx(base.lp_optimum, abs=1e-9)
        if base.witness is not None:
            permuted = base.witness.matrix()[:, ::-1]
            assert residual(swapped_theta, permuted) <= config.SYM_TOL

        swapped_alphabet = {
            t: CQChannel(ALPHABET, {"0": family[t]("1"), "1": family[t]("0")}) for t in family
        }
        result = check_symmetrizable(swapped_alphabet)
        assert result.symmetrizable == base.symmetrizable
        assert result.lp_optimum == pytest.approx(base.lp_optimum, abs=1e-9)
        if base.witness is not None:
            assert residual(swapped_alphabet, base.witness.matrix()[::-1]) <= config.SYM_TOL
    print("   ✅ Decisiones y óptimos invariantes")


def test_agreement_with_grid_search():
    print(f"\n📝 Test 3.5: Acuerdo con rejilla en {BRUTE_FORCE_INSTANCES} instancias")
    rng = np.random.default_rng(2025)
    agreed = 0
    for i in range(BRUTE_FORCE_INSTANCES):
        family = _symmetrizable_family(rng) if i % 2 == 0 else _random_family(rng)
        result = check_symmetrizable(family)
        brute = _brute_force_min(family)

        # El LP acota en partes real e imaginaria; la rejilla en módulo
        assert brute >= result.lp_optimum - 1e-9
        assert brute <= residual(family, np.array(result.best_tau)) + 1e-2
        assert result.symmetrizable == (result.residual <= result.tolerance)
        if result.symmetrizable:
            assert brute <= 1e-2
        if i % 2 == 0:
            assert result.symmetrizable
            assert brute == pytest.approx(0.0, abs=1e-12)
        agreed += 1
    print(f"   ✅ {agreed} instancias coinciden")


def test_clean_tau():
    tau = np.array([[1.0 + 1e-13, -5e-13], [0.5, 0.5]])
    cleaned = clean_tau(tau)
    assert cleaned.min() >= 0.0
    assert np.allclose(cleaned.sum(axis=1), 1.0)


def test_witness_document():
    result = check_symmetrizable(example1().legal)
    doc = witness_document(result)
    assert doc["symmetrizable"] is True
    assert doc["alphabet"] == ["0", "1"] and doc["theta"] == ["1", "2"]
    assert np.asarray(doc["tau"]).shape == (2, 2)
    assert doc["tolerance"] == config.SYM_TOL

    doc = witness_document(check_symmetrizable(example2().legal))
    assert doc["symmetrizable"] is False
    assert np.asarray(doc["tau"]).shape == (2, 2)


def test_solver_iteration_cap(monkeypatch):
    print("\n📝 Test 3.6: Solver indeterminado")
    monkeypatch.setattr(config, "SYM_MAX_ITER", 1)
    with pytest.raises(SolverIndeterminateError) as info:
        check_symmetrizable(example2().legal)
    assert info.value.exit_code == 5


def test_simplex_small_programs():
    # min −x − y  s.a.  x + y ≤ 1,  x − y = 0
    solution = solve_lp([-1.0, -1.0], [[1.0, 1.0]], [1.0], [[1.0, -1.0]], [0.0])
    assert solution.objective == pytest.approx(-1.0)
    assert solution.x == pytest.approx([0.5, 0.5])

    with pytest.raises(InfeasibleError):
        solve_lp([1.0], A_eq=[[1.0], [1.0]], b_eq=[1.0, 2.0])


def main():
    print("\n" + "🧪" * 35)
    print(" " * 20 + "TEST SUITE: sym")
    print("🧪" * 35 + "\n")
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn) and name != "test_solver_iteration_cap":
            fn()
    print("\n✅ TESTS COMPLETADOS")


if __name__ == "__main__":
    main()
