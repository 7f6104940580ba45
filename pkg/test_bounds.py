#!/usr/bin/env python3
"""
Tests de la cota inferior de capacidad secreta: mínimo de χ sobre el jammer,
término de fuga, maximin sobre P, dicotomía y verificación del gradiente
"""

import os
import time

os.environ.setdefault("TESTING", "1")

import numpy as np
import pytest

from src.avc import AVWC, CQChannel, product_avwc
from src.bounds import (
    BoundOptions,
    chi_derivative,
    chi_gradient_check,
    dichotomy_report,
    grid_size,
    leakage_term,
    min_chi_over_jammer,
    secrecy_lower_bound,
    simplex_grid,
)
from src.bundled import example1, example2
from src.errors import CapacityError, InvariantError
from src.qmath import DensityOp, Ensemble, SimplexDist, holevo_chi

# 1/2 − (3/4)·log2(4/3)
EXAMPLE1_MIN_CHI = 0.5 - 0.75 * np.log2(4.0 / 3.0)
UNIFORM = SimplexDist.uniform(2)
PRODUCT_OPTS = BoundOptions(grid=8, jammer_grid=8)


def test_simplex_grid():
    print("\n📝 Test 4.1: Rejillas del símplex")
    assert np.allclose(simplex_grid(2, 2), [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
    assert grid_size(3, 4) == 15
    grid = simplex_grid(3, 4)
    assert grid.shape == (15, 3)
    assert np.allclose(grid.sum(axis=1), 1.0)


def test_example1_min_chi():
    print("\n📝 Test 4.2: min_Q χ en example1")
    assert EXAMPLE1_MIN_CHI == pytest.approx(0.188722, abs=1e-6)
    q_star, value = min_chi_over_jammer(example1().legal, UNIFORM)
    assert value == pytest.approx(EXAMPLE1_MIN_CHI, abs=1e-6)
    assert q_star.probs == pytest.approx([0.5, 0.5], abs=1e-3)
    print(f"   ✅ Q* = {q_star.probs}, valor {value:.6f}")


def test_min_chi_single_state():
    channel = example1()
    single = {"1": channel.legal["1"]}
    p = SimplexDist([0.4, 0.6])
    q_star, value = min_chi_over_jammer(single, p)
    assert q_star.probs == pytest.approx([1.0])
    expected = holevo_chi(Ensemble(p, [channel.legal["1"]("0"), channel.legal["1"]("1")]))
    assert value == pytest.approx(expected, abs=1e-12)


def test_min_chi_constant_family():
    """W₁ = W₂: χ no depende de Q"""
    legal = example2().legal
    p = SimplexDist([0.3, 0.7])
    expected = holevo_chi(Ensemble(p, [legal["1"]("0"), legal["1"]("1")]))
    _, value = min_chi_over_jammer(legal, p)
    assert value == pytest.approx(expected, abs=1e-12)
    opts = BoundOptions(jammer_grid=9, refine=False)
    _, coarse = min_chi_over_jammer(legal, p, opts)
    assert coarse == pytest.approx(expected, abs=1e-12)


def test_min_chi_rejects_wrong_support():
    with pytest.raises(InvariantError):
        min_chi_over_jammer(example1().legal, SimplexDist.uniform(3))


def test_min_chi_relabeling():
    legal = example1().legal
    swapped = {"1": legal["2"], "2": legal["1"]}
    for p in (UNIFORM, SimplexDist([0.3, 0.7]), SimplexDist([0.8, 0.2])):
        q1, v1 = min_chi_over_jammer(legal, p)
        q2, v2 = min_chi_over_jammer(swapped, p)
        assert v1 == pytest.approx(v2, abs=1e-10)
        assert q1.probs == pytest.approx(q2.probs[::-1], abs=1e-4)


def test_leakage_term_examples():
    print("\n📝 Test 4.3: Término de fuga")
    rng = np.random.default_rng(13)
    silent = example1().wiretap
    copy = example2().wiretap
    for n in (1, 2, 3, 4):
        p = SimplexDist(rng.dirichlet(np.ones(2)))
        assert leakage_term(silent, p, n) == pytest.approx(0.0, abs=1e-9)
        assert leakage_term(copy, UNIFORM, n) == pytest.approx(1.0, abs=1e-9)
    assert leakage_term(copy, SimplexDist.point_mass(2, 1)) == pytest.approx(0.0, abs=1e-12)
    assert leakage_term(copy, SimplexDist([0.25, 0.75])) == pytest.approx(0.811278, abs=1e-6)

    with pytest.raises(InvariantError):
        leakage_term(copy, UNIFORM, 0)
    with pytest.raises(CapacityError):
        leakage_term(copy, UNIFORM, 7)
    print("   ✅ Constante en n ≤ 4")


def test_example1_bound():
    print("\n📝 Test 4.4: Cota inferior de example1")
    report = secrecy_lower_bound(example1())
    assert report.value == pytest.approx(EXAMPLE1_MIN_CHI, abs=1e-3)
    assert report.value >= 0.1887 - 1e-3
    assert report.argmax_P == pytest.approx([0.5, 0.5], abs=1e-2)
    assert report.argmin_Q == pytest.approx([0.5, 0.5], abs=1e-2)
    assert report.leakage_term == pytest.approx(0.0, abs=1e-9)
    assert report.value == pytest.approx(report.legal_term - report.leakage_term, abs=1e-12)
    assert report.clamped_value == report.value
    assert "lower bound" in report.grid_spec
    print(f"   ✅ valor {report.value:.6f} bits")


def test_grid_refinement_consistency():
    coarse = secrecy_lower_bound(example1(), BoundOptions(grid=32, jammer_grid=32))
    fine = secrecy_lower_bound(example1(), BoundOptions(grid=64, jammer_grid=64))
    assert fine.value >= coarse.value - 1e-6


def test_example2_bound_is_not_positive():
    print("\n📝 Test 4.5: Cota de example2")
    channel = example2()
    report = secrecy_lower_bound(channel)
    assert report.value <= 1e-9
    assert report.clamped_value == pytest.approx(0.0, abs=1e-9)

    # χ legal ≤ fuga en cada punto de la rejilla
    for p in simplex_grid(2, 16):
        dist = SimplexDist(p)
        _, legal = min_chi_over_jammer(channel.legal, dist, BoundOptions(refine=False))
        assert legal <= leakage_term(channel.wiretap, dist) + 1e-12


def test_leakage_order_report():
    report = secrecy_lower_bound(example2(), BoundOptions(grid=16, leakage_order=3))
    assert report.leakage_order == 3
    assert sorted(report.leakage_by_order) == [1, 2, 3]
    values = list(report.leakage_by_order.values())
    assert max(values) - min(values) <= 1e-9


def test_product_bound():
    print("\n📝 Test 4.6: Cota del producto (rejilla reducida)")
    product = product_avwc(example1(), example2())
    report = secrecy_lower_bound(product, PRODUCT_OPTS)
    assert report.value >= 0.1887 - 1e-3
    assert len(report.argmax_P) == 4
    print(f"   ✅ valor {report.value:.6f} bits con P* = {np.round(report.argmax_P, 4)}")


def test_alphabet_grid_cap():
    alphabet = [str(a) for a in range(5)]
    ch = CQChannel(alphabet, {a: DensityOp.maximally_mixed(2) for a in alphabet})
    channel = AVWC("wide", alphabet, ["1"], {"1": ch}, {"1": ch})
    with pytest.raises(CapacityError):
        secrecy_lower_bound(channel)


def test_dichotomy():
    print("\n📝 Test 4.7: Dicotomía")
    first = dichotomy_report(example1())
    assert first.symmetrizable
    assert first.deterministic_secrecy_lb == 0.0
    assert first.random_lb.value == pytest.approx(EXAMPLE1_MIN_CHI, abs=1e-3)

    second = dichotomy_report(example2())
    assert not second.symmetrizable
    assert second.random_lb.value <= 1e-9
    assert second.deterministic_secrecy_lb == pytest.approx(0.0, abs=1e-9)

    product = dichotomy_report(product_avwc(example1(), example2()), PRODUCT_OPTS)
    assert not product.symmetrizable
    assert product.deterministic_secrecy_lb >= 0.1887 - 1e-3
    print("   ✅ 0 + 0 > 0")


def test_superactivation_at_default_resolution():
    print("\n📝 Test 4.8: Super-activación con BoundOptions por defecto")
    opts = BoundOptions()
    start = time.perf_counter()
    first = dichotomy_report(example1(), opts)
    second = dichotomy_report(example2(), opts)
    product = dichotomy_report(product_avwc(example1(), example2()), opts)
    elapsed = time.perf_counter() - start

    assert first.deterministic_secrecy_lb == 0.0
    assert second.deterministic_secrecy_lb == 0.0
    assert product.deterministic_secrecy_lb >= 0.1877

    # P* vive en {(0,a'), (1,a')} con a' fijo; alfabeto (0,0), (0,1), (1,0), (1,1)
    p_star = np.array(product.random_lb.argmax_P)
    support = {int(i) for i in np.flatnonzero(p_star > 1e-9)}
    assert support in ({0, 2}, {1, 3})
    assert p_star[sorted(support)] == pytest.approx([0.5, 0.5], abs=1e-3)
    assert elapsed < 120.0
    print(f"   ✅ {product.deterministic_secrecy_lb:.6f} bits en {elapsed:.1f} s")


def test_gradient_check():
    print("\n📝 Test 4.9: Derivada de χ respecto de q")
    legal = example1().legal
    assert abs(chi_derivative(legal, UNIFORM, 0.5)) <= 1e-8
    assert chi_gradient_check(legal, UNIFORM, SimplexDist([0.5, 0.5])) <= 1e-8
    assert chi_gradient_check(legal, UNIFORM, SimplexDist([0.3, 0.7])) <= 1e-6
    # χ decrece hacia el mínimo en q = 1/2
    assert chi_derivative(legal, UNIFORM, 0.3) < 0.0

    constant = example2().legal
    for q in (0.1, 0.5, 0.9):
        assert chi_derivative(constant, UNIFORM, q) == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(InvariantError):
        chi_gradient_check(legal, UNIFORM, SimplexDist([0.5, 0.5]), h=0.1)
    with pytest.raises(InvariantError):
        chi_derivative({"1": legal["1"]}, UNIFORM, 0.5)


def main():
    print("\n" + "🧪" * 35)
    print(" " * 20 + "TEST SUITE: bounds")
    print("🧪" * 35 + "\n")
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
    print("\n✅ TESTS COMPLETADOS")


if __name__ == "__main__":
    main()
