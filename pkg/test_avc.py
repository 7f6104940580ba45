#!/usr/bin/env python3
"""
Tests del álgebra de canales: carga de documentos, mezclas del jammer,
extensiones n-fold, productos, canal levantado e información mutua
"""

import json
import os
from pathlib import Path

os.environ.setdefault("TESTING", "1")

import numpy as np
import pytest

from src.avc import (
    AVWC,
    CQChannel,
    Correlation,
    avwc_from_kraus,
    dump_avwc,
    function_label,
    lift_correlation,
    load_avwc,
    load_correlation,
    mixture_channel,
    mutual_information,
    n_fold_output,
    pair_label,
    product_avwc,
)
from src.bundled import bundled_examples, example1, example2, mixable
from src.errors import CapacityError, InvariantError, ParseError, ShapeError
from src.qmath import (
    DensityOp,
    SimplexDist,
    partial_trace,
    random_density_matrix,
    von_neumann_entropy,
)

DATA = Path(__file__).parent / "data"


def _random_family(rng, n_states=2, n_symbols=2, dim=2):
    alphabet = [str(a) for a in range(n_symbols)]
    return {
        str(t): CQChannel(alphabet, {a: random_density_matrix(dim, rng) for a in alphabet})
        for t in range(n_states)
    }


def test_load_bundled_document():
    print("\n📝 Test 2.1: Carga de data/example1.json")
    channel = load_avwc((DATA / "example1.json").read_text(encoding="utf-8"))
    reference = example1()
    assert channel.alphabet == reference.alphabet
    assert channel.state_labels == reference.state_labels
    for t in reference.state_labels:
        for a in reference.alphabet:
            assert channel.legal[t](a).allclose(reference.legal[t](a))
            assert channel.wiretap[t](a).allclose(reference.wiretap[t](a))
    print(f"   ✅ {channel}")


def _max_entry_gap(first, second) -> float:
    gaps = [0.0]
    for family in ("legal", "wiretap"):
        for t in first.state_labels:
            for a in first.alphabet:
                x = getattr(first, family)[t](a).data
                y = getattr(second, family)[t](a).data
                gaps.append(float(np.max(np.abs(x - y))))
    return max(gaps)


def test_dump_then_load_every_bundled_channel():
    for name, channel in [*bundled_examples(), ("mixable", mixable())]:
        again = load_avwc(json.dumps(dump_avwc(channel)))
        assert again.name == channel.name
        assert again.alphabet == channel.alphabet
        assert again.state_labels == channel.state_labels
        assert _max_entry_gap(channel, again) <= 1e-15, name

    again = load_avwc(json.dumps(dump_avwc(example2())))
    assert again.legal["1"]("0").allclose(DensityOp.diagonal([0.75, 0.25]))


def test_data_files_match_bundled_channels():
    for file_name, reference in (("example1.json", example1()), ("example2.json", example2()),
                                 ("mixable.json", mixable())):
        channel = load_avwc((DATA / file_name).read_text(encoding="utf-8"))
        assert channel.name == reference.name
        assert channel.alphabet == reference.alphabet
        assert _max_entry_gap(reference, channel) <= 1e-15, file_name


def test_load_rejects_bad_documents():
    print("\n📝 Test 2.2: Documentos inválidos")
    doc = dump_avwc(example1())

    with pytest.raises(ParseError):
        load_avwc("{no es json")

    missing = json.loads(json.dumps(doc))
    del missing["legal"]["2"]["1"]
    with pytest.raises(ParseError) as info:
        load_avwc(missing)
    assert info.value.exit_code == 2

    bad_trace = json.loads(json.dumps(doc))
    bad_trace["legal"]["1"]["0"] = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
    with pytest.raises(InvariantError) as info:
        load_avwc(bad_trace)
    assert info.value.exit_code == 3

    mixed_dims = json.loads(json.dumps(doc))
    mixed_dims["wiretap"]["2"]["0"] = [[[1.0, 0.0]]]
    with pytest.raises(ShapeError):
        load_avwc(mixed_dims)
    print("   ✅ Errores de parseo e invariantes")


def test_mixture_channel_examples():
    print("\n📝 Test 2.3: Mezcla U^Q")
    legal = example1().legal
    half = SimplexDist.uniform(2)
    assert mixture_channel(legal, half)("0").allclose(DensityOp.diagonal([0.75, 0.25]))
    assert mixture_channel(legal, half)("1").allclose(DensityOp.diagonal([0.25, 0.75]))

    point = SimplexDist.point_mass(2, 0)
    for a in ("0", "1"):
        assert mixture_channel(legal, point)(a).allclose(legal["1"](a))

    with pytest.raises(ShapeError):
        mixture_channel(legal, SimplexDist.uniform(3))


def test_mixture_channel_is_affine():
    rng = np.random.default_rng(3)
    for _ in range(100):
        family = _random_family(rng, n_states=3)
        q1 = SimplexDist(rng.dirichlet(np.ones(3)))
        q2 = SimplexDist(rng.dirichlet(np.ones(3)))
        lam = float(rng.random())
        mixed = mixture_channel(family, SimplexDist(lam * q1.probs + (1 - lam) * q2.probs))
        expected = lam * mixture_channel(family, q1).stack() + (1 - lam) * mixture_channel(family, q2).stack()
        assert np.allclose(mixed.stack(), expected, atol=1e-10)


def test_n_fold_output():
    print("\n📝 Test 2.4: Salidas n-fold")
    legal = example1().legal
    assert n_fold_output(legal, ["2"], ["1"]).allclose(legal["2"]("1"))
    out = n_fold_output(legal, ["1", "2"], ["0", "1"])
    assert out.allclose(DensityOp.basis(4, 1))

    with pytest.raises(ShapeError):
        n_fold_output(legal, ["1"], ["0", "1"])
    with pytest.raises(CapacityError):
        n_fold_output(legal, ["1"] * 11, ["0"] * 11)


def test_n_fold_output_factorizes():
    rng = np.random.default_rng(17)
    for _ in range(100):
        family = _random_family(rng)
        n = int(rng.integers(1, 4))
        t_seq = [str(t) for t in rng.integers(0, 2, size=n)]
        a_seq = [str(a) for a in rng.integers(0, 2, size=n)]
        out = n_fold_output(family, t_seq, a_seq)
        assert np.trace(out.data).real == pytest.approx(1.0, abs=1e-10)
        per_letter = sum(von_neumann_entropy(family[t](a)) for t, a in zip(t_seq, a_seq))
        assert von_neumann_entropy(out) == pytest.approx(per_letter, abs=1e-9)


def test_product_avwc():
    print("\n📝 Test 2.5: Producto de canales")
    c1, c2 = example1(), example2()
    prod = product_avwc(c1, c2)
    assert len(prod.alphabet) == 4 and len(prod.state_labels) == 4
    assert prod.legal_dim == 4 and prod.wiretap_dim == 4
    assert prod.name == "example1⊗example2"

    state = prod.legal[pair_label("1", "2")](pair_label("0", "1"))
    expected = np.kron(c1.legal["1"]("0").data, c2.legal["2"]("1").data)
    assert np.allclose(state.data, expected, atol=1e-12)
    print(f"   ✅ {prod}")


def test_product_with_trivial_channel():
    c1 = example1()
    one = CQChannel(["*"], {"*": DensityOp([[1.0]])})
    trivial = AVWC("trivial", ["*"], ["*"], {"*": one}, {"*": one})
    prod = product_avwc(c1, trivial)
    for t in c1.state_labels:
        for a in c1.alphabet:
            assert prod.legal[pair_label(t, "*")](pair_label(a, "*")).allclose(c1.legal[t](a))
            assert prod.wiretap[pair_label(t, "*")](pair_label(a, "*")).allclose(c1.wiretap[t](a))


def test_product_partial_trace():
    rng = np.random.default_rng(23)
    alphabet = ["0", "1"]

    def random_avwc(name):
        legal = _random_family(rng)
        wiretap = _random_family(rng)
        return AVWC(name, alphabet, ["0", "1"], legal, wiretap)

    for _ in range(30):
        c1, c2 = random_avwc("a"), random_avwc("b")
        prod = product_avwc(c1, c2)
        for t1 in c1.state_labels:
            for a2 in alphabet:
                state = prod.legal[pair_label(t1, "1")](pair_label("0", a2))
                reduced = partial_trace(state, (2, 2), keep="first")
                assert np.allclose(reduced.data, c1.legal[t1]("0").data, atol=1e-10)


def test_lift_correlation_examples():
    print("\n📝 Test 2.6: Canal levantado por una correlación")
    legal = example1().legal

    constant = Correlation(["x"], ["y"], [[1.0]])
    lifted = lift_correlation(legal, constant)
    assert lifted.labels == (function_label(["0"]), function_label(["1"]))
    for t in legal:
        for a in ("0", "1"):
            assert lifted.channels[t](function_label([a])).allclose(legal[t](a))

    perfect = load_correlation((DATA / "correlation_perfect.json").read_text(encoding="utf-8"))
    lifted = lift_correlation(legal, perfect)
    assert len(lifted.function_alphabet) == 4
    identity = function_label(["0", "1"])
    for t in legal:
        expected = 0.5 * np.kron(np.diag([1.0, 0.0]), legal[t]("0").data) \
            + 0.5 * np.kron(np.diag([0.0, 1.0]), legal[t]("1").data)
        out = lifted.channels[t](identity)
        assert np.allclose(out.data, expected, atol=1e-12)
        assert np.trace(out.data).real == pytest.approx(1.0)
    print("   ✅ Bloques κ_y ⊗ W_t(f(x))")


def test_lift_correlation_blocks_are_recoverable():
    rng = np.random.default_rng(31)
    for _ in range(30):
        family = _random_family(rng, n_states=2, n_symbols=2, dim=2)
        joint = rng.dirichlet(np.ones(6)).reshape(3, 2)
        corr = Correlation(["x0", "x1", "x2"], ["y0", "y1"], joint)
        lifted = lift_correlation(family, corr)
        f = lifted.function_alphabet[int(rng.integers(len(lifted.function_alphabet)))]
        out = lifted.channels["0"](function_label(f)).data
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-10)
        for yi in range(2):
            block = out[2 * yi:2 * yi + 2, 2 * yi:2 * yi + 2] / corr.y_marginal[yi]
            expected = sum(joint[xi, yi] / corr.y_marginal[yi] * family["0"](f[xi]).data for xi in range(3))
            assert np.allclose(block, expected, atol=1e-10)


def test_lift_correlation_function_cap():
    legal = example1().legal
    corr = Correlation([str(x) for x in range(9)], ["y"], np.full((9, 1), 1 / 9))
    with pytest.raises(CapacityError):
        lift_correlation(legal, corr)


def test_mutual_information():
    print("\n📝 Test 2.7: Información mutua de la correlación")
    independent = Correlation(["0", "1"], ["0", "1"], np.outer([0.3, 0.7], [0.6, 0.4]))
    assert mutual_information(independent) == pytest.approx(0.0, abs=1e-12)
    perfect = Correlation(["0", "1"], ["0", "1"], [[0.5, 0.0], [0.0, 0.5]])
    assert mutual_information(perfect) == pytest.approx(1.0, abs=1e-12)
    noisy = Correlation(["0", "1"], ["0", "1"], [[0.4, 0.1], [0.1, 0.4]])
    assert mutual_information(noisy) == pytest.approx(0.278072, abs=1e-6)
    assert mutual_information(noisy, base=np.e) == pytest.approx(0.278072 * np.log(2), abs=1e-6)
    with pytest.raises(InvariantError):
        mutual_information(noisy, base=1.0)
    with pytest.raises(InvariantError):
        mutual_information(noisy, base=0.5)

    with pytest.raises(InvariantError):
        Correlation(["0"], ["0", "1"], [[0.5, 0.6]])
    with pytest.raises(ShapeError):
        Correlation(["0"], ["0"], [[0.5, 0.5]])


def test_bundled_channels_are_valid():
    for channel in (example1(), example2(), mixable()):
        for family in (channel.legal, channel.wiretap):
            for ch in family.values():
                for a in ch.alphabet:
                    data = ch(a).data
                    assert np.allclose(data, data.conj().T)
                    assert np.trace(data).real == pytest.approx(1.0)
                    assert np.linalg.eigvalsh(data).min() >= -1e-12


def test_avwc_from_kraus():
    """Un canal identidad deja al entorno sin información"""
    inputs = {"0": DensityOp.basis(2, 0), "1": DensityOp.basis(2, 1)}
    dephase = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    channel = avwc_from_kraus("stinespring", ["0", "1"], inputs, {"id": [np.eye(2), np.zeros((2, 2))], "deph": dephase})
    assert channel.legal["id"]("1").allclose(inputs["1"])
    assert channel.wiretap["id"]("1").allclose(DensityOp.basis(2, 0))
    assert channel.legal_dim == 2


def main():
    print("\n" + "🧪" * 35)
    print(" " * 20 + "TEST SUITE: avc")
    print("🧪" * 35 + "\n")
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
    print("\n✅ TESTS COMPLETADOS")


if __name__ == "__main__":
    main()
