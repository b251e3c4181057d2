import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqecompile.pauli import (DimensionError, GammaMatrix, InvalidGateError, PauliString, conjugate_by_cnot,
                              conjugate_by_gamma, gf2_cnot_sequence, gf2_inv, gf2_rank, multiply, weight)

from .dense import close_up_to_phase, cnot, pauli

letters = st.text(alphabet="IXYZ", min_size=2, max_size=5)


def signed(s: str, sign: int) -> str:
    return ("-" if sign < 0 else "+") + s


def random_gl(n, rng):
    while True:
        m = rng.integers(0, 2, size=(n, n))
        if gf2_rank(m) == n:
            return m


def gamma_dense(m: np.ndarray) -> np.ndarray:
    """Permutation matrix |v> -> |Mv>, built directly from the bit map."""
    n = m.shape[0]
    u = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for s in range(2 ** n):
        v = np.array([(s >> (n - 1 - k)) & 1 for k in range(n)])
        w = m @ v % 2
        u[sum(int(b) << (n - 1 - k) for k, b in enumerate(w)), s] = 1
    return u


@pytest.mark.parametrize("text,w", [("XXXY", 4), ("IIII", 0), ("IIXXYXII", 4), ("ZIY", 2)])
def test_weight(text, w):
    assert weight(PauliString.from_str(text)) == w


def test_letters_roundtrip():
    p = PauliString.from_str("-IXYZ")
    assert p.letters == "IXYZ" and p.sign == -1
    assert p.x == (0, 1, 1, 0) and p.z == (0, 0, 1, 1)
    assert str(p) == "-IXYZ"


@pytest.mark.parametrize("src,c,t,dst", [
    ("XI", 0, 1, "+XX"),
    ("II", 0, 1, "+II"),
    ("II", 1, 0, "+II"),
    ("XZ", 0, 1, "-YY"),
])
def test_conjugate_by_cnot_examples(src, c, t, dst):
    got = conjugate_by_cnot(PauliString.from_str(src), c, t)
    assert signed(got.letters, got.sign) == dst
    ref = cnot(c, t, 2) @ pauli(src) @ cnot(c, t, 2)
    assert np.allclose(ref, pauli(dst))


def test_conjugate_by_cnot_rejects_equal_qubits():
    with pytest.raises(InvalidGateError):
        conjugate_by_cnot(PauliString.from_str("XY"), 1, 1)


@settings(max_examples=300, deadline=None)
@given(letters, st.sampled_from([-1, 1]), st.data())
def test_cnot_conjugation_matches_dense(text, sign, data):
    n = len(text)
    c, t = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    p = PauliString.from_str(signed(text, sign))
    got = conjugate_by_cnot(p, c, t)
    ref = cnot(c, t, n) @ pauli(signed(text, sign)) @ cnot(c, t, n)
    assert np.allclose(pauli(signed(got.letters, got.sign)), ref)
    assert conjugate_by_cnot(got, c, t) == p
    assert abs(weight(got) - weight(p)) <= 1


@pytest.mark.parametrize("a,b,prod,phase", [
    ("X", "Y", "Z", 1j),
    ("XX", "ZZ", "YY", -1),
    ("Z", "Z", "I", 1),
])
def test_multiply_examples(a, b, prod, phase):
    p, ph = multiply(PauliString.from_str(a), PauliString.from_str(b))
    assert p.letters == prod and ph == phase
    assert np.allclose(pauli(a) @ pauli(b), ph * pauli(prod))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_multiply_matches_dense(data):
    n = data.draw(st.integers(1, 4))
    a = data.draw(st.text("IXYZ", min_size=n, max_size=n))
    b = data.draw(st.text("IXYZ", min_size=n, max_size=n))
    sa, sb = data.draw(st.sampled_from([-1, 1])), data.draw(st.sampled_from([-1, 1]))
    p, ph = multiply(PauliString.from_str(signed(a, sa)), PauliString.from_str(signed(b, sb)))
    assert p.sign == 1
    assert np.allclose(pauli(signed(a, sa)) @ pauli(signed(b, sb)), ph * pauli(p.letters))


def test_self_product_is_identity():
    p = PauliString.from_str("-XYZI")
    q, ph = multiply(p, p)
    assert q.letters == "IIII" and ph == 1


def test_multiply_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliString.from_str("XY"), PauliString.from_str("X"))


def test_block_gamma_example():
    # CNOT on the first two and the last two of six qubits, as a block matrix
    m = np.eye(6, dtype=int)
    m[1, 0] = 1
    m[5, 4] = 1
    g = GammaMatrix.from_array(m, [(0, 1), (2,), (3,), (4, 5)])
    got = conjugate_by_gamma(PauliString.from_str("XXIIXY"), g)
    assert got.letters == "XIIIYZ" and got.sign == 1
    u = gamma_dense(m)
    assert np.allclose(u @ pauli("XXIIXY") @ u.conj().T, pauli("+XIIIYZ"))


def test_identity_gamma_is_fixed_point():
    p = PauliString.from_str("-XZYI")
    assert conjugate_by_gamma(p, GammaMatrix.identity(4)) == p


def test_gamma_dimension_mismatch():
    with pytest.raises(DimensionError):
        conjugate_by_gamma(PauliString.from_str("XY"), GammaMatrix.identity(3))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_gamma_conjugation_matches_dense(n):
    rng = np.random.default_rng(n)
    for _ in range(250):
        m = random_gl(n, rng)
        g = GammaMatrix.from_array(m)
        text = "".join(rng.choice(list("IXYZ"), n))
        sign = int(rng.choice([-1, 1]))
        p = PauliString.from_str(signed(text, sign))
        got = conjugate_by_gamma(p, g)
        u = gamma_dense(m)
        assert np.allclose(u @ pauli(signed(text, sign)) @ u.conj().T, pauli(signed(got.letters, got.sign)))
        assert conjugate_by_gamma(got, g.inverse()) == p


def test_gamma_cnot_sequence_realizes_matrix():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4):
        for _ in range(20):
            m = random_gl(n, rng)
            u = np.eye(2 ** n, dtype=complex)
            for c, t in gf2_cnot_sequence(m):
                u = cnot(c, t, n) @ u
            assert np.allclose(u, gamma_dense(m))


def test_gf2_inverse_and_rank():
    m = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert gf2_rank(m) == 3
    assert np.array_equal(m @ gf2_inv(m) % 2, np.eye(3, dtype=int))
    assert gf2_rank(np.array([[1, 1], [1, 1]])) == 1


def test_gamma_matrix_validation():
    with pytest.raises(ValueError):
        GammaMatrix.from_array([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        GammaMatrix.from_array([[1, 0], [1, 1]], blocks=[(0,), (1,)])
    assert GammaMatrix.identity(3).is_identity()


def test_gamma_text_roundtrip():
    g = GammaMatrix.from_array([[1, 0, 0], [1, 1, 0], [0, 0, 1]], blocks=[(0, 1), (2,)])
    assert GammaMatrix.from_text(g.to_text()) == g


def test_all_gl2_elements_invertible():
    mats = [np.array(b).reshape(2, 2) for b in itertools.product((0, 1), repeat=4)]
    assert sum(gf2_rank(m) == 2 for m in mats) == 6
