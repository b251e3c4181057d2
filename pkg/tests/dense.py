"""Reference matrices built from scratch with numpy, independent of the package."""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])


def pauli(text: str) -> np.ndarray:
    sign = 1
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        text = text[1:]
    return sign * reduce(np.kron, [PAULI[c] for c in text])


def one(gate: np.ndarray, q: int, n: int) -> np.ndarray:
    return reduce(np.kron, [gate if k == q else I2 for k in range(n)])


def cnot(c: int, t: int, n: int) -> np.ndarray:
    dim = 2 ** n
    m = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        bits = [(s >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[c]:
            bits[t] ^= 1
        m[sum(b << (n - 1 - k) for k, b in enumerate(bits)), s] = 1
    return m


def expm_pauli(p: np.ndarray, theta: float) -> np.ndarray:
    return np.cos(theta / 2) * np.eye(len(p)) - 1j * np.sin(theta / 2) * p


def close_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ph = a[k] / b[k]
    return abs(abs(ph) - 1) < 1e-6 and np.linalg.norm(a - ph * b) < tol


def ladder(i: int, n: int) -> np.ndarray:
    """Annihilation c_i on n modes, occupied = |1>, sign from modes before i."""
    dim = 2 ** n
    m = np.zeros((dim, dim))
    for s in range(dim):
        if (s >> (n - 1 - i)) & 1:
            sign = (-1) ** bin(s >> (n - i)).count("1")
            m[s ^ (1 << (n - 1 - i)), s] = sign
    return m.astype(complex)


def generator(create, annihilate, n: int) -> np.ndarray:
    t = np.eye(2 ** n, dtype=complex)
    for p in create:
        t = t @ ladder(p, n).T
    for r in annihilate:
        t = t @ ladder(r, n)
    return t - t.conj().T
