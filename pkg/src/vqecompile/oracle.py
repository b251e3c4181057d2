"""Dense-matrix ground truth for circuits, Pauli exponentials and fermion operators.

Qubit 0 is the most significant tensor factor everywhere, matching
``PauliString.to_matrix``.  Occupied orbital = |1>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .circuit import Circuit, Gate

MAX_FULL_WIDTH = 12
DEFAULT_TOL = 1e-8

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_FIXED = {
    "h": _H,
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
}


class WidthError(ValueError):
    pass


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_matrix(g: Gate, bindings: Mapping[str, float] | None = None) -> np.ndarray:
    """2x2 matrix of a one-qubit gate (CNOT is handled structurally)."""
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    theta = g.angle.value(bindings or {})
    return {"rz": rz_matrix, "rx": rx_matrix, "ry": ry_matrix}[g.kind](theta)


def _apply(tensor: np.ndarray, g: Gate, n: int, bindings) -> np.ndarray:
    # tensor has n leading qubit axes followed by one batch axis
    if g.kind == "cx":
        c, t = g.qubits
        out = tensor.copy()
        idx = [slice(None)] * tensor.ndim
        idx[c] = 1
        sub = out[tuple(idx)]
        t_axis = t if t < c else t - 1
        out[tuple(idx)] = np.flip(sub, axis=t_axis)
        return out
    (q,) = g.qubits
    m = gate_matrix(g, bindings)
    out = np.tensordot(m, tensor, axes=([1], [q]))
    return np.moveaxis(out, 0, q)


def apply_circuit(c: Circuit, states: np.ndarray, bindings: Mapping[str, float] | None = None) -> np.ndarray:
    """Apply ``c`` to the columns of ``states`` (shape (2**n,) or (2**n, k))."""
    n = c.width
    vec = states.ndim == 1
    cols = states.reshape(2 ** n, -1).astype(complex)
    tensor = cols.reshape((2,) * n + (cols.shape[1],))
    for g in c.gates:
        tensor = _apply(tensor, g, n, bindings)
    out = tensor.reshape(2 ** n, -1)
    return out[:, 0] if vec else out


def circuit_unitary(c: Circuit, bindings: Mapping[str, float] | None = None) -> np.ndarray:
    if c.width > MAX_FULL_WIDTH:
        raise WidthError(f"width {c.width} exceeds dense limit {MAX_FULL_WIDTH}")
    return apply_circuit(c, np.eye(2 ** c.width, dtype=complex), bindings)


def _phase(u1: np.ndarray, u2: np.ndarray) -> complex:
    k = np.unravel_index(np.argmax(np.abs(u2)), u2.shape)
    if abs(u2[k]) < 1e-12:
        return 1.0
    r = u1[k] / u2[k]
    return r / abs(r) if abs(r) > 1e-12 else 1.0


def equal_up_to_phase(u1: np.ndarray, u2: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if u1.shape != u2.shape:
        raise ValueError("operands differ in shape")
    ph = _phase(u1, u2)
    return bool(np.linalg.norm(u1 - ph * u2) <= tol)


def subspace_equal(u1: np.ndarray, u2: np.ndarray, proj: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff u1 and u2 agree up to one global phase on the range of ``proj``."""
    a = u1 @ proj
    b = u2 @ proj
    ph = _phase(a, b)
    return bool(np.linalg.norm(a - ph * b) <= tol)


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol)


@dataclass(frozen=True)
class ParityProjector:
    """Projector onto the eigenvalue-``eigenvalue`` space of Z_i Z_j on n qubits."""

    pair: tuple[int, int]
    eigenvalue: int
    n: int

    @property
    def matrix(self) -> np.ndarray:
        i, j = self.pair
        diag = np.ones(2 ** self.n)
        idx = np.arange(2 ** self.n)
        bi = (idx >> (self.n - 1 - i)) & 1
        bj = (idx >> (self.n - 1 - j)) & 1
        par = np.where(bi ^ bj, -1, 1)
        diag = (1 + self.eigenvalue * par) / 2
        return np.diag(diag).astype(complex)


def joint_projector(projs: Sequence[ParityProjector]) -> np.ndarray:
    out = None
    for p in projs:
        out = p.matrix if out is None else out @ p.matrix
    return out


def pauli_exp_matrix(p, theta: float) -> np.ndarray:
    """exp(-i theta/2 P) for a signed PauliString P."""
    m = p.to_matrix()
    return np.cos(theta / 2) * np.eye(m.shape[0]) - 1j * np.sin(theta / 2) * m


# ---------------------------------------------------------------------------
# fermion operators built directly in the occupation basis


def annihilation_matrix(i: int, n: int) -> np.ndarray:
    """c_i with the sign (-1)^(number of occupied orbitals j < i)."""
    dim = 2 ** n
    m = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        if (s >> (n - 1 - i)) & 1:
            before = bin(s >> (n - i)).count("1")
            m[s ^ (1 << (n - 1 - i)), s] = (-1) ** before
    return m


def excitation_operator(create: Sequence[int], annihilate: Sequence[int], n: int) -> np.ndarray:
    """T = c+_{p} c+_{q} ... c_{r} c_{s} ... in the listed order."""
    out = np.eye(2 ** n, dtype=complex)
    for p in create:
        out = out @ annihilation_matrix(p, n).conj().T
    for r in annihilate:
        out = out @ annihilation_matrix(r, n)
    return out


def excitation_generator(create, annihilate, n: int) -> np.ndarray:
    t = excitation_operator(create, annihilate, n)
    return t - t.conj().T


def excitation_unitary(create, annihilate, n: int, theta: float) -> np.ndarray:
    """exp(theta (T - T^dagger))."""
    return scipy.linalg.expm(theta * excitation_generator(create, annihilate, n))


def number_operator(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    return np.diag([bin(v).count("1") for v in idx]).astype(complex)


def cnot_matrix(c: int, t: int, n: int) -> np.ndarray:
    return circuit_unitary(Circuit(n, (Gate("cx", (c, t)),)))


def random_states(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=(2 ** n, k)) + 1j * rng.normal(size=(2 ** n, k))
    return v / np.linalg.norm(v, axis=0)


# ---------------------------------------------------------------------------
# batched application without building 2**n x 2**n matrices


def _masks(p) -> tuple[int, int, int]:
    n = p.n
    xm = sum(1 << (n - 1 - i) for i in range(n) if p.x[i])
    zm = sum(1 << (n - 1 - i) for i in range(n) if p.z[i])
    ny = sum(1 for i in range(n) if p.x[i] and p.z[i])
    return xm, zm, ny


def apply_pauli(p, states: np.ndarray) -> np.ndarray:
    """P applied to the columns of ``states``; P = sign * i**#Y * X^x Z^z."""
    xm, zm, ny = _masks(p)
    idx = np.arange(2 ** p.n)
    par = np.array([bin(v).count("1") & 1 for v in (idx & zm)]) if zm else np.zeros(len(idx), int)
    phase = p.sign * (1j ** ny) * np.where(par, -1, 1)
    out = np.empty_like(states, dtype=complex)
    src = states * (phase[:, None] if states.ndim == 2 else phase)
    out[idx ^ xm] = src
    return out


def apply_pauli_exp(p, theta: float, states: np.ndarray) -> np.ndarray:
    """exp(-i theta/2 P) applied to ``states``."""
    return np.cos(theta / 2) * states - 1j * np.sin(theta / 2) * apply_pauli(p, states)


def sector_mask(n: int, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Boolean mask of basis states with even occupation on every pair."""
    idx = np.arange(2 ** n)
    keep = np.ones(2 ** n, dtype=bool)
    for i, j in pairs:
        keep &= ((idx >> (n - 1 - i)) & 1) == ((idx >> (n - 1 - j)) & 1)
    return keep


def states_agree(apply_a, apply_b, n: int, rng: np.random.Generator | None = None, samples: int = 0,
                 mask: np.ndarray | None = None, tol: float = DEFAULT_TOL, chunk: int = 256) -> bool:
    """Compare two linear maps given as column appliers, up to one global phase.

    With ``samples`` = 0 every basis column (inside ``mask``) is checked, in
    chunks; otherwise that many random states supported on ``mask`` are used.
    """
    dim = 2 ** n
    cols = np.flatnonzero(mask) if mask is not None else np.arange(dim)
    phase = None
    err = 0.0

    def batches():
        if samples:
            v = random_states(n, samples, rng or np.random.default_rng(0))
            if mask is not None:
                v[~mask] = 0
                v /= np.linalg.norm(v, axis=0)
            yield v
            return
        for s in range(0, len(cols), chunk):
            block = np.zeros((dim, len(cols[s: s + chunk])), dtype=complex)
            block[cols[s: s + chunk], np.arange(block.shape[1])] = 1
            yield block

    for v in batches():
        a, b = apply_a(v), apply_b(v)
        if phase is None:
            phase = _phase(a, b)
        err += float(np.linalg.norm(a - phase * b)) ** 2
    return err ** 0.5 <= tol


def annihilation_sparse(i: int, n: int) -> scipy.sparse.csr_matrix:
    """Sparse c_i, same convention as ``annihilation_matrix``."""
    idx = np.arange(2 ** n)
    occ = ((idx >> (n - 1 - i)) & 1).astype(bool)
    src = idx[occ]
    before = np.array([bin(v >> (n - i)).count("1") for v in src]) if i else np.zeros(len(src), int)
    vals = np.where(before % 2, -1.0, 1.0).astype(complex)
    return scipy.sparse.csr_matrix((vals, (src ^ (1 << (n - 1 - i)), src)), shape=(2 ** n, 2 ** n))


def excitation_generator_sparse(create, annihilate, n: int) -> scipy.sparse.csr_matrix:
    t = scipy.sparse.identity(2 ** n, dtype=complex, format="csr")
    for p in create:
        t = t @ annihilation_sparse(p, n).conj().T
    for r in annihilate:
        t = t @ annihilation_sparse(r, n)
    return (t - t.conj().T).tocsr()


def apply_excitation_unitary(create, annihilate, n: int, theta: float, states: np.ndarray) -> np.ndarray:
    """exp(theta (T - T^dagger)) applied to ``states`` without a dense matrix."""
    g = excitation_generator_sparse(create, annihilate, n)
    return scipy.sparse.linalg.expm_multiply(theta * g, states)
