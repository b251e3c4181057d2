"""Signed Pauli strings in symplectic form and their Clifford conjugation.

A string on n qubits is stored as two bit tuples ``x`` and ``z`` plus a sign
in {+1, -1}.  Letter ``i`` is I, X, Z or Y for (x_i, z_i) = (0,0), (1,0),
(0,1), (1,1).  Text literals list qubit 0 first, e.g. ``"-XIZY"``.

Linear reversible maps are represented by :class:`GammaMatrix`, an invertible
binary matrix acting on computational basis states as ``|v> -> |G v>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
BITS = {v: k for k, v in LETTERS.items()}


class DimensionError(ValueError):
    pass


class InvalidGateError(ValueError):
    pass


@dataclass(frozen=True)
class PauliString:
    x: tuple[int, ...]
    z: tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise DimensionError("x and z parts differ in length")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        text = text.strip()
        sign = 1
        if text[:1] in ("+", "-", "−"):
            sign = -1 if text[0] != "+" else 1
            text = text[1:]
        try:
            bits = [BITS[ch] for ch in text.upper()]
        except KeyError as exc:
            raise ValueError(f"bad Pauli letter in {text!r}") from exc
        return cls(tuple(b[0] for b in bits), tuple(b[1] for b in bits), sign)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_letters(cls, letters: dict[int, str], n: int, sign: int = 1) -> "PauliString":
        x = [0] * n
        z = [0] * n
        for q, ch in letters.items():
            x[q], z[q] = BITS[ch]
        return cls(tuple(x), tuple(z), sign)

    @property
    def n(self) -> int:
        return len(self.x)

    def letter(self, i: int) -> str:
        return LETTERS[self.x[i], self.z[i]]

    @property
    def letters(self) -> str:
        return "".join(LETTERS[b] for b in zip(self.x, self.z))

    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.x[i] or self.z[i])

    def unsigned(self) -> "PauliString":
        return PauliString(self.x, self.z, 1) if self.sign == -1 else self

    def with_sign(self, sign: int) -> "PauliString":
        return PauliString(self.x, self.z, sign)

    def __neg__(self) -> "PauliString":
        return PauliString(self.x, self.z, -self.sign)

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "+") + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def to_matrix(self) -> np.ndarray:
        """Dense matrix with qubit 0 as the most significant tensor factor."""
        mats = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        out = np.array([[self.sign]], dtype=complex)
        for ch in self.letters:
            out = np.kron(out, mats[ch])
        return out


def weight(p: PauliString) -> int:
    return sum(1 for a, b in zip(p.x, p.z) if a or b)


def _y_count(x: Sequence[int], z: Sequence[int]) -> int:
    return sum(1 for a, b in zip(x, z) if a and b)


def _from_xz_form(x, z, sign: int, y_before: int) -> PauliString:
    # P = sign * i^{#Y} X^x Z^z; re-expressing after a permutation-type
    # Clifford leaves the X^x Z^z operator untouched, so the phase correction
    # is i^(y_before - y_after).
    x = tuple(int(v) for v in x)
    z = tuple(int(v) for v in z)
    k = (y_before - _y_count(x, z)) % 4
    if k % 2:
        raise AssertionError("non-Hermitian result in Clifford conjugation")
    return PauliString(x, z, sign * (1 if k == 0 else -1))


def conjugate_by_cnot(p: PauliString, control: int, target: int) -> PauliString:
    """Return CNOT P CNOT for the CNOT with the given control and target."""
    if control == target:
        raise InvalidGateError("CNOT control and target coincide")
    if not (0 <= control < p.n and 0 <= target < p.n):
        raise InvalidGateError("CNOT qubit out of range")
    x = list(p.x)
    z = list(p.z)
    x[target] ^= x[control]
    z[control] ^= z[target]
    return _from_xz_form(x, z, p.sign, _y_count(p.x, p.z))


def multiply(p1: PauliString, p2: PauliString) -> tuple[PauliString, complex]:
    """Product p1 * p2 as (string, phase) with phase in {1, 1j, -1, -1j}.

    The returned string carries sign +1; the full product equals
    ``phase * string``.
    """
    if p1.n != p2.n:
        raise DimensionError("Pauli strings differ in width")
    # single-qubit table: letter products with phases
    k = 0
    for a1, b1, a2, b2 in zip(p1.x, p1.z, p2.x, p2.z):
        k += _single_phase(a1, b1, a2, b2)
    x = tuple(a ^ b for a, b in zip(p1.x, p2.x))
    z = tuple(a ^ b for a, b in zip(p1.z, p2.z))
    phase = (1, 1j, -1, -1j)[k % 4] * p1.sign * p2.sign
    return PauliString(x, z), phase


def _single_phase(a1, b1, a2, b2) -> int:
    # exponent of i in sigma(a1,b1) * sigma(a2,b2) = i^k sigma(a1^a2, b1^b2)
    l1 = LETTERS[a1, b1]
    l2 = LETTERS[a2, b2]
    if l1 == "I" or l2 == "I" or l1 == l2:
        return 0
    return 1 if (l1 + l2) in ("XY", "YZ", "ZX") else 3


def commutes(p1: PauliString, p2: PauliString) -> bool:
    s = sum(a1 * b2 + b1 * a2 for a1, b1, a2, b2 in zip(p1.x, p1.z, p2.x, p2.z))
    return s % 2 == 0


# ---------------------------------------------------------------------------
# GF(2) linear algebra


def gf2_rank(m: np.ndarray) -> int:
    a = np.array(m, dtype=np.uint8) & 1
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_inv(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    a = np.concatenate([np.array(m, dtype=np.uint8) & 1, np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i, c]), None)
        if piv is None:
            raise ValueError("matrix is singular over GF(2)")
        a[[c, piv]] = a[[piv, c]]
        for i in range(n):
            if i != c and a[i, c]:
                a[i] ^= a[c]
    return a[:, n:].copy()


def gf2_cnot_sequence(m: np.ndarray) -> list[tuple[int, int]]:
    """CNOTs (control, target) whose circuit maps |v> to |M v>, in time order.

    Plain Gauss-Jordan elimination; row swaps are spelled as three additions.
    """
    n = m.shape[0]
    a = np.array(m, dtype=np.uint8) & 1
    ops: list[tuple[int, int]] = []  # row ops E_k ... E_1 M = I, op = (src, dst)

    def add(src, dst):
        a[dst] ^= a[src]
        ops.append((src, dst))

    for c in range(n):
        if not a[c, c]:
            piv = next((i for i in range(c + 1, n) if a[i, c]), None)
            if piv is None:
                raise ValueError("matrix is singular over GF(2)")
            add(piv, c)
        for i in range(n):
            if i != c and a[i, c]:
                add(c, i)
    # M = E_1 ... E_k, so the circuit applies E_k first.
    return [(src, dst) for src, dst in reversed(ops)]


@dataclass(frozen=True)
class GammaMatrix:
    rows: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise DimensionError("Gamma must be square")
        seen = sorted(i for b in self.blocks for i in b)
        if seen != list(range(n)):
            raise ValueError("blocks must partition the qubit indices")
        owner = {i: k for k, b in enumerate(self.blocks) for i in b}
        for i, row in enumerate(self.rows):
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError("Gamma entries must be 0 or 1")
                if v and owner[i] != owner[j]:
                    raise ValueError(f"entry ({i},{j}) lies outside the declared blocks")
        if gf2_rank(self.array) != n:
            raise ValueError("Gamma is not invertible over GF(2)")

    @classmethod
    def identity(cls, n: int, blocks: Iterable[Iterable[int]] | None = None) -> "GammaMatrix":
        rows = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        if blocks is None:
            blocks = [(i,) for i in range(n)]
        return cls(rows, tuple(tuple(sorted(b)) for b in blocks))

    @classmethod
    def from_array(cls, m, blocks: Iterable[Iterable[int]] | None = None) -> "GammaMatrix":
        m = np.asarray(m, dtype=int) & 1
        n = m.shape[0]
        if blocks is None:
            blocks = [tuple(range(n))]
        return cls(tuple(tuple(int(v) for v in r) for r in m), tuple(tuple(sorted(b)) for b in blocks))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.uint8).reshape(self.n, self.n)

    def inverse(self) -> "GammaMatrix":
        return GammaMatrix.from_array(gf2_inv(self.array), self.blocks)

    def is_identity(self) -> bool:
        return all(v == int(i == j) for i, r in enumerate(self.rows) for j, v in enumerate(r))

    def cnots(self) -> list[tuple[int, int]]:
        return gf2_cnot_sequence(self.array)

    def to_text(self) -> str:
        head = "blocks: " + " | ".join(",".join(map(str, b)) for b in self.blocks)
        return "\n".join([head] + ["".join(map(str, r)) for r in self.rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GammaMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines[0].startswith("blocks:"):
            raise ValueError("missing block header line")
        spec = lines[0][len("blocks:"):].strip()
        blocks = [tuple(int(v) for v in part.split(",")) for part in spec.split("|") if part.strip()]
        rows = [[int(ch) for ch in ln] for ln in lines[1:]]
        return cls.from_array(rows, blocks)


def conjugate_by_gamma(p: PauliString, g: GammaMatrix) -> PauliString:
    """Return U P U^dagger for U|v> = |G v>.

    X-part maps by G, Z-part by (G^-1)^T; U only permutes basis states, so
    X^x Z^z maps without phase and the sign changes only through the Y count.
    """
    if g.n != p.n:
        raise DimensionError(f"Gamma is {g.n}x{g.n} but string has {p.n} qubits")
    if g.is_identity():
        return p
    m = g.array.astype(np.int64)
    x = m.dot(np.array(p.x, dtype=np.int64)) % 2
    zinv_t = gf2_inv(g.array).T.astype(np.int64)
    z = zinv_t.dot(np.array(p.z, dtype=np.int64)) % 2
    return _from_xz_form(x, z, p.sign, _y_count(p.x, p.z))
