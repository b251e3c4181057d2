"""Excitation terms and their Jordan-Wigner lowering to signed Pauli sums.

Ladder convention: c_i = (prod_{j<i} Z_j) (X_i + i Y_i)/2, i.e. sigma^- = |0><1|
with occupied = |1>.  A term T = c+_p c+_q ... c_r c_s ... keeps the listed
operator order.  Its anti-Hermitian generator is written

    T - T^dagger = i * sum_k coeff_k * P_k

with real ``coeff_k``, so exp(theta (T - T^dagger)) is a product of commuting
rotations exp(-i phi_k/2 P_k) with phi_k = -2 coeff_k theta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .pauli import GammaMatrix, PauliString, conjugate_by_gamma, multiply


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class ExcitationTerm:
    create: tuple[int, ...]
    annihilate: tuple[int, ...]
    param: str

    def __post_init__(self):
        object.__setattr__(self, "create", tuple(self.create))
        object.__setattr__(self, "annihilate", tuple(self.annihilate))
        if (len(self.create), len(self.annihilate)) not in ((1, 1), (2, 2)):
            raise TermError(f"{self.param}: need 1+1 or 2+2 operators, got {self}")
        idx = self.indices
        if len(set(idx)) != len(idx):
            raise TermError(f"{self.param}: repeated orbital index in {idx}")
        if min(idx) < 0:
            raise TermError(f"{self.param}: negative orbital index")

    @property
    def kind(self) -> str:
        return "single" if len(self.create) == 1 else "double"

    @property
    def indices(self) -> tuple[int, ...]:
        return self.create + self.annihilate

    def validate(self, n: int) -> None:
        if max(self.indices) >= n:
            raise TermError(f"{self.param}: index {max(self.indices)} >= n_orbitals {n}")

    def __str__(self) -> str:
        c = " ".join(f"c+{p}" for p in self.create)
        a = " ".join(f"c{r}" for r in self.annihilate)
        return f"{self.param}: {c} {a}"


@dataclass(frozen=True)
class PauliTermSum:
    """Generator i * sum(coeff * P) of one excitation term."""

    terms: tuple[tuple[PauliString, Fraction], ...]
    param: str

    @property
    def n(self) -> int:
        return self.terms[0][0].n if self.terms else 0

    def strings(self) -> list[PauliString]:
        return [p for p, _ in self.terms]

    def generator_matrix(self) -> np.ndarray:
        dim = 2 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        for p, c in self.terms:
            out += 1j * float(c) * p.to_matrix()
        return out

    def rotations(self) -> list[tuple[PauliString, Fraction]]:
        """(string, multiplier of theta in exp(-i phi/2 P)) per string."""
        return [(p, -2 * c) for p, c in self.terms]


def _ladder(i: int, n: int, dagger: bool) -> list[tuple[PauliString, complex]]:
    zs = {j: "Z" for j in range(i)}
    px = PauliString.from_letters({**zs, i: "X"}, n)
    py = PauliString.from_letters({**zs, i: "Y"}, n)
    return [(px, 0.5), (py, -0.5j if dagger else 0.5j)]


def _product(a, b):
    acc: dict[PauliString, complex] = {}
    for p1, c1 in a:
        for p2, c2 in b:
            p, ph = multiply(p1, p2)
            acc[p] = acc.get(p, 0) + c1 * c2 * ph
    return [(p, c) for p, c in acc.items() if abs(c) > 1e-15]


def _exact(v: float) -> Fraction:
    return Fraction(v).limit_denominator(1 << 16)


def jw_lower(t: ExcitationTerm, n: int) -> PauliTermSum:
    t.validate(n)
    op = [(PauliString.identity(n), 1 + 0j)]
    for p in t.create:
        op = _product(op, _ladder(p, n, dagger=True))
    for r in t.annihilate:
        op = _product(op, _ladder(r, n, dagger=False))
    # T - T^dagger = sum (a - conj a) P = i * sum 2 Im(a) P
    terms = []
    for p, a in op:
        c = _exact(2 * a.imag)
        if c != 0:
            terms.append((p, c))
    terms.sort(key=lambda pc: pc[0].letters)
    return PauliTermSum(tuple(terms), t.param)


def conjugate_sum(s: PauliTermSum, g: GammaMatrix) -> PauliTermSum:
    return PauliTermSum(tuple((conjugate_by_gamma(p, g), c) for p, c in s.terms), s.param)


def lower_with_gamma(t: ExcitationTerm, n: int, g: GammaMatrix) -> PauliTermSum:
    if g.n != n:
        raise ValueError(f"Gamma is {g.n}x{g.n} but n_orbitals is {n}")
    return conjugate_sum(jw_lower(t, n), g)


def fold_signs(s: PauliTermSum) -> PauliTermSum:
    """Move string signs into the coefficients."""
    return PauliTermSum(tuple((p.unsigned(), c * p.sign) for p, c in s.terms), s.param)


def combine(terms: Iterable[tuple[PauliString, Fraction]], param: str) -> PauliTermSum:
    acc: dict[PauliString, Fraction] = {}
    for p, c in terms:
        key = p.unsigned()
        acc[key] = acc.get(key, Fraction(0)) + c * p.sign
    out = tuple(sorted(((p, c) for p, c in acc.items() if c != 0), key=lambda pc: pc[0].letters))
    return PauliTermSum(out, param)


def parse_term(create: Sequence[int], annihilate: Sequence[int], param: str, offset: int = 0) -> ExcitationTerm:
    return ExcitationTerm(tuple(i - offset for i in create), tuple(i - offset for i in annihilate), param)
