"""Pauli-exponential template circuits and the interface cancellation count."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from . import clifford1q as cl
from .circuit import Angle, Circuit, Gate, cx, g1, rz
from .fermion import ExcitationTerm, PauliTermSum, combine, jw_lower
from .pauli import PauliString, conjugate_by_cnot, weight
from .peephole import peephole

# collisions (letter in first string, letter in second string)
_TARGET_OK = {("X", "Y"), ("Y", "X"), ("X", "X"), ("Y", "Y"), ("Z", "Z")}
_CONTROL_OK = {("X", "X"), ("Y", "Y"), ("Z", "Z")}


class SynthesisError(ValueError):
    pass


def _entry(letter: str, q: int) -> list[Gate]:
    # maps the letter to Z: H X H = Z, (H Sdg) Y (S H) = Z
    if letter == "X":
        return [g1("h", q)]
    if letter == "Y":
        return [g1("sdg", q), g1("h", q)]
    return []


def _exit(letter: str, q: int) -> list[Gate]:
    if letter == "X":
        return [g1("h", q)]
    if letter == "Y":
        return [g1("h", q), g1("s", q)]
    return []


def pauli_exp(p: PauliString, target: int, angle: Angle) -> Circuit:
    """Circuit for exp(-i angle/2 * P) with the CNOT fan-in ending on ``target``.

    Uses exactly 2(w-1) CNOTs.  A negative string sign flips the Rz angle.
    """
    supp = p.support()
    if not supp:
        raise SynthesisError("cannot exponentiate the identity string")
    if target not in supp:
        raise SynthesisError(f"target {target} has letter I in {p}")
    controls = [q for q in supp if q != target]
    gates: list[Gate] = []
    for q in supp:
        gates += _entry(p.letter(q), q)
    gates += [cx(q, target) for q in controls]
    gates.append(rz(target, angle if p.sign > 0 else -angle))
    gates += [cx(q, target) for q in reversed(controls)]
    for q in supp:
        gates += _exit(p.letter(q), q)
    return Circuit(p.n, tuple(gates))


def naive_cnots(p: PauliString) -> int:
    return 2 * (weight(p) - 1)


def omega(p1: PauliString, p2: PauliString, target: int, q: int) -> int:
    a, b = p1.letter(q), p2.letter(q)
    if a == "I" or b == "I":
        return 0
    tgt = (p1.letter(target), p2.letter(target))
    if tgt in _TARGET_OK and (a, b) in _CONTROL_OK:
        return 2
    return 1


def cancellation(p1: PauliString, t1: int, p2: PauliString, t2: int) -> int:
    """CNOTs expected to cancel when [p1, t1] is followed by [p2, t2]."""
    if p1.n != p2.n:
        raise ValueError("strings differ in width")
    if t1 != t2:
        return 0
    return sum(omega(p1, p2, t1, q) for q in range(p1.n) if q != t1)


def schedule_circuit(width: int, items: Sequence[tuple[PauliString, int, Angle]]) -> Circuit:
    """Concatenate template circuits for (string, target, angle) items in order."""
    gates: list[Gate] = []
    for p, t, ang in items:
        gates += pauli_exp(p, t, ang).gates
    return Circuit(width, tuple(gates))


def rotation_angle(param: str, mult: Fraction) -> Angle:
    return Angle.of(param, mult)


# ---------------------------------------------------------------------------
# whole-term synthesis


def synthesize_sum(s: PauliTermSum, seed: int = 0, budget: int = 200, optimize: bool = True) -> Circuit:
    """GTSP-ordered template circuits for every string of ``s``, then peephole.

    The strings of one term commute, so any order realizes exp(theta * generator).
    """
    from .gtsp import build_instance, solve

    rots = [(p, m) for p, m in s.rotations() if p.support()]
    if not rots:
        return Circuit(s.n, ())
    inst = build_instance([p for p, _ in rots])
    tour = solve(inst, seed=seed, budget=budget)
    items = [(rots[k][0], t, rotation_angle(s.param, rots[k][1])) for k, t in zip(tour.order, tour.choice)]
    c = schedule_circuit(s.n, items)
    return peephole(c) if optimize else c


# ---------------------------------------------------------------------------
# pair compression
#
# CNOT(p, p+1) maps a state with Z_p Z_{p+1} = +1 to one with qubit p+1 in |0>.
# A term that preserves that parity then acts on the remaining qubits through
# its reduced generator <0|_{p+1} CX G CX |0>_{p+1}.


def compress_gates(pairs: Sequence[tuple[int, int]]) -> list[Gate]:
    return [cx(p, q) for p, q in pairs]


def preserves_parity(p: PauliString, pair: tuple[int, int]) -> bool:
    return sum(p.letter(q) in "XY" for q in pair) % 2 == 0


def reduce_sum(s: PauliTermSum, pairs: Sequence[tuple[int, int]]) -> PauliTermSum:
    """Reduced generator of ``s`` on the sector where every pair is compressed."""
    terms = []
    for p, c in s.terms:
        for a, b in pairs:
            if not preserves_parity(p, (a, b)):
                raise SynthesisError(f"{p} breaks the parity of pair {(a, b)}")
            p = conjugate_by_cnot(p, a, b)
        letters = dict(enumerate(p.letters))
        if any(letters[b] in "XY" for _, b in pairs):
            continue  # <0|X|0> = <0|Y|0> = 0
        for _, b in pairs:
            letters[b] = "I"
        red = PauliString.from_letters({q: l for q, l in letters.items() if l != "I"}, p.n)
        terms.append((red.with_sign(p.sign), c))
    return combine(terms, s.param)


def spin_pairs(t: ExcitationTerm) -> list[tuple[int, int]]:
    out = []
    for part in (t.create, t.annihilate):
        lo, hi = min(part), max(part)
        if hi == lo + 1 and lo % 2 == 0:
            out.append((lo, hi))
    return out


def hybrid_block(t: ExcitationTerm, n: int, seed: int = 0, budget: int = 200,
                 pair: tuple[int, int] | None = None) -> Circuit:
    """Reduced-operator circuit of a term with one compressed pair.

    The pair's partner qubit is untouched; the caller owns the compression
    CNOTs that bring the pair into and out of the compressed sector.
    """
    pairs = spin_pairs(t)
    if pair is not None:
        if tuple(pair) not in pairs:
            raise SynthesisError(f"{t.param}: {pair} is not a spin pair of the term")
        pairs = [tuple(pair)]
    if len(pairs) != 1:
        raise SynthesisError(f"{t.param}: hybrid block needs exactly one spin pair, found {pairs}")
    return synthesize_sum(reduce_sum(jw_lower(t, n), pairs), seed=seed, budget=budget)


# local Clifford pairs that send a two-qubit string to +-XX or +-ZZ
def _image(i: int, letter: str) -> tuple[str, int]:
    m = cl.MATRICES[i] @ _LETTER[letter] @ cl.MATRICES[i].conj().T
    for name, q in _LETTER.items():
        for sgn in (1, -1):
            if np.allclose(m, sgn * q):
                return name, sgn
    raise AssertionError("Clifford image is not a Pauli")  # pragma: no cover


_LETTER = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]).astype(complex),
}


def _local_frame(pa: tuple[str, str], pb: tuple[str, str]):
    """(u, v, sa, sb): u on qubit a, v on qubit b with u x v sending pa to sa*XX, pb to sb*ZZ."""
    for u in range(24):
        for v in range(24):
            (la0, s0), (la1, s1) = _image(u, pa[0]), _image(v, pa[1])
            (lb0, s2), (lb1, s3) = _image(u, pb[0]), _image(v, pb[1])
            if (la0, la1, lb0, lb1) == ("X", "X", "Z", "Z"):
                return u, v, s0 * s1, s2 * s3
    return None


def bosonic_block(t: ExcitationTerm, n: int) -> Circuit:
    """Two-CNOT circuit for a term whose creation and annihilation parts are both spin pairs."""
    pairs = spin_pairs(t)
    if len(pairs) != 2:
        raise SynthesisError(f"{t.param}: bosonic block needs two spin pairs, found {pairs}")
    (a, _), (b, _) = pairs
    red = reduce_sum(jw_lower(t, n), pairs)
    if len(red.terms) != 2 or any(set(p.support()) != {a, b} for p, _ in red.terms):
        raise SynthesisError(f"{t.param}: unexpected reduced operator {red.terms}")
    (p1, m1), (p2, m2) = red.rotations()
    frame = None
    for (pa, ma), (pb, mb) in (((p1, m1), (p2, m2)), ((p2, m2), (p1, m1))):
        frame = _local_frame((pa.letter(a), pa.letter(b)), (pb.letter(a), pb.letter(b)))
        if frame:
            break
    if frame is None:  # pragma: no cover - reduced strings always anticommute locally
        raise SynthesisError(f"{t.param}: no local frame for {red.terms}")
    u, v, sa, sb = frame
    sa *= pa.sign
    sb *= pb.sign
    # CX(a,b) Rx_a CX(a,b) = exp(XX), CX(a,b) Rz_b CX(a,b) = exp(ZZ)
    gates = [Gate(k, (a,)) for k in cl.WORDS[u]] + [Gate(k, (b,)) for k in cl.WORDS[v]]
    gates += [
        cx(a, b),
        Gate("rx", (a,), rotation_angle(t.param, ma * sa)),
        rz(b, rotation_angle(t.param, mb * sb)),
        cx(a, b),
    ]
    gates += [Gate(k, (a,)) for k in cl.WORDS[cl.inverse(u)]]
    gates += [Gate(k, (b,)) for k in cl.WORDS[cl.inverse(v)]]
    return Circuit(n, tuple(gates))
