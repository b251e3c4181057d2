"""Local rewriting of gate lists until nothing changes.

Rules, each applied across gates that provably commute with the moving gate:

* CNOT pairs with equal control/target cancel.
* Runs of one-qubit Cliffords (h, s, sdg, x) on a wire merge into one element
  and disappear when they multiply to the identity.
* Same-axis rotations on a wire merge; a zero angle disappears.
* A CNOT sandwich CNOT (U x V) CNOT, with U and V one-qubit Cliffords on
  control and target, is rewritten as locals around exp(-i a/2 XX) exp(-i b/2 ZZ)
  and re-emitted with the fewest CNOTs when that number is at most one.

Commutation is decided on small dense matrices and cached.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import clifford1q as cl
from .circuit import Angle, Circuit, Gate

_GENERIC = 0.7318  # stand-in angle for commutation checks of symbolic rotations


class Op(NamedTuple):
    kind: str  # "cx", "c1", "rz", "rx", "ry"
    qubits: tuple[int, ...]
    payload: object = None  # Clifford index or Angle


def _to_ops(c: Circuit) -> list[Op]:
    ops = []
    for g in c.gates:
        if g.kind == "cx":
            ops.append(Op("cx", g.qubits))
        elif g.angle is not None:
            ops.append(Op(g.kind, g.qubits, g.angle))
        else:
            ops.append(Op("c1", g.qubits, cl.from_gate(g.kind)))
    return ops


def _to_gates(ops: list[Op]) -> list[Gate]:
    out = []
    for op in ops:
        if op.kind == "cx":
            out.append(Gate("cx", op.qubits))
        elif op.kind == "c1":
            out.extend(Gate(k, op.qubits) for k in cl.WORDS[op.payload])
        else:
            out.append(Gate(op.kind, op.qubits, op.payload))
    return out


# ---------------------------------------------------------------------------
# commutation


def _rot(kind: str) -> np.ndarray:
    c, s = np.cos(_GENERIC / 2), np.sin(_GENERIC / 2)
    if kind == "rz":
        return np.diag([np.exp(-0.5j * _GENERIC), np.exp(0.5j * _GENERIC)])
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    return np.array([[c, -s], [s, c]], dtype=complex)


def _local_matrix(kind, local, payload, m) -> np.ndarray:
    dim = 2 ** m
    if kind == "cx":
        c, t = local
        out = np.zeros((dim, dim))
        for s in range(dim):
            bit = (s >> (m - 1 - c)) & 1
            out[s ^ (bit << (m - 1 - t)), s] = 1
        return out.astype(complex)
    one = cl.MATRICES[payload] if kind == "c1" else _rot(kind)
    out = np.array([[1.0 + 0j]])
    for q in range(m):
        out = np.kron(out, one if q == local[0] else np.eye(2))
    return out


def _sig(op: Op):
    return op.payload if op.kind == "c1" else None


@lru_cache(maxsize=None)
def _commute_cached(ka, la, pa, kb, lb, pb, m) -> bool:
    a = _local_matrix(ka, la, pa, m)
    b = _local_matrix(kb, lb, pb, m)
    return bool(np.allclose(a @ b, b @ a, atol=1e-9))


def commutes(a: Op, b: Op) -> bool:
    if not set(a.qubits) & set(b.qubits):
        return True
    qs = sorted(set(a.qubits) | set(b.qubits))
    pos = {q: i for i, q in enumerate(qs)}
    return _commute_cached(
        a.kind, tuple(pos[q] for q in a.qubits), _sig(a),
        b.kind, tuple(pos[q] for q in b.qubits), _sig(b), len(qs),
    )


# ---------------------------------------------------------------------------
# pairwise rules


def _pair_rule(ops: list[Op]) -> bool:
    changed = False
    i = 0
    while i < len(ops):
        a = ops[i]
        j = i + 1
        acted = False
        while j < len(ops):
            b = ops[j]
            if not set(a.qubits) & set(b.qubits):
                j += 1
                continue
            if a.kind == "cx" and b.kind == "cx" and a.qubits == b.qubits:
                del ops[j], ops[i]
                acted = True
            elif a.kind == "c1" and b.kind == "c1":
                merged = cl.compose(a.payload, b.payload)
                # everything between commutes with a, so the product sits at j
                if merged == cl.IDENTITY:
                    del ops[j], ops[i]
                else:
                    ops[j] = Op("c1", a.qubits, merged)
                    del ops[i]
                acted = True
            elif a.kind in ("rz", "rx", "ry") and b.kind == a.kind:
                ang: Angle = a.payload + b.payload
                if ang.is_zero():
                    del ops[j], ops[i]
                else:
                    ops[j] = Op(a.kind, a.qubits, ang)
                    del ops[i]
                acted = True
            elif commutes(a, b):
                j += 1
                continue
            break
        if acted:
            changed = True
            continue  # re-examine position i
        i += 1
    return changed


def _drop_identities(ops: list[Op]) -> bool:
    n = len(ops)
    ops[:] = [op for op in ops if not (op.kind == "c1" and op.payload == cl.IDENTITY)]
    return len(ops) != n


# ---------------------------------------------------------------------------
# CNOT sandwich


def _zz_gadget(c: int, t: int, k: int) -> list[Op]:
    """exp(-i k pi/4 Z_c Z_t) for k in {1, 3} using one CNOT (up to phase)."""
    s = cl.from_gate("s") if k == 1 else cl.from_gate("sdg")
    h = cl.from_gate("h")
    # exp(-i pi/4 ZZ) ~ (S x S) CZ, CZ = H_t CX H_t
    return [Op("c1", (t,), h), Op("cx", (c, t)), Op("c1", (t,), h), Op("c1", (c,), s), Op("c1", (t,), s)]


def _xx_gadget(c: int, t: int, k: int) -> list[Op]:
    h = cl.from_gate("h")
    return [Op("c1", (c,), h), Op("c1", (t,), h)] + _zz_gadget(c, t, k) + [Op("c1", (c,), h), Op("c1", (t,), h)]


def sandwich_replacement(c: int, t: int, u: int, v: int) -> list[Op] | None:
    """Ops equal (up to phase) to CX(c,t) (U_c x V_t) CX(c,t), or None if not cheaper."""
    a1, b1, c1_ = cl.euler_zxz(u)  # U ~ Rz(a1) Rx(b1) Rz(c1)
    a2, b2, c2 = cl.euler_xzx(v)  # V ~ Rx(a2) Rz(b2) Rx(c2)
    cost = (b1 % 2) + (b2 % 2)
    if cost > 1:
        return None
    out: list[Op] = [Op("c1", (c,), cl.rz_quarter(c1_)), Op("c1", (t,), cl.rx_quarter(c2))]
    # CX Rx(b1 pi/2)_c CX = exp(-i b1 pi/4 XX); CX Rz(b2 pi/2)_t CX = exp(-i b2 pi/4 ZZ)
    if b1 % 4 == 2:
        out += [Op("c1", (c,), cl.from_gate("x")), Op("c1", (t,), cl.from_gate("x"))]
    elif b1 % 2:
        out += _xx_gadget(c, t, b1 % 4)
    if b2 % 4 == 2:
        z = cl.rz_quarter(2)
        out += [Op("c1", (c,), z), Op("c1", (t,), z)]
    elif b2 % 2:
        out += _zz_gadget(c, t, b2 % 4)
    out += [Op("c1", (c,), cl.rz_quarter(a1)), Op("c1", (t,), cl.rx_quarter(a2))]
    return [op for op in out if not (op.kind == "c1" and op.payload == cl.IDENTITY)]


def _sandwich_rule(ops: list[Op]) -> bool:
    for i, a in enumerate(ops):
        if a.kind != "cx":
            continue
        c, t = a.qubits
        found: list[int] = []  # positions of U (on c) and V (on t), time ordered
        others: list[int] = []
        partner = None
        for j in range(i + 1, len(ops)):
            b = ops[j]
            if not set(b.qubits) & {c, t}:
                continue
            if b.kind == "cx" and b.qubits == (c, t):
                partner = j
                break
            if b.kind == "c1" and not any(ops[k].qubits == b.qubits for k in found):
                found.append(j)
            elif commutes(a, b):
                others.append(j)
            else:
                break
        if partner is None or not found:
            continue
        # place the rewritten sandwich where the first (or second) local sat;
        # gates between the two locals must commute with the one that moves
        pos = found[0]
        if len(found) == 2:
            between = [o for o in others if found[0] < o < found[1]]
            if all(commutes(ops[found[1]], ops[o]) for o in between):
                pos = found[0]
            elif all(commutes(ops[found[0]], ops[o]) for o in between):
                pos = found[1]
            else:
                continue
        u = v = cl.IDENTITY
        for k in found:
            if ops[k].qubits == (c,):
                u = ops[k].payload
            else:
                v = ops[k].payload
        rep = sandwich_replacement(c, t, u, v)
        if rep is None:
            continue
        drop = {i, partner, *found}
        head = [op for k, op in enumerate(ops[: pos + 1]) if k not in drop]
        tail = [op for k, op in enumerate(ops[pos + 1: partner + 1], start=pos + 1) if k not in drop]
        ops[:] = head + rep + tail + ops[partner + 1:]
        return True
    return False


def peephole_ops(ops: list[Op]) -> list[Op]:
    ops = list(ops)
    while True:
        changed = _pair_rule(ops)
        changed |= _drop_identities(ops)
        if not changed:
            if not _sandwich_rule(ops):
                break
    return ops


def peephole(c: Circuit) -> Circuit:
    return Circuit(c.width, tuple(_to_gates(peephole_ops(_to_ops(c)))))
