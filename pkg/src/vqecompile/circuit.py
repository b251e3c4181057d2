"""Gate-level circuit IR with symbolic rotation angles and QASM output."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

ONE_QUBIT = ("h", "s", "sdg", "x")
ROTATIONS = ("rz", "rx", "ry")


@dataclass(frozen=True)
class Angle:
    """Linear combination of named parameters with rational multipliers."""

    terms: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, param: str, mult=1) -> "Angle":
        return cls(((param, Fraction(mult)),)).normalized()

    def normalized(self) -> "Angle":
        acc: dict[str, Fraction] = {}
        for name, c in self.terms:
            acc[name] = acc.get(name, Fraction(0)) + Fraction(c)
        return Angle(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.terms + other.terms).normalized()

    def __neg__(self) -> "Angle":
        return Angle(tuple((k, -v) for k, v in self.terms))

    def __mul__(self, k) -> "Angle":
        return Angle(tuple((n, v * Fraction(k)) for n, v in self.terms)).normalized()

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.normalized().terms

    def value(self, bindings: Mapping[str, float]) -> float:
        return float(sum(float(c) * bindings[name] for name, c in self.terms))

    def params(self) -> set[str]:
        return {name for name, _ in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for name, c in self.terms:
            mag = abs(c)
            body = name if mag == 1 else f"{mag}*{name}"
            parts.append(("-" if c < 0 else "+") + body)
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: Angle | None = None

    def __post_init__(self):
        if self.kind == "cx":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"bad CNOT qubits {self.qubits}")
        elif self.kind in ONE_QUBIT or self.kind in ROTATIONS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on one qubit")
            if (self.kind in ROTATIONS) != (self.angle is not None):
                raise ValueError(f"{self.kind}: angle presence mismatch")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def __str__(self) -> str:
        args = ",".join(f"q[{q}]" for q in self.qubits)
        if self.angle is not None:
            return f"{self.kind}({self.angle}) {args};"
        return f"{self.kind} {args};"


def cx(c: int, t: int) -> Gate:
    return Gate("cx", (c, t))


def rz(q: int, angle: Angle) -> Gate:
    return Gate("rz", (q,), angle)


def rx(q: int, angle: Angle) -> Gate:
    return Gate("rx", (q,), angle)


def g1(kind: str, q: int) -> Gate:
    return Gate(kind, (q,))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for g in self.gates:
            if any(q < 0 or q >= self.width for q in g.qubits):
                raise ValueError(f"gate {g} outside width {self.width}")

    @classmethod
    def of(cls, width: int, gates: Iterable[Gate]) -> "Circuit":
        return cls(width, tuple(gates))

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("circuit widths differ")
        return Circuit(self.width, self.gates + other.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "cx")

    def params(self) -> set[str]:
        out: set[str] = set()
        for g in self.gates:
            if g.angle is not None:
                out |= g.angle.params()
        return out

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
        params = sorted(self.params())
        if params:
            lines.append("// symbolic parameters: " + " ".join(params))
        lines.append(f"qreg q[{self.width}];")
        lines.extend(str(g) for g in self.gates)
        return "\n".join(lines) + "\n"


def cnot_count(c: Circuit) -> int:
    return c.cnot_count()
