"""Block-diagonal GL(N,2) re-encodings searched by simulated annealing.

Blocks come from the term topology: orbitals that appear next to each other
in the creation part or in the annihilation part of a double excitation end
up in one block.  Each block is annealed on its own with transvection moves
(add one row of the block to another), which keeps every visited matrix
invertible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .fermion import ExcitationTerm
from .pauli import GammaMatrix, gf2_rank


@dataclass(frozen=True)
class TopologyBlocks:
    blocks: tuple[tuple[int, ...], ...]

    def nontrivial(self) -> list[tuple[int, ...]]:
        return [b for b in self.blocks if len(b) > 1]


def block_structure(terms: Iterable[ExcitationTerm], n: int) -> TopologyBlocks:
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for t in terms:
        if t.kind != "double":
            continue
        for a, b in (t.create, t.annihilate):
            if max(a, b) >= n:
                raise ValueError(f"{t.param}: index outside {n} orbitals")
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return TopologyBlocks(tuple(sorted(tuple(g) for g in groups.values())))


def transvection(g: GammaMatrix, src: int, dst: int) -> GammaMatrix:
    """Add row ``src`` to row ``dst``; its own inverse."""
    if src == dst:
        raise ValueError("transvection needs two distinct rows")
    m = g.array.copy()
    m[dst] ^= m[src]
    return GammaMatrix.from_array(m, g.blocks)


def propose_move(g: GammaMatrix, block: Sequence[int], rng: np.random.Generator) -> GammaMatrix:
    if len(block) < 2:
        raise ValueError("a move needs a block of size at least 2")
    src, dst = rng.choice(list(block), size=2, replace=False)
    return transvection(g, int(src), int(dst))


@dataclass(frozen=True)
class Schedule:
    t0: float = 2.0
    ratio: float = 0.95
    sweeps: int = 50


@dataclass(frozen=True)
class AnnealResult:
    gamma: GammaMatrix
    cost: float
    identity_cost: float
    evaluations: int
    trace: tuple[float, ...]  # best-ever cost after each sweep


def anneal(g0: GammaMatrix, blocks: Sequence[Sequence[int]], cost_fn: Callable[[GammaMatrix], float],
           seed: int = 0, schedule: Schedule = Schedule(), check: bool = False) -> AnnealResult:
    """Metropolis search over each block in turn, keeping the best matrix seen.

    ``g0`` fixes the starting point and the declared block partition.  Ties
    never replace the incumbent, so a constant cost returns ``g0``.
    """
    rng = np.random.default_rng(seed)
    memo: dict[tuple, float] = {}

    def cost(g: GammaMatrix) -> float:
        if g.rows not in memo:
            memo[g.rows] = cost_fn(g)
        return memo[g.rows]

    best, best_cost = g0, cost(g0)
    start_cost = best_cost
    trace = []
    for block in blocks:
        if len(block) < 2:
            continue
        cur, cur_cost = best, best_cost
        temp = schedule.t0
        steps = len(block)  # one proposal per row
        for _ in range(schedule.sweeps):
            for _ in range(steps):
                cand = propose_move(cur, block, rng)
                if check and gf2_rank(cand.array) != cand.n:  # pragma: no cover
                    raise AssertionError("annealing left GL(N,2)")
                c = cost(cand)
                delta = c - cur_cost
                if delta <= 0 or (temp > 0 and rng.random() < math.exp(-delta / temp)):
                    cur, cur_cost = cand, c
                    if c < best_cost:
                        best, best_cost = cand, c
            trace.append(best_cost)
            temp *= schedule.ratio
    return AnnealResult(best, best_cost, start_cost, len(memo), tuple(trace))


def enumerate_block(g0: GammaMatrix, block: Sequence[int]) -> list[GammaMatrix]:
    """Every matrix that differs from ``g0`` only inside ``block`` and stays invertible.

    Intended for small blocks (|GL(3,2)| = 168).
    """
    block = list(block)
    k = len(block)
    out = []
    base = g0.array
    for bits in itertools.product((0, 1), repeat=k * k):
        sub = np.array(bits, dtype=int).reshape(k, k)
        if gf2_rank(sub) != k:
            continue
        m = base.copy()
        m[np.ix_(block, block)] = sub
        out.append(GammaMatrix.from_array(m, g0.blocks))
    return out
