"""Generalized TSP over (Pauli string, target qubit) vertices.

Each scheduled string occurrence is one cluster whose vertices are the qubits
in its support.  Edge weights are negated interface cancellations, so the
shortest open path is the schedule with the most CNOTs cancelled.

The solver is a seeded genetic algorithm over cluster orders.  For a fixed
order the best target choice is found exactly by dynamic programming over the
path, which takes the place of random vertex mutation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .pauli import PauliString
from .synth import cancellation


class EmptyInstanceError(ValueError):
    pass


@dataclass(frozen=True)
class GtspInstance:
    strings: tuple[PauliString, ...]

    def __post_init__(self):
        object.__setattr__(self, "strings", tuple(self.strings))
        for p in self.strings:
            if not p.support():
                raise ValueError("identity string cannot be scheduled")

    @property
    def size(self) -> int:
        return len(self.strings)

    @cached_property
    def clusters(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(p.support()) for p in self.strings)

    def edge_weight(self, a: int, ta: int, b: int, tb: int) -> int:
        if a == b:
            raise ValueError("no edge inside a cluster")
        return -self._table[a][b].get(ta, 0) if ta == tb else 0

    @cached_property
    def _table(self) -> list[list[dict[int, int]]]:
        # only equal targets can cancel: table[a][b][t] = cancellation at common target t
        m = self.size
        table: list[list[dict]] = [[{} for _ in range(m)] for _ in range(m)]
        for a in range(m):
            for b in range(a + 1, m):
                pa, pb = self.strings[a], self.strings[b]
                for t in set(self.clusters[a]) & set(self.clusters[b]):
                    c = cancellation(pa, t, pb, t)
                    if c:
                        table[a][b][t] = c
                        table[b][a][t] = c
        return table

    def best_choice(self, order: Sequence[int]) -> tuple[tuple[int, ...], int]:
        """Optimal target per cluster for a fixed visiting order, and its weight."""
        if not order:
            return (), 0
        cl = self.clusters
        cost = {t: 0 for t in cl[order[0]]}
        back: list[dict[int, int]] = []
        for prev, cur in zip(order, order[1:]):
            tab = self._table[prev][cur]
            arg0 = min(cost, key=cost.__getitem__)
            m0 = cost[arg0]
            new, ptr = {}, {}
            for t in cl[cur]:
                v, arg = m0, arg0
                c = tab.get(t)
                if c is not None and t in cost and cost[t] - c < v:
                    v, arg = cost[t] - c, t
                new[t] = v
                ptr[t] = arg
            cost = new
            back.append(ptr)
        t = min(cost, key=cost.__getitem__)
        total = cost[t]
        picks = [t]
        for ptr in reversed(back):
            t = ptr[t]
            picks.append(t)
        picks.reverse()
        return tuple(picks), total


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    choice: tuple[int, ...]  # target qubit per visited cluster, aligned with order
    weight: int

    def items(self, inst: GtspInstance) -> list[tuple[PauliString, int]]:
        return [(inst.strings[k], t) for k, t in zip(self.order, self.choice)]


def build_instance(strings: Sequence[PauliString]) -> GtspInstance:
    return GtspInstance(tuple(strings))


def tour_weight(inst: GtspInstance, order: Sequence[int], choice: Sequence[int]) -> int:
    if sorted(order) != list(range(inst.size)) or len(choice) != len(order):
        raise ValueError("tour must visit every cluster exactly once")
    for k, t in zip(order, choice):
        if t not in inst.clusters[k]:
            raise ValueError(f"target {t} is not in the support of cluster {k}")
    return sum(inst.edge_weight(a, ta, b, tb)
               for (a, ta), (b, tb) in zip(zip(order, choice), zip(order[1:], choice[1:])))


def _tour(inst: GtspInstance, order) -> Tour:
    choice, w = inst.best_choice(order)
    return Tour(tuple(order), choice, w)


def brute_force(inst: GtspInstance) -> Tour:
    if inst.size == 0:
        raise EmptyInstanceError("no clusters")
    best = None
    for perm in itertools.permutations(range(inst.size)):
        if inst.size > 1 and perm[0] > perm[-1]:
            continue  # weights are symmetric, skip reversed paths
        t = _tour(inst, perm)
        if best is None or t.weight < best.weight:
            best = t
    return best


@dataclass(frozen=True)
class GaConfig:
    population: int = 50
    elite: int = 5
    mutation: float = 0.1
    generations: int = 200
    stagnation: int = 2000
    polish: bool = True  # hill-climb every new best and the final tour


def _ox(a: Sequence[int], b: Sequence[int], rng: random.Random) -> list[int]:
    n = len(a)
    i, j = sorted(rng.sample(range(n + 1), 2))
    middle = list(a[i:j])
    taken = set(middle)
    rest = [g for g in b if g not in taken]
    return rest[:i] + middle + rest[i:]


def _mutate(order: list[int], rng: random.Random) -> None:
    i, j = sorted(rng.sample(range(len(order)), 2))
    if rng.random() < 0.5:
        order[i], order[j] = order[j], order[i]
    else:
        order[i: j + 1] = order[i: j + 1][::-1]


def _local_search(order: tuple[int, ...], evaluate) -> "Tour":
    """Hill-climb with segment reversals and single relocations until no move helps."""
    best = evaluate(order)
    m = len(order)
    improved = True
    while improved:
        improved = False
        for i in range(m - 1):
            for j in range(i + 1, m):
                cur = list(best.order)
                moves = (
                    cur[:i] + cur[i:j + 1][::-1] + cur[j + 1:],
                    cur[:i] + cur[i + 1:j + 1] + [cur[i]] + cur[j + 1:],
                    cur[:i] + [cur[j]] + cur[i:j] + cur[j + 1:],
                )
                for cand in moves:
                    t = evaluate(cand)
                    if t.weight < best.weight:
                        best, improved = t, True
                        break
    return best


def solve(inst: GtspInstance, seed: int = 0, budget: int | GaConfig = 200, history: list | None = None) -> Tour:
    """Seeded GA.  ``budget`` is a generation count or a full config.

    The identity order is always in the first population, so the result is
    never worse than scheduling the strings as given.  If ``history`` is a
    list, the best weight after each generation is appended to it.
    """
    if inst.size == 0:
        raise EmptyInstanceError("no clusters")
    cfg = budget if isinstance(budget, GaConfig) else GaConfig(generations=budget)
    m = inst.size
    if m <= 2:
        best = _tour(inst, tuple(range(m)))
        if history is not None:
            history.append(best.weight)
        return best
    rng = random.Random(seed)
    cache: dict[tuple[int, ...], Tour] = {}

    def evaluate(order) -> Tour:
        key = tuple(order)
        if key not in cache:
            cache[key] = _tour(inst, key)
        return cache[key]

    pop = [evaluate(range(m))]
    while len(pop) < cfg.population:
        pop.append(evaluate(rng.sample(range(m), m)))
    pop.sort(key=lambda t: t.weight)
    best = pop[0]
    stale = 0
    for _ in range(cfg.generations):
        children = pop[: cfg.elite]
        seen = {t.order for t in children}
        while len(children) < cfg.population:
            # binary tournaments on the sorted population
            a = pop[min(rng.randrange(len(pop)), rng.randrange(len(pop)))]
            b = pop[min(rng.randrange(len(pop)), rng.randrange(len(pop)))]
            child = _ox(a.order, b.order, rng)
            if rng.random() < cfg.mutation:
                _mutate(child, rng)
            for _ in range(5):  # keep the population diverse
                if tuple(child) not in seen:
                    break
                _mutate(child, rng)
            seen.add(tuple(child))
            t = evaluate(child)
            if t.weight < best.weight:
                if cfg.polish:
                    t = _local_search(t.order, evaluate)
                best, stale = t, 0
            else:
                stale += 1
            children.append(t)
        pop = sorted(children, key=lambda t: t.weight)
        if history is not None:
            history.append(best.weight)
        if stale >= cfg.stagnation:
            break
    return _local_search(best.order, evaluate) if cfg.polish else best
