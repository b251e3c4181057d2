"""Term classes and the ordering of hybrid terms for pair compression.

A double excitation whose creation (or annihilation) indices are a spin pair
{p, p+1} with p even keeps the parity of that pair, so the pair can be held
compressed on one qubit while the term runs.  Hybrid terms with one such pair
are ordered so that no term breaking a pair parity runs before the term that
needs it: iterated sinks first, then one color class of what remains, then
iterated sources.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fermion import ExcitationTerm

BOSONIC, HYBRID, FERMIONIC = "bosonic", "hybrid", "fermionic"


class NotHybridError(ValueError):
    pass


@dataclass(frozen=True)
class TermClass:
    kind: str
    pairs: tuple[tuple[int, int], ...]


def _pair(part: Sequence[int]) -> tuple[int, int] | None:
    lo, hi = min(part), max(part)
    return (lo, hi) if hi == lo + 1 and lo % 2 == 0 else None


def classify(t: ExcitationTerm) -> TermClass:
    if t.kind == "single":
        return TermClass(FERMIONIC, ())
    pairs = tuple(p for p in (_pair(t.create), _pair(t.annihilate)) if p)
    return TermClass({0: FERMIONIC, 1: HYBRID, 2: BOSONIC}[len(pairs)], pairs)


def unpaired(t: ExcitationTerm) -> tuple[int, ...]:
    (pair,) = classify(t).pairs
    return tuple(i for i in t.indices if i not in pair)


@dataclass(frozen=True)
class HybridGraph:
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def succ(self, v: int) -> set[int]:
        return {b for a, b in self.edges if a == v}

    def pred(self, v: int) -> set[int]:
        return {a for a, b in self.edges if b == v}

    def subgraph(self, keep: Iterable[int]) -> HybridGraph:
        keep = set(keep)
        return HybridGraph(
            tuple(v for v in self.vertices if v in keep),
            frozenset((a, b) for a, b in self.edges if a in keep and b in keep),
        )

    def undirected(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


def build_hybrid_graph(hybrids: Sequence[ExcitationTerm]) -> HybridGraph:
    """Edge i -> j when an unpaired index of term i lies in the pair of term j."""
    info = []
    for t in hybrids:
        c = classify(t)
        if c.kind != HYBRID:
            raise NotHybridError(f"{t.param} is {c.kind}, not hybrid")
        info.append((set(unpaired(t)), set(c.pairs[0])))
    edges = frozenset(
        (i, j)
        for i, (free, _) in enumerate(info)
        for j, (_, pair) in enumerate(info)
        if i != j and free & pair
    )
    return HybridGraph(tuple(range(len(hybrids))), edges)


@dataclass(frozen=True)
class Reduction:
    sink_rounds: tuple[tuple[int, ...], ...]
    source_rounds: tuple[tuple[int, ...], ...]
    reduced: HybridGraph

    @property
    def sinks(self) -> set[int]:
        return {v for r in self.sink_rounds for v in r}

    @property
    def sources(self) -> set[int]:
        return {v for r in self.source_rounds for v in r}


def reduce_graph(g: HybridGraph) -> Reduction:
    """Strip sinks and sources round by round.  A vertex that is both is a sink."""
    sink_rounds, source_rounds = [], []
    cur = g
    while cur.vertices:
        sinks = tuple(v for v in cur.vertices if not cur.succ(v))
        sources = tuple(v for v in cur.vertices if not cur.pred(v) and v not in sinks)
        if not sinks and not sources:
            break
        if sinks:
            sink_rounds.append(sinks)
        if sources:
            source_rounds.append(sources)
        cur = cur.subgraph(v for v in cur.vertices if v not in sinks and v not in sources)
    return Reduction(tuple(sink_rounds), tuple(source_rounds), cur)


def greedy_color(adj: dict[int, set[int]], order: Sequence[int]) -> dict[int, int]:
    """First-fit coloring in visiting order."""
    color: dict[int, int] = {}
    for v in order:
        used = {color[u] for u in adj[v] if u in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


def classes_of(color: dict[int, int]) -> list[list[int]]:
    out: dict[int, list[int]] = {}
    for v, c in color.items():
        out.setdefault(c, []).append(v)
    return [sorted(out[c]) for c in sorted(out)]


def color_reduced(adj: dict[int, set[int]], restarts: int = 64, seed: int = 0,
                  orders: Sequence[Sequence[int]] | None = None) -> tuple[dict[int, int], list[int]]:
    """Best of several randomized first-fit colorings.

    Returns the coloring holding the largest class and that class (sorted).
    Ties keep the first one found.  ``orders`` overrides the random orders.
    """
    verts = sorted(adj)
    if not verts:
        return {}, []
    if orders is None:
        rng = np.random.default_rng(seed)
        orders = [rng.permutation(verts).tolist() for _ in range(max(1, restarts))]
    best_color, best_class = None, None
    for order in orders:
        color = greedy_color(adj, order)
        big = max(classes_of(color), key=len)
        if best_class is None or len(big) > len(best_class):
            best_color, best_class = color, big
    return best_color, best_class


@dataclass(frozen=True)
class Segmentation:
    """Term lists per segment, in emission order.

    ``sink`` and ``source`` are layered: each inner tuple is a set of terms
    with no edges among them.  Sink layers run first to last, source layers
    are already stored in emission order.
    """

    sink: tuple[tuple[ExcitationTerm, ...], ...]
    color: tuple[ExcitationTerm, ...]
    source: tuple[tuple[ExcitationTerm, ...], ...]
    demoted: tuple[ExcitationTerm, ...]
    bosonic: tuple[ExcitationTerm, ...]
    fermionic: tuple[ExcitationTerm, ...]
    graph: HybridGraph | None = field(default=None, compare=False)

    def flat(self, name: str) -> list[ExcitationTerm]:
        seg = getattr(self, name)
        if name in ("sink", "source"):
            return [t for layer in seg for t in layer]
        return list(seg)

    def hybrid_layers(self) -> list[tuple[str, tuple[ExcitationTerm, ...]]]:
        out = [("sink", layer) for layer in self.sink]
        if self.color:
            out.append(("color", self.color))
        out += [("source", layer) for layer in self.source]
        return out


def segment(terms: Sequence[ExcitationTerm], restarts: int = 64, seed: int = 0,
            orders: Sequence[Sequence[int]] | None = None) -> Segmentation:
    """``orders`` (visiting orders over hybrid positions) replaces random coloring orders."""
    hybrids, bosonic, fermionic = [], [], []
    for t in terms:
        kind = classify(t).kind
        (hybrids if kind == HYBRID else bosonic if kind == BOSONIC else fermionic).append(t)
    g = build_hybrid_graph(hybrids)
    red = reduce_graph(g)
    _, best = color_reduced(red.reduced.undirected(), restarts, seed, orders)
    best = set(best)
    pick = lambda vs: tuple(hybrids[v] for v in sorted(vs))  # noqa: E731
    return Segmentation(
        sink=tuple(pick(r) for r in red.sink_rounds),
        color=pick(best),
        source=tuple(pick(r) for r in reversed(red.source_rounds)),
        demoted=pick(v for v in red.reduced.vertices if v not in best),
        bosonic=tuple(bosonic),
        fermionic=tuple(fermionic),
        graph=g,
    )
