"""End-to-end compilation: segment, compress, schedule, re-encode, certify, report.

Register model for compressed pairs.  Every spin pair used by a hybrid or
bosonic term starts compressed: CNOT(p, p+1) is folded into the reference
product state, so qubit p+1 holds |0> and costs nothing.  Before each layer,
any compressed pair whose parity the layer would break is decompressed with
one counted CNOT.  All pairs still compressed are decompressed before the
fermionic segment.  Terms run on compressed pairs through their reduced
generators.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import oracle
from .circuit import Circuit, Gate, cx
from .encode import BOSONIC, FERMIONIC, HYBRID, Segmentation, classify, segment
from .fermion import ExcitationTerm, PauliTermSum, combine, jw_lower, lower_with_gamma
from .gamma import Schedule, anneal, block_structure
from .gtsp import GaConfig, build_instance, solve
from .pauli import GammaMatrix, PauliString, commutes
from .peephole import peephole
from .synth import (bosonic_block, naive_cnots, preserves_parity, reduce_sum, rotation_angle,
                    schedule_circuit)

CERTIFY_MODES = ("off", "sampled", "full")
FULL_WIDTH = oracle.MAX_FULL_WIDTH
SAMPLED_WIDTH = 20  # above this even random-state checks are skipped
SAMPLES = 4


@dataclass(frozen=True)
class CompileConfig:
    seed: int = 0
    ga_budget: int = 200
    sa_ga_budget: int = 20
    sa_t0: float = 2.0
    sa_ratio: float = 0.95
    sa_sweeps: int = 50
    restarts: int = 64
    enable_gamma: bool = True
    enable_hybrid: bool = True
    certify: str = "full"

    def __post_init__(self):
        for name in ("ga_budget", "sa_ga_budget", "restarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.sa_sweeps < 0 or self.sa_t0 <= 0 or not 0 < self.sa_ratio <= 1:
            raise ValueError("invalid annealing schedule")
        if self.certify not in CERTIFY_MODES:
            raise ValueError(f"certify must be one of {CERTIFY_MODES}")


@dataclass
class Layer:
    """One emitted piece of the circuit and what it must equal."""

    name: str
    circuit: Circuit
    items: list = field(default_factory=list)  # (PauliString, target, multiplier, param) in time order
    terms: list = field(default_factory=list)  # (ExcitationTerm, compressed pairs) to check against fermions
    gamma: GammaMatrix | None = None


@dataclass
class CompileReport:
    cnot_total: int
    cnot_jw_baseline: int
    segments: dict
    classes: dict
    membership: dict
    gamma: str | None
    fallback_to_baseline: bool
    certification: dict
    seed: int
    config: dict

    @property
    def improvement_percent(self) -> float:
        if self.cnot_jw_baseline == 0:
            return 0.0
        return 100.0 * (self.cnot_jw_baseline - self.cnot_total) / self.cnot_jw_baseline

    def to_dict(self) -> dict:
        d = asdict(self)
        d["improvement_percent"] = self.improvement_percent
        d["table_row"] = {
            "JW": self.cnot_jw_baseline,
            "Adv": self.cnot_total,
            "Improve(%)": f"{self.improvement_percent:.2f}",
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# scheduling helpers


def _schedule(width: int, sums: Sequence[PauliTermSum], seed: int, budget: int):
    """Pool the strings of ``sums`` into one GTSP instance; return (items, raw circuit, tour weight)."""
    rots = [(p, m, s.param) for s in sums for p, m in s.rotations() if p.support()]
    if not rots:
        return [], Circuit(width, ()), 0
    inst = build_instance([p for p, _, _ in rots])
    tour = solve(inst, seed=seed, budget=budget)
    items = [(rots[k][0], t, rots[k][1], rots[k][2]) for k, t in zip(tour.order, tour.choice)]
    raw = schedule_circuit(width, [(p, t, rotation_angle(par, m)) for p, t, m, par in items])
    return items, raw, tour.weight


def _fermionic_sums(terms: Sequence[ExcitationTerm], n: int, g: GammaMatrix | None) -> list[PauliTermSum]:
    if g is None:
        return [jw_lower(t, n) for t in terms]
    return [lower_with_gamma(t, n, g) for t in terms]


SA_GA = dict(population=20, elite=2, polish=False)


def formula_cost(terms: Sequence[ExcitationTerm], n: int, g: GammaMatrix | None, seed: int, budget: int) -> int:
    """CNOTs of a quick pooled schedule as predicted by the interface formula.

    Used as the annealing objective, so the GA is small and unpolished.
    """
    sums = _fermionic_sums(terms, n, g)
    strings = [p for s in sums for p, _ in s.terms if p.support()]
    if not strings:
        return 0
    tour = solve(build_instance(strings), seed=seed, budget=GaConfig(generations=budget, **SA_GA))
    return sum(naive_cnots(p) for p in strings) + tour.weight


# ---------------------------------------------------------------------------
# compilation


def _term_pairs(t: ExcitationTerm) -> tuple[tuple[int, int], ...]:
    return classify(t).pairs


def _plain_segmentation(terms: Sequence[ExcitationTerm]) -> Segmentation:
    return Segmentation((), (), (), (), (), tuple(terms))


def _compressed_layers(seg: Segmentation, n: int, cfg: CompileConfig):
    """Emit hybrid layers and bosonic blocks; return (layers, demoted, segment counts, compressed left)."""
    compressed = {p for layer in seg.sink + seg.source for t in layer for p in _term_pairs(t)}
    compressed |= {p for t in seg.color + seg.bosonic for p in _term_pairs(t)}
    layers: list[Layer] = []
    demoted: list[ExcitationTerm] = []
    counts = {"sink": 0, "color": 0, "source": 0, "bosonic": 0, "compression": 0}

    def release(sums: Sequence[PauliTermSum], name: str) -> None:
        broken = sorted(pr for pr in compressed if any(not preserves_parity(p, pr) for s in sums for p, _ in s.terms))
        if broken:
            for pr in broken:
                compressed.discard(pr)
            c = Circuit(n, tuple(cx(a, b) for a, b in broken))
            layers.append(Layer(f"decompress before {name}", c))
            counts["compression"] += len(broken)

    for k, (name, members) in enumerate(seg.hybrid_layers()):
        sums = [jw_lower(t, n) for t in members]
        release(sums, name)
        kept, kept_sums = [], []
        for t, s in zip(members, sums):
            if set(_term_pairs(t)) <= compressed:
                kept.append(t)
                kept_sums.append(s)
            else:
                demoted.append(t)
        if not kept:
            continue
        active = sorted(compressed)
        reduced = [reduce_sum(s, active) for s in kept_sums]
        items, raw, _ = _schedule(n, reduced, cfg.seed + k, cfg.ga_budget)
        circ = peephole(raw)
        counts[name] += circ.cnot_count()
        touched = [(t, [pr for pr in active if set(pr) & set(range(min(t.indices), max(t.indices) + 1))]) for t in kept]
        layers.append(Layer(name, circ, items, touched))

    for t in seg.bosonic:
        release([jw_lower(t, n)], "bosonic")
        if not set(_term_pairs(t)) <= compressed:
            demoted.append(t)
            continue
        circ = bosonic_block(t, n)
        counts["bosonic"] += circ.cnot_count()
        red = reduce_sum(jw_lower(t, n), _term_pairs(t))  # commuting, so order is free
        items = [(p, None, m, t.param) for p, m in red.rotations()]
        layers.append(Layer("bosonic", circ, items, [(t, list(_term_pairs(t)))]))

    return layers, demoted, counts, sorted(compressed)


def _choose_gamma(terms: Sequence[ExcitationTerm], n: int, cfg: CompileConfig) -> GammaMatrix | None:
    if not cfg.enable_gamma or not any(t.kind == "double" for t in terms):
        return None
    blocks = block_structure(terms, n)
    g0 = GammaMatrix.identity(n, blocks.blocks)
    if not blocks.nontrivial() or cfg.sa_sweeps == 0:
        return None
    res = anneal(
        g0,
        blocks.nontrivial(),
        lambda g: formula_cost(terms, n, g, cfg.seed, cfg.sa_ga_budget),
        seed=cfg.seed,
        schedule=Schedule(cfg.sa_t0, cfg.sa_ratio, cfg.sa_sweeps),
    )
    return None if res.gamma.is_identity() else res.gamma


def _fermionic_layer(terms, n, cfg, g: GammaMatrix | None) -> Layer:
    items, raw, _ = _schedule(n, _fermionic_sums(terms, n, g), cfg.seed, cfg.ga_budget)
    return Layer("fermionic", peephole(raw), items, [], g)


def _compile_once(terms: Sequence[ExcitationTerm], n: int, cfg: CompileConfig):
    seg = segment(terms, cfg.restarts, cfg.seed) if cfg.enable_hybrid else _plain_segmentation(terms)
    layers, runtime_demoted, counts, left = _compressed_layers(seg, n, cfg)
    if left:
        layers.append(Layer("decompress", Circuit(n, tuple(cx(a, b) for a, b in left))))
        counts["compression"] += len(left)
    ferm_terms = list(seg.demoted) + runtime_demoted + list(seg.fermionic)
    g = _choose_gamma(ferm_terms, n, cfg)
    ferm = _fermionic_layer(ferm_terms, n, cfg, None)
    if g is not None:
        # full-budget re-score; keep plain JW unless the re-encoding really wins
        alt = _fermionic_layer(ferm_terms, n, cfg, g)
        if alt.circuit.cnot_count() < ferm.circuit.cnot_count():
            ferm = alt
        else:
            g = None
    if ferm.items:
        layers.append(ferm)
    counts["fermionic"] = ferm.circuit.cnot_count()
    gates: list[Gate] = [gate for layer in layers for gate in layer.circuit.gates]
    return Circuit(n, tuple(gates)), layers, seg, runtime_demoted, counts, g


def _membership(seg: Segmentation, runtime_demoted) -> dict:
    names = lambda ts: [t.param for t in ts]  # noqa: E731
    return {
        "sink": [names(layer) for layer in seg.sink],
        "color": names(seg.color),
        "source": [names(layer) for layer in seg.source],
        "demoted": names(seg.demoted),
        "demoted_at_runtime": names(runtime_demoted),
        "bosonic": names(seg.bosonic),
        "fermionic": names(seg.fermionic),
    }


def compile(terms: Sequence[ExcitationTerm], n: int, config: CompileConfig = CompileConfig()):
    """Compile ``terms`` on ``n`` orbitals; returns (Circuit, CompileReport).

    The plain JW + GTSP schedule is compiled with the same seeds; if it is
    cheaper it is returned instead, so the optimized count never exceeds it.
    """
    for t in terms:
        t.validate(n)
    plain_cfg = replace(config, enable_gamma=False, enable_hybrid=False)
    base = _compile_once(terms, n, plain_cfg)
    opt = base if plain_cfg == config else _compile_once(terms, n, config)
    fallback = opt[0].cnot_count() > base[0].cnot_count()
    circ, layers, seg, runtime_demoted, counts, g = base if fallback else opt
    cert = certify(layers, n, config)
    tallies = {BOSONIC: 0, HYBRID: 0, FERMIONIC: 0}
    for t in terms:
        tallies[classify(t).kind] += 1
    report = CompileReport(
        cnot_total=circ.cnot_count(),
        cnot_jw_baseline=base[0].cnot_count(),
        segments={k: counts.get(k, 0) for k in ("sink", "color", "source", "bosonic", "compression", "fermionic")},
        classes=tallies,
        membership=_membership(opt[2], opt[3]),
        gamma=g.to_text() if g is not None else None,
        fallback_to_baseline=fallback,
        certification=cert,
        seed=config.seed,
        config=asdict(config),
    )
    return circ, report


def baseline_jw(terms: Sequence[ExcitationTerm], n: int, seed: int = 0, ga_budget: int = 200) -> int:
    cfg = CompileConfig(seed=seed, ga_budget=ga_budget, enable_gamma=False, enable_hybrid=False, certify="off")
    return compile(terms, n, cfg)[0].cnot_count()


# ---------------------------------------------------------------------------
# certification


def _local(qubits: Sequence[int]) -> dict[int, int]:
    return {q: i for i, q in enumerate(sorted(qubits))}


def _restrict_circuit(c: Circuit, pos: dict[int, int]) -> Circuit:
    return Circuit(len(pos), tuple(Gate(g.kind, tuple(pos[q] for q in g.qubits), g.angle) for g in c.gates))


def _restrict_string(p: PauliString, pos: dict[int, int]) -> PauliString:
    return PauliString.from_letters({pos[q]: p.letter(q) for q in p.support()}, len(pos), p.sign)


def _method(width: int, mode: str) -> str | None:
    if mode == "off" or width > SAMPLED_WIDTH:
        return None
    return "full" if mode == "full" and width <= FULL_WIDTH else "sampled"


def _check_layer(layer: Layer, bind: dict, mode: str, rng) -> dict:
    qubits = {q for g in layer.circuit.gates for q in g.qubits}
    qubits |= {q for p, *_ in layer.items for q in p.support()}
    pos = _local(qubits)
    w = len(pos)
    method = _method(w, mode)
    out = {"block": layer.name, "width": w, "method": method or "skipped", "passed": None}
    if method is None or not qubits:
        return out
    circ = _restrict_circuit(layer.circuit, pos)
    items = [(_restrict_string(p, pos), float(m) * bind[par]) for p, _, m, par in layer.items]

    def ref(v):
        for p, theta in items:
            v = oracle.apply_pauli_exp(p, theta, v)
        return v

    out["passed"] = oracle.states_agree(
        lambda v: oracle.apply_circuit(circ, v, bind), ref, w, rng,
        samples=SAMPLES if method == "sampled" else 0,
    )
    return out


def _check_term(t: ExcitationTerm, pairs, bind: dict, mode: str, rng) -> dict:
    """Compressed form of ``t`` against its fermionic exponential on the even-pair sector."""
    lo, hi = min(t.indices), max(t.indices)
    for a, b in pairs:
        lo, hi = min(lo, a), max(hi, b)
    w = hi - lo + 1
    method = _method(w, mode)
    out = {"block": f"term {t.param}", "width": w, "method": method or "skipped", "passed": None}
    if method is None:
        return out
    local = ExcitationTerm(tuple(i - lo for i in t.create), tuple(i - lo for i in t.annihilate), t.param)
    lp = [(a - lo, b - lo) for a, b in pairs]
    theta = bind[t.param]
    red = reduce_sum(jw_lower(local, w), lp)
    strs = [(p, float(m) * theta) for p, m in red.rotations()]
    if any(not commutes(p, q) for p, _ in strs for q, _ in strs):
        out["passed"] = False
        return out
    comp = Circuit(w, tuple(cx(a, b) for a, b in lp))

    def compressed(v):
        v = oracle.apply_circuit(comp, v)
        for p, ang in strs:
            v = oracle.apply_pauli_exp(p, ang, v)
        return oracle.apply_circuit(comp, v)

    out["passed"] = oracle.states_agree(
        compressed, lambda v: oracle.apply_excitation_unitary(local.create, local.annihilate, w, theta, v), w, rng,
        samples=SAMPLES if method == "sampled" else 0,
        mask=oracle.sector_mask(w, lp),
    )
    return out


def certify(layers: Sequence[Layer], n: int, config: CompileConfig) -> dict:
    """Check every layer against its scheduled exponentials and every compressed term against fermions."""
    mode = config.certify
    if mode == "off":
        return {"mode": "off", "blocks": [], "all_passed": None}
    rng = np.random.default_rng(config.seed)
    params = sorted({par for layer in layers for *_, par in layer.items} |
                    {t.param for layer in layers for t, _ in layer.terms})
    bind = {p: float(v) for p, v in zip(params, rng.uniform(-np.pi, np.pi, size=len(params)))}
    results = []
    for layer in layers:
        if layer.items:
            results.append(_check_layer(layer, bind, mode, rng))
        for t, pairs in layer.terms:
            results.append(_check_term(t, pairs, bind, mode, rng))
    done = [r["passed"] for r in results if r["passed"] is not None]
    return {"mode": mode, "blocks": results, "all_passed": all(done) if done else None}
