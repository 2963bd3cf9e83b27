"""Seeded generators and brute-force reference checkers.

The checkers deliberately avoid the machinery they cross-check: traces are
expanded per state without determinisation, and refinement is decided by
trying candidate relations instead of computing a fixpoint.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from functools import lru_cache

from .conformance import ConformanceVerdict, render_observation, symbol_order
from .model import DELTA, MAY, MUST, PHI, TAU, Edge, IrMia, Modality, Rel, require_valid
from .refinement import RefinementVerdict, refines
from .semantics import closure_set, failure_pred, input_enabledness, out_set_raw, quiescent

FLAVOURS = ("weak_may", "strong_may", "weak_must", "strong_must")


@dataclass(frozen=True)
class GeneratorConfig:
    min_states: int = 2
    max_states: int = 5
    n_inputs: int = 1
    n_outputs: int = 2
    edge_density: float = 0.4
    must_prob: float = 0.5
    refusal_prob: float = 0.1
    tau_prob: float = 0.1
    enabled: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("edge_density", "must_prob", "refusal_prob", "tau_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not 1 <= self.min_states <= self.max_states:
            raise ValueError("need 1 <= min_states <= max_states")
        if self.enabled is not None and self.enabled not in FLAVOURS:
            raise ValueError(f"unknown enabledness flavour {self.enabled!r}")

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)


def _alphabet(cfg: GeneratorConfig, inputs=None, outputs=None):
    ins = tuple(inputs) if inputs is not None else tuple(f"i{n}" for n in range(cfg.n_inputs))
    outs = tuple(outputs) if outputs is not None else tuple(f"o{n}" for n in range(cfg.n_outputs))
    return ins, outs


def random_irmia(cfg: GeneratorConfig, name: str = "A", inputs=None, outputs=None) -> IrMia:
    """A valid automaton drawn from ``cfg`` (deterministic in ``cfg.seed``).

    Tau edges only go from lower to higher state index, so no tau cycle can
    form.  The enabledness repair walks states from the highest index down,
    which lets weak enabledness see already repaired tau successors.
    """
    rng = random.Random(cfg.seed)
    ins, outs = _alphabet(cfg, inputs, outputs)
    if cfg.enabled is not None and ins and cfg.max_states < 1:
        raise ValueError("infeasible configuration")
    n = rng.randint(cfg.min_states, cfg.max_states)
    states = [f"s{k}" for k in range(n)]
    fail = "_PHI"
    edges: list[Edge] = []

    def mod(force_must: bool = False) -> Modality:
        return Modality.MUST if force_must or rng.random() < cfg.must_prob else Modality.MAY_ONLY

    for k, s in enumerate(states):
        for i in ins:
            if rng.random() < cfg.refusal_prob:
                edges.append(Edge(s, i, fail, Modality.MUST))
            elif rng.random() < cfg.edge_density:
                edges.append(Edge(s, i, rng.choice(states), mod()))
        for o in outs:
            if rng.random() < cfg.edge_density:
                edges.append(Edge(s, o, rng.choice(states), mod()))
        if k + 1 < n and rng.random() < cfg.tau_prob:
            edges.append(Edge(s, TAU, rng.choice(states[k + 1:]), mod()))
    aut = IrMia(name, ins, outs, tuple(states) + (fail,), states[0], fail, tuple(edges))
    if cfg.enabled is not None:
        aut = _repair(aut, cfg.enabled, rng, cfg.must_prob)
    aut = aut.trim()
    require_valid(aut)
    return aut


def _repair(aut: IrMia, flavour: str, rng: random.Random, must_prob: float) -> IrMia:
    weak = flavour.startswith("weak")
    rel = MUST if flavour.endswith("must") else MAY
    states = [s for s in aut.states if s != aut.failure]
    for s in reversed(states):
        for i in aut.inputs:
            if weak:
                ok = any(aut.enables(t, i, rel) for t in closure_set(aut, [s], rel))
            else:
                ok = aut.enables(s, i, rel)
            if ok:
                continue
            existing = [e for e in aut.out_edges(s) if e.label == i]
            if existing:
                # promote the optional edges instead of adding a second reaction
                promoted = {(e.source, e.label, e.target) for e in existing}
                edges = tuple(Edge(e.source, e.label, e.target, Modality.MUST)
                              if (e.source, e.label, e.target) in promoted else e
                              for e in aut.edges)
            else:
                m = Modality.MUST if rel is MUST or rng.random() < must_prob else Modality.MAY_ONLY
                edges = aut.edges + (Edge(s, i, rng.choice(states), m),)
            aut = aut.replace(edges=edges)
    return aut


# -- refinement-preserving mutations ------------------------------------------

def _drop_optional(aut: IrMia, rng: random.Random) -> IrMia | None:
    cands = [e for e in aut.edges if not e.must and e.label not in aut.input_set]
    if not cands:
        return None
    gone = rng.choice(cands)
    return aut.replace(edges=tuple(e for e in aut.edges if e is not gone))


def _promote(aut: IrMia, rng: random.Random) -> IrMia | None:
    cands = [e for e in aut.edges if not e.must]
    if not cands:
        return None
    pick = rng.choice(cands)
    return aut.replace(edges=tuple(
        Edge(e.source, e.label, e.target, Modality.MUST) if e is pick else e for e in aut.edges))


def _refuse(aut: IrMia, rng: random.Random) -> IrMia | None:
    cands = []
    for s in aut.states:
        for i in aut.inputs:
            es = [e for e in aut.out_edges(s) if e.label == i]
            if es and not any(e.must for e in es):
                cands.append((s, i))
    if not cands:
        return None
    s, i = rng.choice(cands)
    edges = tuple(e for e in aut.edges if not (e.source == s and e.label == i))
    return aut.replace(edges=edges + (Edge(s, i, aut.failure, Modality.MUST),))


def _add_unspecified(aut: IrMia, rng: random.Random) -> IrMia | None:
    cands = [(s, i) for s in aut.states if s != aut.failure
             for i in aut.inputs if not aut.enables(s, i)]
    if not cands:
        return None
    s, i = rng.choice(cands)
    target = rng.choice([t for t in aut.states if t != aut.failure])
    m = Modality.MUST if rng.random() < 0.5 else Modality.MAY_ONLY
    return aut.replace(edges=aut.edges + (Edge(s, i, target, m),))


def _insert_tau(aut: IrMia, rng: random.Random) -> IrMia | None:
    has_inputs = {e.source for e in aut.edges if e.label in aut.input_set}
    cands = [e for e in aut.edges if e.label != TAU and e.target != aut.failure
             and e.target not in has_inputs]
    if not cands:
        return None
    pick = rng.choice(cands)
    mid = f"{pick.target}_t"
    while mid in aut.index:
        mid += "'"
    edges = tuple(e for e in aut.edges if e is not pick) + (
        Edge(pick.source, pick.label, mid, pick.modality),
        Edge(mid, TAU, pick.target, Modality.MUST),
    )
    states = tuple(s for s in aut.states if s != aut.failure) + (mid, aut.failure)
    return aut.replace(states=states, edges=edges)


MUTATIONS = (_drop_optional, _promote, _refuse, _add_unspecified, _insert_tau)


def random_refinement(aut: IrMia, seed: int, steps: int = 3, mutations=MUTATIONS) -> IrMia:
    """Apply up to ``steps`` refinement-preserving mutations; the result refines ``aut``."""
    rng = random.Random(seed)
    current = aut
    for _ in range(steps):
        mutate = rng.choice(mutations)
        nxt = mutate(current, rng)
        if nxt is None:
            continue
        # a mutation is only kept when the step is a refinement on its own
        if refines(nxt, current).holds:
            current = nxt
    assert refines(current, aut).holds, "mutation chain broke refinement"
    return current


# -- brute-force checkers ----------------------------------------------------

def _successors(aut: IrMia, p: str, sym: str, rel: Rel) -> frozenset[str]:
    """One weak step from a single state (``p`` is not assumed closed)."""
    start = closure_set(aut, [p], rel)
    if sym == DELTA:
        mid = [s for s in start if quiescent(aut, s, rel)]
    elif sym == PHI:
        mid = [s for s in start if failure_pred(aut, s, rel)]
    else:
        mid = [t for s in start for t in aut.succ(s, sym, rel)]
    return closure_set(aut, mid, rel)


def enum_straces(aut: IrMia, depth: int, rel: Rel = MAY) -> frozenset[tuple[str, ...]]:
    """All suspension traces of length at most ``depth``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    symbols = symbol_order(aut)

    @lru_cache(maxsize=None)
    def from_state(p: str, d: int) -> frozenset[tuple[str, ...]]:
        found = {()}
        if d == 0:
            return frozenset(found)
        for sym in symbols:
            for q in _successors(aut, p, sym, rel):
                found.update((sym,) + rest for rest in from_state(q, d - 1))
        return frozenset(found)

    return from_state(aut.initial, depth)


def irioco_bounded(impl: IrMia, spec: IrMia, depth: int = 8, conditions=(1, 2)) -> ConformanceVerdict:
    """Both conformance conditions checked on every trace up to ``depth``.

    Traces are walked one by one, level by level in symbol order, so the first
    violation found is the shortest and least one.  Equal state sets reached by
    different traces are not merged.  A trace is only extended while both sides
    can follow it: with either side empty neither condition can fail.
    """
    require_valid(impl)
    require_valid(spec)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    symbols = symbol_order(spec)
    order = {s: n for n, s in enumerate(symbols)}
    enabled = input_enabledness(impl).weak_may

    @lru_cache(maxsize=None)
    def step(side: int, p: str, sym: str) -> frozenset[str]:
        return _successors((impl, spec)[side], p, sym, MAY)

    def advance(side: int, states: frozenset[str], sym: str) -> frozenset[str]:
        return frozenset(t for p in states for t in step(side, p, sym))

    @lru_cache(maxsize=None)
    def observed(side: int, p: str, rel: Rel) -> frozenset[str]:
        return out_set_raw((impl, spec)[side], [p], rel)

    def outs(side: int, states: frozenset[str], rel: Rel) -> frozenset[str]:
        return frozenset().union(*(observed(side, p, rel) for p in states))

    level = [((), closure_set(impl, [impl.initial]), closure_set(spec, [spec.initial]))]
    for d in range(depth + 1):
        for sigma, ai, as_ in level:
            if 2 in conditions and ai - {impl.failure}:
                missing = outs(1, as_, MUST) - outs(0, ai, MUST)
                if missing:
                    obs = min(missing, key=order.__getitem__)
                    return ConformanceVerdict(False, sigma, 2, obs, enabled, render_observation(spec, obs))
            if 1 in conditions:
                extra = outs(0, ai, MAY) - outs(1, as_, MAY)
                if extra:
                    obs = min(extra, key=order.__getitem__)
                    return ConformanceVerdict(False, sigma, 1, obs, enabled, render_observation(spec, obs))
        if d == depth:
            break
        nxt = []
        for sigma, ai, as_ in level:
            for sym in symbols:
                bi, bs = advance(0, ai, sym), advance(1, as_, sym)
                if bi and bs:
                    nxt.append((sigma + (sym,), bi, bs))
        level = nxt
    return ConformanceVerdict(True, impl_input_enabled=enabled)


class SizeBoundExceeded(ValueError):
    pass


def _weak(aut: IrMia, p: str, w: str, rel: Rel) -> set[str]:
    # tau* w tau* by plain graph search; w == TAU means the empty word
    def eps(xs):
        seen, stack = set(xs), list(xs)
        while stack:
            x = stack.pop()
            for e in aut.out_edges(x, rel):
                if e.label == TAU and e.target not in seen:
                    seen.add(e.target)
                    stack.append(e.target)
        return seen

    pre = eps([p])
    if w == TAU:
        return pre
    return eps([e.target for x in pre for e in aut.out_edges(x, rel) if e.label == w])


def _clause_needs(impl: IrMia, spec: IrMia, p: str, q: str):
    """Obligations of (p, q) as lists of alternative partner pairs, straight from the clauses."""
    pf, qf = impl.failure, spec.failure
    if p == pf:
        return
    if q == qf:
        yield []
        return
    for e in spec.edges:
        if e.source != q:
            continue
        a = e.label
        if a in spec.input_set and e.must and e.target != qf:
            mids = [x.target for x in impl.out_edges(p, MUST) if x.label == a]
            yield [(p2, e.target) for m in mids for p2 in _weak(impl, m, TAU, MUST) if p2 != pf]
        if a not in spec.input_set and e.must:
            yield [(p2, e.target) for p2 in _weak(impl, p, a, MUST)]
        if a in spec.input_set:
            mids = [x.target for x in impl.out_edges(p, MAY) if x.label == a]
            yield [(p2, e.target) for m in mids for p2 in _weak(impl, m, TAU, MAY)]
    for e in impl.edges:
        if e.source != p:
            continue
        a = e.label
        if a in impl.input_set:
            if any(x.label == a for x in spec.out_edges(q, MAY)):
                mids = [x.target for x in spec.out_edges(q, MAY) if x.label == a]
                yield [(e.target, q2) for m in mids for q2 in _weak(spec, m, TAU, MAY)]
        else:
            yield [(e.target, q2) for q2 in _weak(spec, q, a, MAY)]


def refines_bruteforce(impl: IrMia, spec: IrMia, bound: int = 20) -> RefinementVerdict:
    """Search for a refinement relation containing the initial pair.

    The search grows a candidate relation: it picks an unmet obligation and
    branches over every partner pair that would meet it.  Any valid relation
    containing the start pair keeps one branch inside it, so the search is
    complete.  Pairs whose implementation side is the failure state are
    related implicitly.
    """
    require_valid(impl)
    require_valid(spec)
    free = [(p, q) for p in impl.states if p != impl.failure
            for q in spec.states if q != spec.failure]
    if len(free) > bound:
        raise SizeBoundExceeded(f"{len(free)} candidate pairs exceed the bound {bound}")
    base = frozenset((impl.failure, q) for q in spec.states)
    start = (impl.initial, spec.initial)
    dead: set[frozenset] = set()
    # pairs with an obligation nobody can meet are never worth adding
    hopeless = {pq for pq in free if any(not alts for alts in _clause_needs(impl, spec, *pq))}

    def related(pq, rel) -> bool:
        return pq[0] == impl.failure or pq in rel

    def search(rel: frozenset):
        if rel in dead:
            return None
        for pq in sorted(rel):
            for alts in _clause_needs(impl, spec, *pq):
                if any(related(c, rel) for c in alts):
                    continue
                for c in dict.fromkeys(alts):
                    if c in hopeless or c[1] == spec.failure:
                        continue
                    found = search(rel | {c})
                    if found is not None:
                        return found
                dead.add(rel)
                return None
        return rel

    if start[0] == impl.failure:
        return RefinementVerdict(True, base)
    if start in hopeless or start[1] == spec.failure:
        return RefinementVerdict(False)
    found = search(frozenset([start]))
    if found is None:
        return RefinementVerdict(False)
    return RefinementVerdict(True, found | base)


# -- seeded cross-checks --------------------------------------------------------

CROSS_CHECK_CONFIG = GeneratorConfig(min_states=1, max_states=5, n_inputs=1, n_outputs=2,
                                     enabled="weak_may")
CHECKS = ("irioco", "refines")


@dataclass(frozen=True)
class FuzzOutcome:
    seed: int
    check: str
    agree: bool
    fast: str
    reference: str
    skipped: bool = False


def fuzz_pair(seed: int, cfg: GeneratorConfig = CROSS_CHECK_CONFIG) -> tuple[IrMia, IrMia]:
    """An (implementation, specification) pair for ``seed``.

    Odd seeds pair the specification with one of its random refinements, so
    that holding verdicts and long traces are exercised as well as early
    failures.
    """
    spec = random_irmia(cfg.with_seed(2 * seed + 1), "S")
    if seed % 2:
        impl = random_refinement(spec, seed).replace(name="I")
    else:
        impl = random_irmia(cfg.with_seed(2 * seed), "I")
    return impl, spec


def fuzz_one(seed: int, check: str, depth: int = 8, bound: int = 20,
             cfg: GeneratorConfig = CROSS_CHECK_CONFIG) -> FuzzOutcome:
    """Compare the fast checker with its brute-force reference on one seeded pair."""
    if check not in CHECKS:
        raise ValueError(f"unknown check {check!r}; expected one of {CHECKS}")
    impl, spec = fuzz_pair(seed, cfg)
    if check == "refines":
        try:
            ref = refines_bruteforce(impl, spec, bound)
        except SizeBoundExceeded as exc:
            return FuzzOutcome(seed, check, True, "", str(exc), skipped=True)
        fast = refines(impl, spec)
        text = lambda v: "HOLDS" if v.holds else "FAILS"
        return FuzzOutcome(seed, check, fast.holds == ref.holds, text(fast), text(ref))
    from .conformance import irioco

    fast = irioco(impl, spec, assume_enabled=True)
    ref = irioco_bounded(impl, spec, depth)
    if fast.counterexample is not None and len(fast.counterexample) > depth:
        # beyond the reference's horizon only a bounded pass can be compared
        return FuzzOutcome(seed, check, ref.holds, fast.summary(), ref.summary())
    key = lambda v: (v.holds, v.counterexample, v.violated_condition, v.offending_observation)
    return FuzzOutcome(seed, check, key(fast) == key(ref), fast.summary(), ref.summary())
