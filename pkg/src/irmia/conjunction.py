"""Conjunction of two specifications over a common alphabet.

Inputs specified on one side only are paired with the other side's demonic
state, a fresh state that allows every output and constrains nothing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .completion import fresh_name
from .compose import pair_name
from .model import (
    DEFAULT_FAILURE, MAY, MUST, TAU, Edge, IrMia, Modality, require_same_alphabet,
    require_valid,
)
from .semantics import strong_then_eps_set, weak_succ_set


@dataclass(frozen=True)
class ConjunctionResult:
    defined: bool
    automaton: IrMia | None = None
    inconsistent: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.defined


def with_demonic(aut: IrMia) -> tuple[IrMia, str]:
    """``aut`` plus a fresh demonic state named after it."""
    dem = fresh_name(aut.index, f"{aut.name}_d")
    loops = tuple(Edge(dem, o, dem, Modality.MAY_ONLY) for o in aut.outputs)
    states = tuple(s for s in aut.states if s != aut.failure) + (dem, aut.failure)
    return aut.replace(states=states, edges=aut.edges + loops), dem


class _Side:
    def __init__(self, aut: IrMia):
        self.aut, self.demonic = with_demonic(aut)
        self.fail = aut.failure
        self._weak: dict = {}

    def weak(self, p: str, w: str) -> frozenset[str]:
        key = (p, w)
        if key not in self._weak:
            self._weak[key] = weak_succ_set(self.aut, p, w, MAY)
        return self._weak[key]

    def input_eps(self, p: str, i: str) -> list[str]:
        return [t for t in self.aut.ordered(strong_then_eps_set(self.aut, p, i, MAY))
                if t != self.fail]

    def must_refuses(self, p: str, i: str) -> bool:
        return self.fail in self.aut.succ(p, i, MUST)


def _rules(s1: _Side, s2: _Side, p1: str, p2: str):
    """Edges leaving (p1, p2) as (label, target pair or None for the failure, modality)."""
    a1, a2 = s1.aut, s2.aut
    for w in (TAU,) + a1.outputs:
        for e in a1.out_edges(p1, MUST):
            if e.label == w:
                for t2 in a2.ordered(s2.weak(p2, w)):
                    yield w, (e.target, t2), Modality.MUST
        for e in a2.out_edges(p2, MUST):
            if e.label == w:
                for t1 in a1.ordered(s1.weak(p1, w)):
                    yield w, (t1, e.target), Modality.MUST
        for t1 in a1.ordered(s1.weak(p1, w)):
            for t2 in a2.ordered(s2.weak(p2, w)):
                if w == TAU and (t1, t2) == (p1, p2):
                    continue  # the empty joint step is not a transition
                yield w, (t1, t2), Modality.MAY_ONLY
    for i in a1.inputs:
        if s1.must_refuses(p1, i) or s2.must_refuses(p2, i):
            yield i, None, Modality.MUST
            continue
        for e in a1.out_edges(p1, MUST):
            if e.label == i and e.target != s1.fail:
                for t2 in s2.input_eps(p2, i):
                    yield i, (e.target, t2), Modality.MUST
        for e in a2.out_edges(p2, MUST):
            if e.label == i and e.target != s2.fail:
                for t1 in s1.input_eps(p1, i):
                    yield i, (t1, e.target), Modality.MUST
        for t1 in s1.input_eps(p1, i):
            for t2 in s2.input_eps(p2, i):
                yield i, (t1, t2), Modality.MAY_ONLY
        if not a2.enables(p2, i):
            for e in a1.out_edges(p1):
                if e.label == i and e.target != s1.fail:
                    yield i, (e.target, s2.demonic), e.modality
        if not a1.enables(p1, i):
            for e in a2.out_edges(p2):
                if e.label == i and e.target != s2.fail:
                    yield i, (s1.demonic, e.target), e.modality


def _build(a: IrMia, b: IrMia):
    s1, s2 = _Side(a), _Side(b)
    start = (a.initial, b.initial)
    fail = DEFAULT_FAILURE
    order, seen, queue = [start], {start}, deque([start])
    edges = []
    while queue:
        src = queue.popleft()
        for lab, tgt, mod in _rules(s1, s2, *src):
            edges.append(Edge(pair_name(*src), lab, fail if tgt is None else pair_name(*tgt), mod))
            if tgt is not None and tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
                queue.append(tgt)
    pairs = {pair_name(*k): k for k in order}
    aut = IrMia(name=f"{a.name}&{b.name}", inputs=a.inputs, outputs=a.outputs,
                states=tuple(pairs) + (fail,), initial=pair_name(*start),
                failure=fail, edges=tuple(edges))
    return aut, pairs, s1, s2


def conjunctive_product(a: IrMia, b: IrMia) -> IrMia:
    require_valid(a)
    require_valid(b)
    require_same_alphabet(a, b)
    return _build(a, b)[0]


def _branching(aut: IrMia, p: str, lab: str) -> bool:
    return len(aut.succ(p, lab)) > 1


def _inconsistent(prod: IrMia, pairs, s1: _Side, s2: _Side) -> dict[str, str]:
    a1, a2 = s1.aut, s2.aut
    found: dict[str, str] = {}
    for name, (p1, p2) in pairs.items():
        tag = None
        for o in a1.outputs:
            if a1.enables(p1, o, MUST) and not s2.weak(p2, o):
                tag = "F1"
            elif a2.enables(p2, o, MUST) and not s1.weak(p1, o):
                tag = "F2"
            if tag:
                break
        if tag is None:
            for i in a1.inputs:
                if s2.must_refuses(p2, i) and any(t != s1.fail for t in a1.succ(p1, i, MUST)):
                    tag = "F3"
                elif s1.must_refuses(p1, i) and any(t != s2.fail for t in a2.succ(p2, i, MUST)):
                    tag = "F4"
                if tag:
                    break
        if tag is None:
            for lab in a1.inputs + a1.outputs:
                if _branching(a1, p1, lab) and a2.enables(p2, lab, MUST):
                    tag = "F5"
                elif _branching(a2, p2, lab) and a1.enables(p1, lab, MUST):
                    tag = "F6"
                if tag:
                    break
        if tag:
            found[name] = tag
    preds: dict[str, list[str]] = {}
    for e in prod.edges:
        if e.must:
            preds.setdefault(e.target, []).append(e.source)
    queue = deque(found)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in found:
                found[s] = "F7"
                queue.append(s)
    return found


def inconsistent_states(prod: IrMia, a: IrMia, b: IrMia) -> dict[str, str]:
    _, pairs, s1, s2 = _build(a, b)
    return {s: tag for s, tag in _inconsistent(prod, pairs, s1, s2).items() if s in prod.index}


def conjoin(a: IrMia, b: IrMia) -> ConjunctionResult:
    require_valid(a)
    require_valid(b)
    require_same_alphabet(a, b)
    prod, pairs, s1, s2 = _build(a, b)
    bad = _inconsistent(prod, pairs, s1, s2)
    if prod.initial in bad:
        return ConjunctionResult(False, inconsistent=bad)
    edges = [e for e in prod.edges if e.source not in bad and e.target not in bad]
    # an optional input whose every target was pruned becomes a refusal, not unspecified
    lost = {(e.source, e.label) for e in prod.edges
            if e.source not in bad and e.target in bad and e.label in prod.input_set}
    lost -= {(e.source, e.label) for e in edges}
    edges += [Edge(s, i, prod.failure, Modality.MUST) for s, i in sorted(lost)]
    kept = prod.replace(
        name=f"{a.name}^{b.name}",
        states=tuple(s for s in prod.states if s not in bad),
        edges=tuple(edges))
    return ConjunctionResult(True, kept.trim(), bad)
