"""Quotient: the unknown partner X with P = X || D, built from P and the divisor D."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .compose import pair_name
from .model import MUST, TAU, Edge, IrMia, Modality, validate


class QuotientPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class QuotientResult:
    defined: bool
    automaton: IrMia | None = None
    impossible: dict = field(default_factory=dict)
    precondition_report: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.defined


def quotient_pair_check(p: IrMia, d: IrMia) -> list[str]:
    problems = []
    for aut, role in ((p, "P"), (d, "D")):
        for v in validate(aut):
            problems.append(f"{role} is not valid: {v}")
        if any(e.label == TAU for e in aut.edges):
            problems.append(f"{role} ({aut.name}) has tau edges")
        if not aut.edges:
            problems.append(f"{role} ({aut.name}) has no may-transition")
    for s in d.states:
        for lab in d.labels_at(s):
            if len(d.succ(s, lab)) > 1:
                problems.append(f"D is not may-deterministic at {s!r} on {lab!r}")
    extra = sorted(d.actions - p.actions)
    if extra:
        problems.append(f"D has actions outside P: {extra}")
    extra = sorted(d.output_set - p.output_set)
    if extra:
        problems.append(f"D outputs are not outputs of P: {extra}")
    return problems


def _rules(p: IrMia, d: IrMia, ps: str, ds: str):
    """Edges of the pseudo-quotient leaving (ps, ds), as (label, target pair or None, modality)."""
    if ps == p.failure:
        return
    shared = d.actions
    for e in p.out_edges(ps):
        a = e.label
        if e.target == p.failure:
            if d.failure not in d.succ(ds, a, MUST):
                yield a, None, e.modality
            continue
        if a not in shared:
            yield a, (e.target, ds), e.modality
            continue
        for f in d._succ.get(ds, {}).get(a, ()):
            if f.target == d.failure:
                continue
            must = (e.must and f.must) or a in d.output_set
            may = must or f.must or not (a in p.output_set and a in d.input_set)
            if must:
                yield a, (e.target, f.target), Modality.MUST
            elif may:
                yield a, (e.target, f.target), Modality.MAY_ONLY


def pseudo_quotient(p: IrMia, d: IrMia) -> IrMia:
    problems = quotient_pair_check(p, d)
    if problems:
        raise QuotientPreconditionError("; ".join(problems))
    return _build(p, d)[0]


def _build(p: IrMia, d: IrMia):
    inputs = tuple(dict.fromkeys(p.inputs + d.outputs))
    outputs = tuple(o for o in p.outputs if o not in d.output_set)
    start = (p.initial, d.initial)
    fail_pair = (p.failure, d.failure)
    fail = pair_name(*fail_pair)
    order = [start]
    seen = {start}
    queue = deque(order)
    edges = []
    while queue:
        src = queue.popleft()
        for lab, tgt, mod in _rules(p, d, *src):
            tgt = fail_pair if tgt is None else tgt
            edges.append(Edge(pair_name(*src), lab, pair_name(*tgt), mod))
            if tgt != fail_pair and tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
                queue.append(tgt)
    pairs = {pair_name(*k): k for k in order}
    aut = IrMia(name=f"{p.name}//{d.name}", inputs=inputs, outputs=outputs,
                states=tuple(pairs) + (fail,), initial=pair_name(*start),
                failure=fail, edges=tuple(edges))
    return aut, pairs


def _impossible(pq: IrMia, pairs, p: IrMia, d: IrMia) -> dict[str, str]:
    found: dict[str, str] = {}
    for name, (ps, ds) in pairs.items():
        for e in p.out_edges(ps, MUST):
            a = e.label
            if e.target != p.failure and a in d.actions and not d.enables(ds, a, MUST):
                found[name] = "G1"
                break
            if e.target == p.failure and a in d.output_set and d.enables(ds, a):
                found[name] = "G2"
                break
    preds: dict[str, list[str]] = {}
    for e in pq.edges:
        if e.must:
            preds.setdefault(e.target, []).append(e.source)
    queue = deque(found)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in found:
                found[s] = "G3"
                queue.append(s)
    return found


def impossible_states(pq: IrMia, p: IrMia, d: IrMia) -> dict[str, str]:
    lookup = {pair_name(a, b): (a, b) for a in p.states for b in d.states}
    pairs = {s: lookup[s] for s in pq.states if s != pq.failure}
    return _impossible(pq, pairs, p, d)


def quotient(p: IrMia, d: IrMia) -> QuotientResult:
    problems = quotient_pair_check(p, d)
    if problems:
        return QuotientResult(False, precondition_report=tuple(problems))
    pq, pairs = _build(p, d)
    bad = _impossible(pq, pairs, p, d)
    if pq.initial in bad:
        return QuotientResult(False, impossible=bad)
    kept = pq.replace(
        states=tuple(s for s in pq.states if s not in bad),
        edges=tuple(e for e in pq.edges if e.source not in bad and e.target not in bad))
    return QuotientResult(True, kept.trim(), bad)
