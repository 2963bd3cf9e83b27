"""Parallel product and composition (multicast or hiding), illegal states, hiding.

Product states are named ``(p,q)``.  Only the part reachable from the pair of
initial states is built, and any edge whose target would contain an operand's
failure state goes straight to the product's failure state.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .completion import fresh_name
from .model import (
    DEFAULT_FAILURE, MUST, TAU, Edge, InvalidAutomaton, IrMia, Modality,
    require_valid, validate,
)


class Mode(enum.Enum):
    MULTICAST = "multicast"
    HIDING = "hiding"


class NotComposable(ValueError):
    pass


class PruneEvent(NamedTuple):
    state: str
    reason: str
    label: str | None = None


@dataclass(frozen=True)
class CompositionResult:
    automaton: IrMia
    compatible: bool
    pruning_report: tuple[PruneEvent, ...]
    mode: Mode
    illegal: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.compatible


def pair_name(p: str, q: str) -> str:
    return f"({p},{q})"


def composable(a: IrMia, b: IrMia, mode: Mode = Mode.MULTICAST) -> tuple[bool, str]:
    shared_out = sorted(a.output_set & b.output_set)
    if shared_out:
        return False, f"shared outputs {shared_out}"
    if mode is Mode.HIDING:
        shared_in = sorted(a.input_set & b.input_set)
        if shared_in:
            return False, f"shared inputs {shared_in}"
    return True, "ok"


def _require_composable(a: IrMia, b: IrMia, mode: Mode) -> None:
    require_valid(a)
    require_valid(b)
    ok, why = composable(a, b, mode)
    if not ok:
        raise NotComposable(f"{a.name!r} and {b.name!r} are not {mode.value}-composable: {why}")


class _Product(NamedTuple):
    automaton: IrMia
    pairs: dict[str, tuple[str, str]]


def _alphabet(a: IrMia, b: IrMia, mode: Mode) -> tuple[tuple[str, ...], tuple[str, ...]]:
    outs = set(a.outputs) | set(b.outputs)
    inputs = tuple(x for x in dict.fromkeys(a.inputs + b.inputs) if x not in outs)
    outputs = tuple(dict.fromkeys(a.outputs + b.outputs))
    if mode is Mode.HIDING:
        common = a.actions & b.actions
        outputs = tuple(x for x in outputs if x not in common)
    return inputs, outputs


def _joint(m1: Modality, m2: Modality) -> Modality:
    return Modality.MUST if m1 is Modality.MUST and m2 is Modality.MUST else Modality.MAY_ONLY


def _build(a: IrMia, b: IrMia, mode: Mode) -> _Product:
    inputs, outputs = _alphabet(a, b, mode)
    shared = a.actions & b.actions
    shared_inputs = a.input_set & b.input_set
    start = (a.initial, b.initial)
    names: dict[tuple[str, str], str] = {start: pair_name(*start)}
    fail = DEFAULT_FAILURE  # pair names always contain a comma, so no clash
    order = [start]
    queue = deque(order)
    edges: list[Edge] = []
    raw: list[tuple[tuple[str, str], str, tuple[str, str] | None, Modality]] = []

    def emit(src, label, tgt, mod):
        if tgt is not None and (tgt[0] == a.failure or tgt[1] == b.failure):
            tgt = None
        raw.append((src, label, tgt, mod))
        if tgt is not None and tgt not in names:
            names[tgt] = pair_name(*tgt)
            order.append(tgt)
            queue.append(tgt)

    while queue:
        p1, p2 = src = queue.popleft()
        for e in a.out_edges(p1):
            if e.label not in shared:
                emit(src, e.label, (e.target, p2), e.modality)
        for e in b.out_edges(p2):
            if e.label not in shared:
                emit(src, e.label, (p1, e.target), e.modality)
        for lab in sorted(shared):
            left = list(a._succ.get(p1, {}).get(lab, ()))
            right = list(b._succ.get(p2, {}).get(lab, ()))
            if lab in shared_inputs:
                if a.refuses(p1, lab) or b.refuses(p2, lab):
                    emit(src, lab, None, Modality.MUST)
                    continue
            out_label = TAU if mode is Mode.HIDING else lab
            for e1 in left:
                for e2 in right:
                    emit(src, out_label, (e1.target, e2.target), _joint(e1.modality, e2.modality))
    pairs = {names[k]: k for k in order}
    for s, lab, t, m in raw:
        edges.append(Edge(names[s], lab, fail if t is None else names[t], m))
    aut = IrMia(
        name=f"{a.name}||{b.name}" if mode is Mode.MULTICAST else f"{a.name}|{b.name}",
        inputs=inputs, outputs=outputs,
        states=tuple(names[k] for k in order) + (fail,),
        initial=names[start], failure=fail, edges=tuple(edges),
    )
    return _Product(aut, pairs)


def parallel_product(a: IrMia, b: IrMia, mode: Mode = Mode.MULTICAST) -> IrMia:
    """Reachable part of the parallel product under ``mode``."""
    _require_composable(a, b, mode)
    return require_valid(_build(a, b, mode).automaton)


def _new_error(a: IrMia, b: IrMia, p1: str, p2: str) -> int | None:
    for lab in sorted(a.actions & b.actions):
        if lab in a.output_set and a.enables(p1, lab):
            if not b.enables(p2, lab, MUST):
                return 1
        if lab in b.output_set and b.enables(p2, lab):
            if not a.enables(p1, lab, MUST):
                return 2
        if lab in a.output_set and a.enables(p1, lab) and b.refuses(p2, lab):
            return 3
        if lab in b.output_set and b.enables(p2, lab) and a.refuses(p1, lab):
            return 4
    return None


def _illegal(product: _Product, a: IrMia, b: IrMia) -> dict[str, str]:
    aut = product.automaton
    found: dict[str, str] = {}
    for s in aut.states:
        if s == aut.failure:
            continue
        bullet = _new_error(a, b, *product.pairs[s])
        if bullet is not None:
            found[s] = f"new-error bullet {bullet}"
    preds: dict[str, list[str]] = {}
    for e in aut.edges:
        if e.label not in aut.input_set:
            preds.setdefault(e.target, []).append(e.source)
    queue = deque(found)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in found:
                found[s] = "reach closure"
                queue.append(s)
    return found


def illegal_states(product: IrMia, a: IrMia, b: IrMia) -> dict[str, str]:
    """Illegal pairs of ``product`` (built from ``a`` and ``b``) with the rule that put them there.

    Dict order is discovery order: new errors by state order, then the
    backward closure over output and tau steps.
    """
    lookup = {pair_name(p, q): (p, q) for p in a.states for q in b.states}
    pairs = {s: lookup[s] for s in product.states if s != product.failure}
    return _illegal(_Product(product, pairs), a, b)


def _incompatible(product: IrMia) -> IrMia:
    start = fresh_name(product.index, "incompatible")
    return product.replace(states=(start, product.failure), initial=start, edges=())


def parallel_compose(a: IrMia, b: IrMia, mode: Mode = Mode.MULTICAST) -> CompositionResult:
    _require_composable(a, b, mode)
    product = _build(a, b, mode)
    aut = product.automaton
    bad = _illegal(product, a, b)
    report = [PruneEvent(s, why) for s, why in bad.items()]
    if aut.initial in bad:
        return CompositionResult(_incompatible(aut), False, tuple(report), mode, bad)
    cut: set[tuple[str, str]] = set()
    for s in aut.states:
        if s in bad or s == aut.failure:
            continue
        for i in aut.inputs:
            if any(t in bad for t in aut.succ(s, i)):
                cut.add((s, i))
                report.append(PruneEvent(s, "input-edge-removal", i))
    edges = tuple(e for e in aut.edges
                  if (e.source, e.label) not in cut and e.source not in bad and e.target not in bad)
    pruned = aut.replace(states=tuple(s for s in aut.states if s not in bad), edges=edges)
    live = set(pruned.reachable())
    report.extend(PruneEvent(s, "unreachable") for s in pruned.states
                  if s not in live and s != pruned.failure)
    # hiding can close a tau cycle; like hide(), that is reported, not returned
    return CompositionResult(require_valid(pruned.restrict(live)), True, tuple(report), mode, bad)


def hide(aut: IrMia, labels) -> IrMia:
    """Turn the given outputs into tau steps and drop them from the output alphabet."""
    labels = set(labels)
    stray = sorted(labels - aut.output_set)
    if stray:
        raise ValueError(f"cannot hide {stray}: not outputs of {aut.name!r}")
    if not labels:
        return aut
    edges = tuple(Edge(e.source, TAU if e.label in labels else e.label, e.target, e.modality)
                  for e in aut.edges)
    out = aut.replace(outputs=tuple(o for o in aut.outputs if o not in labels), edges=edges)
    problems = validate(out)
    if problems:
        raise InvalidAutomaton(out.name, problems)
    return out
