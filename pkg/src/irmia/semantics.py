"""Weak transitions, the init/quiescence/failure predicates, after and Out.

Public functions return tuples in declaration order; the ``*_set`` helpers
return frozensets and are what the algorithms use internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import DELTA, MAY, MUST, PHI, TAU, IrMia, Rel

TRACE_SEP = "·"


def closure_set(aut: IrMia, states: Iterable[str], rel: Rel = MAY) -> frozenset[str]:
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for t in aut.succ(s, TAU, rel):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def weak_closure(aut: IrMia, state: str, rel: Rel = MAY) -> tuple[str, ...]:
    aut.check_state(state)
    return aut.ordered(closure_set(aut, [state], rel))


def weak_succ_set(aut: IrMia, state: str, label: str, rel: Rel = MAY) -> frozenset[str]:
    """Targets of ``state ==label==> .`` (tau* label tau*); ``label`` may be TAU for eps."""
    before = closure_set(aut, [state], rel)
    if label == TAU:
        return before
    mid = {t for s in before for t in aut.succ(s, label, rel)}
    return closure_set(aut, mid, rel)


def strong_then_eps_set(aut: IrMia, state: str, label: str, rel: Rel = MAY) -> frozenset[str]:
    """Targets of one strong ``label`` step followed by an eps closure."""
    return closure_set(aut, aut.succ(state, label, rel), rel)


def init_set(aut: IrMia, state: str, rel: Rel = MAY) -> tuple[str, ...]:
    aut.check_state(state)
    found = _init(aut, state, rel)
    ordered = [a for a in aut.inputs + aut.outputs if a in found]
    if state == aut.failure:
        ordered.append(PHI)
    return tuple(ordered)


def _init(aut: IrMia, state: str, rel: Rel) -> set[str]:
    found: set[str] = set()
    for s in closure_set(aut, [state], rel):
        found.update(a for a in aut.labels_at(s, rel) if a != TAU)
    return found


def quiescent(aut: IrMia, state: str, rel: Rel = MAY) -> bool:
    """delta_MAY uses the must-init set, delta_MUST the may-init set."""
    if state == aut.failure:
        aut.check_state(state)
        return False
    aut.check_state(state)
    other = MUST if rel is MAY else MAY
    return _init(aut, state, other) <= aut.input_set


def failure_pred(aut: IrMia, state: str, rel: Rel = MAY) -> bool:
    aut.check_state(state)
    if state == aut.failure:
        return True
    return rel is MAY and state in aut.may_failure_targets


def step_set(aut: IrMia, states: frozenset[str], symbol: str, rel: Rel = MAY) -> frozenset[str]:
    """One weak step of ``after`` from an already closed set."""
    # delta and phi are self-loops, so their weak step ends with a tau closure too
    if symbol == DELTA:
        return closure_set(aut, (s for s in states if quiescent(aut, s, rel)), rel)
    if symbol == PHI:
        return closure_set(aut, (s for s in states if failure_pred(aut, s, rel)), rel)
    return closure_set(aut, (t for s in states for t in aut.succ(s, symbol, rel)), rel)


def check_trace(aut: IrMia, trace: Sequence[str]) -> None:
    for sym in trace:
        if sym not in aut.actions and sym not in (DELTA, PHI):
            raise ValueError(f"symbol {sym!r} is not in the alphabet of {aut.name!r}")


def parse_trace(text: str | Sequence[str]) -> tuple[str, ...]:
    if not isinstance(text, str):
        return tuple(text)
    return tuple(t for t in text.split(TRACE_SEP) if t)


def render_trace(trace: Sequence[str]) -> str:
    return TRACE_SEP.join(trace)


def after_set(aut: IrMia, src: Iterable[str], trace: Sequence[str], rel: Rel = MAY) -> frozenset[str]:
    current = closure_set(aut, src, rel)
    for sym in trace:
        if not current:
            break
        current = step_set(aut, current, sym, rel)
    return current


def after(aut: IrMia, src: Iterable[str], trace: str | Sequence[str], rel: Rel = MAY) -> tuple[str, ...]:
    trace = parse_trace(trace)
    check_trace(aut, trace)
    src = list(src)
    for s in src:
        aut.check_state(s)
    return aut.ordered(after_set(aut, src, trace, rel))


def out_of_state(aut: IrMia, state: str, rel: Rel = MAY) -> set[str]:
    obs = {a for a in aut.labels_at(state, rel) if a in aut.output_set}
    if quiescent(aut, state, rel):
        obs.add(DELTA)
    if failure_pred(aut, state, rel):
        obs.add(PHI)
    return obs


def out_set_raw(aut: IrMia, states: Iterable[str], rel: Rel = MAY) -> frozenset[str]:
    obs: set[str] = set()
    for s in states:
        obs |= out_of_state(aut, s, rel)
    return frozenset(obs)


def order_observations(aut: IrMia, obs: Iterable[str]) -> tuple[str, ...]:
    obs = set(obs)
    return tuple(a for a in aut.outputs + (DELTA, PHI) if a in obs)


def out_set(aut: IrMia, src: Iterable[str], rel: Rel = MAY) -> tuple[str, ...]:
    src = list(src)
    for s in src:
        aut.check_state(s)
    return order_observations(aut, out_set_raw(aut, src, rel))


@dataclass(frozen=True)
class Enabledness:
    weak_may: bool
    strong_may: bool
    weak_must: bool
    strong_must: bool

    def as_dict(self) -> dict[str, bool]:
        return dict(weak_may=self.weak_may, strong_may=self.strong_may,
                    weak_must=self.weak_must, strong_must=self.strong_must)


def _enabled(aut: IrMia, rel: Rel, weak: bool, states: Iterable[str] | None = None) -> bool:
    for q in aut.states if states is None else states:
        if q == aut.failure:
            continue
        if weak:
            if not aut.input_set <= _init(aut, q, rel):
                return False
        elif not all(aut.enables(q, i, rel) for i in aut.inputs):
            return False
    return True


def input_enabledness(aut: IrMia, states: Iterable[str] | None = None) -> Enabledness:
    """Classify ``aut`` (or just ``states``) against the four enabledness flavours."""
    states = None if states is None else list(states)
    return Enabledness(
        weak_may=_enabled(aut, MAY, True, states),
        strong_may=_enabled(aut, MAY, False, states),
        weak_must=_enabled(aut, MUST, True, states),
        strong_must=_enabled(aut, MUST, False, states),
    )
