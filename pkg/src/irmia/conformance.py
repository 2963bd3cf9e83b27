"""Modal input/output conformance with input refusal, and plain ioco on the may relation.

Both relations quantify over suspension traces.  They are decided on the
product of the two determinised suspension automata, explored breadth first
so the reported counterexample is a shortest one; ties are broken by symbol
order (actions by name, then ``delta``, then ``phi``).

Mandatory outputs are only demanded after traces that leave the
implementation somewhere other than its failure state: refusing an optional
input is judged by the may-out inclusion alone.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

from .model import (
    DELTA, MAY, MUST, PHI, TAU, Edge, IrMia, Modality, Rel, require_same_alphabet, require_valid,
)
from .semantics import (
    closure_set, input_enabledness, out_set_raw, render_trace, step_set,
)

Macro = frozenset


class InputEnablednessWarning(UserWarning):
    pass


class NotInputEnabled(ValueError):
    pass


def symbol_order(aut: IrMia) -> tuple[str, ...]:
    return tuple(sorted(aut.actions)) + (DELTA, PHI)


def render_observation(aut: IrMia, obs: str) -> str:
    return "!" + obs if obs in aut.output_set else obs


class _Stepper:
    """Memoised may-after steps and Out sets over macro-states of one automaton."""

    def __init__(self, aut: IrMia):
        self.aut = aut
        self.symbols = symbol_order(aut)
        self._step: dict[tuple[Macro, str], Macro] = {}
        self._out: dict[tuple[Macro, Rel], frozenset[str]] = {}
        self.initial: Macro = closure_set(aut, [aut.initial], MAY)

    def step(self, macro: Macro, sym: str) -> Macro:
        key = (macro, sym)
        hit = self._step.get(key)
        if hit is None:
            hit = self._step[key] = step_set(self.aut, macro, sym, MAY)
        return hit

    def out(self, macro: Macro, rel: Rel) -> frozenset[str]:
        key = (macro, rel)
        hit = self._out.get(key)
        if hit is None:
            hit = self._out[key] = out_set_raw(self.aut, macro, rel)
        return hit


@dataclass(frozen=True)
class SuspensionAutomaton:
    macros: tuple[Macro, ...]
    initial: Macro
    edges: dict = field(repr=False)
    out_may: dict = field(repr=False)
    out_must: dict = field(repr=False)

    def successor(self, macro: Macro, sym: str) -> Macro | None:
        return self.edges.get((macro, sym))

    def accepts(self, trace) -> bool:
        m = self.initial
        for sym in trace:
            m = self.edges.get((m, sym))
            if m is None:
                return False
        return True


def suspension_automaton(aut: IrMia) -> SuspensionAutomaton:
    require_valid(aut)
    st = _Stepper(aut)
    order = [st.initial]
    seen = {st.initial}
    edges = {}
    queue = deque(order)
    while queue:
        m = queue.popleft()
        for sym in st.symbols:
            nxt = st.step(m, sym)
            if not nxt:
                continue
            edges[(m, sym)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return SuspensionAutomaton(
        macros=tuple(order), initial=st.initial, edges=edges,
        out_may={m: st.out(m, MAY) for m in order},
        out_must={m: st.out(m, MUST) for m in order},
    )


@dataclass(frozen=True)
class ConformanceVerdict:
    holds: bool
    counterexample: tuple[str, ...] | None = None
    violated_condition: int | None = None
    offending_observation: str | None = None
    impl_input_enabled: bool = True
    rendered_observation: str | None = None

    def __bool__(self) -> bool:
        return self.holds

    @property
    def trace_text(self) -> str | None:
        return None if self.counterexample is None else render_trace(self.counterexample)

    def summary(self) -> str:
        if self.holds:
            return "PASS"
        key = "excess" if self.violated_condition == 1 else "missing"
        return (f"FAIL cond={self.violated_condition} trace={self.trace_text} "
                f"{key}={self.rendered_observation}")


def _precheck(impl: IrMia, spec: IrMia, assume_enabled: bool, strict: bool) -> bool:
    require_valid(impl)
    require_valid(spec)
    require_same_alphabet(impl, spec)
    enabled = input_enabledness(impl).weak_may
    if not enabled and not assume_enabled:
        msg = f"implementation {impl.name!r} is not weak may-input-enabled"
        if strict:
            raise NotInputEnabled(msg)
        warnings.warn(msg, InputEnablednessWarning, stacklevel=3)
    return enabled


def _obs_key(aut: IrMia):
    order = {s: n for n, s in enumerate(symbol_order(aut))}
    return lambda o: order[o]


def _check(impl: IrMia, spec: IrMia, conditions: tuple[int, ...], enabled: bool) -> ConformanceVerdict:
    si, ss = _Stepper(impl), _Stepper(spec)
    key = _obs_key(spec)
    start = (si.initial, ss.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        mi, ms = pair
        found = None
        # both conditions can fail on one trace; the missing mandatory
        # observation is the more informative report, so it goes first
        if 2 in conditions and mi - {impl.failure}:
            missing = ss.out(ms, MUST) - si.out(mi, MUST)
            if missing:
                found = (2, min(missing, key=key))
        if found is None and 1 in conditions:
            extra = si.out(mi, MAY) - ss.out(ms, MAY)
            if extra:
                found = (1, min(extra, key=key))
        if found is not None:
            trace = []
            node = pair
            while parent[node] is not None:
                node, sym = parent[node]
                trace.append(sym)
            cond, obs = found
            return ConformanceVerdict(
                False, tuple(reversed(trace)), cond, obs, enabled,
                render_observation(spec, obs))
        for sym in ss.symbols:
            nxt = (si.step(mi, sym), ss.step(ms, sym))
            # a violation needs both sides non-empty
            if nxt[0] and nxt[1] and nxt not in parent:
                parent[nxt] = (pair, sym)
                queue.append(nxt)
    return ConformanceVerdict(True, impl_input_enabled=enabled)


def irioco(impl: IrMia, spec: IrMia, assume_enabled: bool = False, strict: bool = False) -> ConformanceVerdict:
    """Modal conformance: may-out inclusion on spec traces, must-out inclusion on impl traces."""
    enabled = _precheck(impl, spec, assume_enabled, strict)
    return _check(impl, spec, (1, 2), enabled)


def ioco_may(impl: IrMia, spec: IrMia, assume_enabled: bool = False, strict: bool = False) -> ConformanceVerdict:
    """ioco on the may relation: only the may-out inclusion."""
    enabled = _precheck(impl, spec, assume_enabled, strict)
    return _check(impl, spec, (1,), enabled)


def build_unifying_spec(spec: IrMia) -> IrMia:
    """Give every state with only optional outputs a tau-successor that is must-quiescent.

    The fresh successor copies the input edges of its source and has no
    outputs, so it stays must-quiescent while the result still refines
    ``spec`` (a bare sink would drop mandatory inputs).  States with a
    mandatory tau step are left alone: the sink could not follow it.
    """
    edges = list(spec.edges)
    states = [s for s in spec.states if s != spec.failure]
    taken = set(spec.states)
    for q in list(states):
        outs = [e for e in spec.out_edges(q) if e.label in spec.output_set]
        if not outs or any(e.must for e in outs):
            continue
        if any(e.must and e.label == TAU for e in spec.out_edges(q)):
            continue
        fresh = f"{q}_quiet"
        while fresh in taken:
            fresh += "_"
        taken.add(fresh)
        states.append(fresh)
        edges.append(Edge(q, TAU, fresh, Modality.MAY_ONLY))
        edges.extend(Edge(fresh, e.label, e.target, e.modality)
                     for e in spec.out_edges(q) if e.label in spec.input_set)
    states.append(spec.failure)
    return spec.replace(name=spec.name + "_u", states=tuple(states), edges=tuple(edges))
