"""Core IR-MIA representation and well-formedness checks.

An automaton stores each edge once with a single modality tag.  MUST edges
belong to both the must and the may relation, MAY_ONLY edges only to the may
relation, so the must relation is a subset of the may relation by
construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

TAU = "tau"
DELTA = "delta"
PHI = "phi"
RESERVED = frozenset({TAU, DELTA, PHI})
DEFAULT_FAILURE = "_PHI"


class Modality(enum.Enum):
    """Tag carried by a stored edge."""

    MUST = "must"
    MAY_ONLY = "may"


class Rel(enum.Enum):
    """Selects one of the two transition relations (the gamma of the theory)."""

    MAY = "may"
    MUST = "must"

    def admits(self, modality: Modality) -> bool:
        return self is Rel.MAY or modality is Modality.MUST


MAY = Rel.MAY
MUST = Rel.MUST


class InvalidAutomaton(ValueError):
    """Raised when an operation receives an automaton that fails validation."""

    def __init__(self, name: str, violations: Sequence["Violation"]):
        self.violations = tuple(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"automaton {name!r} is not a valid IR-MIA: {lines}")


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    label: str
    target: str
    modality: Modality = field(compare=False)

    @property
    def must(self) -> bool:
        return self.modality is Modality.MUST

    def __str__(self) -> str:
        return f"{self.modality.value} {self.source} {self.label} {self.target}"


@dataclass(frozen=True)
class Violation:
    """One failed well-formedness rule.

    ``rule`` is the clause number of the IR-MIA definition ("1", "2", "4",
    "5"), ``"convergence"`` for a may-tau cycle, or ``"structure"`` for
    alphabet/state bookkeeping errors.
    """

    rule: str
    message: str
    state: str | None = None
    edge: Edge | None = None

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


def _unique(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class IrMia:
    """A modal interface automaton with input refusal.

    ``states`` is ordered; that order drives every deterministic output of the
    library.  Edges are normalised on construction: duplicates collapse and a
    MAY_ONLY copy of a MUST edge is dropped.
    """

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    failure: str = DEFAULT_FAILURE
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "inputs", _unique(self.inputs))
        set_(self, "outputs", _unique(self.outputs))
        states = list(_unique(self.states))
        for extra in (self.initial, self.failure):
            if extra not in states:
                states.append(extra)
        set_(self, "states", tuple(states))
        strongest: dict[tuple[str, str, str], Modality] = {}
        for e in self.edges:
            key = (e.source, e.label, e.target)
            if strongest.get(key) is not Modality.MUST:
                strongest[key] = e.modality
        index = {s: n for n, s in enumerate(states)}
        big = len(states)
        ordered = sorted(
            strongest.items(),
            key=lambda kv: (index.get(kv[0][0], big), kv[0][0], kv[0][1],
                            index.get(kv[0][2], big), kv[0][2]),
        )
        set_(self, "edges", tuple(Edge(s, a, t, m) for (s, a, t), m in ordered))

    # -- alphabet helpers -------------------------------------------------
    @cached_property
    def input_set(self) -> frozenset[str]:
        return frozenset(self.inputs)

    @cached_property
    def output_set(self) -> frozenset[str]:
        return frozenset(self.outputs)

    @cached_property
    def actions(self) -> frozenset[str]:
        return self.input_set | self.output_set

    def is_input(self, label: str) -> bool:
        return label in self.input_set

    def is_output(self, label: str) -> bool:
        return label in self.output_set

    # -- indexes ----------------------------------------------------------
    @cached_property
    def index(self) -> Mapping[str, int]:
        return {s: n for n, s in enumerate(self.states)}

    @cached_property
    def _succ(self) -> dict[str, dict[str, list[Edge]]]:
        table: dict[str, dict[str, list[Edge]]] = {s: {} for s in self.states}
        for e in self.edges:
            table.setdefault(e.source, {}).setdefault(e.label, []).append(e)
        return table

    @cached_property
    def may_failure_targets(self) -> frozenset[str]:
        # states entered by some optional input edge
        return frozenset(
            e.target for e in self.edges
            if e.modality is Modality.MAY_ONLY and e.label in self.input_set
        )

    def out_edges(self, state: str, rel: Rel = MAY) -> Iterator[Edge]:
        for edges in self._succ.get(state, {}).values():
            for e in edges:
                if rel.admits(e.modality):
                    yield e

    def succ(self, state: str, label: str, rel: Rel = MAY) -> tuple[str, ...]:
        return tuple(
            e.target for e in self._succ.get(state, {}).get(label, ())
            if rel.admits(e.modality)
        )

    def enables(self, state: str, label: str, rel: Rel = MAY) -> bool:
        return any(rel.admits(e.modality) for e in self._succ.get(state, {}).get(label, ()))

    def labels_at(self, state: str, rel: Rel = MAY) -> tuple[str, ...]:
        return tuple(
            a for a, es in self._succ.get(state, {}).items()
            if any(rel.admits(e.modality) for e in es)
        )

    def refuses(self, state: str, label: str) -> bool:
        """True if ``label`` leads from ``state`` into the failure state."""
        return any(e.target == self.failure for e in self._succ.get(state, {}).get(label, ()))

    def ordered(self, states: Iterable[str]) -> tuple[str, ...]:
        idx = self.index
        return tuple(sorted(set(states), key=lambda s: idx.get(s, len(idx))))

    def check_state(self, state: str) -> None:
        if state not in self.index:
            raise KeyError(f"unknown state {state!r} in {self.name!r}")

    # -- derived automata -------------------------------------------------
    def replace(self, **changes) -> "IrMia":
        data = dict(
            name=self.name, inputs=self.inputs, outputs=self.outputs,
            states=self.states, initial=self.initial, failure=self.failure,
            edges=self.edges,
        )
        data.update(changes)
        return IrMia(**data)

    def restrict(self, keep: Iterable[str]) -> "IrMia":
        """Sub-automaton on ``keep`` (initial and failure always kept)."""
        keep = set(keep) | {self.initial, self.failure}
        return self.replace(
            states=tuple(s for s in self.states if s in keep),
            edges=tuple(e for e in self.edges if e.source in keep and e.target in keep),
        )

    def reachable(self) -> tuple[str, ...]:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            s = stack.pop()
            for e in self.out_edges(s):
                if e.target not in seen:
                    seen.add(e.target)
                    stack.append(e.target)
        return self.ordered(seen)

    def trim(self) -> "IrMia":
        return self.restrict(self.reachable())

    def __str__(self) -> str:
        return f"IrMia({self.name}, {len(self.states)} states, {len(self.edges)} edges)"


def validate(aut: IrMia) -> list[Violation]:
    """Return every well-formedness violation of ``aut`` (empty when valid)."""
    out: list[Violation] = []
    ins, outs = aut.input_set, aut.output_set
    for a in sorted(ins & outs):
        out.append(Violation("structure", f"action {a!r} is both input and output"))
    for a in sorted((ins | outs) & RESERVED):
        out.append(Violation("structure", f"reserved name {a!r} used as an action"))
    if aut.initial == aut.failure:
        # allowed by the tuple shape, but then nothing can happen
        pass
    known = aut.index
    for e in aut.edges:
        if e.source not in known or e.target not in known:
            out.append(Violation("structure", f"edge {e} mentions an undeclared state", edge=e))
            continue
        if e.label != TAU and e.label not in ins and e.label not in outs:
            out.append(Violation("structure", f"edge {e} uses a label outside the alphabet", edge=e))
            continue
        clause = "1" if e.must else "2"
        if e.source == aut.failure:
            out.append(Violation(clause, f"edge {e} leaves the failure state", e.source, e))
        elif e.target == aut.failure and e.label not in ins:
            out.append(Violation(clause, f"output/tau edge {e} enters the failure state", e.source, e))
        elif e.target == aut.failure and not e.must:
            out.append(Violation("4", f"optional input edge {e} enters the failure state", e.source, e))
    for s in aut.states:
        if s == aut.failure:
            continue
        for a in aut.labels_at(s):
            if a not in ins:
                continue
            edges = aut._succ[s][a]
            if any(e.target == aut.failure and e.must for e in edges):
                stray = [e for e in edges if e.target != aut.failure]
                for e in stray:
                    out.append(Violation(
                        "5", f"state {s!r} refuses {a!r} but also has {e}", s, e))
    cycle = may_tau_cycle(aut)
    if cycle:
        out.append(Violation(
            "convergence", "may-tau cycle through " + " -> ".join(cycle), cycle[0]))
    return out


def may_tau_cycle(aut: IrMia) -> list[str] | None:
    """A cycle of tau edges (any modality), or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {s: WHITE for s in aut.states}
    for root in aut.states:
        if colour[root] != WHITE:
            continue
        path = [root]
        colour[root] = GREY
        stack = [iter(aut.succ(root, TAU))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                colour[path.pop()] = BLACK
                stack.pop()
                continue
            if colour.get(nxt) == GREY:
                return path[path.index(nxt):] + [nxt]
            if colour.get(nxt) == WHITE:
                colour[nxt] = GREY
                path.append(nxt)
                stack.append(iter(aut.succ(nxt, TAU)))
    return None


def require_valid(aut: IrMia) -> IrMia:
    problems = validate(aut)
    if problems:
        raise InvalidAutomaton(aut.name, problems)
    return aut


def same_alphabet(a: IrMia, b: IrMia) -> bool:
    return a.input_set == b.input_set and a.output_set == b.output_set


def require_same_alphabet(a: IrMia, b: IrMia) -> None:
    if not same_alphabet(a, b):
        raise AlphabetMismatch(
            f"{a.name!r} has I={sorted(a.input_set)} O={sorted(a.output_set)} but "
            f"{b.name!r} has I={sorted(b.input_set)} O={sorted(b.output_set)}")


def build(
    name: str,
    inputs: Iterable[str],
    outputs: Iterable[str],
    edges: Iterable[tuple[str, str, str, str]],
    initial: str | None = None,
    states: Iterable[str] = (),
    failure: str = DEFAULT_FAILURE,
) -> IrMia:
    """Convenience constructor from ``(modality, source, label, target)`` rows.

    ``modality`` is ``"must"`` or ``"may"``; states are declared in order of
    first appearance unless ``states`` lists them up front.
    """
    rows = [(Modality(m), s, a, t) for m, s, a, t in edges]
    order = list(states)
    for _, s, _, t in rows:
        order.extend((s, t))
    if initial is None:
        initial = order[0] if order else "q0"
    order.insert(0, initial)
    order = [s for s in _unique(order) if s != failure]
    order.append(failure)
    return IrMia(
        name=name, inputs=tuple(inputs), outputs=tuple(outputs), states=tuple(order),
        initial=initial, failure=failure,
        edges=tuple(Edge(s, a, t, m) for m, s, a, t in rows),
    )
