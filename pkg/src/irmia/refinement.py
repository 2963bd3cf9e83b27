"""Modal refinement with input refusal, decided as a greatest fixpoint.

The candidate relation starts with every pair of non-failure states; pairs
whose implementation side is the failure state are always related and are
never stored.  Pairs violating one of the six clauses are pruned round by
round until nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

from .model import MAY, MUST, IrMia, require_same_alphabet, require_valid
from .semantics import closure_set, strong_then_eps_set, weak_succ_set

Pair = tuple[str, str]


@dataclass(frozen=True)
class RefinementCounterexample:
    pair: Pair
    clause: int
    action: str | None

    def __str__(self) -> str:
        act = "" if self.action is None else f" on {self.action}"
        return f"clause {self.clause} fails at {self.pair}{act}"


@dataclass(frozen=True)
class RefinementVerdict:
    holds: bool
    witness: frozenset[Pair] = frozenset()
    counterexample: RefinementCounterexample | None = None

    def __bool__(self) -> bool:
        return self.holds


class _Game:
    """Clause evaluation for one (impl, spec) pair of automata."""

    def __init__(self, impl: IrMia, spec: IrMia):
        self.impl, self.spec = impl, spec
        self.p_fail, self.q_fail = impl.failure, spec.failure
        self.must_i_eps = lru_cache(None)(
            lambda p, i: closure_set(impl, impl.succ(p, i, MUST), MUST))
        self.may_i_eps_impl = lru_cache(None)(lambda p, i: strong_then_eps_set(impl, p, i, MAY))
        self.may_i_eps_spec = lru_cache(None)(lambda q, i: strong_then_eps_set(spec, q, i, MAY))
        self.weak_must_impl = lru_cache(None)(lambda p, w: weak_succ_set(impl, p, w, MUST))
        self.weak_may_spec = lru_cache(None)(lambda q, w: weak_succ_set(spec, q, w, MAY))

    def obligations(self, p: str, q: str) -> Iterator[tuple[int, str | None, list[Pair]]]:
        """Each obligation of the pair as (clause, action, candidate partner pairs).

        The obligation is met iff some candidate is related.  Clause 1 is
        reported with an empty candidate list.
        """
        impl, spec = self.impl, self.spec
        if q == self.q_fail:
            yield 1, None, []
            return
        for e in spec.out_edges(q, MUST):
            if e.label in spec.input_set and e.target != self.q_fail:
                cands = [(p2, e.target) for p2 in impl.ordered(self.must_i_eps(p, e.label))
                         if p2 != self.p_fail]
                yield 2, e.label, cands
        for e in spec.out_edges(q, MUST):
            if e.label not in spec.input_set:
                w = e.label
                cands = [(p2, e.target) for p2 in impl.ordered(self.weak_must_impl(p, w))]
                yield 3, e.label, cands
        for e in impl.out_edges(p, MAY):
            if e.label in impl.input_set and spec.enables(q, e.label, MAY):
                cands = [(e.target, q2) for q2 in spec.ordered(self.may_i_eps_spec(q, e.label))]
                yield 4, e.label, cands
        for e in spec.out_edges(q, MAY):
            if e.label in spec.input_set:
                cands = [(p2, e.target) for p2 in impl.ordered(self.may_i_eps_impl(p, e.label))]
                yield 5, e.label, cands
        for e in impl.out_edges(p, MAY):
            if e.label not in impl.input_set:
                cands = [(e.target, q2) for q2 in spec.ordered(self.weak_may_spec(q, e.label))]
                yield 6, e.label, cands

    def first_violation(self, p: str, q: str, related: Callable[[Pair], bool]):
        for clause, action, cands in self.obligations(p, q):
            if not any(related(c) for c in cands):
                return clause, action, cands
        return None


def refines(impl: IrMia, spec: IrMia) -> RefinementVerdict:
    """Decide ``impl`` refines ``spec``; returns the largest relation as witness."""
    require_valid(impl)
    require_valid(spec)
    require_same_alphabet(impl, spec)
    game = _Game(impl, spec)
    p_fail = impl.failure
    rel = {(p, q) for p in impl.states if p != p_fail
           for q in spec.states if q != spec.failure}

    def related(pair: Pair) -> bool:
        return pair[0] == p_fail or pair in rel

    removed_at: dict[Pair, int] = {}
    rnd = 0
    order = sorted(rel, key=lambda pq: (impl.index[pq[0]], spec.index[pq[1]]))
    while True:
        rnd += 1
        doomed = [pq for pq in order if pq in rel and game.first_violation(*pq, related)]
        if not doomed:
            break
        for pq in doomed:
            rel.discard(pq)
            removed_at[pq] = rnd
    start = (impl.initial, spec.initial)
    witness = frozenset(rel | {(p_fail, q) for q in spec.states})
    if related(start):
        return RefinementVerdict(True, witness)
    return RefinementVerdict(False, counterexample=_explain(game, start, removed_at))


def _explain(game: _Game, start: Pair, removed_at: dict[Pair, int]) -> RefinementCounterexample:
    # Replay the pruning: a pair removed in round r violates some obligation
    # against the relation of round r-1, whose candidates all went earlier.
    # Following the latest-removed candidate therefore terminates.
    never = float("inf")
    current = start
    while True:
        rnd = removed_at[current]

        def related(pair: Pair, rnd=rnd) -> bool:
            if pair[0] == game.p_fail:
                return True
            return removed_at.get(pair, 0 if pair[1] == game.q_fail else never) >= rnd

        clause, action, cands = game.first_violation(*current, related)
        genuine = [c for c in cands if c in removed_at]
        if not genuine:
            return RefinementCounterexample(current, clause, action)
        current = max(genuine, key=lambda c: removed_at[c])


def replay(impl: IrMia, spec: IrMia, verdict: RefinementVerdict) -> bool:
    """True iff the reported obligation really fails against the final relation."""
    if verdict.holds or verdict.counterexample is None:
        return False
    full = refines(impl, spec)
    game = _Game(impl, spec)
    rel = set(full.witness)

    def related(pair: Pair) -> bool:
        return pair[0] == impl.failure or pair in rel

    cx = verdict.counterexample
    return any(clause == cx.clause and action == cx.action and not any(map(related, cands))
               for clause, action, cands in game.obligations(*cx.pair))
