"""Demonic completion: send every input a state does not guarantee to a chaos pair."""

from __future__ import annotations

from .model import MUST, TAU, Edge, IrMia, Modality, require_valid


class CompletionError(ValueError):
    pass


def fresh_name(taken, base: str) -> str:
    name, n = base, 1
    while name in taken:
        n += 1
        name = f"{base}{n}"
    return name


def demonic_completion(aut: IrMia, chi: str = "q_chi", omega: str = "q_omega") -> IrMia:
    require_valid(aut)
    bad = [q for q in aut.states if aut.enables(q, TAU) and not aut.enables(q, TAU, MUST)]
    if bad:
        raise CompletionError(
            f"states {bad} have an optional tau step without a mandatory one")
    chi = fresh_name(aut.index, chi)
    omega = fresh_name(set(aut.index) | {chi}, omega)
    edges = list(aut.edges)
    for q in aut.states:
        # the failure state must keep no outgoing edges
        if q == aut.failure or aut.enables(q, TAU, MUST):
            continue
        edges.extend(Edge(q, i, chi, Modality.MUST)
                     for i in aut.inputs if not aut.enables(q, i, MUST))
    edges.append(Edge(chi, TAU, omega, Modality.MUST))
    for i in aut.inputs:
        edges.append(Edge(chi, i, chi, Modality.MUST))
        edges.append(Edge(omega, i, omega, Modality.MUST))
    for a in aut.inputs + aut.outputs:
        edges.append(Edge(omega, a, chi, Modality.MAY_ONLY))
    states = [s for s in aut.states if s != aut.failure] + [chi, omega, aut.failure]
    return aut.replace(states=tuple(states), edges=tuple(edges))
