"""Structural isomorphism of IR-MIA (alphabets, roles, labels and modalities)."""

from __future__ import annotations

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .model import IrMia


def _graph(aut: IrMia) -> nx.DiGraph:
    g = nx.DiGraph()
    for s in aut.states:
        g.add_node(s, role=(s == aut.initial, s == aut.failure))
    labels: dict[tuple[str, str], set] = {}
    for e in aut.edges:
        labels.setdefault((e.source, e.target), set()).add((e.label, e.modality.value))
    for (s, t), ls in labels.items():
        g.add_edge(s, t, labels=frozenset(ls))
    return g


def find_isomorphism(a: IrMia, b: IrMia) -> dict[str, str] | None:
    """A state bijection from ``a`` to ``b`` or None."""
    if a.input_set != b.input_set or a.output_set != b.output_set:
        return None
    if len(a.states) != len(b.states) or len(a.edges) != len(b.edges):
        return None
    matcher = DiGraphMatcher(
        _graph(a), _graph(b),
        node_match=lambda x, y: x["role"] == y["role"],
        edge_match=lambda x, y: x["labels"] == y["labels"],
    )
    for mapping in matcher.isomorphisms_iter():
        return {s: mapping[s] for s in a.states}
    return None


def isomorphic(a: IrMia, b: IrMia) -> bool:
    return find_isomorphism(a, b) is not None
