"""C-components (districts) and hedge witnesses.

A C-component is a set of vertices joined by paths made only of bidirected
edges.  The maximal ones partition the graph, and the observational joint
factorizes over them.  A hedge is a pair of nested C-forests proving that a
causal effect cannot be computed from observational data.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from .graph import Smg, ancestors, induced_subgraph, mutilate, root_set, topological_order

__all__ = [
    "CComponentPartition",
    "HedgeWitness",
    "maximal_c_components",
    "component_of",
    "is_c_component",
    "is_c_forest",
    "make_hedge_witness",
]


@dataclass(frozen=True)
class CComponentPartition:
    """Maximal C-components of ``graph``.

    Blocks are ordered by their earliest vertex in the graph's topological
    order, so causes come before effects.
    """

    graph: Smg
    blocks: tuple[frozenset[str], ...]

    def subgraphs(self) -> list[Smg]:
        return [induced_subgraph(self.graph, b) for b in self.blocks]

    def block_of(self, v: str) -> frozenset[str]:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


def maximal_c_components(g: Smg) -> CComponentPartition:
    blocks: list[frozenset[str]] = []
    assigned: set[str] = set()
    for v in topological_order(g):
        if v in assigned:
            continue
        block = {v}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in g.sib(u):
                if w not in block:
                    block.add(w)
                    queue.append(w)
        assigned |= block
        blocks.append(frozenset(block))
    return CComponentPartition(g, tuple(blocks))


def component_of(g: Smg, v: str) -> frozenset[str]:
    """The maximal C-component containing ``v``."""
    return maximal_c_components(g).block_of(v)


def is_c_component(g: Smg) -> bool:
    return len(g) > 0 and len(maximal_c_components(g)) == 1


def is_c_forest(g: Smg) -> bool:
    """A C-component in which every vertex has at most one child."""
    return is_c_component(g) and all(len(g.ch(v)) <= 1 for v in g.vertices)


@dataclass(frozen=True)
class HedgeWitness:
    """Two C-forests ``f`` and ``fprime`` sharing the root set ``roots``.

    ``fprime`` avoids the intervention while ``f`` contains it; together they
    show the effect is not identifiable.
    """

    f: Smg
    fprime: Smg
    roots: frozenset[str]

    def to_dict(self) -> dict:
        def edges(g: Smg) -> dict:
            return {
                "vertices": list(g.vertices),
                "directed": [list(e) for e in g.directed_edges()],
                "bidirected": [list(e) for e in g.bidirected_edges()],
            }

        return {"F": edges(self.f), "Fprime": edges(self.fprime), "roots": list(self.f.ordered(self.roots))}


def _forest_edges(g: Smg, sources: Iterable[str], members: Iterable[str]) -> set[tuple[str, str]]:
    """One outgoing edge per member, each leading one step closer to ``sources``.

    Breadth-first search backwards along directed edges; every member reached
    keeps the edge through which it was first discovered.
    """
    members = set(members)
    seen = set(sources)
    queue = deque(g.ordered(seen))
    kept: set[tuple[str, str]] = set()
    while queue:
        v = queue.popleft()
        for u in g.pa(v):
            if u in members and u not in seen:
                seen.add(u)
                kept.add((u, v))
                queue.append(u)
    return kept


def make_hedge_witness(g: Smg, s: Iterable[str], y: Iterable[str], x: Iterable[str]) -> HedgeWitness:
    """Build the hedge found when identification fails.

    ``g`` must be a single C-component and ``s`` the single C-component of
    ``g`` without ``x``.  The smaller forest is ``g[s]`` trimmed so that
    each vertex keeps one edge towards the root set of ``g[s]``; the larger
    one adds the remaining vertices, each with one edge towards ``s``.
    """
    s, y, x = g.check(s), g.check(y), g.check(x)
    if not is_c_component(g) or not is_c_component(induced_subgraph(g, s)):
        raise AssertionError("hedge requested outside the failure state")
    gs = induced_subgraph(g, s)
    roots = root_set(gs)
    inner = _forest_edges(gs, roots, s)
    outer = inner | _forest_edges(g, s, set(g.vertices) - s)
    fprime = Smg(gs.vertices, frozenset(inner), gs.bidirected)
    f = Smg(g.vertices, frozenset(outer), g.bidirected)
    witness = HedgeWitness(f, fprime, roots)
    _check_witness(witness, g, y, x)
    return witness


def _check_witness(w: HedgeWitness, g: Smg, y: frozenset[str], x: frozenset[str]) -> None:
    if not (is_c_forest(w.f) and is_c_forest(w.fprime)):
        raise AssertionError("hedge members are not C-forests")
    if root_set(w.f) != w.roots or root_set(w.fprime) != w.roots:
        raise AssertionError("hedge members do not share their root set")
    if not set(w.f.vertices) & x or set(w.fprime.vertices) & x:
        raise AssertionError("hedge does not separate the intervention")
    if not w.roots <= ancestors(y, mutilate(g, x)):
        raise AssertionError("hedge roots are not ancestors of the outcome")
