"""Semi-Markovian graphs: kinship, mutilation, subgraphs and latent projection.

Vertices are plain strings.  A bidirected edge ``A <-> B`` stands for a hidden
common cause of ``A`` and ``B``.  Every set-valued query returns a ``frozenset``;
use :meth:`Smg.ordered` to get a deterministic (insertion order) sequence.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

__all__ = [
    "GraphError",
    "Smg",
    "LatentDag",
    "kin",
    "parents",
    "children",
    "ancestors",
    "descendants",
    "co",
    "induced_subgraph",
    "mutilate",
    "latent_project_dag",
    "latent_project_smg",
    "root_set",
    "topological_order",
    "graphs_equal",
]


class GraphError(ValueError):
    """Malformed graph or a vertex set that does not belong to the graph."""


def _bi(a: str, b: str) -> frozenset[str]:
    return frozenset((a, b))


def _has_cycle(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> bool:
    indeg = {v: 0 for v in vertices}
    out: dict[str, list[str]] = {v: [] for v in indeg}
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    queue = deque(v for v, d in indeg.items() if d == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen != len(indeg)


@dataclass(frozen=True, eq=False)
class Smg:
    """An acyclic mixed graph with directed and bidirected edges.

    Build one with :meth:`from_edges`.  Equality is set equality of the
    vertex and edge sets; the stored vertex order only drives iteration.
    """

    vertices: tuple[str, ...]
    directed: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    bidirected: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError("duplicate vertex labels")
        for a, b in self.directed:
            if a == b:
                raise GraphError(f"self-loop on {a}")
            if a not in vs or b not in vs:
                raise GraphError(f"edge {a} -> {b} has an endpoint outside the graph")
        for e in self.bidirected:
            if len(e) != 2:
                raise GraphError(f"bidirected self-loop on {next(iter(e))}")
            if not e <= vs:
                raise GraphError(f"edge {' <-> '.join(sorted(e))} has an endpoint outside the graph")
        if _has_cycle(self.vertices, self.directed):
            raise GraphError("directed part of the graph has a cycle")

    @classmethod
    def from_edges(
        cls,
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
        vertices: Iterable[str] = (),
    ) -> Smg:
        """Build a graph; vertex order is ``vertices`` first, then first mention."""
        directed = list(directed)
        bidirected = list(bidirected)
        order: dict[str, None] = dict.fromkeys(vertices)
        for a, b in directed:
            order.setdefault(a)
            order.setdefault(b)
        for a, b in bidirected:
            order.setdefault(a)
            order.setdefault(b)
        return cls(
            tuple(order),
            frozenset((a, b) for a, b in directed),
            frozenset(_bi(a, b) for a, b in bidirected),
        )

    # -- adjacency -------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _pa(self) -> dict[str, tuple[str, ...]]:
        pa: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.directed:
            pa[b].append(a)
        return {v: tuple(sorted(p, key=self.index.__getitem__)) for v, p in pa.items()}

    @cached_property
    def _ch(self) -> dict[str, tuple[str, ...]]:
        ch: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.directed:
            ch[a].append(b)
        return {v: tuple(sorted(c, key=self.index.__getitem__)) for v, c in ch.items()}

    @cached_property
    def _sib(self) -> dict[str, tuple[str, ...]]:
        sib: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.bidirected:
            a, b = tuple(e)
            sib[a].append(b)
            sib[b].append(a)
        return {v: tuple(sorted(s, key=self.index.__getitem__)) for v, s in sib.items()}

    def pa(self, v: str) -> tuple[str, ...]:
        """Proper parents of ``v``."""
        return self._pa[v]

    def ch(self, v: str) -> tuple[str, ...]:
        """Proper children of ``v``."""
        return self._ch[v]

    def sib(self, v: str) -> tuple[str, ...]:
        """Vertices joined to ``v`` by a bidirected edge."""
        return self._sib[v]

    def ordered(self, vs: Iterable[str]) -> tuple[str, ...]:
        """``vs`` sorted by insertion order of this graph."""
        return tuple(sorted(set(vs), key=self.index.__getitem__))

    def check(self, vs: Iterable[str]) -> frozenset[str]:
        vs = frozenset(vs)
        unknown = vs - self.index.keys()
        if unknown:
            raise GraphError(f"unknown vertices: {', '.join(sorted(unknown))}")
        return vs

    def directed_edges(self) -> list[tuple[str, str]]:
        return sorted(self.directed, key=lambda e: (self.index[e[0]], self.index[e[1]]))

    def bidirected_edges(self) -> list[tuple[str, str]]:
        pairs = (self.ordered(e) for e in self.bidirected)
        return sorted(pairs, key=lambda e: (self.index[e[0]], self.index[e[1]]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Smg):
            return NotImplemented
        return (
            set(self.vertices) == set(other.vertices)
            and self.directed == other.directed
            and self.bidirected == other.bidirected
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.directed, self.bidirected))

    def __repr__(self) -> str:
        edges = [f"{a}->{b}" for a, b in self.directed_edges()]
        edges += [f"{a}<->{b}" for a, b in self.bidirected_edges()]
        return f"Smg({', '.join(self.vertices)}; {', '.join(edges)})"

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class LatentDag:
    """A DAG whose vertices are split into observed and latent ones."""

    observed: tuple[str, ...]
    latent: tuple[str, ...]
    directed: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        if set(self.observed) & set(self.latent):
            raise GraphError("a vertex cannot be both observed and latent")
        everything = set(self.observed) | set(self.latent)
        for a, b in self.directed:
            if a not in everything or b not in everything:
                raise GraphError(f"edge {a} -> {b} has an endpoint outside the graph")
            if a == b:
                raise GraphError(f"self-loop on {a}")
        if _has_cycle(everything, self.directed):
            raise GraphError("latent DAG has a cycle")

    @classmethod
    def from_edges(cls, directed: Iterable[tuple[str, str]], latent: Iterable[str]) -> LatentDag:
        directed = list(directed)
        latent = tuple(dict.fromkeys(latent))
        order: dict[str, None] = {}
        for a, b in directed:
            order.setdefault(a)
            order.setdefault(b)
        observed = tuple(v for v in order if v not in latent)
        return cls(observed, latent, frozenset(directed))


# -- kinship ------------------------------------------------------------

Kind = Literal["parents", "children", "ancestors", "descendants"]


def _closure(start: Iterable[str], step) -> frozenset[str]:
    seen = set(start)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def kin(kind: Kind, w: Iterable[str], g: Smg) -> frozenset[str]:
    """Parents, children, ancestors or descendants of ``w``, including ``w``."""
    w = g.check(w)
    if kind == "parents":
        return w.union(*(g.pa(v) for v in w))
    if kind == "children":
        return w.union(*(g.ch(v) for v in w))
    if kind == "ancestors":
        return _closure(w, g.pa)
    if kind == "descendants":
        return _closure(w, g.ch)
    raise ValueError(f"unknown kinship kind {kind!r}")


def parents(w: Iterable[str], g: Smg) -> frozenset[str]:
    return kin("parents", w, g)


def children(w: Iterable[str], g: Smg) -> frozenset[str]:
    return kin("children", w, g)


def ancestors(w: Iterable[str], g: Smg) -> frozenset[str]:
    return kin("ancestors", w, g)


def descendants(w: Iterable[str], g: Smg) -> frozenset[str]:
    return kin("descendants", w, g)


def co(w: Iterable[str], g: Smg) -> frozenset[str]:
    """Vertices connected to ``w`` when edge directions are ignored, ``w`` included."""
    w = g.check(w)
    return _closure(w, lambda v: g.pa(v) + g.ch(v) + g.sib(v))


def root_set(g: Smg) -> frozenset[str]:
    return frozenset(v for v in g.vertices if not g.ch(v))


# -- derived graphs -------------------------------------------------------


def induced_subgraph(g: Smg, w: Iterable[str]) -> Smg:
    w = g.check(w)
    return Smg(
        tuple(v for v in g.vertices if v in w),
        frozenset(e for e in g.directed if e[0] in w and e[1] in w),
        frozenset(e for e in g.bidirected if e <= w),
    )


def mutilate(g: Smg, bar: Iterable[str] = (), underbar: Iterable[str] = ()) -> Smg:
    """Remove edges into ``bar`` and directed edges out of ``underbar``.

    A bidirected edge has an arrowhead at both ends, so it is removed when
    either endpoint is in ``bar``; ``underbar`` never removes one.
    """
    bar = g.check(bar)
    underbar = g.check(underbar)
    if not bar and not underbar:
        return g
    return Smg(
        g.vertices,
        frozenset((a, b) for a, b in g.directed if b not in bar and a not in underbar),
        frozenset(e for e in g.bidirected if not e & bar),
    )


def latent_project_dag(g: LatentDag, v: Iterable[str] | None = None) -> Smg:
    """Project a DAG with latent vertices onto its observed vertices."""
    if v is not None and set(v) != set(g.observed):
        raise GraphError("projection set must equal the observed vertex set")
    observed = set(g.observed)
    ch: dict[str, list[str]] = {}
    for a, b in g.directed:
        ch.setdefault(a, []).append(b)

    def reach(start: str) -> set[str]:
        # observed vertices reachable along directed paths whose interior is latent
        found: set[str] = set()
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in ch.get(u, ()):
                if w in observed:
                    found.add(w)
                elif w not in seen:
                    seen.add(w)
                    stack.append(w)
        return found

    directed = {(a, b) for a in g.observed for b in reach(a)}
    bidirected: set[frozenset[str]] = set()
    for u in g.latent:
        hit = sorted(reach(u))
        for i, a in enumerate(hit):
            for b in hit[i + 1 :]:
                bidirected.add(_bi(a, b))
    return Smg(g.observed, frozenset(directed), frozenset(bidirected))


def latent_project_smg(g: Smg, v: Iterable[str]) -> Smg:
    """The latent projection of ``g`` onto ``v``.

    Each bidirected edge is expanded to an explicit latent parent and every
    vertex outside ``v`` becomes latent before projecting.
    """
    v = g.check(v)
    if v == set(g.vertices):
        return g
    directed = set(g.directed)
    latent = [u for u in g.vertices if u not in v]
    for a, b in g.bidirected_edges():
        u = f"U[{a},{b}]"
        latent.append(u)
        directed.add((u, a))
        directed.add((u, b))
    observed = tuple(u for u in g.vertices if u in v)
    return latent_project_dag(LatentDag(observed, tuple(latent), frozenset(directed)))


def topological_order(g: Smg) -> tuple[str, ...]:
    """Kahn's algorithm with a FIFO queue.

    Sources enter the queue in insertion order and children are released in
    insertion order, which makes the result deterministic.
    """
    indeg = {v: len(g.pa(v)) for v in g.vertices}
    queue = deque(v for v in g.vertices if indeg[v] == 0)
    out = []
    while queue:
        v = queue.popleft()
        out.append(v)
        for w in g.ch(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return tuple(out)


def graphs_equal(g1: Smg, g2: Smg) -> bool:
    return g1 == g2
