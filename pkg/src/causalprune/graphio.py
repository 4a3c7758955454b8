"""Plain-text graph files.

One statement per line::

    # a comment
    X -> Z          directed edge
    X <-> Y         bidirected edge (hidden common cause)
    latent U1 U2    marks vertices as unobserved; the file is then a latent DAG

A line holding a single vertex name declares the vertex without edges.
Vertex order is the order of first mention, which fixes tie-breaking in every
algorithm.  Repeated edges are accepted with a warning.
"""

from __future__ import annotations

import re
import warnings
from pathlib import Path

from .graph import GraphError, LatentDag, Smg

__all__ = ["GraphSyntaxError", "parse_graph", "parse_graph_file", "format_graph"]

_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_EDGE = re.compile(rf"^({_NAME})\s*(<->|->)\s*({_NAME})$")
_LATENT = re.compile(rf"^latent((?:\s+{_NAME})+)$")
_VERTEX = re.compile(rf"^({_NAME})$")


class GraphSyntaxError(GraphError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_graph(text: str) -> Smg | LatentDag:
    """Parse graph text into an :class:`Smg`, or a :class:`LatentDag` when a
    ``latent`` line is present."""
    order: dict[str, None] = {}
    directed: dict[tuple[str, str], None] = {}
    bidirected: dict[frozenset[str], tuple[str, str]] = {}
    latent: dict[str, None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _LATENT.match(line):
            for name in m.group(1).split():
                latent.setdefault(name)
            continue
        if m := _VERTEX.match(line):
            order.setdefault(m.group(1))
            continue
        m = _EDGE.match(line)
        if not m:
            raise GraphSyntaxError(lineno, f"cannot parse {line!r}")
        a, arrow, b = m.groups()
        if a == b:
            raise GraphSyntaxError(lineno, f"self-loop on {a}")
        order.setdefault(a)
        order.setdefault(b)
        if arrow == "->":
            if (a, b) in directed:
                warnings.warn(f"line {lineno}: duplicate edge {a} -> {b}", stacklevel=2)
            directed.setdefault((a, b))
        else:
            key = frozenset((a, b))
            if key in bidirected:
                warnings.warn(f"line {lineno}: duplicate edge {a} <-> {b}", stacklevel=2)
            bidirected.setdefault(key, (a, b))
    for name in latent:
        order.setdefault(name)
    if not order:
        raise GraphError("no vertices")
    if latent:
        if bidirected:
            raise GraphError("bidirected edges are not allowed in a latent DAG; use an explicit latent parent")
        observed = tuple(v for v in order if v not in latent)
        return LatentDag(observed, tuple(latent), frozenset(directed))
    return Smg.from_edges(list(directed), list(bidirected.values()), vertices=order)


def parse_graph_file(path: str | Path) -> Smg | LatentDag:
    return parse_graph(Path(path).read_text())


def format_graph(g: Smg) -> str:
    """Render ``g`` in the text format.

    Vertices are declared first so that parsing the result reproduces the
    vertex order as well as the edges.
    """
    lines = list(g.vertices)
    lines += [f"{a} -> {b}" for a, b in g.directed_edges()]
    lines += [f"{a} <-> {b}" for a, b in g.bidirected_edges()]
    return "\n".join(lines) + "\n"
