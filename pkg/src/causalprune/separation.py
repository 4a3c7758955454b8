"""d-separation in graphs with directed and bidirected edges.

A bidirected edge has an arrowhead at both ends.  On a path, a vertex whose
two incident edges both point into it is a collider; it lets the path through
only when it or one of its descendants is conditioned on.  Every other
vertex lets the path through only when it is *not* conditioned on.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from .graph import GraphError, Smg, ancestors

__all__ = ["d_separated", "d_connected_paths"]


def _steps(g: Smg, v: str) -> Iterator[tuple[str, bool, bool]]:
    """Edges leaving ``v`` as ``(neighbour, head at v, head at neighbour)``."""
    for w in g.ch(v):
        yield w, False, True
    for w in g.pa(v):
        yield w, True, False
    for w in g.sib(v):
        yield w, True, True


def _validate(g: Smg, x: Iterable[str], y: Iterable[str], z: Iterable[str]):
    x, y, z = g.check(x), g.check(y), g.check(z)
    if not x or not y:
        raise GraphError("both end sets of a d-separation query must be nonempty")
    if x & y or x & z or y & z:
        raise GraphError("the sets of a d-separation query must be pairwise disjoint")
    return x, y, z


def d_separated(g: Smg, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> bool:
    """True iff every path between ``x`` and ``y`` is blocked by ``z``.

    Runs a reachability search over (vertex, entered-through-an-arrowhead)
    states, which is linear in the number of edges.
    """
    x, y, z = _validate(g, x, y, z)
    open_colliders = ancestors(z, g) if z else frozenset()
    seen: set[tuple[str, bool]] = set()
    stack: list[tuple[str, bool]] = []
    for s in x:
        for w, _, head in _steps(g, s):
            stack.append((w, head))
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        v, entered_head = state
        if v in y:
            return False
        for w, leaves_head, head in _steps(g, v):
            collider = entered_head and leaves_head
            if collider and v not in open_colliders:
                continue
            if not collider and v in z:
                continue
            stack.append((w, head))
    return True


def d_connected_paths(
    g: Smg, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()
) -> Iterator[list[str]]:
    """Every simple path between ``x`` and ``y`` that ``z`` leaves open.

    Exponential; meant as a brute-force reference on small graphs.
    """
    x, y, z = _validate(g, x, y, z)
    open_colliders = ancestors(z, g) if z else frozenset()

    def extend(path: list[str], entered_head: bool) -> Iterator[list[str]]:
        v = path[-1]
        if v in y:
            yield list(path)
            return
        for w, leaves_head, head in _steps(g, v):
            if w in path:
                continue
            if len(path) > 1:
                collider = entered_head and leaves_head
                if collider and v not in open_colliders:
                    continue
                if not collider and v in z:
                    continue
            path.append(w)
            yield from extend(path, head)
            path.pop()

    for s in g.ordered(x):
        yield from extend([s], False)
