"""Identification of causal effects ``P_x(y)`` from the observational joint.

:func:`id_algorithm` is the classic recursive identification algorithm.
:func:`pid_algorithm` runs the same recursion but, at every level, first
tries three pruning steps that drop or hide vertices the effect does not
depend on, which usually yields a much shorter formula:

* interceptors -- ancestors of ``y`` reachable only through ``x``,
* connectors -- vertex sets hanging off the rest of the graph by one vertex,
* latent projection -- for a single treatment, vertices that can be treated
  as unobserved without confounding the treatment with its children.

Both return an :class:`IdentifyResult` holding the expression or, when the
effect is not identifiable, a :class:`~causalprune.components.HedgeWitness`,
together with a trace of every step taken.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal, Union

from .components import HedgeWitness, component_of, make_hedge_witness, maximal_c_components
from .expression import (
    Distribution,
    Expression,
    Product,
    Sum,
    Var,
    chain_factorize,
    marginalize,
    metrics,
    rename_bound,
    to_json,
)
from .graph import (
    GraphError,
    Smg,
    ancestors,
    co,
    descendants,
    graphs_equal,
    induced_subgraph,
    latent_project_smg,
    mutilate,
    topological_order,
)

__all__ = [
    "IdentificationError",
    "TraceStep",
    "IdentifyResult",
    "OrderPolicy",
    "id_algorithm",
    "pid_algorithm",
    "identify",
    "prune_interceptors",
    "prune_connectors",
    "prune_latent",
    "latent_candidates",
]

OrderPolicy = Union[Literal["topological", "reverse-topological"], Sequence[str]]

# Lines 3-7 of the plain algorithm are lines 6-10 of the pruning variant,
# which inserts its three pruning steps before them.
_PID_OFFSET = 3


class IdentificationError(ValueError):
    """The query violates the input contract (overlapping or unknown sets)."""


@dataclass(frozen=True)
class TraceStep:
    """One step of the recursion.

    ``line`` is the line of the algorithm that fired, ``depth`` the recursion
    depth and ``vertices`` the set the step acted on (removed vertices,
    added interventions, the projected vertex, the component...).
    """

    depth: int
    line: int
    action: str
    y: tuple[str, ...]
    x: tuple[str, ...]
    vertices: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "line": self.line,
            "action": self.action,
            "y": list(self.y),
            "x": list(self.x),
            "vertices": list(self.vertices),
        }

    def __str__(self) -> str:
        extra = f" {{{', '.join(self.vertices)}}}" if self.vertices else ""
        return (
            f"{'  ' * self.depth}line {self.line}: {self.action}{extra}"
            f"  [y={{{', '.join(self.y)}}}, x={{{', '.join(self.x)}}}]"
        )


@dataclass(frozen=True)
class IdentifyResult:
    y: tuple[str, ...]
    x: tuple[str, ...]
    algorithm: str
    expression: Expression | None = None
    hedge: HedgeWitness | None = None
    trace: tuple[TraceStep, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if (self.expression is None) == (self.hedge is None):
            raise ValueError("a result holds exactly one of an expression and a hedge")

    @property
    def identified(self) -> bool:
        return self.expression is not None

    def to_dict(self, with_metrics: bool = True) -> dict:
        out: dict = {"status": "identified" if self.identified else "fail"}
        if self.identified:
            out["expression"] = to_json(self.expression)
            if with_metrics:
                out["metrics"] = metrics(self.expression).as_dict()
        else:
            out["hedge"] = self.hedge.to_dict()
        out["trace"] = [s.to_dict() for s in self.trace]
        return out


class _Fail(Exception):
    def __init__(self, hedge: HedgeWitness) -> None:
        super().__init__("not identifiable")
        self.hedge = hedge


# -- pruning steps --------------------------------------------------------


def prune_interceptors(y: Iterable[str], x: Iterable[str], g: Smg) -> frozenset[str]:
    """Ancestors of ``y`` that every connecting path reaches through ``x``.

    The set may only be removed when the subgraph without it equals the
    latent projection onto the remaining vertices; checking that is left to
    the caller.
    """
    y, x = g.check(y), g.check(x)
    return ancestors(y, g) - co(y, mutilate(g, bar=x))


def _connector_set(w: str, y: frozenset[str], x: frozenset[str], g: Smg, gx: Smg, dex) -> frozenset[str]:
    # vertices that can reach w without passing through x and are not downstream of x;
    # the outcome itself is never a candidate
    r = ancestors({w}, gx) - dex - y
    if not r:
        return frozenset()
    rest = set(g.vertices) - r
    return r - co(rest, mutilate(g, bar={w})) if rest else frozenset()


def prune_connectors(
    y: Iterable[str], x: Iterable[str], g: Smg, order: Sequence[str] | None = None
) -> frozenset[str]:
    """Vertex sets joined to the rest of the graph only through one vertex.

    For every vertex ``w`` outside ``x`` this collects the ancestors of ``w``
    (ignoring edges into ``x``) that are not descendants of ``x`` and fall
    apart from the other vertices once the edges into ``w`` are cut.
    ``order`` fixes the loop order; the result does not depend on it.
    """
    y, x = g.check(y), g.check(x)
    loop = [v for v in (order if order is not None else g.vertices) if v not in x]
    gx = mutilate(g, bar=x)
    dex = descendants(x, g)
    t: set[str] = set()
    for w in loop:
        t |= _connector_set(w, y, x, g, gx, dex)
    return frozenset(t)


def _treatment_confounds_child(g: Smg, x: str) -> bool:
    block = component_of(g, x)
    return any(c in block for c in g.ch(x))


def latent_candidates(y: Iterable[str], x: Iterable[str], g: Smg, order: OrderPolicy) -> list[str]:
    """Vertices the latent-projection step tries, in the order it tries them.

    ``reverse-topological`` visits causes before effects (sources first);
    ``topological`` visits effects first.  An explicit list is taken as is,
    restricted to eligible vertices still in ``g``; unlisted vertices are
    never projected.
    """
    excluded = set(y) | set(x)
    if isinstance(order, str):
        topo = [v for v in topological_order(g) if v not in excluded]
        if order == "reverse-topological":
            return topo
        if order == "topological":
            return topo[::-1]
        raise ValueError(f"unknown order policy {order!r}")
    return [v for v in dict.fromkeys(order) if v in g.index and v not in excluded]


def _prune_latent(
    y: frozenset[str], x: frozenset[str], d: Distribution, g: Smg, order: OrderPolicy
) -> tuple[Distribution, Smg, list[tuple[str, bool]]]:
    decisions: list[tuple[str, bool]] = []
    if len(x) != 1:
        return d, g, decisions
    (treatment,) = x
    if _treatment_confounds_child(g, treatment):
        return d, g, decisions
    for w in latent_candidates(y, x, g, order):
        projected = latent_project_smg(g, set(g.vertices) - {w})
        accepted = not _treatment_confounds_child(projected, treatment)
        decisions.append((w, accepted))
        if accepted:
            d = marginalize(d, {w})
            g = projected
    return d, g, decisions


def prune_latent(
    y: Iterable[str],
    x: Iterable[str],
    d: Distribution,
    g: Smg,
    order: OrderPolicy = "reverse-topological",
) -> tuple[Distribution, Smg]:
    """Treat as latent every vertex whose projection keeps the single
    treatment free of confounding with its children.

    Candidates are tried one at a time; an accepted projection replaces the
    graph before the next candidate is tried.
    """
    d, g, _ = _prune_latent(g.check(y), g.check(x), d, g, order)
    return d, g


# -- the recursion --------------------------------------------------------


@dataclass
class _Run:
    pruning: bool
    order: OrderPolicy
    # topological order of the input graph; each call uses its restriction
    pi: tuple[str, ...]
    trace: list[TraceStep] = field(default_factory=list)

    def line(self, k: int) -> int:
        """Line number of a step of the plain algorithm in the running variant."""
        return k + _PID_OFFSET if self.pruning and k >= 3 else k

    def log(self, depth: int, line: int, action: str, y, x, g: Smg, vertices=()) -> None:
        self.trace.append(TraceStep(depth, line, action, g.ordered(y), g.ordered(x), g.ordered(vertices)))


def _ordered_vars(names: Iterable[str], order: Sequence[str]) -> tuple[Var, ...]:
    names = set(names)
    return tuple(Var(v) for v in order if v in names)


def _sum(names: Iterable[str], order: Sequence[str], body: Expression) -> Expression:
    bound = _ordered_vars(names, order)
    return Sum(bound, body) if bound else body


def _recurse(
    y: frozenset[str], x: frozenset[str], d: Distribution, g: Smg, run: _Run, depth: int
) -> Expression:
    v = frozenset(g.vertices)

    # line 1: no intervention left, just marginalize
    if not x:
        run.log(depth, 1, "marginalize", y, x, g, v - y)
        return marginalize(d, v - y).expr

    # line 2: only ancestors of y matter
    an = ancestors(y, g)
    if an != v:
        run.log(depth, 2, "restrict-to-ancestors", y, x, g, v - an)
        return _recurse(y, x & an, marginalize(d, v - an), induced_subgraph(g, an), run, depth + 1)

    if run.pruning:
        # line 3: remove ancestors of y that reach it only through x
        z = prune_interceptors(y, x, g)
        if z and graphs_equal(induced_subgraph(g, v - z), latent_project_smg(g, v - z)):
            run.log(depth, 3, "remove-interceptors", y, x, g, z)
            return _recurse(y, x - z, marginalize(d, z), induced_subgraph(g, v - z), run, depth + 1)

        # line 4: remove sets hanging off the graph by a single vertex
        t = prune_connectors(y, x, g)
        if t:
            run.log(depth, 4, "remove-connectors", y, x, g, t)
            return _recurse(y, x, marginalize(d, t), induced_subgraph(g, v - t), run, depth + 1)

        # line 5: make vertices latent while the treatment stays unconfounded with its children
        d, g, decisions = _prune_latent(y, x, d, g, run.order)
        for w, accepted in decisions:
            action = "project-accept" if accepted else "project-reject"
            run.trace.append(TraceStep(depth, 5, action, g.ordered(y), g.ordered(x), (w,)))
        v = frozenset(g.vertices)

    # line 3 of the plain algorithm: intervene on vertices that cannot affect y
    w = (v - x) - ancestors(y, mutilate(g, bar=x))
    if w:
        run.log(depth, run.line(3), "add-interventions", y, x, g, w)
        return _recurse(y, x | w, d, g, run, depth + 1)

    pi = tuple(u for u in run.pi if u in v)
    blocks = maximal_c_components(induced_subgraph(g, v - x)).blocks

    # line 4: factorize over the C-components of the graph without x
    if len(blocks) > 1:
        run.log(depth, run.line(4), "factorize", y, x, g, v - x)
        factors = [_recurse(s, v - s, d, g, run, depth + 1) for s in blocks]
        return _sum(v - (y | x), pi, Product(tuple(factors)))

    (s,) = blocks
    components = maximal_c_components(g).blocks

    # line 5: the whole graph is one C-component -- a hedge
    if len(components) == 1:
        run.log(depth, run.line(5), "fail", y, x, g, s)
        raise _Fail(make_hedge_witness(g, s, y, x))

    # line 6: s is itself a C-component of g
    if s in components:
        run.log(depth, run.line(6), "chain-factorize", y, x, g, s)
        return _sum(s - y, pi, chain_factorize(d, s, pi))

    # line 7: recurse into the C-component containing s
    (s_big,) = [c for c in components if s < c]
    run.log(depth, run.line(7), "restrict-to-component", y, x, g, s_big)
    scope = tuple(u for u in g.vertices if u in s_big)
    d_big = Distribution(chain_factorize(d, s_big, pi), scope, atomic=False)
    return _recurse(y, x & s_big, d_big, induced_subgraph(g, s_big), run, depth + 1)


def _run(y, x, d: Distribution, g: Smg, pruning: bool, order: OrderPolicy) -> IdentifyResult:
    try:
        y, x = g.check(y), g.check(x)
    except GraphError as exc:
        raise IdentificationError(str(exc)) from exc
    if not y:
        raise IdentificationError("the outcome set must be nonempty")
    if x & y:
        raise IdentificationError("treatment and outcome sets overlap")
    if set(d.scope) != set(g.vertices):
        raise IdentificationError("the distribution's scope must match the graph's vertices")
    run = _Run(pruning, order, topological_order(g))
    name = "pid" if pruning else "id"
    try:
        expr = rename_bound(_recurse(y, x, d, g, run, 0))
    except _Fail as fail:
        return IdentifyResult(g.ordered(y), g.ordered(x), name, hedge=fail.hedge, trace=tuple(run.trace))
    return IdentifyResult(g.ordered(y), g.ordered(x), name, expression=expr, trace=tuple(run.trace))


def id_algorithm(y: Iterable[str], x: Iterable[str], d: Distribution, g: Smg) -> IdentifyResult:
    """Identify ``P_x(y)`` with the plain recursive algorithm."""
    return _run(y, x, d, g, pruning=False, order="reverse-topological")


def pid_algorithm(
    y: Iterable[str],
    x: Iterable[str],
    d: Distribution,
    g: Smg,
    order: OrderPolicy = "reverse-topological",
) -> IdentifyResult:
    """Identify ``P_x(y)`` with pruning at every level of the recursion.

    ``order`` controls which vertices the latent-projection step tries
    first; different orders can give different (equally valid) formulas.
    """
    return _run(y, x, d, g, pruning=True, order=order)


def identify(
    g: Smg,
    y: Iterable[str],
    x: Iterable[str] = (),
    algorithm: Literal["id", "pid"] = "pid",
    order: OrderPolicy = "reverse-topological",
) -> IdentifyResult:
    """Identify ``P_x(y)`` from the joint over all vertices of ``g``."""
    d = Distribution.joint(g.vertices)
    if algorithm == "id":
        return id_algorithm(y, x, d, g)
    if algorithm == "pid":
        return pid_algorithm(y, x, d, g, order)
    raise ValueError(f"unknown algorithm {algorithm!r}")
