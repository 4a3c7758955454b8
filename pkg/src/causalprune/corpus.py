"""Reference graphs and the formulas published for them.

Each :class:`Example` bundles a graph (in the text format of
:mod:`causalprune.graphio`), a query ``P_x(y)`` and, where known, the
expected output of the plain and the pruning algorithm written in the text
expression syntax.  Edge lines follow the order in which the original
drawings list them; that order fixes vertex insertion order and thereby the
tie-breaks of the topological sort, which shape the conditioning sets.

Examples (``*-reduced`` / ``*-subgraph`` / ``*-projection`` variants are the
graphs left after the corresponding pruning step):

``showcase``
    Eight variables where all three pruning steps fire; plain
    identification yields a long ratio, pruning a short front-door-like sum.
``interceptor-front-door``, ``front-door``
    Removing ancestors that reach ``Y`` only through ``X`` leaves the
    front-door graph.
``multi-treatment``
    Three treatments, two outcomes; the removed ancestor is itself treated.
``guard``
    Interceptor removal must be refused: the subgraph differs from the
    projection, and the projection's effect is not identifiable.
``connector-front-door``, ``connector-ratio``
    A set attached to the rest of the graph through one vertex is removed.
``latent``
    A mediator can be projected away while the treatment stays unconfounded
    with its child.
``order-sensitive``
    The latent-projection order decides between a front-door and a
    back-door formula.
``nested-ratio``, ``nested-treatment``, ``nested-mediator``
    Pruning only becomes possible inside the recursion.
``bow``
    ``X -> Y`` with ``X <-> Y``: the smallest non-identifiable effect.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expression import Expression, parse
from .graph import LatentDag, Smg
from .graphio import parse_graph

__all__ = ["Example", "EXAMPLES", "example", "graph", "showcase_dag"]


@dataclass(frozen=True)
class Example:
    name: str
    text: str
    y: tuple[str, ...] = ("Y",)
    x: tuple[str, ...] = ("X",)
    id_formula: str | None = None
    pid_formula: str | None = None

    @property
    def graph(self) -> Smg:
        g = parse_graph(self.text)
        assert isinstance(g, Smg)
        return g

    def expected(self, algorithm: str) -> Expression | None:
        text = self.id_formula if algorithm == "id" else self.pid_formula
        return parse(text) if text else None


SHOWCASE = """
W1 -> W2
W1 -> X
W2 -> X
X -> Z1
Z1 -> Y
Z2 -> X
Z2 -> Z1
Z4 -> Z1
Z2 -> Z3
Z3 -> Y
W1 <-> W2
W1 <-> X
W2 <-> X
Y <-> X
Z2 <-> X
Z2 <-> Y
X <-> Z3
Z4 <-> Z1
"""

# The same model with every hidden common cause drawn as an explicit vertex.
SHOWCASE_DAG = """
W1 -> W2
W1 -> X
W2 -> X
X -> Z1
Z1 -> Y
Z2 -> X
Z2 -> Z1
Z4 -> Z1
Z2 -> Z3
Z3 -> Y
U1 -> W1
U1 -> W2
U2 -> W1
U2 -> X
U3 -> W2
U3 -> X
U4 -> Y
U4 -> X
U5 -> Z2
U5 -> X
U6 -> Z2
U6 -> Y
U7 -> X
U7 -> Z3
U8 -> Z4
U8 -> Z1
latent U1 U2 U3 U4 U5 U6 U7 U8
"""

SHOWCASE_REDUCED = """
X -> Z1
Z1 -> Y
Z2 -> X
Z2 -> Z1
Z2 -> Y
Y <-> X
Z2 <-> X
Z2 <-> Y
"""

INTERCEPTOR_FRONT_DOOR = """
W1 -> W2
W1 -> X
W2 -> X
X -> Z
Z -> Y
W1 <-> W2
W1 <-> X
X <-> Y
"""

FRONT_DOOR = """
X -> Z
Z -> Y
X <-> Y
"""

MULTI_TREATMENT = """
W1 -> X1
W2 -> W1
W2 -> X2
X2 -> Z
Z -> Y2
X1 -> Y1
Z -> Y1
W1 <-> W2
W1 <-> X1
W2 <-> X2
X1 <-> X2
X1 <-> Z
X2 <-> Y2
"""

MULTI_TREATMENT_REDUCED = """
X2 -> Z
Z -> Y2
X1 -> Y1
Z -> Y1
X1 <-> X2
X1 <-> Z
X2 <-> Y2
"""

GUARD = """
W -> X1
W -> X2
X1 -> Z
Z -> Y
X2 -> Y
W <-> X1
X1 <-> Y
X2 <-> Z
"""

GUARD_SUBGRAPH = """
X1 -> Z
Z -> Y
X2 -> Y
X1 <-> Y
X2 <-> Z
"""

GUARD_PROJECTION = """
X1 -> Z
Z -> Y
X2 -> Y
X1 <-> Y
X2 <-> Z
X1 <-> X2
"""

# The treatment is listed first: with it ahead of W1 in the vertex order the
# topological sort reproduces the published conditioning sets.
CONNECTOR_FRONT_DOOR = """
X -> Z
W1 -> W2
W1 -> Z
W2 -> Z
Z -> Y
W1 <-> W2
W1 <-> Z
X <-> Y
"""

CONNECTOR_RATIO = """
W1 -> W2
W1 -> Z2
W2 -> Z2
X -> Y
Z2 -> Z1
Z1 -> X
W1 <-> W2
W2 <-> Z2
X <-> Z2
Z2 <-> Y
"""

CONNECTOR_RATIO_REDUCED = """
X -> Y
Z2 -> Z1
Z1 -> X
X <-> Z2
Z2 <-> Y
"""

LATENT = """
X -> Z1
Z1 -> Y
Z2 -> X
Z2 -> Z3
Z2 -> Z1
Z3 -> Y
X <-> Z2
X <-> Y
X <-> Z3
Z2 <-> Y
"""

LATENT_REDUCED = """
X -> Z1
Z1 -> Y
Z2 -> X
Z2 -> Y
Z2 -> Z1
X <-> Z2
X <-> Y
Z2 <-> Y
"""

ORDER_SENSITIVE = """
X -> Z
Z -> Y
W -> X
W -> Y
"""

NESTED_RATIO = """
Z2 -> Z1
Z1 -> X
X -> Z4
Z4 -> Y
Z3 -> Z2
Z3 -> X
Z2 <-> X
Z2 <-> Y
Z3 <-> X
Z4 <-> Y
"""

NESTED_TREATMENT = """
Z2 -> Z1
Z1 -> X
X -> Y
Z3 -> Z1
Z3 -> Y
Z2 <-> X
Z2 <-> Y
Z3 <-> Y
"""

NESTED_MEDIATOR = """
Z2 -> Z1
Z1 -> X
X -> W
W -> Y
Z2 <-> X
Z2 <-> Y
W <-> Y
"""

BOW = """
X -> Y
X <-> Y
"""

_FRONT_DOOR_FORMULA = "sum_{Z} [ P(Z|X) sum_{X'} [ P(Y|X',Z) P(X') ] ]"


def _ratio(body: str, bound: str, primed: str) -> str:
    """``sum_bound body / sum_{bound, Y'} body'`` -- the recurring shape of a
    conditional of ``Y`` taken from a non-atomic distribution."""
    return f"sum_{{{bound}}} [ {body} ] / sum_{{{bound},Y'}} [ {primed} ]"


# Factor blocks shared by several formulas; {y} and friends mark the
# variables that appear primed in some copies.
_SHOWCASE_F = (
    "P({y}|W1,Z2,Z4,W2,{z3},X',Z1) P(X'|W1,Z2,Z4,W2,{z3}) "
    "P({z3}|W1,Z2,Z4,W2) P(W2|W1,Z2,Z4) P(Z2|W1) P(W1)"
)
_RATIO_F = "P({y}|Z2,Z1,X) P(X|Z2,Z1) P(Z2)"
_RATIO_F_FULL = "P({y}|W1,W2,Z2,Z1,X) P(X|W1,W2,Z2,Z1) P(Z2|W1,W2) P(W2|W1)"
_NR_F = "P({y}|Z3,Z2,Z1,X,{z4}) P({z4}|Z3,Z2,Z1,X) P(X|Z3,Z2,Z1) P(Z2|Z3) P(Z3)"
_NT_F = "P({y}|Z2,Z3,Z1,{x}) P({x}|Z2,Z3,Z1) P(Z3|Z2) P(Z2)"
_NM_F = "P({y}|Z2,Z1,X,{w}) P({w}|Z2,Z1,X) P(X|Z2,Z1) P(Z2)"

_SHOWCASE_ID = (
    "sum_{Z2,Z4,Z3,Z1} [ "
    + "(sum_{W1,W2,X'} [ " + _SHOWCASE_F.format(y="Y", z3="Z3") + " ] / "
    + "sum_{W1,W2,X',Y'} [ " + _SHOWCASE_F.format(y="Y'", z3="Z3") + " ]) "
    + "sum_{W1,W2,Z3',X',Y'} [ " + _SHOWCASE_F.format(y="Y'", z3="Z3'") + " ] "
    + "P(Z1|W1,Z2,Z4,W2,X) P(Z3|Z2) P(Z4) ]"
)
_NR_Y = _NR_F.format(y="Y", z4="Z4")
_NR_YP = _NR_F.format(y="Y'", z4="Z4")
_NESTED_RATIO_ID = (
    "sum_{Z4} [ (" + _ratio(_NR_Y, "Z2", _NR_YP) + ") "
    + "(sum_{Z2,Y'} [ " + _NR_YP + " ] / "
    + "sum_{Z2,Y',Z4'} [ " + _NR_F.format(y="Y'", z4="Z4'") + " ]) ]"
)
_NESTED_RATIO_PID = "sum_{Z4} [ " + _ratio(_NR_Y, "Z2,Z3", _NR_YP) + " ]"
_NT_Y = _NT_F.format(y="Y", x="X")
_NT_YP = _NT_F.format(y="Y'", x="X")
_NESTED_TREATMENT_ID = (
    "sum_{Z3} [ (" + _ratio(_NT_Y, "Z2", _NT_YP) + ") "
    + "sum_{Z2,X',Y'} [ " + _NT_F.format(y="Y'", x="X'") + " ] ]"
)
_NM_Y = _NM_F.format(y="Y", w="W")
_NM_YP = _NM_F.format(y="Y'", w="W")
_NESTED_MEDIATOR_ID = (
    "sum_{W} [ (" + _ratio(_NM_Y, "Z2", _NM_YP) + ") "
    + "(sum_{Z2,Y'} [ " + _NM_YP + " ] / "
    + "sum_{Z2,W',Y'} [ " + _NM_F.format(y="Y'", w="W'") + " ]) ]"
)

EXAMPLES: dict[str, Example] = {
    ex.name: ex
    for ex in [
        Example(
            "showcase",
            SHOWCASE,
            id_formula=_SHOWCASE_ID,
            pid_formula="sum_{Z2,Z1} [ sum_{X'} [ P(Y|Z2,Z1,X') P(X'|Z2) P(Z2) ] P(Z1|Z2,X) ]",
        ),
        Example("showcase-reduced", SHOWCASE_REDUCED),
        Example(
            "interceptor-front-door",
            INTERCEPTOR_FRONT_DOOR,
            id_formula="sum_{Z} [ P(Z|W1,W2,X) sum_{W1,W2,X'} [ P(Y|W1,W2,X',Z) P(X'|W1,W2) P(W2|W1) P(W1) ] ]",
            pid_formula=_FRONT_DOOR_FORMULA,
        ),
        Example("front-door", FRONT_DOOR, id_formula=_FRONT_DOOR_FORMULA, pid_formula=_FRONT_DOOR_FORMULA),
        Example(
            "multi-treatment",
            MULTI_TREATMENT,
            y=("Y1", "Y2"),
            x=("W1", "X1", "X2"),
            id_formula=(
                "sum_{Z} [ P(Y1|W2,W1,X2,X1,Z) P(Z|W2,X2) "
                "sum_{W2,X2'} [ P(Y2|W2,X2',Z) P(X2'|W2) P(W2) ] ]"
            ),
            pid_formula="sum_{Z} [ P(Y1|X1,X2,Z) P(Z|X2) sum_{X2'} [ P(Y2|X2',Z) P(X2') ] ]",
        ),
        Example("multi-treatment-reduced", MULTI_TREATMENT_REDUCED, y=("Y1", "Y2"), x=("X1", "X2")),
        Example("guard", GUARD, x=("X1", "X2")),
        Example("guard-subgraph", GUARD_SUBGRAPH, x=("X1", "X2")),
        Example("guard-projection", GUARD_PROJECTION, x=("X1", "X2")),
        Example(
            "connector-front-door",
            CONNECTOR_FRONT_DOOR,
            id_formula=(
                "sum_{W1,W2,Z} [ P(Z|X,W1,W2) P(W2|X,W1) P(W1|X) "
                "sum_{X'} [ P(Y|X',W1,W2,Z) P(X') ] ]"
            ),
            pid_formula=_FRONT_DOOR_FORMULA,
        ),
        Example(
            "connector-ratio",
            CONNECTOR_RATIO,
            id_formula=_ratio(_RATIO_F_FULL.format(y="Y"), "W2,Z2", _RATIO_F_FULL.format(y="Y'")),
            pid_formula=_ratio(_RATIO_F.format(y="Y"), "Z2", _RATIO_F.format(y="Y'")),
        ),
        Example("connector-ratio-reduced", CONNECTOR_RATIO_REDUCED),
        Example(
            "latent",
            LATENT,
            id_formula=(
                "sum_{Z2,Z3,Z1} [ P(Z1|Z2,X) "
                "(sum_{X'} [ P(Y|Z2,X',Z3,Z1) P(Z3|Z2,X') P(X'|Z2) P(Z2) ] / "
                "sum_{X',Y'} [ P(Y'|Z2,X',Z3,Z1) P(Z3|Z2,X') P(X'|Z2) P(Z2) ]) "
                "sum_{X',Z3',Y'} [ P(Y'|Z2,X',Z3',Z1) P(Z3'|Z2,X') P(X'|Z2) P(Z2) ] P(Z3|Z2) ]"
            ),
            pid_formula="sum_{Z2,Z1} [ sum_{X'} [ P(Y|Z2,X',Z1) P(X'|Z2) P(Z2) ] P(Z1|Z2,X) ]",
        ),
        Example("latent-reduced", LATENT_REDUCED),
        Example("order-sensitive", ORDER_SENSITIVE),
        Example(
            "nested-ratio",
            NESTED_RATIO,
            id_formula=_NESTED_RATIO_ID,
            pid_formula=_NESTED_RATIO_PID,
        ),
        Example(
            "nested-treatment",
            NESTED_TREATMENT,
            id_formula=_NESTED_TREATMENT_ID,
            pid_formula=_ratio(_NT_Y, "Z2,Z3", _NT_YP),
        ),
        Example(
            "nested-mediator",
            NESTED_MEDIATOR,
            id_formula=_NESTED_MEDIATOR_ID,
            pid_formula=_ratio(_NM_Y, "Z2,W", _NM_YP),
        ),
        Example("bow", BOW),
    ]
}


def example(name: str) -> Example:
    return EXAMPLES[name]


def graph(name: str) -> Smg:
    return EXAMPLES[name].graph


def showcase_dag() -> LatentDag:
    g = parse_graph(SHOWCASE_DAG)
    assert isinstance(g, LatentDag)
    return g
