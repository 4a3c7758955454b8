"""Ground truth for small discrete models.

The oracle builds random strictly positive models on a semi-Markovian graph
(one hidden parent per bidirected edge), computes exact observational and
interventional distributions by summing the factorized joint, and evaluates
symbolic expressions against the observational table.  Everything is dense
and exact, so it is meant for graphs with a handful of variables.

Typical use::

    model = sample_scm(g, seed=7, card=2)
    diff = check_expression(result.expression, model, y={"Y"}, x={"X"})
    assert diff <= 1e-9
"""

from __future__ import annotations

import io
import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from math import prod

import numpy as np

from .expression import Atom, Expression, Product, Quotient, Sum, Var
from .graph import LatentDag, Smg

__all__ = [
    "OracleError",
    "EPSILON",
    "MAX_CELLS",
    "ProbTable",
    "DiscreteScm",
    "sample_scm",
    "observational_joint",
    "interventional_truncated",
    "interventional_table",
    "eval_expression",
    "expression_table",
    "compare_tables",
    "check_expression",
    "compare_expressions",
    "random_smg",
    "random_latent_dag",
]

EPSILON = 0.01
"""Smallest probability any CPT entry may take."""

MAX_CELLS = 10**7
"""Largest outcome space (observed and hidden variables together) the oracle will sum over."""


class OracleError(ValueError):
    """Invalid model query, mismatched tables, or a zero denominator."""


# -- tables ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProbTable:
    """A dense table over the product space of some discrete variables.

    ``values`` has one axis per entry of ``variables``, in that order.
    """

    variables: tuple[str, ...]
    cards: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise OracleError("duplicate variable in table")
        if tuple(self.values.shape) != tuple(self.cards):
            raise OracleError(f"table shape {self.values.shape} does not match cardinalities {self.cards}")

    @property
    def card(self) -> dict[str, int]:
        return dict(zip(self.variables, self.cards))

    def total(self) -> float:
        return float(self.values.sum())

    def marginal(self, keep: Iterable[str]) -> ProbTable:
        """Sum out every variable not in ``keep``; the kept ones stay in table order."""
        keep = set(keep)
        missing = keep - set(self.variables)
        if missing:
            raise OracleError(f"variables not in table: {sorted(missing)}")
        drop = tuple(i for i, v in enumerate(self.variables) if v not in keep)
        kept = [i for i, v in enumerate(self.variables) if v in keep]
        values = self.values.sum(axis=drop) if drop else self.values
        return ProbTable(tuple(self.variables[i] for i in kept), tuple(self.cards[i] for i in kept), values)

    def reorder(self, variables: Iterable[str]) -> ProbTable:
        variables = tuple(variables)
        if sorted(variables) != sorted(self.variables):
            raise OracleError(f"cannot reorder {self.variables} as {variables}")
        axes = [self.variables.index(v) for v in variables]
        return ProbTable(variables, tuple(self.cards[i] for i in axes), np.transpose(self.values, axes))

    def __getitem__(self, assignment: Mapping[str, int]) -> float:
        return float(self.values[tuple(assignment[v] for v in self.variables)])

    def to_csv(self) -> str:
        """One row per outcome, in lexicographic order, with a final probability column."""
        out = io.StringIO()
        out.write(",".join(self.variables + ("p",)) + "\n")
        for cell in itertools.product(*(range(c) for c in self.cards)):
            out.write(",".join(map(str, cell)) + f",{float(self.values[cell])!r}\n")
        return out.getvalue()


def compare_tables(a: ProbTable, b: ProbTable) -> float:
    """Largest cell-wise absolute difference between two tables over the same variables."""
    if set(a.variables) != set(b.variables):
        raise OracleError(f"tables range over different variables: {a.variables} vs {b.variables}")
    b = b.reorder(a.variables)
    if a.cards != b.cards:
        raise OracleError("tables have different cardinalities")
    return float(np.max(np.abs(a.values - b.values))) if a.values.size else 0.0


# -- models ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscreteScm:
    """A discrete model on an SMG.

    Every bidirected edge ``A <-> B`` is realised by a hidden variable whose
    only children are ``A`` and ``B``.  ``cpts[v]`` has axes
    ``(*graph.pa(v), *hidden_parents[v], v)``.
    """

    graph: Smg
    cards: dict[str, int]
    latents: tuple[tuple[str, tuple[str, str]], ...]
    latent_cards: dict[str, int]
    hidden_parents: dict[str, tuple[str, ...]]
    cpts: dict[str, np.ndarray]
    priors: dict[str, np.ndarray]

    def factors(self, skip: Iterable[str] = ()) -> list[tuple[np.ndarray, tuple[str, ...]]]:
        """The CPTs and hidden priors as ``(array, axis names)``, leaving out ``skip``."""
        skip = set(skip)
        out = [(self.priors[u], (u,)) for u, _ in self.latents]
        for v in self.graph.vertices:
            if v not in skip:
                out.append((self.cpts[v], (*self.graph.pa(v), *self.hidden_parents[v], v)))
        return out

    def all_cards(self) -> dict[str, int]:
        return {**self.cards, **self.latent_cards}


def _latent_name(a: str, b: str, taken: set[str]) -> str:
    name = f"U[{a},{b}]"
    while name in taken:
        name += "_"
    return name


def _positive_table(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Random conditional table over the last axis with every entry at least EPSILON."""
    k = shape[-1]
    if k * EPSILON >= 1:
        raise OracleError(f"cardinality {k} is too large for the probability floor {EPSILON}")
    q = rng.random(shape) + 1e-3
    q /= q.sum(axis=-1, keepdims=True)
    return EPSILON + (1 - k * EPSILON) * q


def sample_scm(g: Smg, seed: int, card: int = 2) -> DiscreteScm:
    """A random strictly positive model on ``g``; the same arguments give the same model."""
    if card < 2:
        raise OracleError("cardinality must be at least 2")
    rng = np.random.default_rng(seed)
    taken = set(g.vertices)
    latents = []
    hidden: dict[str, list[str]] = {v: [] for v in g.vertices}
    for a, b in g.bidirected_edges():
        u = _latent_name(a, b, taken)
        taken.add(u)
        latents.append((u, (a, b)))
        hidden[a].append(u)
        hidden[b].append(u)
    cards = {v: card for v in g.vertices}
    latent_cards = {u: card for u, _ in latents}
    priors = {u: _positive_table(rng, (latent_cards[u],)) for u, _ in latents}
    cpts = {}
    for v in g.vertices:
        shape = tuple(cards[p] for p in g.pa(v)) + tuple(latent_cards[u] for u in hidden[v]) + (cards[v],)
        cpts[v] = _positive_table(rng, shape)
    return DiscreteScm(
        g, cards, tuple(latents), latent_cards, {v: tuple(h) for v, h in hidden.items()}, cpts, priors
    )


def _contract(model: DiscreteScm, skip: Iterable[str], out: tuple[str, ...]) -> np.ndarray:
    cards = model.all_cards()
    if prod(cards.values()) > MAX_CELLS:
        raise OracleError(f"outcome space exceeds {MAX_CELLS} cells")
    axis = {name: i for i, name in enumerate(cards)}
    operands: list = []
    mentioned: set[str] = set()
    for array, names in model.factors(skip):
        operands += [array, [axis[n] for n in names]]
        mentioned.update(names)
    # variables no remaining factor mentions (an intervened source, say) are constant along their axis
    inner = [n for n in out if n in mentioned]
    operands.append([axis[n] for n in inner])
    result = np.einsum(*operands, optimize="greedy")
    shape = tuple(cards[n] if n in mentioned else 1 for n in out)
    return np.broadcast_to(result.reshape(shape), tuple(cards[n] for n in out)).copy()


def observational_joint(model: DiscreteScm) -> ProbTable:
    """Exact ``P(v)`` over the observed variables, in graph vertex order."""
    vs = model.graph.vertices
    return ProbTable(vs, tuple(model.cards[v] for v in vs), _contract(model, (), vs))


def interventional_table(model: DiscreteScm, x: Iterable[str], y: Iterable[str]) -> ProbTable:
    """``P_x(y)`` for every value of ``x`` at once: a table over ``x`` then ``y``.

    Truncated factorization: the factors of the intervened variables are
    dropped and everything outside ``x`` and ``y`` (hidden variables
    included) is summed out.  For each fixed ``x`` the ``y`` slice sums to 1.
    """
    g = model.graph
    x, y = g.ordered(g.check(x)), g.ordered(g.check(y))
    if set(x) & set(y):
        raise OracleError("treatment and outcome sets overlap")
    if not y:
        raise OracleError("the outcome set must be nonempty")
    out = x + y
    return ProbTable(out, tuple(model.cards[v] for v in out), _contract(model, x, out))


def interventional_truncated(model: DiscreteScm, x: Mapping[str, int], y: Iterable[str]) -> ProbTable:
    """``P_x(y)`` for one assignment ``x``: a table over ``y``."""
    for v, value in x.items():
        if v not in model.cards:
            raise OracleError(f"unknown variable {v!r}")
        if not 0 <= value < model.cards[v]:
            raise OracleError(f"value {value} out of range for {v!r}")
    full = interventional_table(model, x, y)
    k = len(x)
    index = tuple(x[v] for v in full.variables[:k])
    return ProbTable(full.variables[k:], full.cards[k:], full.values[index])


# -- evaluating expressions -------------------------------------------------


@dataclass(frozen=True)
class _Tensor:
    labels: tuple[Var, ...]
    values: np.ndarray

    def aligned(self, labels: tuple[Var, ...]) -> np.ndarray:
        """The values with axes arranged as ``labels``; missing labels broadcast."""
        axes = [self.labels.index(v) for v in labels if v in self.labels]
        arr = np.transpose(self.values, axes) if axes else self.values
        shape = []
        i = 0
        for v in labels:
            if v in self.labels:
                shape.append(arr.shape[i])
                i += 1
            else:
                shape.append(1)
        return arr.reshape(shape)


def _union(*label_lists: tuple[Var, ...]) -> tuple[Var, ...]:
    return tuple(dict.fromkeys(itertools.chain(*label_lists)))


def _marginal_tensor(joint: ProbTable, vs: tuple[Var, ...]) -> _Tensor:
    names = [v.name for v in vs]
    if len(set(names)) != len(names):
        raise OracleError(f"an atom mentions the same variable twice: {[str(v) for v in vs]}")
    table = joint.marginal(names).reorder(names)
    return _Tensor(vs, table.values)


def _eval(e: Expression, joint: ProbTable) -> _Tensor:
    if isinstance(e, Atom):
        num = _marginal_tensor(joint, e.out + e.given)
        if not e.given:
            return num
        den = _marginal_tensor(joint, e.given)
        if np.any(den.values == 0):
            raise OracleError("zero denominator: the joint is not strictly positive")
        return _Tensor(num.labels, num.values / den.aligned(num.labels))
    if isinstance(e, Product):
        parts = [_eval(f, joint) for f in e.factors]
        labels = _union(*(p.labels for p in parts))
        acc = np.ones((1,) * len(labels))
        for p in parts:
            acc = acc * p.aligned(labels)
        return _Tensor(labels, acc)
    if isinstance(e, Quotient):
        num, den = _eval(e.num, joint), _eval(e.den, joint)
        labels = _union(num.labels, den.labels)
        d = den.aligned(labels)
        if np.any(d == 0):
            raise OracleError("zero denominator: the joint is not strictly positive")
        return _Tensor(labels, num.aligned(labels) / d)
    if isinstance(e, Sum):
        body = _eval(e.body, joint)
        card = joint.card
        values = body.values
        present = [v for v in e.bound if v in body.labels]
        if present:
            values = values.sum(axis=tuple(body.labels.index(v) for v in present))
        for v in e.bound:
            if v not in body.labels:
                if v.name not in card:
                    raise OracleError(f"unknown variable {v}")
                values = values * card[v.name]
        return _Tensor(tuple(v for v in body.labels if v not in present), values)
    raise TypeError(f"not an expression: {e!r}")


def _full_shape(t: _Tensor, joint: ProbTable) -> np.ndarray:
    card = joint.card
    return np.broadcast_to(t.values, tuple(card[v.name] for v in t.labels))


def eval_expression(e: Expression, joint: ProbTable, assignment: Mapping[str | Var, int] | None = None) -> float:
    """Value of ``e`` at one assignment of its free variables.

    Keys of ``assignment`` may be :class:`Var` values or plain names (taken
    as unprimed variables).
    """
    assignment = {(Var(k) if isinstance(k, str) else k): v for k, v in (assignment or {}).items()}
    t = _eval(e, joint)
    missing = [str(v) for v in t.labels if v not in assignment]
    if missing:
        raise OracleError(f"no value given for free variables {missing}")
    values = _full_shape(t, joint)
    return float(values[tuple(assignment[v] for v in t.labels)])


def expression_table(e: Expression, joint: ProbTable) -> ProbTable:
    """Evaluate ``e`` at every assignment of its free variables.

    Free variables must be unprimed; the table ranges over their names.
    """
    t = _eval(e, joint)
    if any(v.primes for v in t.labels):
        raise OracleError("primed free variables cannot be tabulated by name")
    names = tuple(v.name for v in t.labels)
    values = np.array(_full_shape(t, joint))
    return ProbTable(names, tuple(joint.card[n] for n in names), values)


def check_expression(
    e: Expression,
    model: DiscreteScm,
    y: Iterable[str],
    x: Iterable[str] = (),
    joint: ProbTable | None = None,
) -> float:
    """Largest absolute error of ``e`` as a formula for ``P_x(y)`` in ``model``.

    The expression may leave free variables the effect does not depend on
    (and may drop treatments that have no effect); both tables are
    broadcast to the union of their variables before comparing.
    """
    joint = joint if joint is not None else observational_joint(model)
    return _broadcast_diff(interventional_table(model, x, y), expression_table(e, joint), joint.card)


def compare_expressions(a: Expression, b: Expression, joint: ProbTable) -> float:
    """Largest absolute difference between two expressions evaluated on ``joint``."""
    return _broadcast_diff(expression_table(a, joint), expression_table(b, joint), joint.card)


def _broadcast_diff(a: ProbTable, b: ProbTable, card: Mapping[str, int]) -> float:
    names = tuple(dict.fromkeys(a.variables + b.variables))
    labels = tuple(Var(n) for n in names)
    shape = tuple(card[n] for n in names)

    def spread(t: ProbTable) -> np.ndarray:
        return np.broadcast_to(_Tensor(tuple(Var(n) for n in t.variables), t.values).aligned(labels), shape)

    return float(np.max(np.abs(spread(a) - spread(b))))


# -- random graphs --------------------------------------------------------


def random_smg(seed: int, n: int = 5, p_directed: float = 0.4, p_bidirected: float = 0.2) -> Smg:
    """A random SMG on ``V1..Vn``.

    Directed edges go forward in a random permutation of the vertices, each
    present with probability ``p_directed``; every pair carries a bidirected
    edge with probability ``p_bidirected``.
    """
    rng = np.random.default_rng(seed)
    names = [f"V{i + 1}" for i in range(n)]
    perm = [names[i] for i in rng.permutation(n)]
    directed = [
        (perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p_directed
    ]
    bidirected = [
        (names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p_bidirected
    ]
    return Smg.from_edges(directed, bidirected, vertices=names)


def random_latent_dag(
    seed: int, n_observed: int = 5, n_latent: int = 3, p_edge: float = 0.35
) -> LatentDag:
    """A random DAG on ``V1..Vn`` and hidden ``L1..Lm``.

    All vertices are placed in one random order and every forward pair
    becomes an edge with probability ``p_edge``, so hidden vertices may sit
    anywhere, including between observed ones.
    """
    rng = np.random.default_rng(seed)
    observed = tuple(f"V{i + 1}" for i in range(n_observed))
    latent = tuple(f"L{i + 1}" for i in range(n_latent))
    every = observed + latent
    perm = [every[i] for i in rng.permutation(len(every))]
    directed = frozenset(
        (perm[i], perm[j])
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if rng.random() < p_edge
    )
    return LatentDag(observed, latent, directed)
