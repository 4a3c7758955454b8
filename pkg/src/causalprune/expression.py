"""Symbolic probability expressions.

An expression is a small immutable tree:

* :class:`Atom` ``P(out | given)`` evaluated against the observational joint,
* :class:`Sum` over a list of bound variables,
* :class:`Product` of factors (the empty product is the constant 1),
* :class:`Quotient` of two expressions.

Variables are :class:`Var` values: a base name (the vertex label) and a prime
count used to tell bound copies apart, e.g. ``x'`` is ``Var("X", 1)``.
The identification algorithms build expressions with unprimed variables and
rely on :func:`rename_bound` to add primes where a binder would otherwise
shadow a free variable.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple, Union

__all__ = [
    "Var",
    "Atom",
    "Sum",
    "Product",
    "Quotient",
    "Expression",
    "ONE",
    "Distribution",
    "ExpressionError",
    "free_vars",
    "base_names",
    "marginalize",
    "chain_factorize",
    "rename_bound",
    "canonicalize",
    "render",
    "to_json",
    "from_json",
    "parse",
    "metrics",
    "Metrics",
]


class ExpressionError(ValueError):
    """Malformed expression or an operation outside a distribution's scope."""


class Var(NamedTuple):
    name: str
    primes: int = 0

    def __str__(self) -> str:
        return self.name + "'" * self.primes


@dataclass(frozen=True)
class Atom:
    out: tuple[Var, ...]
    given: tuple[Var, ...] = ()

    def __post_init__(self) -> None:
        if not self.out:
            raise ExpressionError("an atom needs at least one outcome variable")


@dataclass(frozen=True)
class Sum:
    bound: tuple[Var, ...]
    body: Expression

    def __post_init__(self) -> None:
        if not self.bound:
            raise ExpressionError("a sum needs at least one bound variable")
        if len(set(self.bound)) != len(self.bound):
            raise ExpressionError("duplicate bound variable")


@dataclass(frozen=True)
class Product:
    factors: tuple[Expression, ...]


@dataclass(frozen=True)
class Quotient:
    num: Expression
    den: Expression


Expression = Union[Atom, Sum, Product, Quotient]

ONE = Product(())


def _vars(names: Iterable[str]) -> tuple[Var, ...]:
    return tuple(Var(n) for n in names)


def _prod(factors: Sequence[Expression]) -> Expression:
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


# -- variables ------------------------------------------------------------


def free_vars(e: Expression) -> frozenset[Var]:
    """Variables occurring in ``e`` that no enclosing sum binds."""
    if isinstance(e, Atom):
        return frozenset(e.out + e.given)
    if isinstance(e, Sum):
        return free_vars(e.body) - set(e.bound)
    if isinstance(e, Product):
        return frozenset().union(*(free_vars(f) for f in e.factors))
    if isinstance(e, Quotient):
        return free_vars(e.num) | free_vars(e.den)
    raise TypeError(f"not an expression: {e!r}")


def base_names(e: Expression) -> frozenset[str]:
    """Base names of every variable in ``e``, bound or free."""
    if isinstance(e, Atom):
        return frozenset(v.name for v in e.out + e.given)
    if isinstance(e, Sum):
        return frozenset(v.name for v in e.bound) | base_names(e.body)
    if isinstance(e, Product):
        return frozenset().union(*(base_names(f) for f in e.factors))
    return base_names(e.num) | base_names(e.den)


# -- distributions --------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    """The distribution threaded through the identification recursion.

    ``scope`` lists the variables the distribution ranges over.  ``atomic``
    marks the raw observational joint ``P(scope)``, which lets marginals and
    conditionals stay single atoms instead of sums and quotients.
    """

    expr: Expression
    scope: tuple[str, ...]
    atomic: bool

    @classmethod
    def joint(cls, variables: Iterable[str]) -> Distribution:
        scope = tuple(variables)
        return cls(Atom(_vars(scope)), scope, True)


def marginalize(d: Distribution, z: Iterable[str]) -> Distribution:
    """Sum ``z`` out of ``d``."""
    z = set(z)
    if not z:
        return d
    if not z <= set(d.scope):
        raise ExpressionError(f"cannot marginalize {sorted(z - set(d.scope))}: not in scope")
    scope = tuple(v for v in d.scope if v not in z)
    if d.atomic:
        return Distribution(Atom(_vars(scope)) if scope else ONE, scope, True)
    bound = tuple(Var(v) for v in d.scope if v in z)
    if isinstance(d.expr, Sum):
        expr = Sum(d.expr.bound + bound, d.expr.body)
    else:
        expr = Sum(bound, d.expr)
    return Distribution(expr, scope, False)


def chain_factorize(d: Distribution, s: Iterable[str], order: Sequence[str]) -> Expression:
    """Product over ``s`` of each variable conditioned on its predecessors.

    Predecessors are the variables of ``d``'s scope that come earlier in
    ``order``.  An atomic ``d`` gives plain atoms; otherwise each conditional
    is the quotient of two marginals of ``d`` (the denominator is omitted
    when there are no predecessors, as it would sum to one).
    """
    s = set(s)
    scope = set(d.scope)
    if not s <= scope:
        raise ExpressionError("chain factorization target is outside the distribution's scope")
    if not scope <= set(order):
        raise ExpressionError("order does not cover the distribution's scope")
    factors: list[Expression] = []
    preceding: list[str] = []
    for v in order:
        if v not in scope:
            continue
        if v in s:
            if d.atomic:
                factors.append(Atom((Var(v),), _vars(preceding)))
            else:
                keep = set(preceding) | {v}
                num = marginalize(d, scope - keep).expr
                if preceding:
                    den = marginalize(d, scope - set(preceding)).expr
                    factors.append(Quotient(num, den))
                else:
                    factors.append(num)
        preceding.append(v)
    # conditionals are listed last-variable first, the way the chain rule is usually written
    return _prod(factors[::-1])


# -- bound variable renaming ----------------------------------------------


def rename_bound(e: Expression) -> Expression:
    """Give each bound variable the fewest primes that keep it unambiguous.

    A binder may not reuse a name that is free in the whole expression or
    already bound by an enclosing sum.  Existing primes on bound variables
    are discarded, so the result depends only on the binding structure.
    """
    free = free_vars(e)

    def go(node: Expression, env: dict[Var, Var], taken: frozenset[Var]) -> Expression:
        if isinstance(node, Atom):
            return Atom(
                tuple(env.get(v, v) for v in node.out),
                tuple(env.get(v, v) for v in node.given),
            )
        if isinstance(node, Product):
            return Product(tuple(go(f, env, taken) for f in node.factors))
        if isinstance(node, Quotient):
            return Quotient(go(node.num, env, taken), go(node.den, env, taken))
        env = dict(env)
        new_bound = []
        for v in node.bound:
            p = 0
            while Var(v.name, p) in taken:
                p += 1
            nv = Var(v.name, p)
            env[v] = nv
            taken = taken | {nv}
            new_bound.append(nv)
        return Sum(tuple(new_bound), go(node.body, env, taken))

    return go(e, {}, free)


# -- canonical form -------------------------------------------------------


def _flatten(e: Expression) -> Expression:
    if isinstance(e, Atom):
        return e
    if isinstance(e, Quotient):
        return Quotient(_flatten(e.num), _flatten(e.den))
    if isinstance(e, Sum):
        body = _flatten(e.body)
        if isinstance(body, Sum) and not {v.name for v in e.bound} & {v.name for v in body.bound}:
            return Sum(e.bound + body.bound, body.body)
        return Sum(e.bound, body)
    factors: list[Expression] = []
    for f in e.factors:
        f = _flatten(f)
        if isinstance(f, Product):
            factors.extend(f.factors)
        else:
            factors.append(f)
    return _prod(factors) if factors else ONE


def _var_key(v: Var) -> tuple[str, int]:
    return (v.name, v.primes)


def _sort(e: Expression) -> Expression:
    if isinstance(e, Atom):
        return Atom(tuple(sorted(e.out, key=_var_key)), tuple(sorted(e.given, key=_var_key)))
    if isinstance(e, Sum):
        return Sum(tuple(sorted(e.bound, key=_var_key)), _sort(e.body))
    if isinstance(e, Quotient):
        return Quotient(_sort(e.num), _sort(e.den))
    factors = [_sort(f) for f in e.factors]
    return Product(tuple(sorted(factors, key=lambda f: render(f, "text"))))


def canonicalize(e: Expression) -> Expression:
    """A normal form that is equal for expressions differing only in
    factor order, conditioning-list order, binder order or prime decoration.

    Base names are kept: they say which random variable an atom refers to.
    """
    e = _flatten(e)
    e = rename_bound(_sort(e))
    # sorting again settles products whose keys changed with the new primes
    return _sort(e)


# -- rendering ------------------------------------------------------------


def _latex_var(v: Var) -> str:
    m = re.fullmatch(r"([A-Za-z]+)_?(\d+)", v.name)
    if m:
        digits = m.group(2)
        name = f"{m.group(1).lower()}_{digits if len(digits) == 1 else '{' + digits + '}'}"
    else:
        name = v.name.lower().replace("_", r"\_")
    return name + "^{" + r"\prime" * v.primes + "}" if v.primes else name


def _text(e: Expression, as_factor: bool = False) -> str:
    if isinstance(e, Atom):
        out = ",".join(map(str, e.out))
        return f"P({out}|{','.join(map(str, e.given))})" if e.given else f"P({out})"
    if isinstance(e, Sum):
        return f"sum_{{{','.join(map(str, e.bound))}}} [ {_text(e.body)} ]"
    if isinstance(e, Product):
        if not e.factors:
            return "1"
        return " ".join(_text(f, as_factor=True) for f in e.factors)
    s = f"{_text(e.num, as_factor=True)} / {_text(e.den, as_factor=True)}"
    return f"({s})" if as_factor else s


def _latex(e: Expression, as_factor: bool = False) -> str:
    if isinstance(e, Atom):
        out = ",".join(map(_latex_var, e.out))
        given = ",".join(map(_latex_var, e.given))
        return f"P({out}|{given})" if e.given else f"P({out})"
    if isinstance(e, Sum):
        s = rf"\sum_{{{','.join(map(_latex_var, e.bound))}}}{_latex(e.body)}"
        return rf"\left({s}\right)" if as_factor else s
    if isinstance(e, Product):
        if not e.factors:
            return "1"
        return "".join(_latex(f, as_factor=len(e.factors) > 1) for f in e.factors)
    return rf"\frac{{{_latex(e.num)}}}{{{_latex(e.den)}}}"


def _json(e: Expression) -> object:
    def var(v: Var) -> dict:
        return {"name": v.name, "primes": v.primes}

    if isinstance(e, Atom):
        return {"atom": {"out": [var(v) for v in e.out], "given": [var(v) for v in e.given]}}
    if isinstance(e, Sum):
        return {"sum": {"bound": [var(v) for v in e.bound], "body": _json(e.body)}}
    if isinstance(e, Product):
        return {"prod": [_json(f) for f in e.factors]}
    return {"div": {"num": _json(e.num), "den": _json(e.den)}}


def to_json(e: Expression) -> object:
    """The JSON-ready AST of ``e``."""
    return _json(e)


def from_json(obj: object) -> Expression:
    """Inverse of :func:`to_json`; also accepts a JSON string."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ExpressionError(f"not an expression node: {obj!r}")
    ((kind, payload),) = obj.items()

    def var(d: dict) -> Var:
        return Var(d["name"], d.get("primes", 0))

    try:
        if kind == "atom":
            return Atom(tuple(map(var, payload["out"])), tuple(map(var, payload.get("given", []))))
        if kind == "sum":
            return Sum(tuple(map(var, payload["bound"])), from_json(payload["body"]))
        if kind == "prod":
            return Product(tuple(from_json(f) for f in payload))
        if kind == "div":
            return Quotient(from_json(payload["num"]), from_json(payload["den"]))
    except (KeyError, TypeError) as exc:
        raise ExpressionError(f"malformed {kind} node") from exc
    raise ExpressionError(f"unknown node kind {kind!r}")


def render(e: Expression, fmt: str = "text") -> str:
    """Serialize ``e`` as ``text``, ``latex`` or ``json``."""
    if fmt == "text":
        return _text(e)
    if fmt == "latex":
        return _latex(e)
    if fmt == "json":
        return json.dumps(_json(e), separators=(",", ":"))
    raise ValueError(f"unknown format {fmt!r}")


# -- text parser ----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<sum>sum_\{)|(?P<var>[A-Za-z][A-Za-z0-9_]*'*)|(?P<one>1)|(?P<op>[()\[\]{}|,/]))"
)


def _tokenize(s: str) -> list[str]:
    pos = 0
    tokens = []
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ExpressionError(f"unexpected character {s[pos:].lstrip()[:1]!r} at offset {pos}")
        tokens.append(m.group(m.lastgroup))
        pos = m.end()
    return tokens


def parse(text: str) -> Expression:
    """Parse the ``text`` rendering back into an expression.

    Grammar::

        expr    := product ['/' product]
        product := factor {factor}
        factor  := atom | sum | '1' | '(' expr ')'
        atom    := 'P(' vars ['|' vars] ')'
        sum     := 'sum_{' vars '}' '[' expr ']'

    Text starting with ``{`` is taken to be the ``json`` rendering.
    """
    if text.lstrip().startswith("{"):
        return from_json(text)
    tokens = _tokenize(text)
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ExpressionError(f"expected {expected or 'a token'}, found {tok!r}")
        pos += 1
        return tok

    def variables(closing: set[str]) -> tuple[Var, ...]:
        out = []
        while True:
            tok = take()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*'*", tok):
                raise ExpressionError(f"expected a variable, found {tok!r}")
            name = tok.rstrip("'")
            out.append(Var(name, len(tok) - len(name)))
            if peek() in closing:
                return tuple(out)
            take(",")

    def factor() -> Expression:
        tok = peek()
        if tok == "(":
            take("(")
            e = expr()
            take(")")
            return e
        if tok == "1":
            take()
            return ONE
        if tok == "sum_{":
            take()
            bound = variables({"}"})
            take("}")
            take("[")
            body = expr()
            take("]")
            return Sum(bound, body)
        if tok == "P":
            take()
            take("(")
            out = variables({"|", ")"})
            given: tuple[Var, ...] = ()
            if peek() == "|":
                take("|")
                given = variables({")"})
            take(")")
            return Atom(out, given)
        raise ExpressionError(f"unexpected token {tok!r}")

    def product() -> Expression:
        factors = [factor()]
        while peek() in ("(", "1", "sum_{", "P"):
            factors.append(factor())
        return _prod(factors)

    def expr() -> Expression:
        num = product()
        if peek() == "/":
            take("/")
            return Quotient(num, product())
        return num

    result = expr()
    if pos != len(tokens):
        raise ExpressionError(f"trailing input starting at {tokens[pos]!r}")
    return result


# -- metrics --------------------------------------------------------------


class Metrics(NamedTuple):
    sums: int
    quotients: int
    atoms: int
    variables: int

    def as_dict(self) -> dict[str, int]:
        return {
            "sum-nodes": self.sums,
            "quotient-nodes": self.quotients,
            "atom-nodes": self.atoms,
            "distinct-variables": self.variables,
        }


def metrics(e: Expression) -> Metrics:
    """Node counts of the canonical form; primed copies share a base name."""
    e = canonicalize(e)
    counts = {"sum": 0, "div": 0, "atom": 0}

    def walk(node: Expression) -> None:
        if isinstance(node, Atom):
            counts["atom"] += 1
        elif isinstance(node, Sum):
            counts["sum"] += 1
            walk(node.body)
        elif isinstance(node, Product):
            for f in node.factors:
                walk(f)
        else:
            counts["div"] += 1
            walk(node.num)
            walk(node.den)

    walk(e)
    return Metrics(counts["sum"], counts["div"], counts["atom"], len(base_names(e)))
