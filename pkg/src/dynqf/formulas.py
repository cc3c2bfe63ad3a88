"""Quantifier-free formula and update-term ASTs, evaluation, and measures.

The formula class is quantifier-free by construction: there simply are no
quantifier nodes.  Terms include a conditional (ite) whose condition is again
a quantifier-free formula; plain terms (no ite) are what neighborhood and
similarity machinery enumerates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import EvalError, ResourceLimitError, SchemaError
from .schema import Schema
from .state import State


# -- AST -----------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Ite(Term):
    cond: "Formula"
    then: Term
    other: Term


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class RelAtom(Formula):
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


TRUE = TrueConst()
FALSE = FalseConst()


def conj(parts: Sequence[Formula]) -> Formula:
    """Left-associated conjunction; TRUE for the empty list."""
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def atom(symbol: str, *args: Term | str) -> RelAtom:
    return RelAtom(symbol, tuple(Var(a) if isinstance(a, str) else a for a in args))


def eq(left: Term | str, right: Term | str) -> Eq:
    wrap = lambda t: Var(t) if isinstance(t, str) else t
    return Eq(wrap(left), wrap(right))


def neq(left: Term | str, right: Term | str) -> Not:
    return Not(eq(left, right))


# -- evaluation (reference semantics) -------------------------------------------

def eval_term(t: Term, s: State, asg: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return asg[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Const):
        try:
            return s.constants[t.name]
        except KeyError:
            raise EvalError(f"unknown constant {t.name!r}") from None
    if isinstance(t, App):
        if t.symbol not in s.functions:
            raise EvalError(f"unknown function {t.symbol!r}")
        args = tuple(eval_term(a, s, asg) for a in t.args)
        return s.functions[t.symbol][args]
    if isinstance(t, Ite):
        # only the chosen branch is evaluated
        if eval_formula(t.cond, s, asg):
            return eval_term(t.then, s, asg)
        return eval_term(t.other, s, asg)
    raise EvalError(f"not a term: {t!r}")


def eval_formula(f: Formula, s: State, asg: Mapping[str, int]) -> bool:
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, RelAtom):
        if f.symbol not in s.relations:
            raise EvalError(f"unknown relation {f.symbol!r}")
        if len(f.args) != s.schema.arity(f.symbol):
            raise SchemaError(f"arity mismatch in atom {f.symbol!r}")
        return tuple(eval_term(a, s, asg) for a in f.args) in s.relations[f.symbol]
    if isinstance(f, Eq):
        return eval_term(f.left, s, asg) == eval_term(f.right, s, asg)
    if isinstance(f, Not):
        return not eval_formula(f.sub, s, asg)
    if isinstance(f, And):
        return eval_formula(f.left, s, asg) and eval_formula(f.right, s, asg)
    if isinstance(f, Or):
        return eval_formula(f.left, s, asg) or eval_formula(f.right, s, asg)
    raise EvalError(f"not a formula: {f!r}")


# -- walks ----------------------------------------------------------------------

def children(node) -> Iterator:
    if isinstance(node, (And, Or)):
        yield node.left
        yield node.right
    elif isinstance(node, Not):
        yield node.sub
    elif isinstance(node, RelAtom):
        yield from node.args
    elif isinstance(node, Eq):
        yield node.left
        yield node.right
    elif isinstance(node, App):
        yield from node.args
    elif isinstance(node, Ite):
        yield node.cond
        yield node.then
        yield node.other


def walk(node) -> Iterator:
    yield node
    for c in children(node):
        yield from walk(c)


def free_vars(node) -> set[str]:
    return {n.name for n in walk(node) if isinstance(n, Var)}


def rel_atoms(node) -> list[RelAtom]:
    return [n for n in walk(node) if isinstance(n, RelAtom)]


def symbols_used(node) -> set[str]:
    out = set()
    for n in walk(node):
        if isinstance(n, RelAtom):
            out.add(n.symbol)
        elif isinstance(n, App):
            out.add(n.symbol)
    return out


def subst(node, mapping: Mapping[str, Term]):
    """Replace free variables by terms, structurally."""
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, (Const, TrueConst, FalseConst)):
        return node
    if isinstance(node, App):
        return App(node.symbol, tuple(subst(a, mapping) for a in node.args))
    if isinstance(node, Ite):
        return Ite(subst(node.cond, mapping), subst(node.then, mapping), subst(node.other, mapping))
    if isinstance(node, RelAtom):
        return RelAtom(node.symbol, tuple(subst(a, mapping) for a in node.args))
    if isinstance(node, Eq):
        return Eq(subst(node.left, mapping), subst(node.right, mapping))
    if isinstance(node, Not):
        return Not(subst(node.sub, mapping))
    if isinstance(node, And):
        return And(subst(node.left, mapping), subst(node.right, mapping))
    if isinstance(node, Or):
        return Or(subst(node.left, mapping), subst(node.right, mapping))
    raise EvalError(f"cannot substitute in {node!r}")


# -- measures and classifiers ----------------------------------------------------

def nesting_depth(node) -> int:
    """Function-application nesting: variables and constants are 0, an
    application is one more than its deepest argument, an ite is the max of
    its condition and branches, and a formula is the max over its terms."""
    if isinstance(node, (Var, Const)):
        return 0
    if isinstance(node, App):
        return 1 + max((nesting_depth(a) for a in node.args), default=0)
    if isinstance(node, Ite):
        return max(nesting_depth(node.cond), nesting_depth(node.then), nesting_depth(node.other))
    if isinstance(node, (TrueConst, FalseConst)):
        return 0
    if isinstance(node, RelAtom):
        return max((nesting_depth(a) for a in node.args), default=0)
    if isinstance(node, Eq):
        return max(nesting_depth(node.left), nesting_depth(node.right))
    if isinstance(node, Not):
        return nesting_depth(node.sub)
    if isinstance(node, (And, Or)):
        return max(nesting_depth(node.left), nesting_depth(node.right))
    raise EvalError(f"no nesting depth for {node!r}")


@dataclass(frozen=True)
class SyntaxFlags:
    negation_free: bool
    conjunctive: bool
    repeated_vars_in_atom: bool


def _is_literal(f: Formula) -> bool:
    if isinstance(f, Not):
        f = f.sub
    return isinstance(f, (RelAtom, Eq, TrueConst, FalseConst))


def _is_conjunctive(f: Formula) -> bool:
    if isinstance(f, And):
        return _is_conjunctive(f.left) and _is_conjunctive(f.right)
    return _is_literal(f)


def classify_syntax(f: Formula) -> SyntaxFlags:
    negation_free = not any(isinstance(n, Not) for n in walk(f))
    repeated = False
    for a in rel_atoms(f):
        names = [t.name for t in a.args if isinstance(t, Var)]
        if len(names) != len(set(names)):
            repeated = True
            break
    return SyntaxFlags(negation_free, _is_conjunctive(f), repeated)


# -- equality types ---------------------------------------------------------------

@dataclass(frozen=True)
class EqualityType:
    """A partition of positions 0..n-1; blocks sorted, ordered by least member."""

    size: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = sorted(p for b in self.blocks for p in b)
        if seen != list(range(self.size)):
            raise EvalError("blocks do not partition the positions")

    @staticmethod
    def from_key(items: Sequence) -> "EqualityType":
        groups: dict[object, list[int]] = {}
        for i, item in enumerate(items):
            groups.setdefault(item, []).append(i)
        blocks = tuple(sorted((tuple(sorted(g)) for g in groups.values()), key=lambda b: b[0]))
        return EqualityType(len(items), blocks)

    def representative(self, position: int) -> int:
        for b in self.blocks:
            if position in b:
                return b[0]
        raise EvalError(f"position {position} outside partition")

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(str(p + 1) for p in b) + "}" for b in self.blocks) + "}"


def equality_type_of(tup: Sequence) -> EqualityType:
    """The partition of positions induced by component equality."""
    return EqualityType.from_key(tuple(tup))


# -- plain-term enumeration ---------------------------------------------------------

def _term_sort_key(t: Term, var_order: dict[str, int]):
    if isinstance(t, Var):
        return (0, var_order[t.name])
    if isinstance(t, Const):
        return (1, t.name)
    if isinstance(t, App):
        return (2, t.symbol, tuple(_term_sort_key(a, var_order) for a in t.args))
    raise EvalError(f"not a plain term: {t!r}")


def count_terms_up_to_depth(schema: Schema, k: int, num_vars: int) -> int:
    """How many plain terms of nesting depth <= k exist, without building them."""
    base = num_vars + len(schema.constants)
    upto = [base]
    for d in range(1, k + 1):
        prev = upto[d - 1]
        before = upto[d - 2] if d >= 2 else 0
        exact = 0
        for ar in schema.functions.values():
            if ar == 0:
                exact += 1 if d == 1 else 0
            else:
                exact += prev ** ar - before ** ar
        upto.append(upto[d - 1] + exact)
    return upto[k]


def terms_up_to_depth(
    schema: Schema,
    k: int,
    vars: Sequence[str],
    cap: int = 20000,
) -> list[Term]:
    """All plain terms (no ite) of nesting depth <= k over the given variables
    and the schema's constant and function symbols, in the canonical order:
    by depth, then lexicographically by symbol name and argument order.

    The enumeration order is deterministic because downstream constructions
    (neighborhood vectors) depend on it.
    """
    total = count_terms_up_to_depth(schema, k, len(vars))
    if total > cap:
        raise ResourceLimitError(f"term enumeration exceeds cap {cap}", total)
    var_order = {name: i for i, name in enumerate(vars)}
    level: list[list[Term]] = []
    base: list[Term] = [Var(v) for v in vars] + [Const(c) for c in sorted(schema.constants)]
    level.append(base)
    for d in range(1, k + 1):
        upto_prev = [t for lvl in level for t in lvl]
        prev_exact = set(level[d - 1])
        exact: list[Term] = []
        for name in sorted(schema.functions):
            ar = schema.functions[name]
            if ar == 0:
                if d == 1:
                    exact.append(App(name, ()))
                continue
            for args in itertools.product(upto_prev, repeat=ar):
                if any(a in prev_exact for a in args):
                    exact.append(App(name, tuple(args)))
        exact.sort(key=lambda t: _term_sort_key(t, var_order))
        level.append(exact)
    out: list[Term] = []
    for lvl in level:
        out.extend(sorted(lvl, key=lambda t: _term_sort_key(t, var_order)))
    return out
