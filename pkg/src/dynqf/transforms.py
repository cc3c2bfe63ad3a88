"""Program transformations and dependency analysis: repeated-variable
elimination, relation-to-function encoding, dependency graphs, deletion
depths."""
from __future__ import annotations

import itertools
from typing import Mapping

from .errors import TransformError
from .formulas import (And, App, Const, Eq, EqualityType, Formula, Ite, Not,
                       Or, RelAtom, Term, Var, symbols_used)
from .program import (BASE_REGISTRY, DynamicProgram, InitSpec, UpdateRule,
                      decode_table, encode_table, register_base, validate_program)
from .schema import Role, Schema
from .state import DEL, INS, State


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
    return row[0]


def _uses_function_symbols(p: DynamicProgram) -> bool:
    if any(p.schema.role(f) is Role.AUX for f in p.schema.functions):
        return True
    return any(sym in p.schema.functions for r in p.rules.values()
               for sym in symbols_used(r.body))


# -- repeated-variable elimination ---------------------------------------------------


def _atom_partition(a: RelAtom) -> EqualityType:
    """Positions grouped by syntactic equality of the argument terms."""
    keys = []
    for t in a.args:
        if isinstance(t, Var):
            keys.append(("v", t.name))
        elif isinstance(t, Const):
            keys.append(("c", t.name))
        else:
            raise TransformError("repeated-variable elimination needs flat atoms")
    return EqualityType.from_key(keys)


def _has_repeated_var(a: RelAtom) -> bool:
    names = [t.name for t in a.args if isinstance(t, Var)]
    return len(names) != len(set(names))


def eliminate_repeated_variables(p: DynamicProgram) -> DynamicProgram:
    """An equivalent program in which no atom mentions a variable twice.

    Each offending atom R(...) with position partition rho is replaced by an
    atom of a fresh relation with one position per rho-class; the fresh
    relation is updated by R's own rules with the corresponding target
    variables unified.  Iterates to a fixed point (fresh rules can expose
    new repeats), which exists because each relation has finitely many
    position partitions.
    """
    if _uses_function_symbols(p):
        raise TransformError("repeated-variable elimination applies to relational programs only")

    relations = dict(p.schema.relations)
    roles = dict(p.schema.roles)
    rules: dict[tuple[str, str, str], UpdateRule] = dict(p.rules)
    derived: dict[tuple[str, tuple], str] = {}
    origin: dict[str, tuple[str, EqualityType]] = {}

    cap = sum(_bell(ar) for ar in p.schema.relations.values()) + len(p.schema.relations)

    def derived_name(source: str, rho: EqualityType) -> str:
        key = (source, rho.blocks)
        if key in derived:
            return derived[key]
        if len(derived) >= cap:
            raise TransformError("repeated-variable elimination exceeded its fixed-point cap")
        stem = source + "_" + "_".join("".join(str(pos + 1) for pos in b) for b in rho.blocks)
        name = stem
        while name in relations or name in p.schema.functions or name in p.schema.constants:
            name += "x"
        derived[key] = name
        origin[name] = (source, rho)
        relations[name] = len(rho.blocks)
        roles[name] = Role.AUX
        # defining rules: the source's current rules with target variables
        # unified per rho (unification may expose new repeats; the caller's
        # fixed-point loop rewrites those in later rounds)
        src_rules = {(k, t): rules[(source, k, t)] for k in (INS, DEL)
                     for t in p.schema.input_relations}
        for (kind, trigger), src in src_rules.items():
            tparams = src.target_params
            reps = tuple(tparams[b[0]] for b in rho.blocks)
            unify = {tparams[pos]: Var(tparams[rho.representative(pos)])
                     for pos in range(len(tparams))}
            body = _subst_formula(src.body, unify)
            rules[(name, kind, trigger)] = UpdateRule(name, kind, trigger, src.params, reps, body)
        return name

    def _subst_formula(f: Formula, mapping: Mapping[str, Term]) -> Formula:
        from .formulas import subst
        return subst(f, mapping)

    def rewrite_atom(a: RelAtom) -> RelAtom:
        rho = _atom_partition(a)
        name = derived_name(a.symbol, rho)
        args = tuple(a.args[b[0]] for b in rho.blocks)
        return RelAtom(name, args)

    def rewrite(f: Formula) -> Formula:
        if isinstance(f, RelAtom):
            return rewrite_atom(f) if _has_repeated_var(f) else f
        if isinstance(f, Not):
            return Not(rewrite(f.sub))
        if isinstance(f, And):
            return And(rewrite(f.left), rewrite(f.right))
        if isinstance(f, Or):
            return Or(rewrite(f.left), rewrite(f.right))
        return f

    changed = True
    rounds = 0
    while changed:
        rounds += 1
        if rounds > cap + 1:
            raise TransformError("repeated-variable elimination did not stabilize")
        changed = False
        for key, rule in sorted(rules.items()):
            new_body = rewrite(rule.body)
            if new_body != rule.body:
                rules[key] = UpdateRule(rule.target, rule.kind, rule.trigger,
                                        rule.params, rule.target_params, new_body)
                changed = True

    schema = Schema(relations, dict(p.schema.functions), p.schema.constants, roles)
    init = p.init
    if init.kind == "table":
        rels, funs = decode_table(init.table)
        for name, (source, rho) in origin.items():
            collapsed = set()
            for tup in rels.get(source, ()):
                if equalities_match(tup, rho):
                    collapsed.add(tuple(tup[b[0]] for b in rho.blocks))
            rels[name] = frozenset(collapsed)
        init = InitSpec("table", table=encode_table(rels, funs))
    out = DynamicProgram(p.name + "_dedup", schema, rules, p.query_symbol, init)
    validate_program(out)
    return out


def equalities_match(tup: tuple, rho: EqualityType) -> bool:
    """Does the tuple satisfy (at least) the identifications rho demands?"""
    return all(tup[pos] == tup[b[0]] for b in rho.blocks for pos in b)


def expand_by_partition(tup: tuple, rho: EqualityType) -> tuple:
    """Inverse of collapsing: place each class representative at every
    position of its class."""
    out = [None] * rho.size
    for value, block in zip(tup, rho.blocks):
        for pos in block:
            out[pos] = value
    return tuple(out)


# -- relations-to-functions encoding ---------------------------------------------------

C_TOP = "c_top"
C_BOT = "c_bot"


def relations_to_functions(p: DynamicProgram) -> DynamicProgram:
    """Encode every auxiliary relation except the query symbol as a
    same-arity auxiliary function: f_R(args) = c_top iff args in R, with
    fresh 0-ary functions c_top / c_bot initialized to two distinct domain
    elements (element 0 and element 1; domains of size < 2 are rejected at
    initialization time).

    A program with nothing left to convert (every non-query auxiliary symbol
    already a function) passes through unchanged."""
    converted = [r for r in p.schema.symbols(Role.AUX, "rel") if r != p.query_symbol]
    if not converted:
        return p
    if any(p.schema.role(f) is Role.AUX for f in p.schema.functions):
        raise TransformError("mixed relation/function auxiliary schemas are not supported")
    fun_names = {}
    taken = set(p.schema.relations) | set(p.schema.functions) | set(p.schema.constants)
    for r in converted:
        name = f"f_{r}"
        while name in taken:
            name += "x"
        fun_names[r] = name
        taken.add(name)
    if C_TOP in taken or C_BOT in taken:
        raise TransformError(f"symbol names {C_TOP}/{C_BOT} are taken")

    relations = {n: a for n, a in p.schema.relations.items() if n not in converted}
    functions = dict(p.schema.functions)
    roles = {n: r for n, r in p.schema.roles.items() if n not in converted}
    for r in converted:
        functions[fun_names[r]] = p.schema.relations[r]
        roles[fun_names[r]] = Role.AUX
    functions[C_TOP] = 0
    functions[C_BOT] = 0
    roles[C_TOP] = Role.AUX
    roles[C_BOT] = Role.AUX
    schema = Schema(relations, functions, p.schema.constants, roles)

    def rewrite(f: Formula) -> Formula:
        if isinstance(f, RelAtom):
            if f.symbol in fun_names:
                return Eq(App(fun_names[f.symbol], f.args), App(C_TOP, ()))
            return f
        if isinstance(f, Not):
            return Not(rewrite(f.sub))
        if isinstance(f, And):
            return And(rewrite(f.left), rewrite(f.right))
        if isinstance(f, Or):
            return Or(rewrite(f.left), rewrite(f.right))
        return f

    rules: dict[tuple[str, str, str], UpdateRule] = {}
    for (target, kind, trigger), rule in p.rules.items():
        body = rewrite(rule.body)
        if target in fun_names:
            term = Ite(body, App(C_TOP, ()), App(C_BOT, ()))
            rules[(fun_names[target], kind, trigger)] = UpdateRule(
                fun_names[target], kind, trigger, rule.params, rule.target_params, term)
        else:
            rules[(target, kind, trigger)] = UpdateRule(
                target, kind, trigger, rule.params, rule.target_params, body)
    for cname in (C_TOP, C_BOT):
        for kind in (INS, DEL):
            for trigger in schema.input_relations:
                ar = p.schema.arity(trigger)
                params = tuple(f"u{i+1}" for i in range(ar))
                rules[(cname, kind, trigger)] = UpdateRule(cname, kind, trigger, params, (),
                                                           App(cname, ()))
    if p.init.kind == "table":
        raise TransformError("relations-to-functions does not support table initialization")
    init = InitSpec(p.init.kind, base=rel2fun_base_name(p.init.base))
    out = DynamicProgram(p.name + "_rel2fun", schema, rules, p.query_symbol, init)
    validate_program(out)
    return out


def rel2fun_base_name(orig: str | None) -> str:
    return "rel2fun__" + (orig or "default")


def _rel2fun_base(inner_name: str):
    def build(schema: Schema, n: int):
        if n < 2:
            raise TransformError("function encoding needs a domain with at least two elements")
        inner = BASE_REGISTRY.get(inner_name)
        if inner is None:
            raise TransformError(f"unknown base initializer {inner_name!r}")
        aux_rels, aux_funs, bi_rels, bi_funs = inner(schema, n)
        top, bot = 0, 1
        new_funs = dict(aux_funs)
        for name, ar in schema.functions.items():
            if schema.role(name) is not Role.AUX:
                continue
            if name == C_TOP:
                new_funs[name] = {(): top}
            elif name == C_BOT:
                new_funs[name] = {(): bot}
            elif name.startswith("f_"):
                source = name[2:]
                held = set(map(tuple, aux_rels.get(source, ())))
                new_funs[name] = {args: (top if args in held else bot)
                                  for args in itertools.product(range(n), repeat=ar)}
        aux_rels = {k: v for k, v in aux_rels.items() if k in schema.relations}
        return aux_rels, new_funs, bi_rels, bi_funs
    return build


def resolve_rel2fun_bases(name: str) -> bool:
    """Auto-register rel2fun__<inner> base names so transformed programs can
    be reparsed in a fresh process."""
    if name in BASE_REGISTRY or not name.startswith("rel2fun__"):
        return name in BASE_REGISTRY
    register_base(name, _rel2fun_base(name[len("rel2fun__"):]))
    return True


def decode_function_state(p: DynamicProgram, s: State) -> dict[str, frozenset]:
    """Read the encoded relations back out of a transformed program's state:
    args in R iff f_R(args) = c_top."""
    top = s.functions[C_TOP][()]
    out = {}
    for name in p.schema.functions:
        if p.schema.role(name) is Role.AUX and name.startswith("f_"):
            table = s.functions[name]
            out[name[2:]] = frozenset(args for args, val in table.items() if val == top)
    return out


# -- dependency analysis -----------------------------------------------------------------

def dependency_graph(p: DynamicProgram, deletions_only: bool = False) -> dict[str, set[str]]:
    """Edges target -> symbol for every aux symbol occurring in one of the
    target's rule bodies (deletion-triggered rules only when flagged)."""
    aux = set(p.schema.aux_symbols)
    graph: dict[str, set[str]] = {a: set() for a in aux}
    for (target, kind, _trigger), rule in p.rules.items():
        if deletions_only and kind != DEL:
            continue
        graph[target] |= symbols_used(rule.body) & aux
    return graph


def deletion_depth(p: DynamicProgram) -> dict[str, int | None]:
    """BFS distance from the query symbol in the deletion dependency graph;
    None marks unreachable symbols."""
    graph = dependency_graph(p, deletions_only=True)
    depth: dict[str, int | None] = {a: None for a in graph}
    depth[p.query_symbol] = 0
    frontier = [p.query_symbol]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for sym in frontier:
            for succ in sorted(graph[sym]):
                if depth[succ] is None:
                    depth[succ] = d
                    nxt.append(succ)
        frontier = nxt
    return depth
