"""Dynamic programs: update rules, one-step and many-step semantics,
initialization models, and initialization-invariance checking."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ProgramError, RejectedSequenceError, SchemaError
from .formulas import (App, Formula, RelAtom, Term, Var, eval_formula, eval_term,
                       free_vars, nesting_depth, symbols_used)
from .schema import Role, Schema
from .state import (DEL, INS, Modification, State, check_modification,
                    default_function, is_honest, make_state, transport,
                    validate_state)


@dataclass(frozen=True)
class UpdateRule:
    """One update rule: how `target` is recomputed after `kind` on `trigger`.

    `params` name the modified tuple, `target_params` the updated tuple; the
    body is a Formula for relation targets and a Term for function targets,
    quantifier-free either way, reading only the pre-modification state.
    """

    target: str
    kind: str  # INS | DEL
    trigger: str
    params: tuple[str, ...]
    target_params: tuple[str, ...]
    body: Formula | Term

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.target, self.kind, self.trigger)


@dataclass(frozen=True)
class InitSpec:
    """Aux/builtin initialization model.

    kind 'empty'  : aux relations empty, aux functions projection-on-first-arg
                    (base overrides applied on top);
    kind 'oracle' : replay all input tuples, in sorted order, through the
                    program's own insertion rules starting from the base state;
    kind 'table'  : explicit interpretations;
    kind 'builtin': a named registered initializer.
    """

    kind: str
    base: str | None = None
    table: tuple | None = None  # canonical encoding, see table_from/table_items
    name: str | None = None


def encode_table(relations: Mapping[str, Iterable[tuple]] | None = None,
                 functions: Mapping[str, Mapping[tuple, int]] | None = None) -> tuple:
    rel_part = tuple(sorted((n, tuple(sorted(map(tuple, ts)))) for n, ts in (relations or {}).items()))
    fun_part = tuple(sorted((n, tuple(sorted(t.items()))) for n, t in (functions or {}).items()))
    return (rel_part, fun_part)


def decode_table(table: tuple) -> tuple[dict, dict]:
    rel_part, fun_part = table
    return ({n: frozenset(ts) for n, ts in rel_part},
            {n: dict(entries) for n, entries in fun_part})


@dataclass(frozen=True, eq=True)
class DynamicProgram:
    name: str
    schema: Schema
    rules: dict[tuple[str, str, str], UpdateRule]
    query_symbol: str
    init: InitSpec

    def __hash__(self):  # programs are compared structurally but hashed loosely
        return hash((self.name, self.schema, self.query_symbol))

    def rule(self, target: str, kind: str, trigger: str) -> UpdateRule:
        try:
            return self.rules[(target, kind, trigger)]
        except KeyError:
            raise ProgramError(f"no rule for {target!r} under {kind} {trigger!r}") from None

    def nesting_depth(self) -> int:
        return max((nesting_depth(r.body) for r in self.rules.values()), default=0)

    def aux_relations(self) -> list[str]:
        return self.schema.symbols(Role.AUX, "rel")

    def aux_functions(self) -> list[str]:
        return self.schema.symbols(Role.AUX, "fun")


def frame_rule(schema: Schema, target: str, kind: str, trigger: str) -> UpdateRule:
    """Keep-old-value rule, used when a program declares `default frame`."""
    params = tuple(f"u{i+1}" for i in range(schema.arity(trigger)))
    tparams = tuple(f"y{i+1}" for i in range(schema.arity(target)))
    if target in schema.relations:
        body: Formula | Term = RelAtom(target, tuple(Var(v) for v in tparams))
    else:
        body = App(target, tuple(Var(v) for v in tparams))
    return UpdateRule(target, kind, trigger, params, tparams, body)


def validate_program(p: DynamicProgram) -> None:
    sch = p.schema
    if p.query_symbol not in sch.relations or sch.role(p.query_symbol) is not Role.AUX:
        raise ProgramError(f"query symbol {p.query_symbol!r} must be an aux relation")
    if not sch.input_relations:
        raise ProgramError("program has no input relations")
    expected = {
        (target, kind, trigger)
        for target in sch.aux_symbols
        for kind in (INS, DEL)
        for trigger in sch.input_relations
    }
    if set(p.rules) != expected:
        missing = expected - set(p.rules)
        extra = set(p.rules) - expected
        raise ProgramError(f"rule coverage mismatch; missing={sorted(missing)} extra={sorted(extra)}")
    for key, r in p.rules.items():
        if key != r.key:
            raise ProgramError(f"rule stored under wrong key {key}")
        if len(r.params) != sch.arity(r.trigger):
            raise ProgramError(f"{r.target}: trigger params do not match arity of {r.trigger!r}")
        if len(r.target_params) != sch.arity(r.target):
            raise ProgramError(f"{r.target}: target params do not match its arity")
        names = r.params + r.target_params
        if len(set(names)) != len(names):
            raise ProgramError(f"{r.target}: trigger/target variables must be distinct")
        is_rel_target = r.target in sch.relations
        if is_rel_target and not isinstance(r.body, Formula):
            raise ProgramError(f"{r.target}: relation target needs a formula body")
        if not is_rel_target and not isinstance(r.body, Term):
            raise ProgramError(f"{r.target}: function target needs a term body")
        loose = free_vars(r.body) - set(names)
        if loose:
            raise ProgramError(f"{r.target}: unbound variables {sorted(loose)} in rule body")
        for sym in symbols_used(r.body):
            if sym not in sch.relations and sym not in sch.functions:
                raise ProgramError(f"{r.target}: unknown symbol {sym!r} in rule body")


# -- one-step and many-step semantics --------------------------------------------

def apply(p: DynamicProgram, s: State, m: Modification, compiled: bool = True) -> State:
    """The successor state: input updated by `m`, every aux symbol recomputed
    from its rule against the *old* state (simultaneous semantics), built-in
    part and constants untouched."""
    check_modification(p.schema, s.n, m)
    if compiled:
        from .compiler import compiled_apply
        return compiled_apply(p, s, m)
    return _reference_apply(p, s, m)


def _reference_apply(p: DynamicProgram, s: State, m: Modification) -> State:
    relations = dict(s.relations)
    functions = dict(s.functions)
    relations[m.relation] = (s.relations[m.relation] | {m.tuple} if m.kind == INS
                             else s.relations[m.relation] - {m.tuple})
    for target in p.schema.aux_symbols:
        rule = p.rule(target, m.kind, m.relation)
        base_asg = dict(zip(rule.params, m.tuple))
        ar = p.schema.arity(target)
        if target in p.schema.relations:
            held = set()
            for tup in itertools.product(s.domain, repeat=ar):
                asg = dict(base_asg)
                asg.update(zip(rule.target_params, tup))
                if eval_formula(rule.body, s, asg):
                    held.add(tup)
            relations[target] = frozenset(held)
        else:
            table = {}
            for tup in itertools.product(s.domain, repeat=ar):
                asg = dict(base_asg)
                asg.update(zip(rule.target_params, tup))
                table[tup] = eval_term(rule.body, s, asg)
            functions[target] = table
    return State(s.schema, s.domain, relations, functions, s.constants)


def run(
    p: DynamicProgram,
    s0: State,
    seq: Sequence[Modification],
    honest_only: bool = False,
    compiled: bool = True,
) -> list[State]:
    """Left fold of apply; returns every intermediate state, s0 first.

    With honest_only, a step inserting a present tuple or deleting an absent
    one raises RejectedSequenceError naming the step (1-based).
    """
    trace = [s0]
    for i, m in enumerate(seq, start=1):
        cur = trace[-1]
        if honest_only and not is_honest(cur, m):
            raise RejectedSequenceError(f"{m} is not honest here", i)
        trace.append(apply(p, cur, m, compiled=compiled))
    return trace


# -- initialization ---------------------------------------------------------------

# Base builders seed aux/builtin interpretations before empty start or oracle
# replay: name -> builder(schema, n) -> (aux_rel_overrides, aux_fun_overrides,
# builtin_rel, builtin_fun).
BaseBuilder = Callable[[Schema, int], tuple[dict, dict, dict, dict]]
BASE_REGISTRY: dict[str, BaseBuilder] = {}

# Fully custom initializers for InitSpec(kind="builtin"): name ->
# fn(program, input_db) -> full State.
INIT_REGISTRY: dict[str, Callable[[DynamicProgram, State], State]] = {}


def register_base(name: str, builder: BaseBuilder) -> None:
    BASE_REGISTRY[name] = builder


def register_init(name: str, fn: Callable[[DynamicProgram, State], State]) -> None:
    INIT_REGISTRY[name] = fn


def _default_base(schema: Schema, n: int):
    return ({}, {}, {}, {})


register_base("default", _default_base)


def _base_state(p: DynamicProgram, input_db: State, empty_input: bool) -> State:
    sch = p.schema
    n = input_db.n
    name = p.init.base or "default"
    if name not in BASE_REGISTRY and name.startswith("rel2fun__"):
        from .transforms import resolve_rel2fun_bases
        resolve_rel2fun_bases(name)
    builder = BASE_REGISTRY.get(name)
    if builder is None:
        raise ProgramError(f"unknown base initializer {p.init.base!r}")
    aux_rels, aux_funs, bi_rels, bi_funs = builder(sch, n)
    relations: dict[str, Iterable[tuple]] = {}
    functions: dict[str, Mapping[tuple, int]] = {}
    for name in sch.relations:
        role = sch.role(name)
        if role is Role.INPUT:
            relations[name] = () if empty_input else input_db.relations[name]
        elif role is Role.BUILTIN:
            relations[name] = bi_rels.get(name, ())
        else:
            relations[name] = aux_rels.get(name, ())
    for name, ar in sch.functions.items():
        role = sch.role(name)
        src = bi_funs if role is Role.BUILTIN else aux_funs
        functions[name] = src.get(name, default_function(n, ar))
    return make_state(sch, n, relations, functions, dict(input_db.constants))


def init_state(p: DynamicProgram, input_db: State) -> State:
    """The initial program state for an input database.

    `input_db` is a state over the input-only schema (it carries the domain
    and the constant interpretations).
    """
    if input_db.schema != p.schema.input_only():
        raise SchemaError("input database does not match the program's input schema")
    spec = p.init
    if spec.kind == "empty":
        return _base_state(p, input_db, empty_input=False)
    if spec.kind == "oracle":
        state = _base_state(p, input_db, empty_input=True)
        mods = [Modification(rel, tup, INS)
                for rel in sorted(p.schema.input_relations)
                for tup in sorted(input_db.relations[rel])]
        for m in mods:
            state = apply(p, state, m)
        return state
    if spec.kind == "table":
        rels, funs = decode_table(spec.table)
        state = _base_state(p, input_db, empty_input=False)
        relations = dict(state.relations)
        functions = dict(state.functions)
        for name, ts in rels.items():
            relations[name] = frozenset(ts)
        for name, table in funs.items():
            functions[name] = dict(table)
        out = State(p.schema, state.domain, relations, functions, state.constants)
        validate_state(out)
        return out
    if spec.kind == "builtin":
        fn = INIT_REGISTRY.get(spec.name or "")
        if fn is None:
            raise ProgramError(f"oracle-backed initializer {spec.name!r} is not registered")
        return fn(p, input_db)
    raise ProgramError(f"unknown init kind {spec.kind!r}")


def empty_input_db(p: DynamicProgram, n: int, constants: Mapping[str, int] | None = None) -> State:
    """An empty input database over 0..n-1 with the standard constant layout
    (s=0, t=n-1 when those constants exist and no layout is given)."""
    sch = p.schema.input_only()
    consts = dict(constants or {})
    for name in sorted(sch.constants):
        if name not in consts:
            if name == "s":
                consts[name] = 0
            elif name == "t":
                consts[name] = n - 1
            else:
                consts[name] = len(consts) % n
    return make_state(sch, n, {}, {}, consts)


# -- initializers as first-class objects, and invariance checking ------------------

class Initializer:
    """Anything that maps an input database to a full initial state."""

    def build(self, input_db: State) -> State:
        raise NotImplementedError


class ProgramInit(Initializer):
    def __init__(self, program: DynamicProgram):
        self.program = program

    def build(self, input_db: State) -> State:
        return init_state(self.program, input_db)


class SchemaInit(Initializer):
    """Initializer defined directly on a schema by a per-symbol recipe."""

    def __init__(self, schema: Schema):
        self.schema = schema

    def aux_interps(self, input_db: State) -> tuple[dict, dict]:
        return {}, {}

    def build(self, input_db: State) -> State:
        aux_rels, aux_funs = self.aux_interps(input_db)
        relations: dict[str, Iterable[tuple]] = {}
        functions: dict[str, Mapping[tuple, int]] = {}
        for name in self.schema.relations:
            role = self.schema.role(name)
            if role is Role.INPUT:
                relations[name] = input_db.relations[name]
            else:
                relations[name] = aux_rels.get(name, ())
        for name, ar in self.schema.functions.items():
            functions[name] = aux_funs.get(name, default_function(input_db.n, ar))
        return make_state(self.schema, input_db.n, relations, functions, dict(input_db.constants))


class EmptyInit(SchemaInit):
    """All aux relations empty; functions projection-on-first-argument."""


class CopyInputInit(SchemaInit):
    """Copy input relations into designated same-arity aux relations."""

    def __init__(self, schema: Schema, mapping: Mapping[str, str]):
        super().__init__(schema)
        self.mapping = dict(mapping)  # aux symbol -> input symbol

    def aux_interps(self, input_db: State):
        return {aux: set(input_db.relations[inp]) for aux, inp in self.mapping.items()}, {}


class FixedElementInit(SchemaInit):
    """Mark a fixed domain element in one aux relation, whatever the input."""

    def __init__(self, schema: Schema, symbol: str, element: int = 0):
        super().__init__(schema)
        self.symbol = symbol
        self.element = element

    def aux_interps(self, input_db: State):
        return {self.symbol: {(self.element,)}}, {}


class ConstFunctionInit(SchemaInit):
    """Every aux function maps everything to the value of a constant symbol."""

    def __init__(self, schema: Schema, const_symbol: str):
        super().__init__(schema)
        self.const_symbol = const_symbol

    def aux_interps(self, input_db: State):
        val = input_db.constants[self.const_symbol]
        funs = {}
        for name, ar in self.schema.functions.items():
            if self.schema.role(name) is Role.AUX:
                funs[name] = {args: val for args in itertools.product(range(input_db.n), repeat=ar)}
        return {}, funs


def is_invariant_init(
    init: Initializer,
    input_db: State,
    permutations: str | int = "all",
    seed: int = 0,
    exhaustive_cap: int = 7,
) -> bool:
    """Does pi(init(D)) equal init(pi(D)) for every tested permutation pi?

    Exhaustive when permutations == "all" and the domain is small enough,
    otherwise a seeded sample of the requested size.
    """
    n = input_db.n
    base = init.build(input_db)
    if permutations == "all" and n <= exhaustive_cap:
        perms: Iterable[Sequence[int]] = itertools.permutations(range(n))
    else:
        count = permutations if isinstance(permutations, int) else min(math.factorial(n), 200)
        rng = random.Random(seed)
        perms = [rng.sample(range(n), n) for _ in range(count)]
    for perm in perms:
        pi = dict(enumerate(perm))
        transported = transport(base, pi)
        rebuilt = init.build(transport(input_db, pi))
        if transported != rebuilt:
            return False
    return True
