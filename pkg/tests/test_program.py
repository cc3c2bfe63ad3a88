import random

import pytest

from dynqf.corpus import builtin_program
from dynqf.errors import RejectedSequenceError, SchemaError
from dynqf.program import (ConstFunctionInit, CopyInputInit, EmptyInit,
                           FixedElementInit, InitSpec, ProgramInit, UpdateRule,
                           _reference_apply, apply, empty_input_db, init_state,
                           is_invariant_init, run)
from dynqf.schema import make_schema
from dynqf.state import delete, ins, make_state


def nes():
    return builtin_program("non-empty-set").program


def start(p, n):
    return init_state(p, empty_input_db(p, n))


def test_nonemptyset_first_insert():
    p = nes()
    s1 = apply(p, start(p, 3), ins("U", 0))
    assert s1.query_value("Q") is True
    assert s1.rel("First") == {(0,)} and s1.rel("Last") == {(0,)} and s1.rel("List") == frozenset()


def test_nonemptyset_second_insert_builds_list():
    p = nes()
    s = run(p, start(p, 3), [ins("U", 0), ins("U", 1)])[-1]
    assert s.rel("First") == {(0,)} and s.rel("Last") == {(1,)} and s.rel("List") == {(0, 1)}
    assert s.query_value("Q") is True


def test_nonemptyset_deletions():
    p = nes()
    s = run(p, start(p, 3), [ins("U", 0), ins("U", 1), delete("U", 0)])[-1]
    assert s.rel("First") == {(1,)} and s.rel("Last") == {(1,)} and s.rel("List") == frozenset()
    assert s.query_value("Q") is True
    s2 = apply(p, s, delete("U", 1))
    assert s2.query_value("Q") is False


def test_run_empty_sequence():
    p = nes()
    s0 = start(p, 2)
    assert run(p, s0, []) == [s0]


def test_run_honest_rejects_with_step():
    p = nes()
    with pytest.raises(RejectedSequenceError) as exc:
        run(p, start(p, 2), [ins("U", 0), ins("U", 0)], honest_only=True)
    assert exc.value.step == 2


def _differential_walk(p, s, rng, steps=25, guard=None):
    rel = p.schema.input_relations[0]
    ar = p.schema.arity(rel)
    n = s.n
    for _ in range(steps):
        tup = tuple(rng.randrange(n) for _ in range(ar))
        m = ins(rel, *tup) if rng.random() < 0.6 else delete(rel, *tup)
        if guard is not None and not guard(m, n, s.constants):
            continue
        fast = apply(p, s, m, compiled=True)
        slow = _reference_apply(p, s, m)
        assert fast == slow
        s = fast
    return s


def test_compiled_and_reference_apply_agree():
    rng = random.Random(5)
    for name in ("non-empty-set", "st-twopath-binary", "reach-1layer-qf", "s-twopath-ternary"):
        entry = builtin_program(name)
        guard = entry.instance_guard if entry.guard_name != "any" else None
        _differential_walk(entry.program, start(entry.program, 4), rng, guard=guard)


def test_compiled_and_reference_agree_on_ite_and_zero_ary_functions():
    from dynqf.transforms import relations_to_functions
    rng = random.Random(7)
    p = relations_to_functions(builtin_program("non-empty-set").program)
    _differential_walk(p, start(p, 4), rng)


def test_compiled_and_reference_agree_on_random_programs():
    # the deepest engine differential: random rule bodies over a mixed
    # schema, random walks, compiled output must equal the reference
    import random as _random
    from dynqf.formulas import (And, App, Const, Eq, FALSE, Ite, Not, Or,
                                RelAtom, TRUE, Var)
    from dynqf.program import DynamicProgram, InitSpec, validate_program
    from dynqf.schema import make_schema

    sch = make_schema(input_relations={"E": 2, "U": 1},
                      aux_relations={"Q": 0, "A": 1, "B": 2},
                      aux_functions={"g": 1, "c": 0},
                      builtin_functions={"h": 1},
                      constants=("s",))

    def rand_term(rng, vars, depth):
        choices = ["var", "const"]
        if depth > 0:
            choices += ["g", "h", "c", "ite"]
        kind = rng.choice(choices)
        if kind == "var":
            return Var(rng.choice(vars))
        if kind == "const":
            return Const("s")
        if kind in ("g", "h"):
            return App(kind, (rand_term(rng, vars, depth - 1),))
        if kind == "c":
            return App("c", ())
        return Ite(rand_formula(rng, vars, depth - 1),
                   rand_term(rng, vars, depth - 1), rand_term(rng, vars, depth - 1))

    def rand_formula(rng, vars, depth):
        atoms = [
            lambda: RelAtom("E", (rand_term(rng, vars, depth), rand_term(rng, vars, depth))),
            lambda: RelAtom("U", (rand_term(rng, vars, depth),)),
            lambda: RelAtom("A", (rand_term(rng, vars, depth),)),
            lambda: RelAtom("B", (rand_term(rng, vars, depth), rand_term(rng, vars, depth))),
            lambda: RelAtom("Q", ()),
            lambda: Eq(rand_term(rng, vars, depth), rand_term(rng, vars, depth)),
            lambda: TRUE,
            lambda: FALSE,
        ]
        if depth <= 0:
            return rng.choice(atoms)()
        kind = rng.choice(["atom", "not", "and", "or"])
        if kind == "atom":
            return rng.choice(atoms)()
        if kind == "not":
            return Not(rand_formula(rng, vars, depth - 1))
        left, right = rand_formula(rng, vars, depth - 1), rand_formula(rng, vars, depth - 1)
        return And(left, right) if kind == "and" else Or(left, right)

    rng = _random.Random(99)
    for trial in range(6):
        rules = {}
        for trigger, t_ar in (("E", 2), ("U", 1)):
            params = tuple(f"u{i}" for i in range(t_ar))
            for kind in ("ins", "del"):
                for target in ("Q", "A", "B", "g", "c"):
                    ar = sch.arity(target)
                    tparams = tuple(f"y{i}" for i in range(ar))
                    vars = list(params + tparams)
                    if target in sch.functions:
                        body = rand_term(rng, vars, 2)
                    else:
                        body = rand_formula(rng, vars, 2)
                    rules[(target, kind, trigger)] = UpdateRule(
                        target, kind, trigger, params, tparams, body)
        p = DynamicProgram(f"rand{trial}", sch, rules, "Q", InitSpec("empty"))
        validate_program(p)
        s = init_state(p, make_state(sch.input_only(), 3, {}, constants={"s": 0}))
        for _ in range(8):
            rel = rng.choice(("E", "U"))
            tup = tuple(rng.randrange(3) for _ in range(sch.arity(rel)))
            m = ins(rel, *tup) if rng.random() < 0.5 else delete(rel, *tup)
            fast = apply(p, s, m, compiled=True)
            slow = _reference_apply(p, s, m)
            assert fast == slow, (trial, m)
            s = fast


def test_compiled_and_reference_agree_with_builtin_relations():
    from dynqf.parser import parse_program
    src = """
program with_builtin_rel
input   { U/1 }
aux     { Q/0, A/1 }
builtin { Le/2 }
query   Q
init    table { Le = (0,0) (0,1) (0,2) (1,1) (1,2) (2,2) }
on insert U(u):
  Q():  Q() | Le(u, u)
  A(x): A(x) | (Le(u, x) & x != u)
on delete U(u):
  Q():  Q() & !Le(u, u)
  A(x): A(x) & !Le(x, u)
"""
    p = parse_program(src)
    rng = random.Random(11)
    _differential_walk(p, start(p, 3), rng)


def test_simultaneity_rule_order_is_irrelevant():
    p = nes()
    shuffled = dict(reversed(list(p.rules.items())))
    from dynqf.program import DynamicProgram
    q = DynamicProgram(p.name, p.schema, shuffled, p.query_symbol, p.init)
    s0 = start(p, 3)
    seq = [ins("U", 0), ins("U", 1), delete("U", 0)]
    assert run(p, s0, seq) == run(q, start(q, 3), seq)


def test_empty_init_all_aux_empty():
    sch = make_schema(input_relations={"U": 1}, aux_relations={"Q": 0, "A": 2},
                      aux_functions={"g": 1})
    from dynqf.program import DynamicProgram, frame_rule
    rules = {}
    for target in ("Q", "A", "g"):
        for kind in ("ins", "del"):
            rules[(target, kind, "U")] = frame_rule(sch, target, kind, "U")
    p = DynamicProgram("framey", sch, rules, "Q", InitSpec("empty"))
    s0 = init_state(p, empty_input_db(p, 3))
    assert s0.rel("Q") == frozenset() and s0.rel("A") == frozenset()
    # canonical default: projection onto the first argument
    assert s0.fun("g") == {(0,): 0, (1,): 1, (2,): 2}


def test_oracle_init_replays_sorted_insertions():
    p = nes()
    db = make_state(p.schema.input_only(), 3, {"U": {(0,), (1,)}})
    s0 = init_state(p, db)
    # replay order is sorted: 0 then 1
    assert s0.rel("First") == {(0,)} and s0.rel("Last") == {(1,)} and s0.rel("List") == {(0, 1)}
    assert s0.query_value("Q") is True


def test_reach_base_state():
    r = builtin_program("reach-1layer-qf").program
    s0 = start(r, 5)
    assert s0.rel("C") == {(0,)}
    assert s0.query_value("Q") is False
    assert s0.rel("ConS") == frozenset() and s0.rel("ConT") == frozenset()
    assert s0.fun("Succ")[(4,)] == 4 and s0.fun("Pred")[(0,)] == 0


def test_init_state_schema_mismatch():
    p = nes()
    other = make_state(make_schema(input_relations={"V": 1}), 2)
    with pytest.raises(SchemaError):
        init_state(p, other)


# -- initialization invariance -------------------------------------------------

TOY = make_schema(input_relations={"U": 1}, aux_relations={"A": 1})


def toy_db(n, members=()):
    return make_state(TOY.input_only(), n, {"U": {(m,) for m in members}})


def test_empty_init_is_invariant():
    assert is_invariant_init(EmptyInit(TOY), toy_db(4, (1,)), "all")


def test_copy_input_init_is_invariant():
    init = CopyInputInit(TOY, {"A": "U"})
    assert is_invariant_init(init, toy_db(4, (1, 2)), "all")


def test_fixed_element_init_is_rejected():
    init = FixedElementInit(TOY, "A", 0)
    assert not is_invariant_init(init, toy_db(3), "all")


def test_const_function_init_is_invariant():
    sch = make_schema(input_relations={"E": 2}, aux_functions={"g": 1}, constants=("s", "t"))
    db = make_state(sch.input_only(), 4, {"E": {(0, 1)}}, constants={"s": 0, "t": 3})
    assert is_invariant_init(ConstFunctionInit(sch, "s"), db, "all")


def test_oracle_init_of_list_program_is_not_invariant():
    # the replay order bakes element identities into the list
    p = nes()
    assert not is_invariant_init(ProgramInit(p), toy_db(3, (0, 1)).__class__(
        p.schema.input_only(), (0, 1, 2),
        {"U": frozenset({(0,), (1,)})}, {}, {}), "all")
