"""Maintenance checking against oracles, subsequence/Higman search,
substructure property suites, neighborhoods and similarity, and the
lower-bound attack drivers.

Exhaustive checking walks the reachable state space breadth-first with
deduplication: the query bit and the oracle are functions of the state
alone, so visiting every reachable state once is equivalent to checking
every admissible sequence.  Counterexamples are reported for the shortest,
lexicographically least sequence and are self-validated by replay before
they are returned.
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .atoms import atomic_type, diverse_tuples, find_homogeneous_subset
from .compiler import LeanContext, context_for_state
from .corpus import InstanceGuard
from .errors import DynqfError, GuardError, ResourceLimitError
from .formulas import classify_syntax, eval_term, terms_up_to_depth, equality_type_of, EqualityType
from .program import DynamicProgram, empty_input_db, init_state, run
from .queries import ORACLES, oracle_nonemptyset, oracle_st_reach
from .schema import Role
from .state import DEL, INS, Modification, State, is_honest, transport
from .transforms import deletion_depth, eliminate_repeated_variables


# -- configuration and outcomes ----------------------------------------------------

@dataclass
class CheckConfig:
    domain_size: int
    max_len: int
    mode: str = "exhaustive"  # "exhaustive" | "random"
    samples: int = 1000
    seed: int = 0
    honest_only: bool = True
    guard: InstanceGuard | None = None
    constants: dict[str, int] | None = None
    state_cap: int = 2_000_000
    override_cap: bool = False
    jobs: int = 1


@dataclass
class Counterexample:
    """A replayable maintenance failure.

    The sequence starts from the recorded initial input database; at
    `step` (1-based; 0 means the initial state itself) the program's query
    value `produced` differs from the oracle's `expected`.
    """

    program_name: str
    initial: State
    sequence: tuple[Modification, ...]
    step: int
    expected: bool
    produced: bool
    seed: int | None = None
    trace_digest: str = ""


@dataclass
class Verdict:
    status: str  # "ok" | "counterexample" | "inconclusive" | "resource"
    bounds: dict
    checked_states: int = 0
    checked_steps: int = 0
    counterexample: Counterexample | None = None
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "counterexample": 1}.get(self.status, 2)


def validate_counterexample(p: DynamicProgram, oracle: Callable[[State], bool],
                            cex: Counterexample) -> bool:
    """Replay the recorded sequence; the recorded divergence must reproduce."""
    s = init_state(p, cex.initial)
    trace = run(p, s, cex.sequence[:cex.step])
    final = trace[-1]
    produced = final.query_value(p.query_symbol)
    expected = oracle(final.input_part())
    return produced == cex.produced and expected == cex.expected and produced != expected


def _finish_counterexample(p: DynamicProgram, oracle, cex: Counterexample) -> Counterexample:
    from .serialize import trace_digest
    s = init_state(p, cex.initial)
    cex.trace_digest = trace_digest(run(p, s, cex.sequence[:cex.step]))
    if not validate_counterexample(p, oracle, cex):
        raise DynqfError("internal error: counterexample failed self-validation")
    return cex


# -- lean oracles --------------------------------------------------------------------

def _lean_oracle(oracle: Callable[[State], bool], ctx: LeanContext):
    """A fast equivalent of a known oracle on lean states; falls back to
    rebuilding full states for unknown oracles."""
    n, consts = ctx.n, ctx.constants
    idx = ctx.rel_index
    if oracle is oracle_nonemptyset and "U" in idx:
        i = idx["U"]
        return lambda lean: bool(lean[0][i])
    if "E" in idx and "s" in consts:
        i = idx["E"]
        s = consts["s"]
        if oracle is ORACLES["st-twopath"] and "t" in consts:
            t = consts["t"]
            def st_twopath(lean):
                E = lean[0][i]
                return any((s, x) in E and (x, t) in E for x in range(n))
            return st_twopath
        if oracle is ORACLES["s-twopath"]:
            def s_twopath(lean):
                E = lean[0][i]
                return any((s, x) in E and (x, y) in E for x in range(n) for y in range(n))
            return s_twopath
        if oracle is oracle_st_reach and "t" in consts:
            t = consts["t"]
            def reach(lean):
                E = lean[0][i]
                succ: dict[int, list[int]] = {}
                for (u, v) in E:
                    succ.setdefault(u, []).append(v)
                seen, frontier = {s}, [s]
                while frontier:
                    nxt = []
                    for u in frontier:
                        for v in succ.get(u, ()):
                            if v not in seen:
                                seen.add(v)
                                nxt.append(v)
                    frontier = nxt
                return t in seen
            return reach
    return lambda lean: oracle(ctx.from_lean(lean).input_part())


def _candidate_mods(p: DynamicProgram, n: int) -> list[Modification]:
    out = []
    for rel in sorted(p.schema.input_relations):
        ar = p.schema.arity(rel)
        for tup in itertools.product(range(n), repeat=ar):
            for kind in (INS, DEL):
                out.append(Modification(rel, tup, kind))
    out.sort()
    return out


# -- maintenance checking ---------------------------------------------------------------

def check_maintenance(p: DynamicProgram, oracle: Callable[[State], bool],
                      cfg: CheckConfig) -> Verdict:
    """Exhaustively or randomly drive the program from the empty database and
    compare the query symbol against the oracle after every step.

    Exhaustive mode explores every state reachable by an admissible sequence
    of at most max_len modifications (breadth-first, deduplicated), which
    covers all such sequences.  Checking only empty starts loses no
    generality for the shipped programs: their oracle initialization is
    defined as replay-from-empty, so a non-empty start is a longer empty
    start.  Random mode replays `samples` seeded admissible sequences.
    """
    bounds = {"domain_size": cfg.domain_size, "max_len": cfg.max_len, "mode": cfg.mode,
              "honest_only": cfg.honest_only}
    if cfg.mode == "random":
        bounds["samples"] = cfg.samples
        return _random_check(p, oracle, cfg, bounds)
    if cfg.mode != "exhaustive":
        raise DynqfError(f"unknown mode {cfg.mode!r}")
    mods = _candidate_mods(p, cfg.domain_size)
    # quick pre-estimate so hopeless configurations fail fast
    est = sum(len(mods) ** d for d in range(1, min(cfg.max_len, 4) + 1))
    if est > cfg.state_cap * 10 and not cfg.override_cap:
        return Verdict("resource", bounds,
                       notes=[f"estimated {est} sequence prefixes exceeds the state cap "
                              f"{cfg.state_cap}; pass override to force the search"])
    if cfg.jobs > 1:
        return _parallel_check(p, oracle, cfg, bounds, mods)
    return _bfs_check(p, oracle, cfg, bounds, mods, first=None)


def _setup(p: DynamicProgram, cfg: CheckConfig):
    db = empty_input_db(p, cfg.domain_size, cfg.constants)
    s0 = init_state(p, db)
    ctx = context_for_state(p, s0)
    return db, ctx.to_lean(s0), ctx


def _bfs_check(p, oracle, cfg, bounds, mods, first: Modification | None) -> Verdict:
    db, lean0, ctx = _setup(p, cfg)
    lean_oracle = _lean_oracle(oracle, ctx)
    consts = db.constants
    guard = cfg.guard
    states = steps = 0
    prefix: tuple[Modification, ...] = ()

    def diverged(lean) -> tuple[bool, bool] | None:
        exp = lean_oracle(lean)
        got = ctx.query(lean)
        return (exp, got) if exp != got else None

    def cex(seq, step, exp, got) -> Verdict:
        c = Counterexample(p.name, db, tuple(seq), step, exp, got)
        _finish_counterexample(p, oracle, c)
        return Verdict("counterexample", bounds, states, steps, c)

    if first is None:
        d = diverged(lean0)
        if d:
            return cex((), 0, *d)
        frontier = [lean0]
        parents: dict = {lean0: None}
        start_depth = 0
    else:
        # admissibility of `first` is the caller's responsibility
        lean1 = ctx.apply(lean0, first)
        prefix = (first,)
        d = diverged(lean1)
        if d:
            return cex(prefix, 1, *d)
        frontier = [lean1]
        parents = {lean1: None}
        start_depth = 1

    seen = set(frontier)
    states = len(frontier)
    for depth in range(start_depth + 1, cfg.max_len + 1):
        new_frontier = []
        for st in frontier:
            for m in mods:
                if cfg.honest_only and (m.tuple in ctx.rel(st, m.relation)) == (m.kind == INS):
                    continue
                if guard is not None and not guard(m, cfg.domain_size, consts):
                    continue
                succ = ctx.apply(st, m)
                steps += 1
                if succ in seen:
                    continue
                seen.add(succ)
                parents[succ] = (st, m)
                states += 1
                if states > cfg.state_cap and not cfg.override_cap:
                    return Verdict("resource", bounds, states, steps,
                                   notes=[f"state cap {cfg.state_cap} reached at depth {depth}"])
                d = diverged(succ)
                if d:
                    seq = []
                    node = succ
                    while parents[node] is not None:
                        node, m2 = parents[node]
                        seq.append(m2)
                    seq.reverse()
                    return cex(prefix + tuple(seq), depth, *d)
                new_frontier.append(succ)
        frontier = new_frontier
    return Verdict("ok", bounds, states, steps)


def _worker_check(args) -> Verdict:
    p, oracle_name, cfg, bounds, mods, chunk = args
    oracle = ORACLES[oracle_name]
    best: Verdict | None = None
    for first in chunk:
        db = empty_input_db(p, cfg.domain_size, cfg.constants)
        s0 = init_state(p, db)
        ctx = context_for_state(p, s0)
        if cfg.honest_only and not is_honest_lean(ctx, ctx.to_lean(s0), first):
            continue
        if cfg.guard is not None and not cfg.guard(first, cfg.domain_size, db.constants):
            continue
        v = _bfs_check(p, oracle, cfg, bounds, mods, first)
        best = _merge_verdicts(best, v)
        if best.status == "counterexample" and best.counterexample.step == 1:
            break
    return best or Verdict("ok", bounds)


def is_honest_lean(ctx: LeanContext, lean, m: Modification) -> bool:
    present = m.tuple in ctx.rel(lean, m.relation)
    return (not present) if m.kind == INS else present


def _merge_verdicts(a: Verdict | None, b: Verdict) -> Verdict:
    if a is None:
        return b
    merged_states = a.checked_states + b.checked_states
    merged_steps = a.checked_steps + b.checked_steps
    order = {"counterexample": 0, "resource": 1, "inconclusive": 2, "ok": 3}
    pick = a
    if order[b.status] < order[a.status]:
        pick = b
    elif b.status == a.status == "counterexample":
        ka = (len(a.counterexample.sequence), a.counterexample.sequence)
        kb = (len(b.counterexample.sequence), b.counterexample.sequence)
        pick = b if kb < ka else a
    out = Verdict(pick.status, pick.bounds, merged_states, merged_steps,
                  pick.counterexample, pick.seed, a.notes + b.notes)
    return out


def _parallel_check(p, oracle, cfg, bounds, mods) -> Verdict:
    oracle_name = next((k for k, v in ORACLES.items() if v is oracle), None)
    if oracle_name is None:
        v = _bfs_check(p, oracle, cfg, bounds, mods, None)
        v.notes.append("oracle not registered by name; ran serially")
        return v
    db, lean0, ctx = _setup(p, cfg)
    d0 = _lean_oracle(oracle, ctx)(lean0)
    if d0 != ctx.query(lean0):
        c = _finish_counterexample(p, oracle, Counterexample(p.name, db, (), 0, d0, not d0))
        return Verdict("counterexample", bounds, 1, 0, c)
    chunks = [mods[i::cfg.jobs] for i in range(cfg.jobs)]
    args = [(p, oracle_name, cfg, bounds, mods, chunk) for chunk in chunks if chunk]
    best: Verdict | None = None
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        for v in pool.map(_worker_check, args):
            best = _merge_verdicts(best, v)
    return best or Verdict("ok", bounds)


def _random_check(p, oracle, cfg, bounds) -> Verdict:
    db, lean0, ctx = _setup(p, cfg)
    lean_oracle = _lean_oracle(oracle, ctx)
    mods = _candidate_mods(p, cfg.domain_size)
    rng = random.Random(cfg.seed)
    consts = db.constants
    steps = 0
    if lean_oracle(lean0) != ctx.query(lean0):
        c = _finish_counterexample(p, oracle, Counterexample(
            p.name, db, (), 0, lean_oracle(lean0), ctx.query(lean0), seed=cfg.seed))
        return Verdict("counterexample", bounds, 1, 0, c, seed=cfg.seed)
    for _ in range(cfg.samples):
        length = rng.randint(1, cfg.max_len)
        lean = lean0
        seq: list[Modification] = []
        for i in range(1, length + 1):
            admissible = [m for m in mods
                          if (not cfg.honest_only or is_honest_lean(ctx, lean, m))
                          and (cfg.guard is None or cfg.guard(m, cfg.domain_size, consts))]
            if not admissible:
                break
            m = rng.choice(admissible)
            lean = ctx.apply(lean, m)
            seq.append(m)
            steps += 1
            exp = lean_oracle(lean)
            got = ctx.query(lean)
            if exp != got:
                c = _finish_counterexample(p, oracle, Counterexample(
                    p.name, db, tuple(seq), i, exp, got, seed=cfg.seed))
                return Verdict("counterexample", bounds, 0, steps, c, seed=cfg.seed)
    return Verdict("ok", bounds, 0, steps, seed=cfg.seed)


# -- subsequences and Higman pairs ----------------------------------------------------

# A type word: one atomic-type letter per tracked element, as the attack
# drivers build them from suffix or gadget states.
TypeWord = tuple


def type_word(s: State, elements: Sequence[int], sigma: Iterable[str] | None = None,
              anchor: Sequence[int] = ()) -> TypeWord:
    """One letter per element: the sigma-type of (element, anchor...) in s."""
    return tuple(atomic_type(s, (e, *anchor), sigma) for e in elements)


def subsequence(u: Sequence, v: Sequence) -> bool:
    """Does u embed order-preservingly into v?"""
    it = iter(v)
    return all(any(x == y for y in it) for x in u)


def embedding_positions(u: Sequence, v: Sequence) -> list[int] | None:
    """Greedy leftmost embedding of u into v, as 0-based positions."""
    out = []
    j = 0
    for x in u:
        while j < len(v) and v[j] != x:
            j += 1
        if j == len(v):
            return None
        out.append(j)
        j += 1
    return out


def higman_pair(words: Sequence[Sequence]) -> tuple[int, int] | None:
    """The least pair (l, k), minimizing k then l, with l < k and
    words[l] a subsequence of words[k]; 0-based indices, None if no pair."""
    for k in range(len(words)):
        for l in range(k):
            if subsequence(words[l], words[k]):
                return (l, k)
    return None


# -- neighborhoods and similarity -------------------------------------------------------

def neighborhood(s: State, a: Iterable[int], k: int, cap: int = 64) -> set[int]:
    """All values of plain terms of depth <= k under assignments into `a`.

    Depth 0 contributes the set itself and the constant symbols; each further
    level closes under one application of every function symbol (0-ary
    function symbols enter at depth 1).
    """
    if k > cap:
        raise ResourceLimitError("neighborhood depth exceeds cap", k)
    current = set(a) | {s.constants[c] for c in s.schema.constants}
    for _ in range(k):
        nxt = set(current)
        for name, ar in s.schema.functions.items():
            table = s.functions[name]
            for args in itertools.product(sorted(current), repeat=ar):
                nxt.add(table[args])
        if nxt == current:
            break
        current = nxt
    return current


def is_closed(s: State, a: Iterable[int]) -> bool:
    """A set is closed when its 1-neighborhood adds nothing."""
    return neighborhood(s, a, 1) == set(a)


def k_similar(s: State, a_tuple: Sequence[int], t: State, b_tuple: Sequence[int],
              k: int, cap: int = 50000) -> dict[int, int] | None:
    """The bijection induced by term(a-tuple) -> term(b-tuple) over all plain
    terms of depth <= k, if it is well-defined, bijective between the two
    k-neighborhoods, and relation-preserving there; None otherwise."""
    if s.schema != t.schema:
        raise DynqfError("states do not share a schema")
    if len(a_tuple) != len(b_tuple):
        raise DynqfError("tuples differ in length")
    vars = tuple(f"z{i+1}" for i in range(len(a_tuple)))
    terms = terms_up_to_depth(s.schema, k, vars, cap=cap)
    asg_s = dict(zip(vars, a_tuple))
    asg_t = dict(zip(vars, b_tuple))
    pi: dict[int, int] = {}
    for term in terms:
        v = eval_term(term, s, asg_s)
        w = eval_term(term, t, asg_t)
        if pi.setdefault(v, w) != w:
            return None
    if len(set(pi.values())) != len(pi):
        return None
    nb = sorted(pi)
    for name, ar in s.schema.relations.items():
        rs, rt = s.relations[name], t.relations[name]
        for args in itertools.product(nb, repeat=ar):
            if (args in rs) != (tuple(pi[x] for x in args) in rt):
                return None
    return pi


def neighborhood_vector(s: State, tup: Sequence[int], k: int,
                        cap: int | None = None) -> tuple[tuple[int, ...], EqualityType]:
    """Per component, the values of the canonical term enumeration in one
    variable (the bare variable comes first), concatenated; plus the equality
    type of the concatenated vector.

    Without an explicit cap this requires unary/0-ary function symbols only,
    where the one-variable enumeration is the natural one.
    """
    if cap is None:
        if any(ar > 1 for ar in s.schema.functions.values()):
            raise ResourceLimitError(
                "higher-arity function symbols need an explicit term cap", 0)
        cap = 50000
    terms = terms_up_to_depth(s.schema, k, ("x",), cap=cap)
    vec: list[int] = []
    for c in tup:
        vec.extend(eval_term(t, s, {"x": c}) for t in terms)
    vec_t = tuple(vec)
    return vec_t, equality_type_of(vec_t)


# -- substructure property suites ---------------------------------------------------------

@dataclass
class PropertyReport:
    status: str  # "ok" | "violation" | "inconclusive"
    samples: int
    skipped: int
    seed: int
    witness: dict | None = None


def _random_reachable_state(p: DynamicProgram, cfg: CheckConfig, rng: random.Random) -> State:
    db = empty_input_db(p, cfg.domain_size, cfg.constants)
    s = init_state(p, db)
    mods = _candidate_mods(p, cfg.domain_size)
    for _ in range(rng.randint(0, cfg.max_len * 2)):
        admissible = [m for m in mods
                      if (not cfg.honest_only or is_honest(s, m))
                      and (cfg.guard is None or cfg.guard(m, cfg.domain_size, db.constants))]
        if not admissible:
            break
        s = _apply_fast(p, s, rng.choice(admissible))
    return s


def _apply_fast(p, s, m):
    from .program import apply
    return apply(p, s, m)


def _mods_on(p: DynamicProgram, subset: Sequence[int], rng: random.Random,
             length: int) -> list[Modification]:
    out = []
    for _ in range(length):
        rel = rng.choice(p.schema.input_relations)
        ar = p.schema.arity(rel)
        tup = tuple(rng.choice(list(subset)) for _ in range(ar))
        out.append(Modification(rel, tup, rng.choice((INS, DEL))))
    return out


def _pi_of_mods(mods: Sequence[Modification], pi: Mapping[int, int]) -> list[Modification]:
    return [Modification(m.relation, tuple(pi[e] for e in m.tuple), m.kind) for m in mods]


def substructure_property(p: DynamicProgram, cfg: CheckConfig,
                          with_functions: bool = False,
                          similarity_depth: int | None = None,
                          max_tuple: int | None = None) -> PropertyReport:
    """Randomized suite for the core engine invariant: isomorphic (resp.
    similar) substructures, driven by pi-respecting modification sequences,
    stay isomorphic (resp. 0-similar).

    Samples mix whole-state transports (always admissible) with subset pairs
    inside a single reachable state (admissible when the restrictions happen
    to be isomorphic).  A violation means the evaluator itself is broken,
    so any failure is fatal for the build.
    """
    rng = random.Random(cfg.seed)
    if with_functions and similarity_depth is None:
        # one similarity level per potentially consumed nesting step, plus one
        similarity_depth = cfg.max_len * max(p.nesting_depth(), 1) + max(p.nesting_depth(), 1)
    done = skipped = 0
    attempts = 0
    while done < cfg.samples:
        attempts += 1
        if attempts > cfg.samples * 20:
            return PropertyReport("inconclusive", done, skipped, cfg.seed)
        s = _random_reachable_state(p, cfg, rng)
        n = s.n
        cap = max_tuple if max_tuple is not None else (n - 1)
        strategy = rng.choice(("transport", "same-state"))
        if strategy == "transport":
            perm = list(range(n))
            rng.shuffle(perm)
            pi_full = dict(enumerate(perm))
            t = transport(s, pi_full)
            size = rng.randint(1, max(1, min(n - 1, cap)))
            a_set = sorted(rng.sample(range(n), size))
            pairs = [(x, pi_full[x]) for x in a_set]
        else:
            t = s
            size = rng.randint(1, min(3, n, max(1, cap)))
            a_set = sorted(rng.sample(range(n), size))
            b_set = sorted(rng.sample(range(n), size))
            order = list(range(size))
            rng.shuffle(order)
            pairs = [(a_set[i], b_set[order[i]]) for i in range(size)]
        a_tup = tuple(x for x, _ in pairs)
        b_tup = tuple(y for _, y in pairs)
        if len(set(b_tup)) != len(b_tup):
            skipped += 1
            continue
        if with_functions:
            pi = k_similar(s, a_tup, t, b_tup, similarity_depth)
            if pi is None:
                skipped += 1
                continue
        else:
            pi = _restriction_isomorphism(s, a_tup, t, b_tup)
            if pi is None:
                skipped += 1
                continue
        alpha = _mods_on(p, a_tup, rng, rng.randint(1, cfg.max_len))
        beta = _pi_of_mods(alpha, pi)
        s_end = run(p, s, alpha)[-1]
        t_end = run(p, t, beta)[-1]
        if with_functions:
            ok = k_similar(s_end, a_tup, t_end, b_tup, 0) is not None
        else:
            ok = _restriction_isomorphism(s_end, a_tup, t_end, b_tup) is not None
        # the 0-ary corollary, stated separately although the isomorphism
        # check above already covers nullary relations
        ok = ok and (s_end.query_value(p.query_symbol) == t_end.query_value(p.query_symbol))
        if not ok:
            witness = {
                "strategy": strategy,
                "a_tuple": a_tup,
                "b_tuple": b_tup,
                "alpha": [str(m) for m in alpha],
                "beta": [str(m) for m in beta],
            }
            return PropertyReport("violation", done, skipped, cfg.seed, witness)
        done += 1
    return PropertyReport("ok", done, skipped, cfg.seed)


def _restriction_isomorphism(s: State, a_tup: Sequence[int], t: State,
                             b_tup: Sequence[int]) -> dict[int, int] | None:
    """The positional map a_i -> b_i extended by constants, if it is a
    well-defined isomorphism of the induced (relational) substructures."""
    pi: dict[int, int] = {}
    for x, y in zip(a_tup, b_tup):
        if pi.setdefault(x, y) != y:
            return None
    for c in s.schema.constants:
        x, y = s.constants[c], t.constants[c]
        if pi.setdefault(x, y) != y:
            return None
    if len(set(pi.values())) != len(pi):
        return None
    for name, ar in s.schema.relations.items():
        rs, rt = s.relations[name], t.relations[name]
        for args in itertools.product(sorted(pi), repeat=ar):
            if (args in rs) != (tuple(pi[e] for e in args) in rt):
                return None
    return pi


# -- attack drivers --------------------------------------------------------------------------

def _replay_with_oracle(p: DynamicProgram, oracle, db: State,
                        seq: Sequence[Modification]) -> Counterexample | None:
    """Run a concrete sequence, comparing the query bit to the oracle after
    every step; the first divergence becomes a validated counterexample."""
    s = init_state(p, db)
    if s.query_value(p.query_symbol) != oracle(s.input_part()):
        return _finish_counterexample(p, oracle, Counterexample(
            p.name, db, (), 0, oracle(s.input_part()), s.query_value(p.query_symbol)))
    for i, m in enumerate(seq, start=1):
        s = _apply_fast(p, s, m)
        got = s.query_value(p.query_symbol)
        exp = oracle(s.input_part())
        if got != exp:
            return _finish_counterexample(p, oracle, Counterexample(
                p.name, db, tuple(seq[:i]), i, exp, got))
    return None


def attack_star_deletion(p: DynamicProgram, n: int,
                         oracle: Callable[[State], bool] = oracle_st_reach) -> Counterexample | None:
    """Drive a unary candidate through the star construction: connect n layer
    nodes to s and t, peel s-edges off suffix by suffix, build one type word
    per suffix state, and use a Higman pair of those words to issue two
    deletion sequences that the candidate cannot tell apart although their
    reachability differs.  Any earlier divergence found along the way is
    returned as the (shorter) witness.
    """
    sch = p.schema
    bad = [a for a in sch.aux_symbols if sch.arity(a) > 1]
    if bad:
        worst = max(bad, key=sch.arity)
        raise GuardError(f"star-deletion needs unary auxiliary data: "
                         f"{worst!r} has arity {sch.arity(worst)} > 1")
    if any(sch.role(f) is Role.AUX for f in sch.functions):
        raise GuardError("star-deletion targets relational candidates")
    if "s" not in sch.constants or "t" not in sch.constants:
        raise GuardError("candidate must use constants s and t")
    if n < 1:
        return None
    size = n + 2
    db = empty_input_db(p, size)  # s = 0, t = size-1, layer = 1..n
    layer = list(range(1, n + 1))
    t_node = size - 1
    alpha = []
    for a in layer:
        alpha += [Modification("E", (0, a), INS), Modification("E", (a, t_node), INS)]

    aux_rels = [r for r in sch.symbols(Role.AUX, "rel")]
    trace = run(p, init_state(p, db), alpha)
    states = {n: trace[-1]}
    suffix: list[Modification] = []
    for i in range(n - 1, 0, -1):
        suffix.append(Modification("E", (0, layer[i]), DEL))
        states[i] = _apply_fast(p, states[i + 1], suffix[-1])

    words = {i: tuple(atomic_type(states[i], (layer[j],), sigma=aux_rels) for j in range(i))
             for i in range(1, n + 1)}
    pair = higman_pair([words[i] for i in range(1, n + 1)])
    if pair is None:
        # no pair at this scale; an outright maintenance failure along the
        # construction is still a valid (shorter) witness
        return _replay_with_oracle(p, oracle, db, alpha + suffix)
    i, j = pair[0] + 1, pair[1] + 1  # word sizes, 1-based
    pos = embedding_positions(words[i], words[j])
    alpha_i = [Modification("E", (0, layer[m]), DEL) for m in range(n - 1, i - 1, -1)]
    alpha_j = [Modification("E", (0, layer[m]), DEL) for m in range(n - 1, j - 1, -1)]
    beta1 = [Modification("E", (0, layer[m]), DEL) for m in range(i)]
    beta2 = [Modification("E", (0, layer[q]), DEL) for q in pos]
    found = _replay_with_oracle(p, oracle, db, alpha + alpha_i + beta1)
    if found:
        return found
    return _replay_with_oracle(p, oracle, db, alpha + alpha_j + beta2)


def attack_subset_gadget(p: DynamicProgram, n2: int,
                         oracle: Callable[[State], bool] = oracle_st_reach) -> Counterexample | None:
    """Drive a binary candidate through the subset-coding gadget: one layer-A
    node per subset X of layer B (edges a_X -> X), full B -> t edges, a
    homogeneous subset of B, and a Higman pair over the binary type words of
    (a_X, b) pairs; the pair yields two delete-then-connect sequences with
    different reachability that the candidate must answer identically."""
    sch = p.schema
    bad = [a for a in sch.aux_symbols if sch.arity(a) > 2]
    if bad:
        worst = max(bad, key=sch.arity)
        raise GuardError(f"subset-gadget needs at most binary auxiliary data: "
                         f"{worst!r} has arity {sch.arity(worst)} > 2")
    if any(sch.role(f) is Role.AUX for f in sch.functions):
        raise GuardError("subset-gadget targets relational candidates")
    if "s" not in sch.constants or "t" not in sch.constants:
        raise GuardError("candidate must use constants s and t")
    if n2 < 1:
        return None
    if n2 > 4:
        raise ResourceLimitError("subset gadget grows as 2**n2; refusing n2", 2 ** n2)
    n_a = 2 ** n2
    a_nodes = list(range(1, n_a + 1))
    b_nodes = list(range(n_a + 1, n_a + n2 + 1))
    size = n_a + n2 + 2
    t_node = size - 1
    db = empty_input_db(p, size)

    def a_of(subset: frozenset[int]) -> int:
        idx = sum(1 << b_nodes.index(b) for b in subset)
        return a_nodes[idx]

    alpha = [Modification("E", (b, t_node), INS) for b in b_nodes]
    for bits in range(n_a):
        subset = frozenset(b for q, b in enumerate(b_nodes) if bits & (1 << q))
        for b in sorted(subset):
            alpha.append(Modification("E", (a_of(subset), b), INS))

    s_prime = run(p, init_state(p, db), alpha)[-1]
    aux_rels = sch.symbols(Role.AUX, "rel")
    b3: list[int] | None = None
    for want in range(n2, 1, -1):
        found = find_homogeneous_subset(s_prime, b_nodes, want)
        if found:
            b3 = sorted(found)
            break
    early = _replay_with_oracle(p, oracle, db, alpha)
    if early:
        return early
    if not b3:
        return None
    words = []
    for i in range(1, len(b3) + 1):
        x_i = frozenset(b3[:i])
        words.append(tuple(atomic_type(s_prime, (a_of(x_i), b3[j]), sigma=aux_rels)
                           for j in range(i)))
    pair = higman_pair(words)
    if pair is None:
        return None
    i, j = pair[0] + 1, pair[1] + 1
    pos = embedding_positions(words[i - 1], words[j - 1])
    x_i, x_j = frozenset(b3[:i]), frozenset(b3[:j])
    beta1 = [Modification("E", (a_of(x_i), b), DEL) for b in b3[:i]]
    beta1.append(Modification("E", (0, a_of(x_i)), INS))
    beta2 = [Modification("E", (a_of(x_j), b3[q]), DEL) for q in pos]
    beta2.append(Modification("E", (0, a_of(x_j)), INS))
    found = _replay_with_oracle(p, oracle, db, alpha + beta1)
    if found:
        return found
    return _replay_with_oracle(p, oracle, db, alpha + beta2)


# -- the conjunctive-fragment adversary ----------------------------------------------------

def diverse_saturation(s: State, p: DynamicProgram, depths: Mapping[str, int | None],
                       u_symbol: str = "U") -> list[tuple[str, tuple[int, ...]]]:
    """Diverse tuples over the current U that a correct conjunctive program
    must keep in each finite-deletion-depth relation but this state lacks."""
    u = sorted(x for (x,) in s.relations[u_symbol])
    out = []
    for sym in sorted(depths):
        d = depths[sym]
        if d is None or sym not in s.relations:
            continue
        if len(u) >= d + 1:
            ar = s.schema.arity(sym)
            for tup in diverse_tuples(u, ar):
                if tup not in s.relations[sym]:
                    out.append((sym, tup))
    return sorted(out)


def cq_adversary(p: DynamicProgram, bound: int,
                 domain_size: int | None = None) -> Counterexample | None:
    """Adversary for conjunctive candidates maintaining non-empty-set:
    saturate U with one element more than the candidate's maximum finite
    deletion depth, then search honest deletion-only sequences for a step
    where the query bit disagrees with the oracle."""
    for r in p.rules.values():
        if not classify_syntax(r.body).conjunctive:
            raise GuardError(f"rule for {r.target!r} under {r.kind} {r.trigger!r} "
                             "is not a conjunction of literals")
    unary_inputs = [r for r in p.schema.input_relations if p.schema.arity(r) == 1]
    if len(unary_inputs) != 1:
        raise GuardError("adversary expects exactly one unary input relation")
    u_rel = unary_inputs[0]
    normalized = eliminate_repeated_variables(p)
    depths = deletion_depth(normalized)
    finite = [d for d in depths.values() if d is not None]
    m = max(finite) if finite else 0
    size = m + 1
    n = domain_size if domain_size is not None else max(size, 2)
    if size > n:
        raise DynqfError(f"domain of size {n} cannot hold {size} elements")
    db = empty_input_db(p, n)
    oracle = oracle_nonemptyset
    inserts = [Modification(u_rel, (e,), INS) for e in range(size)]
    if bound < len(inserts):
        return None
    early = _replay_with_oracle(p, oracle, db, inserts)
    if early:
        return early
    base_state = run(p, init_state(p, db), inserts)[-1]
    found: list[tuple[list[Modification], bool, bool]] = []

    def dfs(state: State, seq: list[Modification]) -> bool:
        if len(seq) + len(inserts) >= bound:
            return False
        present = sorted(x for (x,) in state.relations[u_rel])
        for e in present:
            m_ = Modification(u_rel, (e,), DEL)
            nxt = _apply_fast(p, state, m_)
            got = nxt.query_value(p.query_symbol)
            exp = oracle(nxt.input_part())
            if got != exp:
                found.append((seq + [m_], exp, got))
                return True
            if dfs(nxt, seq + [m_]):
                return True
        return False

    if dfs(base_state, []):
        suffix, exp, got = found[0]
        seq = inserts + suffix
        return _finish_counterexample(p, oracle, Counterexample(
            p.name, db, tuple(seq), len(seq), exp, got))
    return None
