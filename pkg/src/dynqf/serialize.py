"""Canonical JSON forms for states, traces, verdicts and counterexamples.

All documents carry `"format": 1`.  States serialize with sorted tuple
lists, sorted function tables and sorted constants, so equal states have
byte-identical serializations; the trace digest is a sha256 over that form.
"""
from __future__ import annotations

import hashlib
import json
from typing import Sequence

from .errors import DynqfError
from .schema import Schema
from .state import Modification, State, make_state
from .verify import Counterexample, Verdict

FORMAT = 1


def state_to_dict(s: State) -> dict:
    return {
        "format": FORMAT,
        "domain": s.n,
        "relations": {name: sorted(map(list, tuples)) for name, tuples in sorted(s.relations.items())},
        "functions": {name: [[list(args), val] for args, val in sorted(table.items())]
                      for name, table in sorted(s.functions.items())},
        "constants": dict(sorted(s.constants.items())),
    }


def state_from_dict(d: dict, schema: Schema) -> State:
    return make_state(
        schema,
        d["domain"],
        {name: {tuple(t) for t in tuples} for name, tuples in d.get("relations", {}).items()},
        {name: {tuple(args): val for args, val in entries}
         for name, entries in d.get("functions", {}).items()} or None,
        d.get("constants", {}),
    )


def modification_to_list(m: Modification) -> list:
    return [m.kind, m.relation, list(m.tuple)]


def modification_from_list(entry: Sequence) -> Modification:
    kind, relation, tup = entry
    return Modification(relation, tuple(tup), kind)


def trace_to_dict(trace: Sequence[State]) -> dict:
    return {"format": FORMAT, "states": [state_to_dict(s) for s in trace]}


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def trace_digest(trace: Sequence[State]) -> str:
    return hashlib.sha256(canonical_json(trace_to_dict(trace)).encode()).hexdigest()


def counterexample_to_dict(c: Counterexample) -> dict:
    return {
        "format": FORMAT,
        "program": c.program_name,
        "initial": state_to_dict(c.initial),
        "sequence": [modification_to_list(m) for m in c.sequence],
        "step": c.step,
        "expected": c.expected,
        "produced": c.produced,
        "seed": c.seed,
        "trace_digest": c.trace_digest,
    }


def counterexample_from_dict(d: dict, input_schema: Schema) -> Counterexample:
    if d.get("format") != FORMAT:
        raise DynqfError(f"unsupported counterexample format {d.get('format')!r}")
    return Counterexample(
        d["program"],
        state_from_dict(d["initial"], input_schema),
        tuple(modification_from_list(e) for e in d["sequence"]),
        d["step"],
        d["expected"],
        d["produced"],
        d.get("seed"),
        d.get("trace_digest", ""),
    )


def verdict_to_dict(v: Verdict) -> dict:
    return {
        "format": FORMAT,
        "status": v.status,
        "bounds": v.bounds,
        "checked_states": v.checked_states,
        "checked_steps": v.checked_steps,
        "seed": v.seed,
        "notes": v.notes,
        "counterexample": counterexample_to_dict(v.counterexample) if v.counterexample else None,
        "exit_code": v.exit_code,
    }
