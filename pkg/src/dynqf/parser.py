"""Parsers for the .dynp program format, modification scripts, and formulas.

Hand-rolled recursive descent over a small token stream; diagnostics carry
line and column.  Identifiers are [A-Za-z][A-Za-z0-9_]*, comments run from
'#' to end of line.  Operator precedence in formulas: '!' over '&' over '|'.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError
from .formulas import (And, App, Const, Eq, Formula, Ite, Not, Or, RelAtom,
                       Term, TRUE, FALSE, Var)
from .program import (DynamicProgram, InitSpec, UpdateRule, encode_table,
                      frame_rule, validate_program)
from .schema import Role, Schema, make_schema
from .state import DEL, INS, Modification

_PUNCT2 = (":=", "!=", "->")
_PUNCT1 = "{}(),/=!&|:;"


@dataclass
class Token:
    kind: str  # "ident" | "int" | "punct" | "eof"
    value: str
    line: int
    col: int


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        two = text[i:i + 2]
        if two in _PUNCT2:
            tokens.append(Token("punct", two, line, start_col))
            i += 2
            col += 2
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c in _PUNCT1:
            tokens.append(Token("punct", c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, start_col, filename)
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token], filename: str):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.cur
        raise ParseError(message, tok.line, tok.col, self.filename)

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, value: str) -> bool:
        if self.cur.kind == "punct" and self.cur.value == value:
            self.advance()
            return True
        return False

    def accept_word(self, word: str) -> bool:
        if self.cur.kind == "ident" and self.cur.value == word:
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if self.cur.kind == "punct" and self.cur.value == value:
            return self.advance()
        self.error(f"expected {value!r}, found {self.cur.value!r}")

    def expect_word(self, word: str) -> Token:
        if self.cur.kind == "ident" and self.cur.value == word:
            return self.advance()
        self.error(f"expected {word!r}, found {self.cur.value!r}")

    def expect_ident(self) -> str:
        if self.cur.kind == "ident":
            return self.advance().value
        self.error(f"expected identifier, found {self.cur.value!r}")

    def expect_int(self) -> int:
        if self.cur.kind == "int":
            return int(self.advance().value)
        self.error(f"expected integer, found {self.cur.value!r}")

    def at_word(self, *words: str) -> bool:
        return self.cur.kind == "ident" and self.cur.value in words


# -- formulas and terms --------------------------------------------------------

class FormulaParser:
    """Schema-aware formula/term parsing: identifiers resolve to relation
    atoms, function applications, constants, or in-scope variables."""

    def __init__(self, ts: TokenStream, schema: Schema, vars: set[str]):
        self.ts = ts
        self.schema = schema
        self.vars = vars

    def formula(self) -> Formula:
        left = self._and()
        while self.ts.accept("|"):
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._not()
        while self.ts.accept("&"):
            left = And(left, self._not())
        return left

    def _not(self) -> Formula:
        if self.ts.accept("!"):
            return Not(self._not())
        return self._primary()

    def _primary(self) -> Formula:
        ts = self.ts
        if ts.accept("("):
            f = self.formula()
            ts.expect(")")
            return f
        if ts.accept_word("true"):
            return TRUE
        if ts.accept_word("false"):
            return FALSE
        tok = ts.cur
        if tok.kind != "ident" and tok.kind != "int":
            ts.error(f"expected a formula, found {tok.value!r}")
        # relation atom, or a term followed by = / !=
        if tok.kind == "ident" and tok.value in self.schema.relations:
            name = ts.advance().value
            args = self._args()
            if len(args) != self.schema.arity(name):
                ts.error(f"relation {name!r} expects {self.schema.arity(name)} arguments", tok)
            return RelAtom(name, tuple(args))
        left = self.term()
        if ts.accept("="):
            return Eq(left, self.term())
        if ts.accept("!="):
            return Not(Eq(left, self.term()))
        ts.error("expected '=' or '!=' after a term", tok)

    def _args(self) -> list[Term]:
        ts = self.ts
        ts.expect("(")
        args: list[Term] = []
        if not ts.accept(")"):
            args.append(self.term())
            while ts.accept(","):
                args.append(self.term())
            ts.expect(")")
        return args

    def term(self) -> Term:
        ts = self.ts
        tok = ts.cur
        if tok.kind == "ident" and tok.value == "ite":
            ts.advance()
            ts.expect("(")
            cond = self.formula()
            ts.expect(",")
            then = self.term()
            ts.expect(",")
            other = self.term()
            ts.expect(")")
            return Ite(cond, then, other)
        name = ts.expect_ident()
        if name in self.schema.functions:
            if ts.cur.kind == "punct" and ts.cur.value == "(":
                args = self._args()
            else:
                args = []
            if len(args) != self.schema.arity(name):
                ts.error(f"function {name!r} expects {self.schema.arity(name)} arguments", tok)
            return App(name, tuple(args))
        if name in self.schema.constants:
            return Const(name)
        if name in self.vars:
            return Var(name)
        ts.error(f"unknown identifier {name!r} (not a variable, constant or symbol here)", tok)


def parse_formula(text: str, schema: Schema, vars: set[str] | None = None) -> Formula:
    ts = TokenStream(tokenize(text), "<formula>")
    f = FormulaParser(ts, schema, vars or set()).formula()
    if ts.cur.kind != "eof":
        ts.error(f"trailing input {ts.cur.value!r}")
    return f


def parse_term(text: str, schema: Schema, vars: set[str] | None = None) -> Term:
    ts = TokenStream(tokenize(text), "<term>")
    t = FormulaParser(ts, schema, vars or set()).term()
    if ts.cur.kind != "eof":
        ts.error(f"trailing input {ts.cur.value!r}")
    return t


# -- programs --------------------------------------------------------------------

def parse_program(text: str, filename: str = "<program>") -> DynamicProgram:
    ts = TokenStream(tokenize(text, filename), filename)
    ts.expect_word("program")
    name = ts.expect_ident()

    input_rels: dict[str, int] = {}
    aux_rels: dict[str, int] = {}
    aux_funs: dict[str, int] = {}
    bi_rels: dict[str, int] = {}
    bi_funs: dict[str, int] = {}
    constants: list[str] = []
    query: str | None = None
    init: InitSpec | None = None
    default_frame = False
    raw_rules: list[tuple] = []  # (kind, trigger, params, target, tparams, body_tokens-slice)

    def parse_symbol_block(rels: dict[str, int], funs: dict[str, int] | None):
        ts.expect("{")
        while True:
            is_fun = ts.accept_word("fun")
            sym = ts.expect_ident()
            ts.expect("/")
            ar = ts.expect_int()
            if is_fun:
                if funs is None:
                    ts.error("function symbols are not allowed in this section")
                funs[sym] = ar
            else:
                rels[sym] = ar
            if not ts.accept(","):
                break
        ts.expect("}")

    while ts.at_word("input", "aux", "builtin", "const", "query", "init"):
        section = ts.advance().value
        if section == "input":
            parse_symbol_block(input_rels, None)
        elif section == "aux":
            parse_symbol_block(aux_rels, aux_funs)
        elif section == "builtin":
            parse_symbol_block(bi_rels, bi_funs)
        elif section == "const":
            constants.append(ts.expect_ident())
            while ts.accept(","):
                constants.append(ts.expect_ident())
        elif section == "query":
            query = ts.expect_ident()
        elif section == "init":
            init = _parse_init(ts)

    schema = make_schema(input_rels, aux_rels, aux_funs, bi_rels, bi_funs, tuple(constants))
    if query is None:
        ts.error("missing 'query' section")
    if init is None:
        init = InitSpec("empty")
    if init.kind == "table":
        init = _resolve_table(ts, init, schema)

    rules: dict[tuple[str, str, str], UpdateRule] = {}
    while ts.at_word("on", "default"):
        if ts.accept_word("default"):
            ts.expect_word("frame")
            default_frame = True
            continue
        ts.expect_word("on")
        if ts.accept_word("insert"):
            kind = INS
        elif ts.accept_word("delete"):
            kind = DEL
        else:
            ts.error("expected 'insert' or 'delete'")
        trig_tok = ts.cur
        trigger = ts.expect_ident()
        if trigger not in input_rels:
            ts.error(f"{trigger!r} is not an input relation", trig_tok)
        params = _param_list(ts)
        if len(params) != input_rels[trigger]:
            ts.error(f"trigger {trigger!r} expects {input_rels[trigger]} parameters", trig_tok)
        ts.expect(":")
        while ts.cur.kind == "ident" and not ts.at_word("on", "default") \
                and ts.tokens[ts.pos + 1].kind == "punct" and ts.tokens[ts.pos + 1].value == "(":
            target_tok = ts.cur
            target = ts.expect_ident()
            if schema.roles.get(target) is not Role.AUX:
                ts.error(f"{target!r} is not an auxiliary symbol", target_tok)
            tparams = _param_list(ts)
            if len(tparams) != schema.arity(target):
                ts.error(f"{target!r} expects {schema.arity(target)} parameters", target_tok)
            fp = FormulaParser(ts, schema, set(params) | set(tparams))
            if ts.accept(":="):
                if target not in schema.functions:
                    ts.error(f"':=' defines a function update, but {target!r} is a relation", target_tok)
                body: Formula | Term = fp.term()
            else:
                ts.expect(":")
                if target not in schema.relations:
                    ts.error(f"':' defines a relation update, but {target!r} is a function", target_tok)
                body = fp.formula()
            rule = UpdateRule(target, kind, trigger, tuple(params), tuple(tparams), body)
            if rule.key in rules:
                ts.error(f"duplicate rule for {target!r} under {kind} {trigger!r}", target_tok)
            rules[rule.key] = rule

    if ts.cur.kind != "eof":
        ts.error(f"unexpected {ts.cur.value!r}")

    if default_frame:
        for target in schema.aux_symbols:
            for kind in (INS, DEL):
                for trigger in schema.input_relations:
                    key = (target, kind, trigger)
                    if key not in rules:
                        rules[key] = frame_rule(schema, target, kind, trigger)

    program = DynamicProgram(name, schema, rules, query, init)
    validate_program(program)
    return program


def _param_list(ts: TokenStream) -> list[str]:
    ts.expect("(")
    params: list[str] = []
    if not ts.accept(")"):
        params.append(ts.expect_ident())
        while ts.accept(","):
            params.append(ts.expect_ident())
        ts.expect(")")
    return params


def _parse_init(ts: TokenStream) -> InitSpec:
    if ts.accept_word("empty"):
        base = ts.expect_ident() if ts.cur.kind == "ident" and not ts.at_word(
            "input", "aux", "builtin", "const", "query", "init", "on", "default") else None
        return InitSpec("empty", base=base)
    if ts.accept_word("oracle"):
        base = ts.expect_ident() if ts.cur.kind == "ident" and not ts.at_word(
            "input", "aux", "builtin", "const", "query", "init", "on", "default") else None
        return InitSpec("oracle", base=base)
    if ts.accept_word("builtin"):
        return InitSpec("builtin", name=ts.expect_ident())
    if ts.accept_word("table"):
        # remember the token range; resolved once the schema is known
        start = ts.pos
        ts.expect("{")
        depth = 1
        while depth:
            tok = ts.advance()
            if tok.kind == "eof":
                ts.error("unterminated table initializer")
            if tok.kind == "punct" and tok.value == "{":
                depth += 1
            elif tok.kind == "punct" and tok.value == "}":
                depth -= 1
        return InitSpec("table", table=("pending", start, ts.pos))
    ts.error("expected one of: empty, oracle, builtin, table")


def _resolve_table(ts: TokenStream, init: InitSpec, schema: Schema) -> InitSpec:
    _, start, end = init.table
    sub = TokenStream(ts.tokens[start:end] + [Token("eof", "", 0, 0)], ts.filename)
    sub.expect("{")
    relations: dict[str, list[tuple[int, ...]]] = {}
    functions: dict[str, dict[tuple[int, ...], int]] = {}
    while not (sub.cur.kind == "punct" and sub.cur.value == "}"):
        sym_tok = sub.cur
        sym = sub.expect_ident()
        sub.expect("=")
        if sym in schema.relations:
            entries = relations.setdefault(sym, [])
        elif sym in schema.functions:
            fentries = functions.setdefault(sym, {})
        else:
            sub.error(f"unknown symbol {sym!r} in table", sym_tok)
        while sub.cur.kind == "punct" and sub.cur.value == "(":
            sub.expect("(")
            tup: list[int] = []
            if not sub.accept(")"):
                tup.append(sub.expect_int())
                while sub.accept(","):
                    tup.append(sub.expect_int())
                sub.expect(")")
            if sym in schema.relations:
                entries.append(tuple(tup))
            else:
                sub.expect("->")
                fentries[tuple(tup)] = sub.expect_int()
        sub.accept(";")
    return InitSpec("table", table=encode_table(relations, functions))


# -- modification scripts -----------------------------------------------------------

@dataclass
class Script:
    domain: int
    relations: dict[str, set[tuple[int, ...]]] = field(default_factory=dict)
    constants: dict[str, int] = field(default_factory=dict)
    modifications: list[Modification] = field(default_factory=list)


def parse_script(text: str, schema: Schema, filename: str = "<script>") -> Script:
    """A script: optional `domain`, `graph { ... }` or `db { ... }` literal,
    `elem` aliases, then `ins R(...)` / `del R(...)` lines."""
    ts = TokenStream(tokenize(text, filename), filename)
    domain: int | None = None
    relations: dict[str, set[tuple[int, ...]]] = {}
    constants: dict[str, int] = {}
    aliases: dict[str, int] = {}

    def element() -> int:
        if ts.cur.kind == "int":
            return ts.expect_int()
        name_tok = ts.cur
        name = ts.expect_ident()
        if name in aliases:
            return aliases[name]
        if name in constants:
            return constants[name]
        ts.error(f"unknown element name {name!r} (declare it with 'elem {name} = <id>')", name_tok)

    mods: list[Modification] = []
    while ts.cur.kind != "eof":
        if ts.accept_word("domain"):
            domain = ts.expect_int()
        elif ts.accept_word("graph"):
            ts.expect("{")
            while not ts.accept("}"):
                if ts.accept_word("nodes"):
                    domain = ts.expect_int()
                elif ts.accept_word("const"):
                    while ts.cur.kind == "ident":
                        cname = ts.expect_ident()
                        ts.expect("=")
                        constants[cname] = ts.expect_int()
                elif ts.accept_word("edges"):
                    if "E" not in schema.relations or schema.arity("E") != 2:
                        ts.error("graph literals need a binary input relation E")
                    edges = relations.setdefault("E", set())
                    while ts.cur.kind == "punct" and ts.cur.value == "(":
                        ts.expect("(")
                        u = element()
                        ts.expect(",")
                        v = element()
                        ts.expect(")")
                        edges.add((u, v))
                elif ts.accept(";"):
                    continue
                else:
                    ts.error(f"unexpected {ts.cur.value!r} in graph literal")
        elif ts.accept_word("db"):
            ts.expect("{")
            while not ts.accept("}"):
                if ts.accept(";"):
                    continue
                sym_tok = ts.cur
                sym = ts.expect_ident()
                if sym not in schema.relations:
                    ts.error(f"unknown relation {sym!r} in db literal", sym_tok)
                ts.expect(":")
                tuples = relations.setdefault(sym, set())
                while ts.cur.kind == "punct" and ts.cur.value == "(":
                    ts.expect("(")
                    tup = []
                    if not ts.accept(")"):
                        tup.append(element())
                        while ts.accept(","):
                            tup.append(element())
                        ts.expect(")")
                    if len(tup) != schema.arity(sym):
                        ts.error(f"{sym!r} expects {schema.arity(sym)} components", sym_tok)
                    tuples.add(tuple(tup))
        elif ts.accept_word("elem"):
            name = ts.expect_ident()
            ts.expect("=")
            aliases[name] = ts.expect_int()
        elif ts.at_word("ins", "del"):
            kind = INS if ts.advance().value == "ins" else DEL
            rel_tok = ts.cur
            rel = ts.expect_ident()
            if rel not in schema.relations:
                ts.error(f"unknown relation {rel!r}", rel_tok)
            ts.expect("(")
            tup = []
            if not ts.accept(")"):
                tup.append(element())
                while ts.accept(","):
                    tup.append(element())
                ts.expect(")")
            if len(tup) != schema.arity(rel):
                ts.error(f"{rel!r} expects {schema.arity(rel)} components", rel_tok)
            mods.append(Modification(rel, tuple(tup), kind))
        else:
            ts.error(f"unexpected {ts.cur.value!r}")

    if domain is None:
        used = [e for m in mods for e in m.tuple]
        used += [e for ts_ in relations.values() for t in ts_ for e in t]
        used += list(constants.values())
        domain = max(used, default=-1) + 1
    return Script(domain, relations, constants, mods)
