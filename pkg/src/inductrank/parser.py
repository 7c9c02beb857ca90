"""Parser for the textual theory-file format.

A theory file is a sequence of declarations::

    datatype <name> <params> = <Ctor> <argtypes> | ...
    primrec <name> :: "<type>" where "<eq>" | "<eq>" ...
    fun     <name> :: "<type>" where "<eq>" | "<eq>" ...
    lemma   <name>: "<prop>"

Comments are ``(* ... *)`` and may nest.  Inside quotes, terms use curried
application, list literals ``[a, b]``, numerals, and the fixed infix table
``==>`` (implication), ``=``, ``#`` and ``@`` (both right-associative).
Constants defined with ``fun`` carry a derived induction rule; ``primrec``
constants do not.

Free variables in lemmas are typed by unification; constants are
instantiated per use, so stored terms are fully monomorphic within each
declaration (left-over inference variables are canonicalised to 'a, 'b,
...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    EXTRA_CONST_SCHEMES, FUN, IMPLIES, PRELUDE_NAMES, TYPE_BOOL, TYPE_NAT,
    Const, Constructor, DatatypeDef, Equation, FreeVar, FunDef, Goal,
    SchematicVar, SimpleType, Term, Theory,
    format_goal, format_term, format_type, fun_type, mk_app,
    spine, split_implications,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass
class ParseError(Exception):
    message: str
    span: SourceSpan
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        s = f"{self.span}: {self.message}"
        if self.expected:
            s += " (expected " + " or ".join(self.expected) + ")"
        return s


# ---------------------------------------------------------------------------
# Lexing

_KEYWORDS = {"datatype", "fun", "primrec", "lemma", "where"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\(\*)
  | (?P<quoted>")
  | (?P<tyvar>'[a-zA-Z][a-zA-Z0-9_']*)
  | (?P<schem>\?[a-zA-Z_][a-zA-Z0-9_']*)
  | (?P<ident>[a-zA-Z_][a-zA-Z0-9_']*)
  | (?P<num>\d+)
  | (?P<sym>==>|=>|::|=|\#|@|\(|\)|\[|\]|,|\||:)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # tyvar | schem | ident | num | sym | quoted | eof
    text: str
    line: int
    column: int
    # for quoted tokens: position of the first character inside the quotes
    inner_line: int = 0
    inner_column: int = 0


def _scan(source: str, file: str) -> list[Token]:
    source = source.replace("\r\n", "\n")
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)

    def advance(text: str) -> None:
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}",
                             SourceSpan(file, line, col))
        kind = m.lastgroup
        text = m.group()
        start_line, start_col = line, col
        if kind == "ws":
            advance(text)
            i = m.end()
            continue
        if kind == "comment":
            depth = 1
            j = m.end()
            advance(text)
            while depth > 0:
                if j >= n:
                    raise ParseError("unterminated comment",
                                     SourceSpan(file, start_line, start_col))
                if source.startswith("(*", j):
                    depth += 1
                    advance("(*")
                    j += 2
                elif source.startswith("*)", j):
                    depth -= 1
                    advance("*)")
                    j += 2
                else:
                    advance(source[j])
                    j += 1
            i = j
            continue
        if kind == "quoted":
            advance('"')
            inner_line, inner_col = line, col
            j = m.end()
            while j < n and source[j] != '"':
                advance(source[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated quote",
                                 SourceSpan(file, start_line, start_col))
            inner = source[m.end():j]
            advance('"')
            tokens.append(Token("quoted", inner, start_line, start_col,
                                inner_line, inner_col))
            i = j + 1
            continue
        advance(text)
        tokens.append(Token(kind, text, start_line, start_col))
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Type inference plumbing


class _Mismatch(Exception):
    pass


class _Unifier:
    """Union-find-free unifier over SimpleType; inference variables are
    primed names starting with ``'?``."""

    def __init__(self) -> None:
        self.subst: dict[str, SimpleType] = {}
        self.counter = 0

    def fresh(self) -> SimpleType:
        self.counter += 1
        return SimpleType(f"'?{self.counter}")

    def resolve(self, t: SimpleType) -> SimpleType:
        while t.is_var() and t.name in self.subst:
            t = self.subst[t.name]
        if t.args:
            return SimpleType(t.name, tuple(self.resolve(a) for a in t.args))
        return t

    def _occurs(self, name: str, t: SimpleType) -> bool:
        t = self.resolve(t)
        if t.is_var():
            return t.name == name
        return any(self._occurs(name, a) for a in t.args)

    def unify(self, a: SimpleType, b: SimpleType) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if a.is_var():
            if self._occurs(a.name, b):
                raise _Mismatch()
            self.subst[a.name] = b
            return
        if b.is_var():
            self.unify(b, a)
            return
        if a.name != b.name or len(a.args) != len(b.args):
            raise _Mismatch()
        for x, y in zip(a.args, b.args):
            self.unify(x, y)

    def instantiate(self, scheme: SimpleType) -> SimpleType:
        mapping: dict[str, SimpleType] = {}

        def walk(t: SimpleType) -> SimpleType:
            if t.is_var():
                if t.name not in mapping:
                    mapping[t.name] = self.fresh()
                return mapping[t.name]
            return SimpleType(t.name, tuple(walk(a) for a in t.args))

        return walk(scheme)


_CANON_POOL = [f"'{c}" for c in "abcdefghijklmnopqrstuvwxyz"]


def _canonicalise(term: Term, uni: _Unifier) -> Term:
    """Resolve all inference variables in a term and rename the left-over
    ones to 'a, 'b, ... in first-occurrence order."""
    order: list[str] = []
    used: set[str] = set()

    def note(t: SimpleType) -> None:
        if t.is_var():
            if t.name.startswith("'?"):
                if t.name not in order:
                    order.append(t.name)
            else:
                used.add(t.name)
        for a in t.args:
            note(a)

    def resolve_types(t: Term) -> Term:
        if isinstance(t, (FreeVar, SchematicVar, Const)):
            ty = uni.resolve(t.type)
            note(ty)
            return type(t)(t.name, ty)
        return mk_app(resolve_types(t.fun), resolve_types(t.arg))

    t2 = resolve_types(term)
    pool = [v for v in _CANON_POOL if v not in used]
    renames: dict[str, SimpleType] = {}
    for i, name in enumerate(order):
        fresh = pool[i] if i < len(pool) else f"'v{i}"
        renames[name] = SimpleType(fresh)

    def apply(ty: SimpleType) -> SimpleType:
        if ty.is_var():
            return renames.get(ty.name, ty)
        return SimpleType(ty.name, tuple(apply(a) for a in ty.args))

    def rewrite(t: Term) -> Term:
        if isinstance(t, (FreeVar, SchematicVar, Const)):
            return type(t)(t.name, apply(t.type))
        return mk_app(rewrite(t.fun), rewrite(t.arg))  # type: ignore[union-attr]

    return rewrite(t2)


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.tokens = tokens
        self.pos = 0
        self.file = file

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def span(self, tok: Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.column)

    def fail(self, message: str, tok: Token | None = None,
             expected: tuple[str, ...] = ()) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.span(tok), expected)

    def expect_sym(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == text:
            return self.next()
        raise self.fail(f"found {tok.text!r}" if tok.kind != "eof"
                        else "unexpected end of input",
                        tok, expected=(f"'{text}'",))

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind == "ident":
            return self.next()
        raise self.fail(f"found {tok.text!r}" if tok.kind != "eof"
                        else "unexpected end of input",
                        tok, expected=(what,))

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text


class _TermTokens:
    """Token cursor for text inside a quoted string, with absolute spans."""

    def __init__(self, quoted: Token, file: str):
        shifted: list[Token] = []
        for t in _scan(quoted.text, file):
            if t.line == 1:
                shifted.append(Token(t.kind, t.text, quoted.inner_line,
                                     quoted.inner_column + t.column - 1))
            else:
                shifted.append(Token(t.kind, t.text,
                                     quoted.inner_line + t.line - 1, t.column))
        self.tokens = shifted
        self.pos = 0
        self.file = file

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None,
             expected: tuple[str, ...] = ()) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, SourceSpan(self.file, tok.line, tok.column),
                          expected)

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    def expect_sym(self, text: str) -> None:
        if not self.at_sym(text):
            raise self.fail(f"found {self.peek().text!r}",
                            expected=(f"'{text}'",))
        self.next()


# -- types ------------------------------------------------------------------


def _parse_type(ts: _TermTokens, known: dict[str, int]) -> SimpleType:
    left = _parse_type_postfix(ts, known)
    if ts.at_sym(FUN):
        ts.next()
        right = _parse_type(ts, known)
        return SimpleType(FUN, (left, right))
    return left


def _parse_type_postfix(ts: _TermTokens, known: dict[str, int]) -> SimpleType:
    args: list[SimpleType]
    tok = ts.peek()
    if tok.kind == "tyvar":
        ts.next()
        args = [SimpleType(tok.text)]
    elif ts.at_sym("("):
        ts.next()
        args = [_parse_type(ts, known)]
        while ts.at_sym(","):
            ts.next()
            args.append(_parse_type(ts, known))
        ts.expect_sym(")")
        if len(args) > 1:
            # a tuple of type arguments must feed a postfix constructor
            name_tok = ts.peek()
            if name_tok.kind != "ident":
                raise ts.fail("type arguments need a constructor",
                              expected=("type constructor",))
    elif tok.kind == "ident":
        ts.next()
        _check_type_name(ts, tok, 0, known)
        args = [SimpleType(tok.text)]
    else:
        raise ts.fail(f"found {tok.text!r}" if tok.kind != "eof"
                      else "unexpected end of type",
                      tok, expected=("type",))
    while ts.peek().kind == "ident":
        name_tok = ts.next()
        _check_type_name(ts, name_tok, len(args), known)
        args = [SimpleType(name_tok.text, tuple(args))]
    result = args[0]
    if len(args) > 1:
        raise ts.fail("dangling type arguments")
    return result


def _check_type_name(ts: _TermTokens, tok: Token, arity: int,
                     known: dict[str, int]) -> None:
    declared = known.get(tok.text)
    if declared is None:
        raise ParseError(f"unknown type {tok.text}",
                         SourceSpan(ts.file, tok.line, tok.column))
    if declared != arity:
        raise ParseError(
            f"type {tok.text} expects {declared} argument(s), got {arity}",
            SourceSpan(ts.file, tok.line, tok.column))


# -- terms ------------------------------------------------------------------


class _TermParser:
    """Precedence-climbing term parser with on-the-fly type inference.

    Every production returns a ``(term, type)`` pair; the type side lives in
    the unifier's world and is only written back into the term during
    canonicalisation.  `bind_unknown` controls what happens to identifiers
    that are not declared constants: in goal position they become free
    variables, in the right-hand side of an equation they are an error.
    """

    def __init__(self, ts: _TermTokens, thy: Theory, uni: _Unifier,
                 env: dict[str, SimpleType], bind_unknown: bool):
        self.ts = ts
        self.thy = thy
        self.uni = uni
        self.env = env
        self.schem_env: dict[str, SimpleType] = {}
        self.bind_unknown = bind_unknown

    def parse(self) -> tuple[Term, SimpleType]:
        return self.parse_implies()

    def parse_implies(self) -> tuple[Term, SimpleType]:
        left, lty = self.parse_eq()
        if self.ts.at_sym(IMPLIES):
            tok = self.ts.next()
            right, rty = self.parse_implies()
            self.require(left, lty, TYPE_BOOL, tok)
            self.require(right, rty, TYPE_BOOL, tok)
            term = mk_app(Const(IMPLIES, EXTRA_CONST_SCHEMES[IMPLIES]),
                          left, right)
            return term, TYPE_BOOL
        return left, lty

    def parse_eq(self) -> tuple[Term, SimpleType]:
        left, lty = self.parse_cons()
        if self.ts.at_sym("="):
            tok = self.ts.next()
            right, rty = self.parse_eq()
            ty = self.uni.fresh()
            self.require(left, lty, ty, tok)
            self.require(right, rty, ty, tok)
            term = mk_app(Const("eq", fun_type(ty, ty, TYPE_BOOL)),
                          left, right)
            return term, TYPE_BOOL
        return left, lty

    def parse_cons(self) -> tuple[Term, SimpleType]:
        left, lty = self.parse_app()
        if self.ts.at_sym("#") or self.ts.at_sym("@"):
            tok = self.ts.next()
            right, rty = self.parse_cons()
            scheme = self.thy.const_scheme(tok.text)
            assert scheme is not None
            inst = self.uni.instantiate(scheme)
            (a_ty, b_ty), result = _split2(inst)
            self.require(left, lty, a_ty, tok)
            self.require(right, rty, b_ty, tok)
            return mk_app(Const(tok.text, inst), left, right), result
        return left, lty

    def parse_app(self) -> tuple[Term, SimpleType]:
        t, ty = self.parse_atom()
        while self._at_atom():
            tok = self.ts.peek()
            arg, arg_ty = self.parse_atom()
            res = self.uni.fresh()
            try:
                self.uni.unify(ty, SimpleType(FUN, (arg_ty, res)))
            except _Mismatch:
                raise self.ts.fail(
                    f"cannot apply {format_term(t)} "
                    f"(type {format_type(self.uni.resolve(ty))}) "
                    f"to {format_term(arg)}", tok)
            t = mk_app(t, arg)
            ty = res
        return t, ty

    def _at_atom(self) -> bool:
        tok = self.ts.peek()
        return (tok.kind in ("ident", "num", "schem")
                or (tok.kind == "sym" and tok.text in ("(", "[")))

    def parse_atom(self) -> tuple[Term, SimpleType]:
        tok = self.ts.peek()
        if tok.kind == "num":
            self.ts.next()
            return _numeral(int(tok.text)), TYPE_NAT
        if tok.kind == "schem":
            self.ts.next()
            name = tok.text[1:]
            if name not in self.schem_env:
                self.schem_env[name] = self.uni.fresh()
            ty = self.schem_env[name]
            return SchematicVar(name, ty), ty
        if tok.kind == "ident":
            self.ts.next()
            scheme = self.thy.const_scheme(tok.text)
            if scheme is not None:
                inst = self.uni.instantiate(scheme)
                return Const(tok.text, inst), inst
            if tok.text in self.env:
                ty = self.env[tok.text]
                return FreeVar(tok.text, ty), ty
            if not self.bind_unknown:
                raise self.ts.fail(f"unknown constant {tok.text}", tok)
            ty = self.uni.fresh()
            self.env[tok.text] = ty
            return FreeVar(tok.text, ty), ty
        if tok.kind == "sym" and tok.text == "(":
            self.ts.next()
            inner = self.parse_implies()
            self.ts.expect_sym(")")
            return inner
        if tok.kind == "sym" and tok.text == "[":
            self.ts.next()
            items: list[tuple[Term, SimpleType]] = []
            if not self.ts.at_sym("]"):
                items.append(self.parse_implies())
                while self.ts.at_sym(","):
                    self.ts.next()
                    items.append(self.parse_implies())
            self.ts.expect_sym("]")
            return self._list_literal(items, tok)
        raise self.ts.fail(
            f"found {tok.text!r}" if tok.kind != "eof"
            else "unexpected end of term",
            tok, expected=("term",))

    def _list_literal(self, items: list[tuple[Term, SimpleType]],
                      tok: Token) -> tuple[Term, SimpleType]:
        elem = self.uni.fresh()
        list_ty = SimpleType("list", (elem,))
        result: Term = Const("[]", list_ty)
        for item, ity in reversed(items):
            self.require(item, ity, elem, tok)
            result = mk_app(Const("#", fun_type(elem, list_ty, list_ty)),
                            item, result)
        return result, list_ty

    def require(self, t: Term, actual: SimpleType, expected: SimpleType,
                tok: Token) -> None:
        try:
            self.uni.unify(actual, expected)
        except _Mismatch:
            raise self.ts.fail(
                f"type mismatch: {format_term(t)} has type "
                f"{format_type(self.uni.resolve(actual))}, expected "
                f"{format_type(self.uni.resolve(expected))}", tok)


def _split2(t: SimpleType) -> tuple[tuple[SimpleType, SimpleType], SimpleType]:
    a = t.args[0]
    b = t.args[1].args[0]
    r = t.args[1].args[1]
    return (a, b), r


def _numeral(n: int) -> Term:
    t: Term = Const("0", TYPE_NAT)
    for _ in range(n):
        t = mk_app(Const("Suc", fun_type(TYPE_NAT, TYPE_NAT)), t)
    return t


# ---------------------------------------------------------------------------
# Declarations


def parse_theory(source: str, file: str = "<string>") -> Theory:
    """Parse a theory file.  Raises ParseError on syntax violations,
    duplicate names, unknown constants/types, or ill-typed equations."""
    tokens = _scan(source, file)
    p = _Parser(tokens, file)
    datatypes: list[DatatypeDef] = []
    fundefs: list[FunDef] = []
    goals: list[Goal] = []
    known_types = {"nat": 0, "list": 1, "bool": 0}
    declared = set(PRELUDE_NAMES)

    def declare(name: str, tok: Token) -> None:
        if name in declared:
            raise p.fail(f"duplicate name {name}", tok)
        declared.add(name)

    while p.peek().kind != "eof":
        tok = p.peek()
        if tok.kind != "ident" or tok.text not in _KEYWORDS:
            raise p.fail(f"found {tok.text!r}", tok,
                         expected=("datatype", "fun", "primrec", "lemma"))
        thy = Theory(tuple(datatypes), tuple(fundefs), tuple(goals))
        if tok.text == "datatype":
            d = _parse_datatype(p, known_types, declare)
            datatypes.append(d)
            known_types[d.name] = len(d.params)
        elif tok.text in ("fun", "primrec"):
            fundefs.append(_parse_fundef(p, thy, known_types, declare))
        else:
            goals.append(_parse_lemma(p, thy, declare))
    return Theory(tuple(datatypes), tuple(fundefs), tuple(goals))


def _parse_datatype(p: _Parser, known_types: dict[str, int],
                    declare) -> DatatypeDef:
    p.next()  # 'datatype'
    name_tok = p.expect_ident("datatype name")
    declare(name_tok.text, name_tok)
    params: list[str] = []
    while p.peek().kind == "tyvar":
        tv = p.next()
        if tv.text in params:
            raise p.fail(f"duplicate type parameter {tv.text}", tv)
        params.append(tv.text)
    p.expect_sym("=")
    # the datatype may appear recursively in its own constructors
    local_types = dict(known_types)
    local_types[name_tok.text] = len(params)
    ctors: list[Constructor] = []
    while True:
        ctor_tok = p.expect_ident("constructor name")
        declare(ctor_tok.text, ctor_tok)
        args: list[SimpleType] = []
        while ((p.peek().kind == "ident" and p.peek().text not in _KEYWORDS)
               or p.peek().kind == "tyvar" or p.at_sym("(")):
            args.append(_parse_ctor_arg(p, local_types, params, ctor_tok))
        ctors.append(Constructor(ctor_tok.text, tuple(args)))
        if p.at_sym("|"):
            p.next()
            continue
        break
    if not ctors:
        raise p.fail("datatype needs at least one constructor", name_tok)
    return DatatypeDef(name_tok.text, tuple(params), tuple(ctors))


def _parse_ctor_arg(p: _Parser, known: dict[str, int], params: list[str],
                    ctx_tok: Token) -> SimpleType:
    tok = p.peek()
    if tok.kind == "tyvar":
        p.next()
        if tok.text not in params:
            raise p.fail(f"type variable {tok.text} is not a parameter", tok)
        return SimpleType(tok.text)
    if tok.kind == "ident":
        p.next()
        if known.get(tok.text) != 0:
            raise p.fail(
                f"unknown type {tok.text}" if tok.text not in known
                else f"type {tok.text} needs arguments (use parentheses)",
                tok)
        return SimpleType(tok.text)
    # parenthesised compound type; re-lex the slice via a tiny trick:
    # collect raw tokens until the matching close paren
    p.expect_sym("(")
    depth = 1
    parts: list[Token] = []
    while depth > 0:
        t = p.next()
        if t.kind == "eof":
            raise p.fail("unterminated type", tok)
        if t.kind == "sym" and t.text == "(":
            depth += 1
        elif t.kind == "sym" and t.text == ")":
            depth -= 1
            if depth == 0:
                break
        parts.append(t)
    ts = _TermTokens(Token("quoted", "", tok.line, tok.column,
                           tok.line, tok.column), p.file)
    ts.tokens = parts + [Token("eof", "", tok.line, tok.column)]
    ty = _parse_type(ts, known)
    if ts.peek().kind != "eof":
        raise ts.fail("trailing tokens in type")
    for tv in _collect_tyvars(ty):
        if tv not in params:
            raise p.fail(f"type variable {tv} is not a parameter", tok)
    return ty


def _collect_tyvars(t: SimpleType) -> list[str]:
    out: list[str] = []

    def walk(u: SimpleType) -> None:
        if u.is_var():
            out.append(u.name)
        for a in u.args:
            walk(a)

    walk(t)
    return out


def _parse_fundef(p: _Parser, thy: Theory, known_types: dict[str, int],
                  declare) -> FunDef:
    kw = p.next()  # 'fun' | 'primrec'
    name_tok = p.expect_ident("function name")
    p.expect_sym("::")
    ty_tok = p.peek()
    if ty_tok.kind != "quoted":
        raise p.fail("found unquoted type", ty_tok, expected=('"<type>"',))
    p.next()
    ts = _TermTokens(ty_tok, p.file)
    declared_ty = _parse_type(ts, known_types)
    if ts.peek().kind != "eof":
        raise ts.fail("trailing tokens in type")
    declare(name_tok.text, name_tok)
    where_tok = p.expect_ident("'where'")
    if where_tok.text != "where":
        raise p.fail(f"found {where_tok.text!r}", where_tok,
                     expected=("'where'",))

    # the new constant is visible inside its own equations
    fn_stub = FunDef(name_tok.text, declared_ty, (), kw.text == "fun")
    eq_thy = Theory(thy.datatypes, thy.fundefs + (fn_stub,), thy.goals)

    equations: list[Equation] = []
    arity: int | None = None
    while True:
        eq_tok = p.peek()
        if eq_tok.kind != "quoted":
            raise p.fail("found unquoted equation", eq_tok,
                         expected=('"<equation>"',))
        p.next()
        eq = _parse_equation(eq_tok, p.file, eq_thy, name_tok.text)
        n_args = len(eq.lhs_args())
        if arity is None:
            arity = n_args
        elif arity != n_args:
            raise ParseError(
                f"equation has {n_args} argument(s), earlier ones have "
                f"{arity}", SourceSpan(p.file, eq_tok.line, eq_tok.column))
        equations.append(eq)
        if p.at_sym("|"):
            p.next()
            continue
        break
    return FunDef(name_tok.text, declared_ty, tuple(equations),
                  kw.text == "fun")


def _parse_equation(quoted: Token, file: str, thy: Theory,
                    fn_name: str) -> Equation:
    ts = _TermTokens(quoted, file)
    uni = _Unifier()
    env: dict[str, SimpleType] = {}

    # left-hand side: unknown identifiers become pattern variables
    lhs_parser = _TermParser(ts, thy, uni, env, bind_unknown=True)
    lhs, lhs_ty = lhs_parser.parse_cons()
    ts.expect_sym("=")
    rhs_parser = _TermParser(ts, thy, uni, env, bind_unknown=False)
    rhs_parser.schem_env = lhs_parser.schem_env
    rhs, rhs_ty = rhs_parser.parse_cons()
    if ts.peek().kind != "eof":
        raise ts.fail("trailing tokens in equation")

    head, args = spine(lhs)
    if not (isinstance(head, Const) and head.name == fn_name):
        raise ParseError(f"equation must define {fn_name}",
                         SourceSpan(file, quoted.line, quoted.column))
    _check_patterns(args, thy, file, quoted)
    try:
        uni.unify(lhs_ty, rhs_ty)
    except _Mismatch:
        raise ParseError(
            "ill-typed equation: left and right sides disagree",
            SourceSpan(file, quoted.line, quoted.column))
    # canonicalise both sides against the same variable pool
    shell = Const("eq", fun_type(lhs_ty, lhs_ty, TYPE_BOOL))
    pair = _canonicalise(mk_app(shell, lhs, rhs), uni)
    _, (lhs2, rhs2) = spine(pair)
    return Equation(lhs2, rhs2)


def _check_patterns(args: tuple[Term, ...], thy: Theory, file: str,
                    quoted: Token) -> None:
    seen_vars: set[str] = set()
    span = SourceSpan(file, quoted.line, quoted.column)

    def walk(t: Term) -> None:
        if isinstance(t, FreeVar):
            if t.name in seen_vars:
                raise ParseError(f"duplicate pattern variable {t.name}", span)
            seen_vars.add(t.name)
            return
        head, sub = spine(t)
        if isinstance(head, Const) and thy.constructor_owner(head.name):
            for s in sub:
                walk(s)
            return
        raise ParseError(
            "patterns must be constructor patterns or variables", span)

    for a in args:
        walk(a)


def _parse_lemma(p: _Parser, thy: Theory, declare) -> Goal:
    lemma_tok = p.next()  # 'lemma'
    name_tok = p.expect_ident("lemma name")
    declare(name_tok.text, name_tok)
    p.expect_sym(":")
    prop_tok = p.peek()
    if prop_tok.kind != "quoted":
        raise p.fail("found unquoted proposition", prop_tok,
                     expected=('"<prop>"',))
    p.next()
    term = _parse_prop(prop_tok, p.file, thy)
    premises, conclusion = split_implications(term)
    return Goal(name_tok.text, premises, conclusion, line=lemma_tok.line)


def _parse_prop(quoted: Token, file: str, thy: Theory) -> Term:
    ts = _TermTokens(quoted, file)
    uni = _Unifier()
    parser = _TermParser(ts, thy, uni, {}, bind_unknown=True)
    start = ts.peek()
    term, ty = parser.parse()
    if ts.peek().kind != "eof":
        raise ts.fail("trailing tokens in proposition")
    try:
        uni.unify(ty, TYPE_BOOL)
    except _Mismatch:
        raise ParseError(
            "goal must be propositional",
            SourceSpan(file, start.line, start.column))
    return _canonicalise(term, uni)


def parse_goal_expr(source: str, ctx: Theory,
                    file: str = "<expr>") -> Term:
    """Parse a standalone boolean proposition over `ctx`'s signature."""
    quoted = Token("quoted", source.replace("\r\n", "\n"), 1, 1, 1, 1)
    return _parse_prop(quoted, file, ctx)


# ---------------------------------------------------------------------------
# Printing (round-trip support)


def print_theory(thy: Theory) -> str:
    """Pretty-print a theory so that reparsing yields a structurally equal
    Theory.  Datatypes come first; they never reference functions."""
    chunks: list[str] = []
    for d in thy.datatypes:
        head = " ".join(["datatype", d.name, *d.params])
        alts = []
        for c in d.constructors:
            parts = [c.name] + [_ctor_arg_text(t) for t in c.arg_types]
            alts.append(" ".join(parts))
        chunks.append(f"{head} = " + " | ".join(alts))
    for f in thy.fundefs:
        kw = "fun" if f.has_induction_rule else "primrec"
        lines = [f'{kw} {f.name} :: "{format_type(f.type)}" where']
        eq_texts = [f'"{format_term(e.lhs, 3)} = {format_term(e.rhs, 3)}"'
                    for e in f.equations]
        lines.append("  " + "\n| ".join(eq_texts))
        chunks.append("\n".join(lines))
    for g in thy.goals:
        chunks.append(f'lemma {g.name}: "{format_goal(g)}"')
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def _ctor_arg_text(t: SimpleType) -> str:
    if not t.args and t.name != FUN:
        return t.name
    return f"({format_type(t)})"
