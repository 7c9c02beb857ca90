"""A quantified heuristic language over goals and induct arguments.

Formulas quantify over four sorts: natural numbers, induction rules,
terms, and term occurrences.  Quantification over occurrences can be
restricted to the occurrences of a term variable's value, and
quantification over terms to the candidate's induction terms.  Atomic
assertions inspect the goal's application structure and the candidate's
argument fields; connectives are classical.

Concrete syntax (ASCII forms; the Unicode connective and quantifier
symbols are accepted as aliases)::

    EX x : sort [in <restriction>]. <formula>
    ALL x : sort [in <restriction>]. <formula>
    <f> --> <f>     <f> & <f>     <f> | <f>     ! <f>     ( <f> )
    True
    name (arg, ...)            prefix atom
    arg name arg               infix binary atom

Sorts are ``number``, ``rule``, ``term``, ``term_occurrence``.
Restrictions: ``in t : term`` on occurrence quantifiers (occurrences of
the term bound to ``t``), ``in induction_term`` on term quantifiers.
Quantifier bodies extend as far right as possible; parenthesise the
antecedent of an implication when it is quantified.

A heuristic suite file is a sequence of named blocks::

    heuristic <name>:
    <formula>

Comments are ``(* ... *)``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .parser import ParseError, SourceSpan
from .schemes import InductionScheme, RULE_SUFFIX, scheme_for_rule_name
from .tactic import Candidate, SubgoalSet
from .terms import (
    Const, FreeVar, Goal, Occurrence, SimpleType, Term, Theory,
    all_occurrences, goal_free_variables, goal_subterms, spine, term_type,
)


class Sort(enum.Enum):
    NUMBER = "number"
    RULE = "rule"
    TERM = "term"
    OCCURRENCE = "term_occurrence"


@dataclass(frozen=True)
class Unrestricted:
    pass


@dataclass(frozen=True)
class OccurrencesOf:
    term_var: str


@dataclass(frozen=True)
class InductionTerms:
    pass


Restriction = Union[Unrestricted, OccurrencesOf, InductionTerms]

UNRESTRICTED = Unrestricted()
INDUCTION_TERMS = InductionTerms()


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    restriction: Restriction
    body: Formula


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    restriction: Restriction
    body: Formula


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[str | int, ...]


Formula = Union[TrueF, Not, And, Or, Implies, Exists, Forall, Atom]

TRUE = TrueF()

# assertion name -> argument sorts
ATOM_SIGNATURES: dict[str, tuple[Sort, ...]] = {
    "is_rule_of": (Sort.RULE, Sort.OCCURRENCE),
    "is_nth_argument_of": (Sort.OCCURRENCE, Sort.NUMBER, Sort.OCCURRENCE),
    "is_nth_induction_term": (Sort.TERM, Sort.NUMBER),
    "is_free_variable": (Sort.TERM,),
    "is_constant": (Sort.TERM,),
    "is_in_arbitrary": (Sort.TERM,),
    "is_of_datatype": (Sort.TERM,),
    "occurs_in_conclusion": (Sort.OCCURRENCE,),
    "is_recursive_constant": (Sort.TERM,),
    "same_term": (Sort.OCCURRENCE, Sort.TERM),
}


# ---------------------------------------------------------------------------
# Evaluation context


@dataclass(frozen=True)
class EvalContext:
    """Finite quantifier domains for one (goal, candidate) pair.

    The term domain is the original goal's sub-terms; subgoals are carried
    for completeness but no shipped assertion inspects them.
    """

    goal: Goal
    candidate: Candidate
    thy: Theory
    subgoals: SubgoalSet | None
    number_bound: int
    rules: tuple[InductionScheme, ...]
    terms: tuple[Term, ...]
    occurrences: tuple[Occurrence, ...]
    induction_terms: tuple[Term, ...]


def _max_application_arity(goal: Goal) -> int:
    best = 0
    for t in goal_subterms(goal):
        _, args = spine(t)
        best = max(best, len(args))
    return best


def make_context(goal: Goal, candidate: Candidate, thy: Theory,
                 subgoals: SubgoalSet | None = None,
                 number_bound: int | None = None) -> EvalContext:
    if number_bound is None:
        number_bound = max(_max_application_arity(goal),
                           len(candidate.induction_terms), 1)
    rules: tuple[InductionScheme, ...] = ()
    if candidate.rule is not None:
        scheme = scheme_for_rule_name(candidate.rule, thy)
        if scheme is not None:
            rules = (scheme,)
    by_name = {v.name: v for v in goal_free_variables(goal)}
    ind_terms = tuple(
        by_name.get(n, FreeVar(n, SimpleType("'a")))
        for n in candidate.induction_terms)
    return EvalContext(
        goal=goal,
        candidate=candidate,
        thy=thy,
        subgoals=subgoals,
        number_bound=number_bound,
        rules=rules,
        terms=tuple(goal_subterms(goal)),
        occurrences=tuple(all_occurrences(goal)),
        induction_terms=ind_terms,
    )


# ---------------------------------------------------------------------------
# Evaluator

Value = Union[int, InductionScheme, Term, Occurrence]


def _domain(sort: Sort, restriction: Restriction, ctx: EvalContext,
            env: dict[str, Value]) -> Iterator[Value]:
    if sort is Sort.NUMBER:
        return iter(range(1, ctx.number_bound + 1))
    if sort is Sort.RULE:
        return iter(ctx.rules)
    if sort is Sort.TERM:
        if isinstance(restriction, InductionTerms):
            return iter(ctx.induction_terms)
        return iter(ctx.terms)
    if isinstance(restriction, OccurrencesOf):
        target = env[restriction.term_var]
        return iter(o for o in ctx.occurrences if o.term == target)
    return iter(ctx.occurrences)


def evaluate(f: Formula, ctx: EvalContext) -> bool:
    """Evaluate a closed, well-sorted formula by exhaustive enumeration."""
    return _eval(f, ctx, {})


def _eval(f: Formula, ctx: EvalContext, env: dict[str, Value]) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Not):
        return not _eval(f.body, ctx, env)
    if isinstance(f, And):
        return _eval(f.left, ctx, env) and _eval(f.right, ctx, env)
    if isinstance(f, Or):
        return _eval(f.left, ctx, env) or _eval(f.right, ctx, env)
    if isinstance(f, Implies):
        return (not _eval(f.left, ctx, env)) or _eval(f.right, ctx, env)
    if isinstance(f, (Exists, Forall)):
        values = _domain(f.sort, f.restriction, ctx, env)
        if isinstance(f, Exists):
            return any(_eval(f.body, ctx, {**env, f.var: v}) for v in values)
        return all(_eval(f.body, ctx, {**env, f.var: v}) for v in values)
    assert isinstance(f, Atom)
    values = tuple(a if isinstance(a, int) else env[a] for a in f.args)
    return evaluate_atom(f.name, values, ctx)


# -- atomic assertions -------------------------------------------------------


def _spine_base(occ: Occurrence) -> tuple[tuple[int, ...], int]:
    """Path of the largest application headed at `occ`, and its arity.

    Stripping the trailing run of function steps (0) from the path walks up
    the curried spine whose head is the occurrence."""
    path = occ.path
    k = 0
    while k < len(path) and path[len(path) - 1 - k] == 0:
        k += 1
    return path[: len(path) - k], k


def _is_nth_argument_of(to2: Occurrence, n: int, to1: Occurrence) -> bool:
    if to2.premise_index != to1.premise_index:
        return False
    base, arity = _spine_base(to1)
    if not 1 <= n <= arity:
        return False
    return to2.path == base + (0,) * (arity - n) + (1,)


def evaluate_atom(name: str, values: tuple[Value, ...],
                  ctx: EvalContext) -> bool:
    if name == "is_rule_of":
        rule, occ = values
        return (isinstance(occ.term, Const)
                and rule.name == occ.term.name + RULE_SUFFIX)
    if name == "is_nth_argument_of":
        to2, n, to1 = values
        return _is_nth_argument_of(to2, n, to1)
    if name == "is_nth_induction_term":
        t, n = values
        return 1 <= n <= len(ctx.induction_terms) \
            and ctx.induction_terms[n - 1] == t
    if name == "is_free_variable":
        return isinstance(values[0], FreeVar)
    if name == "is_constant":
        return isinstance(values[0], Const)
    if name == "is_in_arbitrary":
        t = values[0]
        return isinstance(t, FreeVar) and t.name in ctx.candidate.arbitrary
    if name == "is_of_datatype":
        ty = term_type(values[0])
        return (not ty.is_var()) and ctx.thy.datatype(ty.name) is not None
    if name == "occurs_in_conclusion":
        return values[0].premise_index is None
    if name == "is_recursive_constant":
        t = values[0]
        if not isinstance(t, Const):
            return False
        f = ctx.thy.fundef(t.name)
        return f is not None and f.is_recursive()
    if name == "same_term":
        occ, t = values
        return occ.term == t
    raise ValueError(f"unknown assertion {name}")


# ---------------------------------------------------------------------------
# Parsing

_ALIASES = {
    "∃": "EX", "∀": "ALL", "∧": "&", "∨": "|", "¬": "!",
    "→": "-->", "⟶": "-->", "∈": "in",
}

_DSL_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\(\*)
  | (?P<arrow>-->)
  | (?P<sym>[().,:&|!])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<uni>[∃∀∧∨¬→⟶∈])
""", re.VERBOSE)

_SORTS = {s.value: s for s in Sort}


@dataclass(frozen=True)
class _Tok:
    kind: str   # sym | num | ident | eof  ('-->' arrives as sym)
    text: str
    line: int
    column: int


def _dsl_scan(source: str, file: str) -> list[_Tok]:
    source = source.replace("\r\n", "\n")
    tokens: list[_Tok] = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        m = _DSL_TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}",
                             SourceSpan(file, line, col))
        kind = m.lastgroup
        text = m.group()
        start_line, start_col = line, col
        for ch in text:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i = m.end()
        if kind == "ws":
            continue
        if kind == "comment":
            depth = 1
            while depth > 0:
                if i >= n:
                    raise ParseError("unterminated comment",
                                     SourceSpan(file, start_line, start_col))
                two = source[i:i + 2]
                if two == "(*":
                    depth += 1
                    step = 2
                elif two == "*)":
                    depth -= 1
                    step = 2
                else:
                    step = 1
                for ch in source[i:i + step]:
                    if ch == "\n":
                        line, col = line + 1, 1
                    else:
                        col += 1
                i += step
            continue
        if kind == "uni":
            alias = _ALIASES[text]
            tokens.append(_Tok("ident" if alias.isalpha() else "sym",
                               alias, start_line, start_col))
            continue
        if kind == "arrow":
            tokens.append(_Tok("sym", "-->", start_line, start_col))
            continue
        tokens.append(_Tok(kind, text, start_line, start_col))
    tokens.append(_Tok("eof", "", line, col))
    return tokens


class _DslParser:
    def __init__(self, tokens: list[_Tok], file: str):
        self.tokens = tokens
        self.pos = 0
        self.file = file

    def peek(self, ahead: int = 0) -> _Tok:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Tok:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Tok | None = None,
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

    # formula := implies
    def parse_formula(self, env: dict[str, Sort]) -> Formula:
        left = self.parse_or(env)
        if self.at_sym("-->"):
            self.next()
            right = self.parse_formula(env)
            return Implies(left, right)
        return left

    def parse_or(self, env: dict[str, Sort]) -> Formula:
        left = self.parse_and(env)
        while self.at_sym("|"):
            self.next()
            left = Or(left, self.parse_and(env))
        return left

    def parse_and(self, env: dict[str, Sort]) -> Formula:
        left = self.parse_unary(env)
        while self.at_sym("&"):
            self.next()
            left = And(left, self.parse_unary(env))
        return left

    def parse_unary(self, env: dict[str, Sort]) -> Formula:
        tok = self.peek()
        if self.at_sym("!"):
            self.next()
            return Not(self.parse_unary(env))
        if tok.kind == "ident" and tok.text in ("EX", "ALL"):
            return self.parse_quantifier(env)
        return self.parse_primary(env)

    def parse_quantifier(self, env: dict[str, Sort]) -> Formula:
        quant = self.next()
        var_tok = self.next()
        if var_tok.kind != "ident":
            raise self.fail("found non-identifier", var_tok,
                            expected=("variable name",))
        self.expect_sym(":")
        sort_tok = self.next()
        sort = _SORTS.get(sort_tok.text)
        if sort is None:
            raise self.fail(f"unknown sort {sort_tok.text!r}", sort_tok,
                            expected=tuple(_SORTS))
        restriction: Restriction = UNRESTRICTED
        if self.peek().kind == "ident" and self.peek().text == "in":
            self.next()
            restriction = self.parse_restriction(sort, env)
        self.expect_sym(".")
        body_env = {**env, var_tok.text: sort}
        body = self.parse_formula(body_env)
        cls = Exists if quant.text == "EX" else Forall
        return cls(var_tok.text, sort, restriction, body)

    def parse_restriction(self, sort: Sort,
                          env: dict[str, Sort]) -> Restriction:
        tok = self.next()
        if tok.kind != "ident":
            raise self.fail("found non-identifier", tok,
                            expected=("restriction",))
        if tok.text == "induction_term":
            if sort is not Sort.TERM:
                raise self.fail(
                    "induction_term restricts term quantifiers only", tok)
            return INDUCTION_TERMS
        # "<var> : term" -- occurrences of the term bound to <var>
        if sort is not Sort.OCCURRENCE:
            raise self.fail(
                "occurrence restrictions apply to term_occurrence "
                "quantifiers only", tok)
        bound = env.get(tok.text)
        if bound is not Sort.TERM:
            raise self.fail(
                f"{tok.text} is not a term variable in scope", tok)
        self.expect_sym(":")
        sort_tok = self.next()
        if sort_tok.text != Sort.TERM.value:
            raise self.fail("occurrence restrictions name a term variable",
                            sort_tok, expected=("term",))
        return OccurrencesOf(tok.text)

    def parse_primary(self, env: dict[str, Sort]) -> Formula:
        tok = self.peek()
        if self.at_sym("("):
            self.next()
            inner = self.parse_formula(env)
            self.expect_sym(")")
            return inner
        if tok.kind == "ident" and tok.text == "True":
            self.next()
            return TRUE
        if tok.kind in ("ident", "num"):
            return self.parse_atom(env)
        raise self.fail(
            f"found {tok.text!r}" if tok.kind != "eof"
            else "unexpected end of formula",
            tok, expected=("formula",))

    def parse_atom(self, env: dict[str, Sort]) -> Formula:
        first = self.next()
        # prefix form: name ( arg, ... )
        if first.kind == "ident" and self.at_sym("("):
            self.next()
            args: list[_Tok] = []
            if not self.at_sym(")"):
                args.append(self._arg_token())
                while self.at_sym(","):
                    self.next()
                    args.append(self._arg_token())
            self.expect_sym(")")
            return self._typed_atom(first, args, env)
        # infix form: arg name arg
        name_tok = self.next()
        if name_tok.kind != "ident":
            raise self.fail("found non-assertion", name_tok,
                            expected=("assertion name",))
        second = self._arg_token()
        return self._typed_atom(name_tok, [first, second], env)

    def _arg_token(self) -> _Tok:
        tok = self.next()
        if tok.kind not in ("ident", "num"):
            raise self.fail("found non-argument", tok,
                            expected=("variable or number",))
        return tok

    def _typed_atom(self, name_tok: _Tok, arg_toks: list[_Tok],
                    env: dict[str, Sort]) -> Atom:
        sig = ATOM_SIGNATURES.get(name_tok.text)
        if sig is None:
            raise self.fail(f"unknown assertion {name_tok.text!r}", name_tok,
                            expected=tuple(sorted(ATOM_SIGNATURES)))
        if len(sig) != len(arg_toks):
            raise self.fail(
                f"{name_tok.text} takes {len(sig)} argument(s), "
                f"got {len(arg_toks)}", name_tok)
        args: list[str | int] = []
        for expected, tok in zip(sig, arg_toks):
            if tok.kind == "num":
                if expected is not Sort.NUMBER:
                    raise self.fail(
                        f"sort error: {name_tok.text} expects "
                        f"{expected.value} here, got a number", tok)
                args.append(int(tok.text))
                continue
            actual = env.get(tok.text)
            if actual is None:
                raise self.fail(f"unbound variable {tok.text}", tok)
            if actual is not expected:
                raise self.fail(
                    f"sort error: {tok.text} has sort {actual.value}, "
                    f"{name_tok.text} expects {expected.value}", tok)
            args.append(tok.text)
        return Atom(name_tok.text, tuple(args))


def parse_formula(source: str, file: str = "<formula>") -> Formula:
    """Parse and sort-check a closed formula."""
    parser = _DslParser(_dsl_scan(source, file), file)
    formula = parser.parse_formula({})
    if parser.peek().kind != "eof":
        raise parser.fail("trailing tokens after formula")
    return formula


def parse_heuristics(source: str,
                     file: str = "<heuristics>") -> list[tuple[str, Formula]]:
    """Parse a suite file: named blocks ``heuristic <name>: <formula>``."""
    parser = _DslParser(_dsl_scan(source, file), file)
    out: list[tuple[str, Formula]] = []
    names: set[str] = set()
    while parser.peek().kind != "eof":
        head = parser.next()
        if head.kind != "ident" or head.text != "heuristic":
            raise parser.fail(f"found {head.text!r}", head,
                              expected=("'heuristic'",))
        name_tok = parser.next()
        if name_tok.kind != "ident":
            raise parser.fail("found non-identifier", name_tok,
                              expected=("heuristic name",))
        if name_tok.text in names:
            raise parser.fail(f"duplicate heuristic {name_tok.text}",
                              name_tok)
        names.add(name_tok.text)
        parser.expect_sym(":")
        formula = parser.parse_formula({})
        out.append((name_tok.text, formula))
    return out
