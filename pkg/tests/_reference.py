"""Brute-force reference implementations used as oracles.

Everything here is written independently of the library's evaluator: the
quantifiers materialise their full domains (no short-circuiting, no
sharing), term and occurrence domains come from their own recursive
walkers, and argument-position assertions are answered by inspecting the
actual tree instead of doing path arithmetic.
"""

from __future__ import annotations

import random

from inductrank.dsl import (
    And, Atom, Exists, Forall, Implies, InductionTerms, Not,
    OccurrencesOf, Or, Sort, TrueF, ATOM_SIGNATURES,
    INDUCTION_TERMS, UNRESTRICTED,
)
from inductrank.terms import (
    App, Const, FreeVar, Goal, Occurrence, SimpleType, Theory, spine,
    term_type,
)


# ---------------------------------------------------------------------------
# Reference domains


def ref_subterm_positions(root):
    """(path, subterm) pairs, recursively, pre-order."""

    def walk(t, path):
        out = [(path, t)]
        if isinstance(t, App):
            out += walk(t.fun, path + (0,))
            out += walk(t.arg, path + (1,))
        return out

    return walk(root, ())


def ref_dedup(items):
    out = []
    for x in items:
        if not any(x == y for y in out):
            out.append(x)
    return out


def ref_goal_terms(goal: Goal):
    items = []
    for p in goal.premises:
        items += [t for _, t in ref_subterm_positions(p)]
    items += [t for _, t in ref_subterm_positions(goal.conclusion)]
    return ref_dedup(items)


def ref_goal_occurrences(goal: Goal):
    out = []
    for i, p in enumerate(goal.premises):
        out += [Occurrence(path, t, i)
                for path, t in ref_subterm_positions(p)]
    out += [Occurrence(path, t, None)
            for path, t in ref_subterm_positions(goal.conclusion)]
    return out


def ref_induction_terms(goal: Goal, names):
    def first_var(name):
        for _, root in goal.regions():
            for _, t in ref_subterm_positions(root):
                if isinstance(t, FreeVar) and t.name == name:
                    return t
        return FreeVar(name, SimpleType("'a"))

    return [first_var(n) for n in names]


def ref_rule_names(candidate, thy: Theory):
    rule = candidate.rule
    if rule is None or not rule.endswith(".induct"):
        return []
    f = thy.fundef(rule[: -len(".induct")])
    if f is None or not f.has_induction_rule or not f.equations:
        return []
    if len(spine(f.equations[0].lhs)[1]) == 0:
        return []
    return [rule]


def ref_number_bound(goal: Goal, candidate):
    widest = 1
    for t in ref_goal_terms(goal):
        n = 0
        node = t
        while isinstance(node, App):
            n += 1
            node = node.fun
        widest = max(widest, n)
    return max(widest, len(candidate.induction_terms), 1)


# ---------------------------------------------------------------------------
# Reference atom semantics (tree inspection, not path arithmetic)


def _region_root(goal: Goal, occ: Occurrence):
    if occ.premise_index is None:
        return goal.conclusion
    return goal.premises[occ.premise_index]


def ref_is_nth_argument_of(goal: Goal, to2: Occurrence, n: int,
                           to1: Occurrence) -> bool:
    if to1.premise_index != to2.premise_index:
        return False
    root = _region_root(goal, to1)
    for q, node in ref_subterm_positions(root):
        if not isinstance(node, App):
            continue
        if q != () and q[-1] == 0:
            continue  # not the outermost application of its spine
        # full spine of the application rooted at q
        arg_paths = []
        cur, cur_path = node, q
        while isinstance(cur, App):
            arg_paths.append(cur_path + (1,))
            cur_path = cur_path + (0,)
            cur = cur.fun
        arg_paths.reverse()
        m = len(arg_paths)
        for j in range(1, m + 1):
            head_pos = q + (0,) * j
            if to1.path != head_pos:
                continue
            # the application headed here takes the outermost j arguments
            args_of_head = arg_paths[m - j:]
            if 1 <= n <= j and args_of_head[n - 1] == to2.path:
                return True
    return False


def ref_atom(goal: Goal, candidate, thy: Theory, name: str, values) -> bool:
    if name == "is_rule_of":
        rule_name, occ = values
        return (isinstance(occ.term, Const)
                and rule_name == occ.term.name + ".induct")
    if name == "is_nth_argument_of":
        to2, n, to1 = values
        return ref_is_nth_argument_of(goal, to2, n, to1)
    if name == "is_nth_induction_term":
        t, n = values
        terms = ref_induction_terms(goal, candidate.induction_terms)
        return 1 <= n <= len(terms) and terms[n - 1] == t
    if name == "is_free_variable":
        return isinstance(values[0], FreeVar)
    if name == "is_constant":
        return isinstance(values[0], Const)
    if name == "is_in_arbitrary":
        t = values[0]
        return isinstance(t, FreeVar) and t.name in candidate.arbitrary
    if name == "is_of_datatype":
        ty = term_type(values[0])
        return (not ty.is_var()) and thy.datatype(ty.name) is not None
    if name == "occurs_in_conclusion":
        return values[0].premise_index is None
    if name == "is_recursive_constant":
        t = values[0]
        if not isinstance(t, Const):
            return False
        f = thy.fundef(t.name)
        if f is None:
            return False
        return any(isinstance(sub, Const) and sub.name == f.name
                   for eq in f.equations
                   for _, sub in ref_subterm_positions(eq.rhs))
    if name == "same_term":
        occ, t = values
        return occ.term == t
    raise ValueError(name)


# ---------------------------------------------------------------------------
# Reference evaluator: full materialisation, no short-circuiting


def ref_evaluate(formula, goal: Goal, candidate, thy: Theory,
                 number_bound: int | None = None) -> bool:
    if number_bound is None:
        number_bound = ref_number_bound(goal, candidate)

    def domain(sort, restriction, env):
        if sort is Sort.NUMBER:
            return list(range(1, number_bound + 1))
        if sort is Sort.RULE:
            return ref_rule_names(candidate, thy)
        if sort is Sort.TERM:
            if isinstance(restriction, InductionTerms):
                return ref_induction_terms(goal, candidate.induction_terms)
            return ref_goal_terms(goal)
        occurrences = ref_goal_occurrences(goal)
        if isinstance(restriction, OccurrencesOf):
            target = env[restriction.term_var]
            return [o for o in occurrences if o.term == target]
        return occurrences

    def ev(f, env):
        if isinstance(f, TrueF):
            return True
        if isinstance(f, Not):
            return not ev(f.body, env)
        if isinstance(f, And):
            results = [ev(f.left, env), ev(f.right, env)]
            return False not in results
        if isinstance(f, Or):
            results = [ev(f.left, env), ev(f.right, env)]
            return True in results
        if isinstance(f, Implies):
            results = [ev(f.left, env), ev(f.right, env)]
            return (not results[0]) or results[1]
        if isinstance(f, Exists):
            results = [ev(f.body, {**env, f.var: v})
                       for v in domain(f.sort, f.restriction, env)]
            return True in results
        if isinstance(f, Forall):
            results = [ev(f.body, {**env, f.var: v})
                       for v in domain(f.sort, f.restriction, env)]
            return False not in results
        assert isinstance(f, Atom)
        values = tuple(a if isinstance(a, int) else env[a] for a in f.args)
        return ref_atom(goal, candidate, thy, f.name, values)

    return ev(formula, {})


# ---------------------------------------------------------------------------
# Random well-sorted formula generation


def random_formula(rng: random.Random, depth: int = 5,
                   max_quantifiers: int = 3):
    """A closed, well-sorted formula of AST depth at most `depth`."""

    def atom_for(env):
        usable = []
        for name, sig in ATOM_SIGNATURES.items():
            if all(s is Sort.NUMBER or s in env.values() for s in sig):
                usable.append((name, sig))
        if not usable:
            return TrueF()
        name, sig = usable[rng.randrange(len(usable))]
        args = []
        for s in sig:
            if s is Sort.NUMBER:
                number_vars = [v for v, vs in env.items()
                               if vs is Sort.NUMBER]
                if number_vars and rng.random() < 0.5:
                    args.append(number_vars[rng.randrange(len(number_vars))])
                else:
                    args.append(rng.randint(1, 3))
            else:
                vars_of = [v for v, vs in env.items() if vs is s]
                args.append(vars_of[rng.randrange(len(vars_of))])
        return Atom(name, tuple(args))

    def build(env, depth_left, quant_left):
        if depth_left <= 0 or rng.random() < 0.2:
            return atom_for(env) if rng.random() < 0.8 else TrueF()
        roll = rng.random()
        if quant_left > 0 and roll < 0.55:
            sort = [Sort.NUMBER, Sort.RULE, Sort.TERM,
                    Sort.OCCURRENCE][rng.randrange(4)]
            restriction = UNRESTRICTED
            if sort is Sort.TERM and rng.random() < 0.5:
                restriction = INDUCTION_TERMS
            if sort is Sort.OCCURRENCE:
                term_vars = [v for v, vs in env.items() if vs is Sort.TERM]
                if term_vars and rng.random() < 0.6:
                    restriction = OccurrencesOf(
                        term_vars[rng.randrange(len(term_vars))])
            var = f"v{len(env)}"
            body = build({**env, var: sort}, depth_left - 1, quant_left - 1)
            cls = Exists if rng.random() < 0.5 else Forall
            return cls(var, sort, restriction, body)
        if roll < 0.65:
            return Not(build(env, depth_left - 1, quant_left))
        cls = [And, Or, Implies][rng.randrange(3)]
        return cls(build(env, depth_left - 1, quant_left),
                   build(env, depth_left - 1, quant_left))

    return build({}, depth, max_quantifiers)
