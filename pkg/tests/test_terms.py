from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from inductrank.parser import parse_goal_expr
from inductrank.terms import (
    TYPE_NAT, App, Const, FreeVar, Goal, SchematicVar, SimpleType,
    contains_schematic, contains_subterm, free_variables, fun_type,
    goal_free_variables, list_of, mk_app, occurrences_of,
    resolve_occurrence, subst_frees, subterm_at, term_type,
)

NAT = TYPE_NAT
NATS = list_of(NAT)


def suc(t):
    return mk_app(Const("Suc", fun_type(NAT, NAT)), t)


def cons(h, t):
    return mk_app(Const("#", fun_type(NAT, NATS, NATS)), h, t)


def append(a, b):
    return mk_app(Const("@", fun_type(NATS, NATS, NATS)), a, b)


ZERO = Const("0", NAT)
NIL = Const("[]", NATS)
VA = FreeVar("a", NAT)
VB = FreeVar("b", NAT)
VXS = FreeVar("xs", NATS)
VYS = FreeVar("ys", NATS)


# -- leaf-collecting oracle, independent of free_variables -------------------


def collect_distinct_vars(t):
    seen = []

    def walk(node):
        if isinstance(node, App):
            walk(node.fun)
            walk(node.arg)
        elif isinstance(node, FreeVar) and node not in seen:
            seen.append(node)

    walk(t)
    return seen


class TestFreeVariables:
    def test_running_lemma_conclusion(self, running_goal):
        assert [v.name for v in free_variables(running_goal.conclusion)] \
            == ["xs", "ys"]

    def test_closed_term(self):
        t = mk_app(Const("eq", fun_type(NATS, NATS, SimpleType("bool"))),
                   NIL, NIL)
        assert free_variables(t) == []

    def test_repeated_variable_listed_once(self):
        # f x (g x y) over declared constants f, g
        f = Const("f", fun_type(NAT, NAT, NAT))
        g = Const("g", fun_type(NAT, NAT, NAT))
        x, y = FreeVar("x", NAT), FreeVar("y", NAT)
        t = mk_app(f, x, mk_app(g, x, y))
        assert [v.name for v in free_variables(t)] == ["x", "y"]
        assert free_variables(t) == collect_distinct_vars(t)


class TestOccurrences:
    def test_itrev_occurs_once(self, running_theory, running_goal):
        itrev = _const_in(running_goal, "itrev")
        occs = occurrences_of(itrev, running_goal)
        assert len(occs) == 1
        assert occs[0].premise_index is None
        assert occs[0].path == (0, 1, 0, 0)

    def test_conclusion_root_occurrence(self, running_goal):
        occs = occurrences_of(running_goal.conclusion, running_goal)
        assert len(occs) == 1
        assert occs[0].path == ()

    def test_ys_occurs_twice(self, running_goal):
        ys = next(v for v in goal_free_variables(running_goal)
                  if v.name == "ys")
        occs = occurrences_of(ys, running_goal)
        assert len(occs) == 2
        # oracle: exhaustive recursive walk
        assert len(_walk_count(running_goal.conclusion, ys)) == 2

    def test_resolving_path_reproduces_term(self, running_goal):
        for sub in [VXS, _const_in(running_goal, "rev")]:
            for occ in occurrences_of(sub, running_goal):
                assert resolve_occurrence(running_goal, occ) == occ.term


def _const_in(goal, name):
    from inductrank.terms import goal_subterms
    return next(t for t in goal_subterms(goal)
                if isinstance(t, Const) and t.name == name)


def _walk_count(t, needle):
    hits = []

    def walk(node, path):
        if node == needle:
            hits.append(path)
        if isinstance(node, App):
            walk(node.fun, path + (0,))
            walk(node.arg, path + (1,))

    walk(t, ())
    return hits


class TestContainsSubterm:
    def test_reflexive(self):
        t = append(cons(VA, NIL), VXS)
        assert contains_subterm(t, t)

    def test_proper_subterm(self, running_theory):
        t = parse_goal_expr("rev xs @ ys = rev xs @ ys", running_theory)
        lhs = t.arg  # right operand of eq application: rev xs @ ys
        rev_xs = lhs.fun.arg
        assert contains_subterm(lhs, rev_xs)
        assert occurrences_of(rev_xs, Goal("h", (), lhs)) != []

    def test_distinct_variables(self):
        rev = Const("rev", fun_type(NATS, NATS))
        assert not contains_subterm(mk_app(rev, VXS), mk_app(rev, VYS))


class TestContainsSchematic:
    def test_running_lemma_has_none(self, running_goal):
        assert not contains_schematic(running_goal)

    def test_schematic_conclusion(self):
        p = SchematicVar("P", fun_type(NATS, SimpleType("bool")))
        goal = Goal("g", (), mk_app(p, NIL))
        assert contains_schematic(goal)

    def test_zero_term_rule_application(self, running_theory, running_goal):
        from inductrank.tactic import Candidate, apply_induct
        sgs = apply_induct(running_goal,
                           Candidate((), frozenset(), "itrev.induct"),
                           running_theory, timeout=None)
        assert all(contains_schematic(sg) for sg in sgs.subgoals)


# -- property tests ----------------------------------------------------------

nat_terms = st.recursive(
    st.sampled_from([ZERO, VA, VB]),
    lambda kids: kids.map(suc),
    max_leaves=5)

list_terms = st.recursive(
    st.sampled_from([NIL, VXS, VYS]),
    lambda kids: st.one_of(
        st.tuples(nat_terms, kids).map(lambda p: cons(*p)),
        st.tuples(kids, kids).map(lambda p: append(*p))),
    max_leaves=5)

any_terms = st.one_of(nat_terms, list_terms)


@given(any_terms)
def test_free_variables_matches_leaf_oracle(t):
    assert free_variables(t) == collect_distinct_vars(t)


@given(any_terms)
def test_bijective_renaming_permutes_consistently(t):
    renamed = subst_frees(t, {
        name: FreeVar(name + "_r", ty)
        for name, ty in [("a", NAT), ("b", NAT), ("xs", NATS), ("ys", NATS)]
    })
    assert [v.name + "_r" for v in free_variables(t)] \
        == [v.name for v in free_variables(renamed)]


@given(list_terms, nat_terms)
def test_contains_iff_occurrences_nonempty(haystack, needle):
    goal = Goal("wrap", (), mk_app(
        Const("eq", fun_type(NATS, NATS, SimpleType("bool"))),
        haystack, haystack))
    assert contains_subterm(haystack, needle) \
        == (occurrences_of(needle, Goal("h", (), haystack)) != [])


@given(list_terms)
def test_every_occurrence_resolves(t):
    goal = Goal("g", (), mk_app(
        Const("eq", fun_type(NATS, NATS, SimpleType("bool"))), t, t))
    for needle in (VXS, NIL, ZERO):
        for occ in occurrences_of(needle, goal):
            assert resolve_occurrence(goal, occ) == needle


def test_subterm_at_rejects_bad_path():
    with pytest.raises(ValueError):
        subterm_at(VA, (0,))


def test_term_type_of_application():
    assert term_type(cons(VA, NIL)) == NATS
    assert term_type(suc(ZERO)) == NAT
