"""Parse a theory file and poke at the term kernel.

Terms are curried application trees; every sub-term has a path (0 steps
into the function, 1 into the argument), and a goal is searched premises
first, then conclusion.
"""

from inductrank import (
    Const, corpus_dir, format_term, free_variables, goal_free_variables,
    goal_subterms, occurrences_of, parse_theory,
)

src = (corpus_dir() / "running.thy").read_text()
thy = parse_theory(src, "running.thy")
goal = thy.goal_named("itrev_rev")

print("goal:", format_term(goal.conclusion))
print()

print("free variables, in first-occurrence order:")
for v in goal_free_variables(goal):
    print(f"  {v.name} : {v.type}")
print()

print("every distinct sub-term of the goal:")
for t in goal_subterms(goal):
    print("  ", format_term(t, 10))
print()

itrev = next(t for t in goal_subterms(goal)
             if isinstance(t, Const) and t.name == "itrev")
print("occurrences of the constant itrev:")
for occ in occurrences_of(itrev, goal):
    where = "conclusion" if occ.premise_index is None \
        else f"premise {occ.premise_index}"
    print(f"  {where} at path {occ.path}")

ys = next(v for v in goal_free_variables(goal) if v.name == "ys")
print("occurrences of ys:")
for occ in occurrences_of(ys, goal):
    print(f"  path {occ.path}")

print()
print("variables of the sub-term rev xs @ ys:",
      [v.name for v in free_variables(goal.conclusion.arg)])
