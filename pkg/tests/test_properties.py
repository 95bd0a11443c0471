"""Property-based checks: unification against a brute-force ground oracle,
and monotonicity/conformance of the bound-relation repair map."""

import itertools

from hypothesis import given, settings, strategies as st

from jtxinfer import parse
from jtxinfer.classtable import build_class_table
from jtxinfer.constraints import FreshNames, doteq, lessdot
from jtxinfer.generics import enforce_java_conformance
from jtxinfer.typeterms import ClassType, TPH
from jtxinfer.unify import transitive_closure, unify

# --- unification vs. brute force -------------------------------------------

GROUND = ["Integer", "Double", "Number", "String", "Boolean", "Object"]
TPHS = ["T0", "T1", "T2"]

_TABLE = build_class_table(parse(
    "import java.lang.Integer;\nimport java.lang.Double;\n"
    "import java.lang.String;\nimport java.lang.Boolean;\nclass Scratch { }"))

_SUBTYPE = {(a, b): _TABLE.is_subtype(ClassType(a), ClassType(b))
            for a in GROUND for b in GROUND}

term_st = st.one_of(st.sampled_from(GROUND).map(ClassType),
                    st.sampled_from(TPHS).map(TPH))
constraint_st = st.builds(
    lambda kind, l, r: kind(l, r),
    st.sampled_from([doteq, lessdot]), term_st, term_st)


def _ground_name(t, assign):
    return assign[t.name] if isinstance(t, TPH) else t.name


def _satisfies(cons, assign):
    for c in cons:
        l, r = _ground_name(c.lhs, assign), _ground_name(c.rhs, assign)
        if c.kind == "doteq":
            if l != r:
                return False
        elif not _SUBTYPE[(l, r)]:
            return False
    return True


def _solution_admits(sol, assign):
    sigma = sol.sigma_dict()
    for name, val in assign.items():
        if name in sigma:
            bound = sigma[name]
            while isinstance(bound, TPH) and bound.name in sigma:
                bound = sigma[bound.name]
            expected = (assign[bound.name] if isinstance(bound, TPH)
                        else bound.name)
            if expected != val:
                return False
    for (l, r) in sol.remaining:
        if not _SUBTYPE[(assign[l], assign[r])]:
            return False
    return True


@settings(max_examples=1000, deadline=None)
@given(st.lists(constraint_st, min_size=1, max_size=6))
def test_unify_sound_and_complete_vs_brute_force(cons):
    solutions = unify(list(cons), _TABLE)
    oracle = set()
    for values in itertools.product(GROUND, repeat=len(TPHS)):
        assign = dict(zip(TPHS, values))
        if _satisfies(cons, assign):
            oracle.add(values)
    engine = set()
    for values in itertools.product(GROUND, repeat=len(TPHS)):
        assign = dict(zip(TPHS, values))
        if any(_solution_admits(sol, assign) for sol in solutions):
            engine.add(values)
    assert engine == oracle


# --- conformance repair map -------------------------------------------------

NODES = [f"T{i}" for i in range(8)]
M0 = ("method", 0)

pair_st = st.tuples(st.sampled_from(NODES), st.sampled_from(NODES)).filter(
    lambda p: p[0] != p[1])
graph_st = st.lists(pair_st, min_size=0, max_size=12, unique=True)


def _refl_closure(pairs, names):
    closure = set(transitive_closure(pairs))
    closure |= {(n, n) for n in names}
    return closure


@settings(max_examples=500, deadline=None)
@given(graph_st)
def test_conformance_repair_is_monotone_and_java_conform(pairs):
    owners = {n: M0 for n in NODES}
    fresh = FreshNames()
    family, h = enforce_java_conformance({M0: set(pairs)}, fresh, owners)
    out = {(l, r) for (l, r) in family[M0] if r != "Object"}

    def H(n):
        return h.get(n, n)

    names = {n for p in pairs for n in p}
    new_names = {H(n) for n in names} | {x for p in out for x in p}
    before = _refl_closure(pairs, names)
    after = _refl_closure(out, new_names)

    # monotone: every original bound survives the collapse
    for (a, b) in before:
        assert (H(a), H(b)) in after

    # antisymmetric: no non-trivial cycles remain
    for (a, b) in after:
        if a != b:
            assert (b, a) not in after

    # no infimum: at most one direct upper bound per placeholder
    uppers = {}
    for (l, r) in out:
        uppers.setdefault(l, set()).add(r)
    for l, rs in uppers.items():
        assert len(rs) == 1

    # the collapse map is idempotent on the result
    for old, new in h.items():
        assert h.get(new, new) == new
