"""Subtype unification: simplification, branching, maximality."""

import pytest

from jtxinfer import Untypable, parse, unify
from jtxinfer.classtable import build_class_table
from jtxinfer.constraints import doteq, lessdot
from jtxinfer.typeterms import VOID, ClassType, FunType, TPH
from jtxinfer.unify import format_solution, transitive_closure

INT = ClassType("Integer")
NUM = ClassType("Number")
OBJ = ClassType("Object")
BOOL = ClassType("Boolean")


@pytest.fixture(scope="module")
def table():
    return build_class_table(parse(
        "import java.lang.Double;\nimport java.util.Pair;\n"
        "class Scratch { f = x -> x; m(x, y) { return x <= y; } "
        "n() { var s = \"\"; return 1; } }"))


def solve(table, *cons, **kw):
    return unify(list(cons), table, **kw)


def sigma_of(sol):
    return sol.sigma_dict()


def test_ground_equal_succeeds(table):
    (sol,) = solve(table, doteq(INT, INT))
    assert sol.remaining == () and sol.sigma == ()


def test_ground_unequal_fails(table):
    assert solve(table, doteq(INT, BOOL)) == []


def test_ground_subtype_checks(table):
    assert len(solve(table, lessdot(INT, NUM))) == 1
    assert solve(table, lessdot(NUM, INT)) == []


def test_doteq_binds_placeholder(table):
    (sol,) = solve(table, doteq(TPH("T"), INT))
    assert sigma_of(sol)["T"] == INT


def test_doteq_two_placeholders_binds_newer_to_older(table):
    (sol,) = solve(table, doteq(TPH("ZZ"), TPH("A")))
    assert sigma_of(sol)["ZZ"] == TPH("A")
    (sol,) = solve(table, doteq(TPH("A"), TPH("ZZ")))
    assert sigma_of(sol)["ZZ"] == TPH("A")


def test_tph_pair_lessdot_remains(table):
    (sol,) = solve(table, lessdot(TPH("T"), TPH("U")))
    assert sol.remaining == (("T", "U"),)


def test_lower_expansion_branches_over_subtypes(table):
    sols = solve(table, lessdot(TPH("T"), NUM))
    values = {str(sigma_of(s)["T"]) for s in sols}
    assert values == {"Integer", "Double", "Number"}


def test_upper_expansion_branches_over_chain(table):
    sols = solve(table, lessdot(INT, TPH("T")))
    values = {str(sigma_of(s)["T"]) for s in sols}
    assert values == {"Integer", "Number", "Object"}


def test_object_upper_bound_dropped(table):
    (sol,) = solve(table, lessdot(TPH("T"), OBJ))
    assert sol.remaining == () and sol.sigma == ()


def test_void_has_no_subtypes(table):
    assert solve(table, lessdot(VOID, OBJ)) == []
    assert solve(table, lessdot(INT, VOID)) == []
    (sol,) = solve(table, doteq(VOID, VOID))
    assert sol.remaining == ()


def test_pair_decomposition_invariant(table):
    p = lambda a, b: ClassType("Pair", (a, b))
    (sol,) = solve(table, lessdot(p(TPH("T"), INT), p(NUM, INT)))
    assert sigma_of(sol)["T"] == NUM
    assert solve(table, lessdot(p(INT, INT), p(NUM, INT))) == []


def test_fun_decomposition_contravariant(table):
    f = lambda a, r: FunType((a,), r)
    # Integer <. R upper-expands; all chain members are solutions
    sols = solve(table, lessdot(f(NUM, INT), f(INT, TPH("R"))))
    values = {str(sigma_of(s)["R"]) for s in sols}
    assert values == {"Integer", "Number", "Object"}
    assert solve(table, lessdot(f(INT, INT), f(NUM, INT))) == []


def test_occurs_check(table):
    p = lambda a, b: ClassType("Pair", (a, b))
    assert solve(table, doteq(TPH("T"), p(TPH("T"), INT))) == []


def test_max_solutions_caps_enumeration(table):
    sols = solve(table, lessdot(TPH("T"), NUM), max_solutions=2)
    assert len(sols) == 2


def test_solutions_are_maximal_and_distinct(table):
    sols = solve(table, lessdot(TPH("T"), NUM), lessdot(TPH("T"), INT))
    values = {str(sigma_of(s)["T"]) for s in sols}
    assert values == {"Integer"}


def test_format_solution(table):
    (sol,) = solve(table, lessdot(TPH("T"), TPH("U")), doteq(TPH("V"), INT))
    text = format_solution(sol)
    assert text.splitlines()[0] == "remaining:"
    assert "  T < U" in text
    assert "  V -> Integer" in text
    assert "sigma:" in text


def test_transitive_closure():
    rel = transitive_closure([("A", "B"), ("B", "C")])
    assert ("A", "C") in rel
    assert ("A", "A") in rel and ("C", "C") in rel
    assert ("C", "A") not in rel


def test_untypable_constraint_set(table):
    assert solve(table, lessdot(BOOL, NUM)) == []
