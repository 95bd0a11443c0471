"""Shared fixtures and stage-level helpers for the test suite."""

from __future__ import annotations

import pytest

from jtxinfer import pipeline as P
from jtxinfer.classtable import build_class_table
from jtxinfer.constraints import flatten, generate_constraints
from jtxinfer.parser import parse
from jtxinfer.unify import unify

FAC_SRC = """\
class Fac {
    getFac(n) {
        var res = 1;
        var i = 1;
        while (i <= n) {
            res = res * i;
            i++;
        }
        return res;
    }
}
"""

TPHS_SRC = """\
class TPHsToGenerics {
    id = x -> x;
    id2(x) { return id.apply(x); }
    m(a, b) { return b; }
    m2(a, b) { var c = m(a, b); return a; }
}
"""

MUTUAL_SRC = """\
import java.util.Pair;
class Mutual {
    m1(x, y) { var y2 = m2(x, y).snd(); return new Pair<>(id(x), y2); }
    m2(x, y) { var x2 = m1(x, y).fst(); return new Pair<>(x2, id(y)); }
    id(x) { return x; }
}
"""

CYCLE_SRC = """\
class Cycle {
    m(x, y) {
        y = x;
        x = y;
    }
}
"""

INFIMUM_SRC = """\
class Infimum {
    m(a, b, c) {
        b = a;
        c = a;
    }
}
"""

OL_SRC = """\
import java.lang.Integer;
import java.lang.Double;
import java.lang.String;
import java.lang.Boolean;
class OL {
    m(x) { return x + x; }
    m(x) { return x || x; }
}
class OLMain {
    main(x) {
        var ol = new OL();
        return ol.m(x);
    }
}
"""

OLFUN_SRC = """\
import java.lang.Integer;
import java.lang.Double;
import java.lang.String;
class OLFun {
    m(f) {
        var x;
        x = f.apply(x + x);
        return x;
    }
}
"""

ALL_GOLDEN_SRCS = {
    "Fac": FAC_SRC,
    "TPHsToGenerics": TPHS_SRC,
    "Mutual": MUTUAL_SRC,
    "Cycle": CYCLE_SRC,
    "Infimum": INFIMUM_SRC,
    "OL": OL_SRC,
    "OLFun": OLFUN_SRC,
}


def stage_solutions(src, idx=0):
    """Replicate the per-class pipeline up to (and including) the
    normalization/dedup step, returning the generation result and the
    surviving `_Solved` states."""
    prog = parse(src)
    table = build_class_table(prog)
    cls = prog.classes[idx]
    gen = generate_constraints(cls, table)
    out = []
    for cand in flatten(gen, table):
        fresh = gen.fresh.clone()
        for sol in unify(cand.constraints, table, fresh):
            s = P._Solved(sol.sigma_dict(), set(sol.remaining), cand,
                          fresh.clone(), gen)
            s.normalize()
            out.append(s)
    return gen, table, P._minimal(P._dedup(out), table)


@pytest.fixture(scope="session")
def fac_result():
    import jtxinfer as J
    return J.run_source(FAC_SRC)


@pytest.fixture(scope="session")
def tphs_result():
    import jtxinfer as J
    return J.run_source(TPHS_SRC)


@pytest.fixture(scope="session")
def mutual_result():
    import jtxinfer as J
    return J.run_source(MUTUAL_SRC)
