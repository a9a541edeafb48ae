"""Shared fixtures: small scenarios and models used across the test suite."""

from fractions import Fraction

import pytest

from ctxlib.complexes import SimplicialComplex, simplex_from_key
from ctxlib.dist import Dist
from ctxlib.events import (EventScenario, StandardScenario, event_presheaf,
                           tensor_event)
from ctxlib.solve import EmpiricalModel


def standard(contexts, outcomes=("0", "1")):
    verts = sorted({v for c in contexts for v in c})
    return StandardScenario(contexts, {v: list(outcomes) for v in verts})


def model_of(scn, table):
    """Build a model from {context key: {outcome: weight string}}."""
    dists = {}
    for key, tab in table.items():
        dists[simplex_from_key(key)] = Dist(
            {o: Fraction(v) for o, v in tab.items()})
    return EmpiricalModel(scn, dists)


PATH1_CONTEXTS = [["a1", "b1"], ["b1", "c1"]]
PATH2_CONTEXTS = [["a2", "b2"], ["b2", "c2"]]
CHSH_CONTEXTS = [["x1", "y1"], ["x1", "y2"], ["x2", "y1"], ["x2", "y2"]]

# The two-path tensor model supported on perfectly (anti)correlated pairs.
TENSOR_PATH_TABLE = {
    "(a1|a2),(a1|b2),(b1|a2),(b1|b2)": {"(0,0|1,0)": "1/2",
                                        "(1,0|0,0)": "1/2"},
    "(a1|b2),(a1|c2),(b1|b2),(b1|c2)": {"(0,0|0,0)": "1/2",
                                        "(1,0|0,1)": "1/2"},
    "(b1|b2),(b1|c2),(c1|b2),(c1|c2)": {"(0,0|0,0)": "1/2",
                                        "(0,1|0,1)": "1/2"},
    "(b1|a2),(b1|b2),(c1|a2),(c1|b2)": {"(0,0|0,0)": "1/2",
                                        "(0,1|1,0)": "1/2"},
}

PR_BOX_TABLE = {
    "x1,y1": {"0,0": "1/2", "1,1": "1/2"},
    "x1,y2": {"0,0": "1/2", "1,1": "1/2"},
    "x2,y1": {"0,0": "1/2", "1,1": "1/2"},
    "x2,y2": {"0,1": "1/2", "1,0": "1/2"},
}


def triangle_parity_scn():
    """Three binary measurements on a triangle: two edges perfectly
    correlated, one anticorrelated.  No global section exists."""
    base = SimplicialComplex([{"x", "y"}, {"y", "z"}, {"x", "z"}])
    sets = {frozenset([v]): ("0", "1") for v in "xyz"}
    sets[frozenset(["x", "y"])] = ("0,0", "1,1")
    sets[frozenset(["y", "z"])] = ("0,0", "1,1")
    sets[frozenset(["x", "z"])] = ("0,1", "1,0")
    codim1 = {}
    for edge in base.maximal:
        u, v = sorted(edge)
        for s in sets[edge]:
            a, b = s.split(",")
            codim1.setdefault((edge, frozenset([u])), {})[s] = a
            codim1.setdefault((edge, frozenset([v])), {})[s] = b
    return EventScenario(base, sets, codim1)


@pytest.fixture(scope="session")
def path_scn():
    return event_presheaf(standard(PATH1_CONTEXTS))


@pytest.fixture(scope="session")
def path2_scn():
    return event_presheaf(standard(PATH2_CONTEXTS))


@pytest.fixture(scope="session")
def chsh_scn():
    return event_presheaf(standard(CHSH_CONTEXTS))


@pytest.fixture(scope="session")
def tensor_path_scn(path_scn, path2_scn):
    return tensor_event(path_scn, path2_scn)


@pytest.fixture(scope="session")
def triangle_scn():
    return triangle_parity_scn()
