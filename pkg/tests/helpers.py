"""Independent oracles used by the tests: exact convex-hull membership by
brute-force subset enumeration, and coordinate vectors for empirical models.

These deliberately avoid the library's LP solver so that they can serve as a
cross-check on it.
"""

from fractions import Fraction
from itertools import combinations


def model_vector(model, coords):
    """The model as an exact vector over a fixed (context, outcome) order."""
    return [model.dists[sigma](o) for sigma, o in coords]


def coordinates(scn):
    coords = []
    for m in scn.base.maximal:
        for o in scn.sets[m]:
            coords.append((m, o))
    return coords


def _solve_convex(columns, target):
    """Solve sum(l_i * columns[i]) = target with sum(l_i) = 1 by Gaussian
    elimination over the rationals.  Returns the coefficient list when the
    system has a unique consistent solution, else None."""
    k = len(columns)
    rows = [[Fraction(col[i]) for col in columns] + [Fraction(target[i])]
            for i in range(len(target))]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    pivots = []
    r = 0
    for c in range(k):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            return None     # affinely dependent columns; skip this subset
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [v / rows[r][c] for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                coef = rows[i][c]
                rows[i] = [a - coef * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None     # inconsistent
    return [rows[j][-1] for j in range(k)]


def in_hull(target, vertices):
    """Is target a convex combination of the vertex vectors?  Brute force.

    Any convex representation must put weight zero on a vertex that is
    positive somewhere the target vanishes, so those vertices are discarded
    first; the remaining subsets are enumerated in increasing size, keeping
    only those whose columns are affinely independent (enough, since a point
    of the hull always has a representation on an affinely independent set).
    """
    kept = [v for v in vertices
            if all(not (v[i] > 0 and target[i] == 0)
                   for i in range(len(target)))]
    for size in range(1, len(kept) + 1):
        for subset in combinations(kept, size):
            sol = _solve_convex(list(subset), target)
            if sol is not None and all(l >= 0 for l in sol):
                return True
    return False
