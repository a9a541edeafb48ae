"""Truncated simplicial sets and simplicial scenarios.

Simplicial sets are tabled per degree up to a dimension bound d, with face and
degeneracy tables validated against the simplicial identities wherever both
sides stay within the bound.  On top of these live nerve spaces of complexes
and bundles, sections, simplicial distributions, stochastic morphisms, the
mapping scenario Map(f,g), the nerve comparison maps, and the convex map mu.
"""

from itertools import combinations_with_replacement, product

from .complexes import nonempty_subsets, pair_name, skey, unpair_name
from .dist import Dist, delta, mixture, product_dist, pushforward
from .errors import CompositionError, DomainError, ResourceLimitError


class TruncatedSSet:
    """Finite simplicial set truncated at degree d.

    simp[n] is the tuple of degree-n simplex ids; face[n][x] lists the faces
    d_0..d_n (n >= 1); degen[n][x] lists s_0..s_n landing in degree n+1
    (n < d).  payload optionally carries structured data per simplex.
    """

    __slots__ = ("d", "simp", "face", "degen", "payload", "_degsrc")

    def __init__(self, d, simp, face, degen, payload=None):
        self.d = d
        self.simp = {n: tuple(simp.get(n, ())) for n in range(d + 1)}
        self.face = {n: dict(face.get(n, {})) for n in range(1, d + 1)}
        self.degen = {n: dict(degen.get(n, {})) for n in range(d)}
        self.payload = payload or {}
        self._degsrc = None

    def faces(self, n, x):
        return self.face[n][x]

    def dface(self, n, i, x):
        return self.face[n][x][i]

    def sdegen(self, n, j, x):
        return self.degen[n][x][j]

    def degeneracy_source(self):
        """For each degenerate simplex, the first (j, parent) producing it."""
        if self._degsrc is None:
            src = {}
            for n in range(self.d):
                for x in self.simp[n]:
                    for j, y in enumerate(self.degen[n][x]):
                        src.setdefault((n + 1, y), (j, x))
            self._degsrc = src
        return self._degsrc

    def is_degenerate(self, n, x):
        return (n, x) in self.degeneracy_source()

    def nondegenerate(self, n):
        return [x for x in self.simp[n] if not self.is_degenerate(n, x)]

    def __eq__(self, other):
        return (isinstance(other, TruncatedSSet) and self.d == other.d
                and self.simp == other.simp and self.face == other.face
                and self.degen == other.degen)

    def to_json(self):
        return {"d": self.d,
                "simplices": {str(n): list(self.simp[n])
                              for n in range(self.d + 1)},
                "faces": {str(n): {x: list(v)
                                   for x, v in sorted(self.face[n].items())}
                          for n in range(1, self.d + 1)},
                "degens": {str(n): {x: list(v)
                                    for x, v in sorted(self.degen[n].items())}
                           for n in range(self.d)}}

    @classmethod
    def from_json(cls, obj):
        d = obj["d"]
        return cls(d,
                   {int(n): tuple(v) for n, v in obj["simplices"].items()},
                   {int(n): {x: tuple(v) for x, v in t.items()}
                    for n, t in obj.get("faces", {}).items()},
                   {int(n): {x: tuple(v) for x, v in t.items()}
                    for n, t in obj.get("degens", {}).items()})


def validate_sset(X):
    failures = []
    for n in range(1, X.d + 1):
        for x in X.simp[n]:
            fs = X.face[n].get(x)
            if fs is None or len(fs) != n + 1:
                failures.append({"law": "face-table", "simplex": (n, x)})
                continue
            if any(f not in set(X.simp[n - 1]) for f in fs):
                failures.append({"law": "face-range", "simplex": (n, x)})
    for n in range(X.d):
        for x in X.simp[n]:
            ds = X.degen[n].get(x)
            if ds is None or len(ds) != n + 1:
                failures.append({"law": "degen-table", "simplex": (n, x)})
                continue
            if any(s not in set(X.simp[n + 1]) for s in ds):
                failures.append({"law": "degen-range", "simplex": (n, x)})
    if failures:
        return {"ok": False, "failures": failures}
    for n in range(2, X.d + 1):
        for x in X.simp[n]:
            for j in range(n + 1):
                for i in range(j):
                    lhs = X.dface(n - 1, i, X.dface(n, j, x))
                    rhs = X.dface(n - 1, j - 1, X.dface(n, i, x))
                    if lhs != rhs:
                        failures.append({"law": "didj", "simplex": (n, x),
                                         "i": i, "j": j})
    for n in range(X.d - 1):
        for x in X.simp[n]:
            for j in range(n + 1):
                for i in range(j + 1):
                    lhs = X.sdegen(n + 1, j + 1, X.sdegen(n, i, x))
                    rhs = X.sdegen(n + 1, i, X.sdegen(n, j, x))
                    if lhs != rhs:
                        failures.append({"law": "sisj", "simplex": (n, x),
                                         "i": i, "j": j})
    for n in range(X.d):
        for x in X.simp[n]:
            for j in range(n + 1):
                sx = X.sdegen(n, j, x)
                for i in range(n + 2):
                    got = X.dface(n + 1, i, sx)
                    if i == j or i == j + 1:
                        want = x
                    elif i < j:
                        want = X.sdegen(n - 1, j - 1, X.dface(n, i, x)) \
                            if n >= 1 else None
                    else:
                        want = X.sdegen(n - 1, j, X.dface(n, i - 1, x)) \
                            if n >= 1 else None
                    if want is not None and got != want:
                        failures.append({"law": "disj", "simplex": (n, x),
                                         "i": i, "j": j})
    return {"ok": not failures, "failures": failures}


class SSetMap:
    """A degreewise map commuting with faces and degeneracies."""

    __slots__ = ("source", "target", "comp")

    def __init__(self, source, target, comp, check=True):
        self.source = source
        self.target = target
        self.comp = {n: dict(comp.get(n, {})) for n in range(source.d + 1)}
        if check:
            report = validate_sset_map(self)
            if not report["ok"]:
                raise DomainError("not a simplicial map: %s"
                                  % report["failures"][:3])

    def __call__(self, n, x):
        return self.comp[n][x]

    def compose(self, other):
        """self after other."""
        if other.target is not self.target and other.target != self.source:
            if other.target != self.source:
                raise CompositionError("simplicial maps do not compose")
        comp = {n: {x: self.comp[n][other.comp[n][x]]
                    for x in other.source.simp[n]}
                for n in range(other.source.d + 1)}
        return SSetMap(other.source, self.target, comp, check=False)

    def __eq__(self, other):
        return (isinstance(other, SSetMap) and self.source == other.source
                and self.target == other.target and self.comp == other.comp)

    def key(self):
        return ";".join("%d:%s>%s" % (n, x, self.comp[n][x])
                        for n in sorted(self.comp)
                        for x in sorted(self.comp[n]))


def validate_sset_map(fmap):
    failures = []
    X, Y = fmap.source, fmap.target
    if Y.d < X.d:
        return {"ok": False, "failures": [{"law": "truncation"}]}
    for n in range(X.d + 1):
        ytab = set(Y.simp[n])
        for x in X.simp[n]:
            y = fmap.comp[n].get(x)
            if y not in ytab:
                failures.append({"law": "totality", "simplex": (n, x)})
    if failures:
        return {"ok": False, "failures": failures}
    for n in range(1, X.d + 1):
        for x in X.simp[n]:
            for i in range(n + 1):
                if fmap(n - 1, X.dface(n, i, x)) != \
                        Y.dface(n, i, fmap(n, x)):
                    failures.append({"law": "face", "simplex": (n, x), "i": i})
    for n in range(X.d):
        for x in X.simp[n]:
            for j in range(n + 1):
                if fmap(n + 1, X.sdegen(n, j, x)) != \
                        Y.sdegen(n, j, fmap(n, x)):
                    failures.append({"law": "degen", "simplex": (n, x),
                                     "j": j})
    return {"ok": not failures, "failures": failures}


def identity_sset_map(X):
    return SSetMap(X, X, {n: {x: x for x in X.simp[n]}
                          for n in range(X.d + 1)}, check=False)


# ---------------------------------------------------------------------------
# Ordinal operators


def monotone_maps(m, n):
    """All monotone maps [m] -> [n] as value tuples of length m+1."""
    return [t for t in combinations_with_replacement(range(n + 1), m + 1)]


def theta_id(theta):
    return ",".join(str(v) for v in theta)


def compose_theta(theta, phi):
    """theta after phi."""
    return tuple(theta[v] for v in phi)


def identity_theta(n):
    return tuple(range(n + 1))


def coface(i, m):
    """The injection [m-1] -> [m] skipping i."""
    return tuple(v for v in range(m + 1) if v != i)


def codegen(j, m):
    """The surjection [m+1] -> [m] repeating j."""
    return tuple(list(range(j + 1)) + list(range(j, m + 1)))


def apply_operator(X, n, x, theta):
    """The contravariant action of a monotone map on a degree-n simplex."""
    m = len(theta) - 1
    if theta == identity_theta(n):
        return x
    # split off a codegeneracy if theta repeats a value
    for i in range(m):
        if theta[i] == theta[i + 1]:
            shorter = theta[:i + 1] + theta[i + 2:]
            return X.sdegen(m - 1, i, apply_operator(X, n, x, shorter))
    # theta strictly monotone and not the identity: peel the largest missing
    missing = max(v for v in range(n + 1) if v not in theta)
    reindexed = tuple(v if v < missing else v - 1 for v in theta)
    return apply_operator(X, n - 1, X.dface(n, missing, x), reindexed)


# ---------------------------------------------------------------------------
# Standard simplices, discrete simplicial sets, products


def standard_simplex(n, d):
    if n > d:
        raise DomainError("standard simplex dimension exceeds the bound")
    simp = {m: tuple(theta_id(t) for t in monotone_maps(m, n))
            for m in range(d + 1)}
    face = {}
    degen = {}
    for m in range(1, d + 1):
        face[m] = {theta_id(t): tuple(theta_id(t[:i] + t[i + 1:])
                                      for i in range(m + 1))
                   for t in monotone_maps(m, n)}
    for m in range(d):
        degen[m] = {theta_id(t): tuple(theta_id(t[:j + 1] + t[j:])
                                       for j in range(m + 1))
                    for t in monotone_maps(m, n)}
    payload = {(m, theta_id(t)): t
               for m in range(d + 1) for t in monotone_maps(m, n)}
    return TruncatedSSet(d, simp, face, degen, payload)


def discrete_sset(items, d):
    """A set viewed as a simplicial set: constant in every degree."""
    items = tuple(items)
    simp = {m: items for m in range(d + 1)}
    face = {m: {x: tuple(x for _ in range(m + 1)) for x in items}
            for m in range(1, d + 1)}
    degen = {m: {x: tuple(x for _ in range(m + 1)) for x in items}
             for m in range(d)}
    return TruncatedSSet(d, simp, face, degen)


def discrete_map(func, X, Y):
    """Lift a plain function to a map of discrete simplicial sets."""
    return SSetMap(X, Y, {n: {x: func(x) for x in X.simp[n]}
                          for n in range(X.d + 1)}, check=False)


def product_sset(X, Y):
    d = min(X.d, Y.d)
    simp = {}
    face = {}
    degen = {}
    payload = {}
    for n in range(d + 1):
        ids = []
        for x in X.simp[n]:
            for y in Y.simp[n]:
                pid = pair_name(x, y)
                ids.append(pid)
                payload[(n, pid)] = (x, y)
        simp[n] = tuple(ids)
    for n in range(1, d + 1):
        face[n] = {}
        for pid in simp[n]:
            x, y = payload[(n, pid)]
            face[n][pid] = tuple(pair_name(X.dface(n, i, x), Y.dface(n, i, y))
                                 for i in range(n + 1))
    for n in range(d):
        degen[n] = {}
        for pid in simp[n]:
            x, y = payload[(n, pid)]
            degen[n][pid] = tuple(
                pair_name(X.sdegen(n, j, x), Y.sdegen(n, j, y))
                for j in range(n + 1))
    return TruncatedSSet(d, simp, face, degen, payload)


def product_sset_map(f1, f2):
    src = product_sset(f1.source, f2.source)
    tgt = product_sset(f1.target, f2.target)
    comp = {}
    for n in range(src.d + 1):
        comp[n] = {}
        for pid in src.simp[n]:
            x, y = src.payload[(n, pid)]
            comp[n][pid] = pair_name(f1(n, x), f2(n, y))
    return SSetMap(src, tgt, comp, check=False)


# ---------------------------------------------------------------------------
# Nerve spaces


EMPTY = frozenset()


def nerve_tuple_id(entries):
    return "(" + ";".join(skey(e) for e in entries) + ")"


def nerve_face(entries, i):
    n = len(entries)
    if i == 0:
        return entries[1:]
    if i == n:
        return entries[:-1]
    return entries[:i - 1] + (entries[i - 1] | entries[i],) + entries[i + 1:]


def nerve_degen(entries, j):
    return entries[:j] + (EMPTY,) + entries[j:]


def nerve_space(cpx, d):
    """Degree-n simplices are n-tuples over the simplices of the complex plus
    the empty marker, with union a simplex (or everything empty)."""
    if d < 1:
        raise DomainError("truncation must be at least 1")
    simp = {0: ("()",)}
    payload = {(0, "()"): ()}
    tuples = {0: [()]}
    for n in range(1, d + 1):
        seen = {}
        for m in cpx.maximal:
            subs = [EMPTY] + list(nonempty_subsets(m))
            for t in product(subs, repeat=n):
                tid = nerve_tuple_id(t)
                if tid not in seen:
                    seen[tid] = t
        order = sorted(seen)
        simp[n] = tuple(order)
        tuples[n] = [seen[tid] for tid in order]
        for tid in order:
            payload[(n, tid)] = seen[tid]
    face = {}
    degen = {}
    for n in range(1, d + 1):
        face[n] = {nerve_tuple_id(t): tuple(nerve_tuple_id(nerve_face(t, i))
                                            for i in range(n + 1))
                   for t in tuples[n]}
    for n in range(d):
        degen[n] = {nerve_tuple_id(t): tuple(nerve_tuple_id(nerve_degen(t, j))
                                             for j in range(n + 1))
                    for t in tuples[n]}
    return TruncatedSSet(d, simp, face, degen, payload)


def nerve_bundle(bnd, d=None):
    """The nerve of a bundle: apply the bundle map entrywise to tuples."""
    if d is None:
        d = bnd.base.dim() + 1
    total = nerve_space(bnd.total, d)
    base = nerve_space(bnd.base, d)
    comp = {}
    for n in range(d + 1):
        comp[n] = {}
        for tid in total.simp[n]:
            entries = total.payload[(n, tid)]
            comp[n][tid] = nerve_tuple_id(
                tuple(bnd.image(e) for e in entries))
    return SSetMap(total, base, comp, check=False)


# ---------------------------------------------------------------------------
# Fibers, sections, simplicial distributions


def map_fibers(fmap):
    fibs = {}
    for n in range(fmap.source.d + 1):
        for e in fmap.source.simp[n]:
            fibs.setdefault((n, fmap(n, e)), []).append(e)
    return fibs


def enumerate_sset_maps(X, Y, candidates, cap=10 ** 6):
    """All maps X -> Y with values drawn from candidates(n, x), commuting
    with faces; degenerate values are forced by lower degrees."""
    degsrc = X.degeneracy_source()
    partials = [{}]
    for n in range(X.d + 1):
        for x in X.simp[n]:
            forced = degsrc.get((n, x))
            nxt = []
            for p in partials:
                if forced is not None:
                    j, parent = forced
                    val = Y.sdegen(n - 1, j, p[(n - 1, parent)])
                    opts = [val]
                else:
                    opts = list(candidates(n, x))
                    if n >= 1:
                        want = tuple(p[(n - 1, X.dface(n, i, x))]
                                     for i in range(n + 1))
                        opts = [y for y in opts
                                if tuple(Y.face[n][y]) == want]
                for y in opts:
                    q = dict(p)
                    q[(n, x)] = y
                    nxt.append(q)
            if len(nxt) > cap:
                raise ResourceLimitError("map enumeration over cap", cap=cap)
            partials = nxt
    out = []
    for p in partials:
        comp = {n: {} for n in range(X.d + 1)}
        for (n, x), y in p.items():
            comp[n][x] = y
        out.append(SSetMap(X, Y, comp, check=False))
    return out


def sections(fmap, cap=10 ** 6):
    """All sections of a simplicial scenario, in canonical order."""
    fibs = map_fibers(fmap)
    X, E = fmap.target, fmap.source
    out = enumerate_sset_maps(X, E,
                              lambda n, x: fibs.get((n, x), []), cap=cap)
    out.sort(key=lambda s: s.key())
    return out


class SimplicialDistribution:
    """A distribution over the fiber of every simplex of the base."""

    __slots__ = ("table",)

    def __init__(self, table):
        self.table = {k: v for k, v in table.items()}

    def __getitem__(self, key):
        return self.table[key]

    def __eq__(self, other):
        return (isinstance(other, SimplicialDistribution)
                and self.table == other.table)

    def to_json(self):
        return {"%d:%s" % (n, x): p.to_json()
                for (n, x), p in sorted(self.table.items())}


def validate_simplicial_distribution(fmap, sd):
    failures = []
    fibs = map_fibers(fmap)
    X = fmap.target
    E = fmap.source
    for n in range(X.d + 1):
        for x in X.simp[n]:
            p = sd.table.get((n, x))
            if p is None:
                failures.append({"law": "coverage", "simplex": (n, x)})
                continue
            fib = set(fibs.get((n, x), []))
            if any(e not in fib for e in p.support()):
                failures.append({"law": "support", "simplex": (n, x)})
    if failures:
        return {"ok": False, "failures": failures}
    for n in range(1, X.d + 1):
        for x in X.simp[n]:
            for i in range(n + 1):
                got = pushforward(lambda e, _i=i, _n=n: E.dface(_n, _i, e),
                                  sd[(n, x)])
                if got != sd[(n - 1, X.dface(n, i, x))]:
                    failures.append({"law": "face-marginal",
                                     "simplex": (n, x), "i": i})
    for n in range(X.d):
        for x in X.simp[n]:
            for j in range(n + 1):
                got = pushforward(lambda e, _j=j, _n=n: E.sdegen(_n, _j, e),
                                  sd[(n, x)])
                if got != sd[(n + 1, X.sdegen(n, j, x))]:
                    failures.append({"law": "degen-marginal",
                                     "simplex": (n, x), "j": j})
    return {"ok": not failures, "failures": failures}


def theta_simplicial(fmap, secs, q):
    """Mix the delta families of sections with the weights of q (a Dist over
    section keys)."""
    bykey = {s.key(): s for s in secs}
    X = fmap.target
    table = {}
    for n in range(X.d + 1):
        for x in X.simp[n]:
            table[(n, x)] = mixture(
                [(w, delta(bykey[k](n, x))) for k, w in q.items()])
    return SimplicialDistribution(table)


# ---------------------------------------------------------------------------
# Stochastic morphisms


def pullback_sset(fmap, pimap):
    """The levelwise pullback of f: E -> X along pi: Y -> X, with its two
    projections."""
    if fmap.target != pimap.target:
        raise DomainError("pullback legs have different targets")
    E, Y = fmap.source, pimap.source
    d = min(E.d, Y.d)
    simp = {}
    payload = {}
    for n in range(d + 1):
        ids = []
        for e in E.simp[n]:
            for y in Y.simp[n]:
                if fmap(n, e) == pimap(n, y):
                    pid = pair_name(e, y)
                    ids.append(pid)
                    payload[(n, pid)] = (e, y)
        simp[n] = tuple(ids)
    face = {}
    degen = {}
    for n in range(1, d + 1):
        face[n] = {}
        for pid in simp[n]:
            e, y = payload[(n, pid)]
            face[n][pid] = tuple(pair_name(E.dface(n, i, e), Y.dface(n, i, y))
                                 for i in range(n + 1))
    for n in range(d):
        degen[n] = {}
        for pid in simp[n]:
            e, y = payload[(n, pid)]
            degen[n][pid] = tuple(
                pair_name(E.sdegen(n, j, e), Y.sdegen(n, j, y))
                for j in range(n + 1))
    P = TruncatedSSet(d, simp, face, degen, payload)
    pe = SSetMap(P, E, {n: {pid: payload[(n, pid)][0] for pid in simp[n]}
                        for n in range(d + 1)}, check=False)
    py = SSetMap(P, Y, {n: {pid: payload[(n, pid)][1] for pid in simp[n]}
                        for n in range(d + 1)}, check=False)
    return P, pe, py


class StochMorphism:
    """A base map pi: Y -> X plus fiberwise distributions on the pullback."""

    __slots__ = ("src", "dst", "pi", "alpha")

    def __init__(self, src, dst, pi, alpha):
        self.src = src      # f: E -> X
        self.dst = dst      # g: F -> Y
        self.pi = pi        # Y -> X
        self.alpha = dict(alpha)   # (n, e, y) -> Dist over F_n

    def at(self, n, e, y):
        return self.alpha[(n, e, y)]


def validate_stoch_morphism(mor):
    failures = []
    f, g, pi = mor.src, mor.dst, mor.pi
    E, X, F, Y = f.source, f.target, g.source, g.target
    d = min(X.d, Y.d)
    for n in range(d + 1):
        for y in Y.simp[n]:
            for e in E.simp[n]:
                if f(n, e) != pi(n, y):
                    continue
                p = mor.alpha.get((n, e, y))
                if p is None:
                    failures.append({"law": "coverage", "pair": (n, e, y)})
                    continue
                if any(g(n, e2) != y for e2 in p.support()):
                    failures.append({"law": "right-square", "pair": (n, e, y)})
    if failures:
        return {"ok": False, "failures": failures}
    for n in range(1, d + 1):
        for (m, e, y) in list(mor.alpha):
            if m != n:
                continue
            for i in range(n + 1):
                got = pushforward(lambda w, _i=i, _n=n: F.dface(_n, _i, w),
                                  mor.alpha[(n, e, y)])
                if got != mor.alpha[(n - 1, E.dface(n, i, e),
                                     Y.dface(n, i, y))]:
                    failures.append({"law": "face", "pair": (n, e, y), "i": i})
    for n in range(d):
        for (m, e, y) in list(mor.alpha):
            if m != n:
                continue
            for j in range(n + 1):
                got = pushforward(lambda w, _j=j, _n=n: F.sdegen(_n, _j, w),
                                  mor.alpha[(n, e, y)])
                if got != mor.alpha[(n + 1, E.sdegen(n, j, e),
                                     Y.sdegen(n, j, y))]:
                    failures.append({"law": "degen", "pair": (n, e, y),
                                     "j": j})
    return {"ok": not failures, "failures": failures}


def identity_stochastic(fmap):
    X = fmap.target
    alpha = {}
    for n in range(X.d + 1):
        for e in fmap.source.simp[n]:
            alpha[(n, e, fmap(n, e))] = delta(e)
    return StochMorphism(fmap, fmap, identity_sset_map(X), alpha)


class DetMorphism:
    """An identity-monad morphism: a base map plus a fiberwise simplex map."""

    __slots__ = ("src", "dst", "pi", "a")

    def __init__(self, src, dst, pi, a):
        self.src = src
        self.dst = dst
        self.pi = pi
        self.a = dict(a)    # (n, e, y) -> e'

    def key(self):
        return (self.pi.key() + "#"
                + ";".join("%d:%s,%s>%s" % (n, e, y, self.a[(n, e, y)])
                           for (n, e, y) in sorted(self.a)))

    def to_stochastic(self):
        return StochMorphism(self.src, self.dst, self.pi,
                             {k: delta(v) for k, v in self.a.items()})


def enumerate_det_morphisms(f, g, cap=10 ** 6):
    """All morphisms f -> g in the identity-monad category of scenarios."""
    X, Y = f.target, g.target
    pis = enumerate_sset_maps(Y, X, lambda n, y: X.simp[n], cap=cap)
    gfibs = map_fibers(g)
    out = []
    for pi in pis:
        P, pe, py = pullback_sset(f, pi)
        amaps = enumerate_sset_maps(
            P, g.source,
            lambda n, pid: gfibs.get((n, P.payload[(n, pid)][1]), []),
            cap=cap)
        for am in amaps:
            a = {}
            for n in range(P.d + 1):
                for pid in P.simp[n]:
                    e, y = P.payload[(n, pid)]
                    a[(n, e, y)] = am(n, pid)
            out.append(DetMorphism(f, g, pi, a))
    out.sort(key=lambda m: m.key())
    return out


def push_stochastic(mor, sd):
    """Apply a stochastic morphism to a simplicial distribution."""
    f, g, pi = mor.src, mor.dst, mor.pi
    Y = g.target
    table = {}
    for n in range(Y.d + 1):
        for y in Y.simp[n]:
            x = pi(n, y)
            terms = [(w, mor.at(n, e, y))
                     for e, w in sd[(n, x)].items()]
            table[(n, y)] = mixture(terms)
    return SimplicialDistribution(table)


def compose_stochastic(m1, m2):
    """m1: f -> g, m2: g -> h; composite f -> h."""
    if m2.src is not m1.dst and m2.src != m1.dst:
        raise CompositionError("stochastic morphisms do not compose")
    f, h = m1.src, m2.dst
    pi = m1.pi.compose(m2.pi)
    alpha = {}
    Z = m2.dst.target
    E = f.source
    d = min(f.target.d, Z.d)
    for n in range(d + 1):
        for z in Z.simp[n]:
            x = pi(n, z)
            ymid = m2.pi(n, z)
            for e in E.simp[n]:
                if f(n, e) != x:
                    continue
                inner = m1.at(n, e, ymid)
                terms = [(w, m2.at(n, e2, z)) for e2, w in inner.items()]
                alpha[(n, e, z)] = mixture(terms)
    return StochMorphism(f, h, pi, alpha)


def tensor_stochastic(m1, m2):
    src = product_sset_map(m1.src, m2.src)
    dst = product_sset_map(m1.dst, m2.dst)
    pi = product_sset_map(m1.pi, m2.pi)
    alpha = {}
    d = src.target.d
    for n in range(d + 1):
        for pid_y in dst.target.simp[n]:
            y1, y2 = dst.target.payload[(n, pid_y)]
            for pid_e in src.source.simp[n]:
                e1, e2 = src.source.payload[(n, pid_e)]
                if src(n, pid_e) != pi(n, pid_y):
                    continue
                prod = product_dist(m1.at(n, e1, y1), m2.at(n, e2, y2))
                alpha[(n, pid_e, pid_y)] = pushforward(
                    lambda pair: pair_name(pair[0], pair[1]), prod)
    return StochMorphism(src, dst, pi, alpha)


# ---------------------------------------------------------------------------
# The simplicial mapping scenario Map(f, g)


def pullback_along_simplex(fmap, n, x, d):
    """Restrict a scenario f: E -> X to a degree-n simplex x of the base.

    Degree-m simplices are pairs (theta, e) with theta: [m] -> [n] monotone
    and e an m-simplex of E lying over the operator action of theta on x.
    """
    E, X = fmap.source, fmap.target
    simp = {}
    payload = {}
    for m in range(d + 1):
        ids = []
        for theta in monotone_maps(m, n):
            below = apply_operator(X, n, x, theta)
            tid = theta_id(theta)
            for e in E.simp[m]:
                if fmap(m, e) == below:
                    pid = pair_name(tid, e)
                    ids.append(pid)
                    payload[(m, pid)] = (theta, e)
        simp[m] = tuple(ids)
    face = {}
    degen = {}
    for m in range(1, d + 1):
        face[m] = {}
        for pid in simp[m]:
            theta, e = payload[(m, pid)]
            face[m][pid] = tuple(
                pair_name(theta_id(theta[:i] + theta[i + 1:]),
                          E.dface(m, i, e))
                for i in range(m + 1))
    for m in range(d):
        degen[m] = {}
        for pid in simp[m]:
            theta, e = payload[(m, pid)]
            degen[m][pid] = tuple(
                pair_name(theta_id(theta[:j + 1] + theta[j:]),
                          E.sdegen(m, j, e))
                for j in range(m + 1))
    return TruncatedSSet(d, simp, face, degen, payload)


class MappingSpace:
    """The scenario of morphisms from f into restrictions of g.

    A degree-n simplex over y (in the base of g) is a pair of an n-simplex x
    in the base of f and a fiberwise map alpha from the part of f over x to
    the part of g over y.  Simplices carry compact ids; payload decodes an id
    to (y, x, alpha).
    """

    __slots__ = ("f", "g", "d", "sset", "proj", "ids", "payload",
                 "_px", "_py")

    def __init__(self, f, g, d, sset, proj, ids, payload, px, py):
        self.f = f
        self.g = g
        self.d = d
        self.sset = sset
        self.proj = proj
        self.ids = ids
        self.payload = payload
        self._px = px
        self._py = py

    def pb_src(self, n, x):
        if (n, x) not in self._px:
            self._px[(n, x)] = pullback_along_simplex(self.f, n, x, self.d)
        return self._px[(n, x)]

    def pb_dst(self, n, y):
        if (n, y) not in self._py:
            self._py[(n, y)] = pullback_along_simplex(self.g, n, y, self.d)
        return self._py[(n, y)]

    def top_map(self, n, sid):
        """The degree-n top component of a simplex: e over x to e' over y."""
        _, _, alpha = self.payload[(n, sid)]
        out = {}
        for pid, qid in alpha.comp[n].items():
            theta, e = alpha.source.payload[(n, pid)]
            if theta == identity_theta(n):
                _, e2 = alpha.target.payload[(n, qid)]
                out[e] = e2
        return out


def mapping_simplicial(f, g, d=None, cap=10 ** 6):
    """Build Map(f, g) as a simplicial scenario over the base of g."""
    X, Y = f.target, g.target
    if d is None:
        d = min(X.d, Y.d)
    if d > X.d or d > Y.d:
        raise DomainError("mapping truncation exceeds the scenario bounds")
    px = {}
    py = {}
    ids = {}
    payload = {}
    simp = {}
    total = 0
    for n in range(d + 1):
        level = []
        for y in Y.simp[n]:
            PY = py.setdefault((n, y), pullback_along_simplex(g, n, y, d))
            bytheta = {}
            for m in range(d + 1):
                for qid in PY.simp[m]:
                    theta, _ = PY.payload[(m, qid)]
                    bytheta.setdefault((m, theta), []).append(qid)
            for x in X.simp[n]:
                PX = px.setdefault((n, x),
                                   pullback_along_simplex(f, n, x, d))

                def candidates(m, pid, _PX=PX, _bt=bytheta):
                    theta, _ = _PX.payload[(m, pid)]
                    return _bt.get((m, theta), [])

                for alpha in enumerate_sset_maps(PX, PY, candidates,
                                                 cap=cap):
                    level.append((y, x, alpha))
                    total += 1
                    if total > cap:
                        raise ResourceLimitError(
                            "mapping space over cap", cap=cap)
        level.sort(key=lambda t: (t[0], t[1], t[2].key()))
        names = []
        for k, (y, x, alpha) in enumerate(level):
            sid = "m%d.%d" % (n, k)
            names.append(sid)
            ids[(n, y, x, alpha.key())] = sid
            payload[(n, sid)] = (y, x, alpha)
        simp[n] = tuple(names)

    def act(n, sid, theta, mdeg):
        """The contravariant action of theta: [mdeg] -> [n] on a simplex."""
        y, x, alpha = payload[(n, sid)]
        y2 = apply_operator(Y, n, y, theta)
        x2 = apply_operator(X, n, x, theta)
        PX2 = px.setdefault((mdeg, x2),
                            pullback_along_simplex(f, mdeg, x2, d))
        PY2 = py.setdefault((mdeg, y2),
                            pullback_along_simplex(g, mdeg, y2, d))
        PX = px[(n, x)]
        PY = py[(n, y)]
        comp = {m: {} for m in range(d + 1)}
        for m in range(d + 1):
            for pid in PX2.simp[m]:
                phi, e = PX2.payload[(m, pid)]
                composed = compose_theta(theta, phi)
                src = pair_name(theta_id(composed), e)
                qid = alpha(m, src)
                _, e2 = PY.payload[(m, qid)]
                comp[m][pid] = pair_name(theta_id(phi), e2)
        alpha2 = SSetMap(PX2, PY2, comp, check=False)
        return ids[(mdeg, y2, x2, alpha2.key())]

    face = {}
    degen = {}
    for n in range(1, d + 1):
        face[n] = {sid: tuple(act(n, sid, coface(i, n), n - 1)
                              for i in range(n + 1))
                   for sid in simp[n]}
    for n in range(d):
        degen[n] = {sid: tuple(act(n, sid, codegen(j, n), n + 1)
                               for j in range(n + 1))
                    for sid in simp[n]}
    sset = TruncatedSSet(d, simp, face, degen, payload)
    proj = SSetMap(sset, Y, {n: {sid: payload[(n, sid)][0]
                                 for sid in simp[n]}
                             for n in range(d + 1)}, check=False)
    return MappingSpace(f, g, d, sset, proj, ids, payload, px, py)


def zeta(mspace, det):
    """Turn a deterministic morphism f -> g into a section of Map(f, g)."""
    f, g = mspace.f, mspace.g
    Y = g.target
    comp = {}
    for n in range(mspace.d + 1):
        comp[n] = {}
        for y in Y.simp[n]:
            x = det.pi(n, y)
            PX = mspace.pb_src(n, x)
            PY = mspace.pb_dst(n, y)
            acomp = {m: {} for m in range(mspace.d + 1)}
            for m in range(mspace.d + 1):
                for pid in PX.simp[m]:
                    phi, e = PX.payload[(m, pid)]
                    ybar = apply_operator(Y, n, y, phi)
                    e2 = det.a[(m, e, ybar)]
                    acomp[m][pid] = pair_name(theta_id(phi), e2)
            alpha = SSetMap(PX, PY, acomp, check=False)
            key = (n, y, x, alpha.key())
            if key not in mspace.ids:
                raise DomainError("morphism does not define a section at %s"
                                  % y)
            comp[n][y] = mspace.ids[key]
    return SSetMap(Y, mspace.sset, comp, check=False)


def zeta_inverse(mspace, section):
    """Turn a section of Map(f, g) back into a deterministic morphism."""
    Y = mspace.g.target
    picomp = {}
    a = {}
    for n in range(mspace.d + 1):
        picomp[n] = {}
        for y in Y.simp[n]:
            yy, x, alpha = mspace.payload[(n, section(n, y))]
            if yy != y:
                raise DomainError("not a section over %s" % y)
            picomp[n][y] = x
            for e, e2 in mspace.top_map(n, section(n, y)).items():
                a[(n, e, y)] = e2
    pi = SSetMap(Y, mspace.f.target, picomp, check=False)
    return DetMorphism(mspace.f, mspace.g, pi, a)


def mu(mspace, p, q):
    """The convex pairing: mix, per base simplex, the pushforwards of q along
    the top maps of the simplices carried by p."""
    Y = mspace.g.target
    table = {}
    for n in range(mspace.d + 1):
        for y in Y.simp[n]:
            terms = []
            for sid, w in p[(n, y)].items():
                _, x, _ = mspace.payload[(n, sid)]
                top = mspace.top_map(n, sid)
                terms.append((w, pushforward(lambda e, _t=top: _t[e],
                                             q[(n, x)])))
            table[(n, y)] = mixture(terms)
    return SimplicialDistribution(table)


def hom_tensor_to_mapping(f, g, h, det, mspace):
    """Currying: a morphism from the product scenario of f and g into h gives
    a morphism from f into Map(g, h)."""
    E = f.source
    X = f.target
    Z = h.target
    XY = det.pi.target
    picomp = {n: {z: XY.payload[(n, det.pi(n, z))][0] for z in Z.simp[n]}
              for n in range(Z.d + 1)}
    pi1 = SSetMap(Z, X, picomp, check=False)
    b = {}
    for n in range(mspace.d + 1):
        for z in Z.simp[n]:
            x = pi1(n, z)
            y = XY.payload[(n, det.pi(n, z))][1]
            PXg = mspace.pb_src(n, y)
            PZh = mspace.pb_dst(n, z)
            for e in E.simp[n]:
                if f(n, e) != x:
                    continue
                comp = {m: {} for m in range(mspace.d + 1)}
                for m in range(mspace.d + 1):
                    for pid in PXg.simp[m]:
                        phi, ftil = PXg.payload[(m, pid)]
                        ephi = apply_operator(E, n, e, phi)
                        zbar = apply_operator(Z, n, z, phi)
                        val = det.a[(m, pair_name(ephi, ftil), zbar)]
                        comp[m][pid] = pair_name(theta_id(phi), val)
                alpha = SSetMap(PXg, PZh, comp, check=False)
                b[(n, e, z)] = mspace.ids[(n, z, y, alpha.key())]
    return DetMorphism(f, mspace.proj, pi1, b)


# ---------------------------------------------------------------------------
# Comparison of the mapping bundle nerve with the simplicial mapping space


class NerveComparison:
    """Bundle data, nerve scenarios, the mapping space, and the two
    comparison assignments between them."""

    __slots__ = ("bundle", "mapped", "elems", "nerve_scn", "nerve_f",
                 "nerve_g", "mspace", "l", "t", "defects")

    def __init__(self, bundle, mapped, elems, nerve_scn, nerve_f, nerve_g,
                 mspace, l, t, defects):
        self.bundle = bundle
        self.mapped = mapped
        self.elems = elems
        self.nerve_scn = nerve_scn
        self.nerve_f = nerve_f
        self.nerve_g = nerve_g
        self.mspace = mspace
        self.l = l
        self.t = t
        self.defects = defects


def compare_nerve_mapping(bnd_f, bnd_g, d=None, cap=10 ** 6):
    """Relate the nerve of the mapping bundle scenario to the simplicial
    mapping space of the nerves.

    l sends a tuple of morphism simplices to the pair (base tuple, domain
    tuple) with the blockwise top maps; it is total and simplicial.  t goes
    the other way, entrywise; it is partial: a mapping-space simplex whose
    entries overlap inconsistently, or whose empty entries mismatch between
    the two tuples, has no preimage tuple, and such simplices are reported in
    defects with t undefined there.
    """
    from .bundles import mapping_bundle_scenario
    from .events import MappingElement, element_name
    from .complexes import simplex_from_key

    mb, M, elems = mapping_bundle_scenario(bnd_f, bnd_g)
    if d is None:
        d = mb.base.dim() + 1
    Nf = nerve_bundle(bnd_f, d)
    Ng = nerve_bundle(bnd_g, d)
    Nm = nerve_bundle(mb, d)
    mspace = mapping_simplicial(Nf, Ng, d=d, cap=cap)

    vset_of = {}
    elem_of = {}
    for sigma in M.base.simplices():
        for key in M.sets[sigma]:
            vset = frozenset(
                element_name(x, M.restrict(sigma, frozenset([x]), key))
                for x in sorted(sigma))
            vset_of[(sigma, key)] = vset
            elem_of[vset] = (sigma, key)

    NG = Nm.source       # the nerve of the mapping bundle total space
    NGf = Nf.source
    NGg = Ng.source
    NSp = Ng.target      # nerve space of the base of g
    NS = Nf.target

    lcomp = {}
    for n in range(d + 1):
        lcomp[n] = {}
        for tid in NG.simp[n]:
            entries = NG.payload[(n, tid)]
            decoded = [elem_of[e] if e else None for e in entries]
            yid = nerve_tuple_id(tuple(
                dec[0] if dec else EMPTY for dec in decoded))
            xid = nerve_tuple_id(tuple(
                elems[dec].domain if dec else EMPTY for dec in decoded))
            PX = mspace.pb_src(n, xid)
            PY = mspace.pb_dst(n, yid)
            comp = {m: {} for m in range(d + 1)}
            for m in range(d + 1):
                for pid in PX.simp[m]:
                    phi, ebar_id = PX.payload[(m, pid)]
                    ebar = NGf.payload[(m, ebar_id)]
                    out = []
                    for k in range(1, m + 1):
                        gamma_k = ebar[k - 1]
                        if not gamma_k:
                            out.append(EMPTY)
                            continue
                        block = range(phi[k - 1] + 1, phi[k] + 1)
                        u = frozenset().union(
                            *[entries[i - 1] for i in block
                              if entries[i - 1]])
                        elem_b = elems[elem_of[u]]
                        out.append(simplex_from_key(
                            elem_b.alpha[skey(gamma_k)]))
                    comp[m][pid] = pair_name(theta_id(phi),
                                             nerve_tuple_id(tuple(out)))
            alpha = SSetMap(PX, PY, comp, check=False)
            lcomp[n][tid] = mspace.ids[(n, yid, xid, alpha.key())]
    lmap = SSetMap(NG, mspace.sset, lcomp, check=False)

    t = {}
    defects = []
    ngg_index = {m: set(NG.simp[m]) for m in range(d + 1)}
    for n in range(d + 1):
        for sid in mspace.sset.simp[n]:
            yid, xid, alpha = mspace.payload[(n, sid)]
            sig = NSp.payload[(n, yid)]
            dom = NS.payload[(n, xid)]
            out = []
            ok = True
            for k in range(1, n + 1):
                sig_k, tau_k = sig[k - 1], dom[k - 1]
                if bool(sig_k) != bool(tau_k):
                    ok = False
                    break
                if not sig_k:
                    out.append(EMPTY)
                    continue
                phi = (k - 1, k)
                alpha_k = {}
                for gamma in bnd_f.fiber(tau_k):
                    pid = pair_name(theta_id(phi),
                                    nerve_tuple_id((gamma,)))
                    qid = alpha(1, pid)
                    _, gid = mspace.pb_dst(n, yid).payload[(1, qid)]
                    alpha_k[skey(gamma)] = skey(NGg.payload[(1, gid)][0])
                elem = MappingElement(sig_k,
                                      {v: tau_k for v in sig_k}, alpha_k)
                if (sig_k, elem.key()) not in elems:
                    ok = False
                    break
                out.append(vset_of[(sig_k, elem.key())])
            if ok:
                tid = nerve_tuple_id(tuple(out))
                if tid not in ngg_index[n]:
                    ok = False
            if ok:
                t[(n, sid)] = tid
            else:
                t[(n, sid)] = None
                defects.append((n, sid))
    return NerveComparison(mb, M, elems, Nm, Nf, Ng, mspace, lmap, t,
                           defects)
