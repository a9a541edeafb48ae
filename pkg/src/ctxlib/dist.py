"""Finite-support exact-rational distributions with the gluing operation.

Elements can be any hashable values; canonical keys (used for ordering,
equality, and nesting) are derived structurally, so a distribution over
distributions works out of the box.
"""

from fractions import Fraction

from .errors import DomainError, PreconditionError

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value):
    """Parse a rational from int/str/Fraction; exact, never float."""
    if isinstance(value, float):
        raise DomainError("floating point is not allowed in distributions")
    return Fraction(value)


def rat_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (
        q.numerator, q.denominator)


def element_key(x):
    """Canonical string key of a support element."""
    if isinstance(x, Dist):
        return x.canonical()
    if isinstance(x, tuple):
        return "(" + ",".join(element_key(v) for v in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(element_key(v) for v in x)) + "}"
    return str(x)


class Dist:
    """A probability distribution with finite support and rational weights."""

    __slots__ = ("_items", "_canon", "_index")

    def __init__(self, weights):
        if isinstance(weights, dict):
            weights = weights.items()
        acc = {}
        keyed = {}
        for x, w in weights:
            w = rat(w)
            if w < 0:
                raise DomainError("negative weight %s" % w)
            k = element_key(x)
            if k in keyed:
                acc[k] += w
            else:
                keyed[k] = x
                acc[k] = w
        total = sum(acc.values(), ZERO)
        if total != 1:
            raise DomainError("weights sum to %s, not 1" % total)
        self._items = tuple((keyed[k], acc[k])
                            for k in sorted(acc) if acc[k] > 0)
        self._index = {element_key(x): w for x, w in self._items}
        self._canon = None

    def items(self):
        return self._items

    def support(self):
        return tuple(x for x, _ in self._items)

    def __call__(self, x):
        return self._index.get(element_key(x), ZERO)

    def canonical(self):
        if self._canon is None:
            self._canon = "{" + ";".join(
                "%s=%s" % (element_key(x), rat_str(w))
                for x, w in self._items) + "}"
        return self._canon

    def __eq__(self, other):
        return isinstance(other, Dist) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return "Dist(%s)" % self.canonical()

    def to_json(self):
        return {element_key(x): rat_str(w) for x, w in self._items}


def delta(x):
    return Dist([(x, ONE)])


def pushforward(f, p):
    """The functor D on maps: add weights over each fiber."""
    return Dist([(f(x), w) for x, w in p.items()])


def flatten(big):
    """Monad multiplication for a distribution over distributions."""
    out = []
    for inner, w in big.items():
        if not isinstance(inner, Dist):
            raise DomainError("flatten expects a distribution of distributions")
        for x, v in inner.items():
            out.append((x, w * v))
    return Dist(out)


def convex(t, p, q):
    """t*p + (1-t)*q."""
    t = rat(t)
    if not (0 <= t <= 1):
        raise DomainError("mixture weight %s outside [0,1]" % t)
    return Dist(list((x, t * w) for x, w in p.items())
                + list((x, (ONE - t) * w) for x, w in q.items()))


def mixture(pairs):
    """Finite convex combination given as (weight, Dist) pairs."""
    out = []
    for w, p in pairs:
        w = rat(w)
        if w < 0:
            raise DomainError("negative mixture weight")
        for x, v in p.items():
            out.append((x, w * v))
    return Dist(out)


def glue(f, g, p, q):
    """Glue p over X and q over Y along f: X->Z, g: Y->Z.

    Requires exactly equal pushforwards; the result lives on the set
    pullback {(x,y) : f(x)=g(y)} with weight p(x)q(y)/marginal(f(x)).
    """
    pf = pushforward(f, p)
    qg = pushforward(g, q)
    if pf != qg:
        raise PreconditionError(
            "marginals disagree: %s vs %s" % (pf.canonical(), qg.canonical()))
    out = []
    for x, wx in p.items():
        z = f(x)
        denom = pf(z)
        for y, wy in q.items():
            if element_key(g(y)) == element_key(z):
                out.append(((x, y), wx * wy / denom))
    return Dist(out)


def glue_deterministic(f, g, p, y):
    """Glue p with the delta at y; requires pushforward(f,p) = delta(g(y))."""
    if pushforward(f, p) != delta(g(y)):
        raise PreconditionError("p is not concentrated over g(y)")
    return glue(f, g, p, delta(y))


def product_dist(p, q):
    """Independent product; the gluing over the one-point set."""
    return Dist([((x, y), wx * wy)
                 for x, wx in p.items() for y, wy in q.items()])
