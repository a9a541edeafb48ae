"""Empirical models and the exact contextuality decision procedure.

Feasibility of the noncontextuality polytope is decided by a phase-1 simplex
method over the rationals with Bland's anti-cycling rule.  Infeasible systems
come with a Farkas certificate (a rational dual vector) that third parties can
re-verify without running the solver.
"""

from .complexes import skey
from .dist import ONE, ZERO, Dist, mixture, pushforward, rat, rat_str
from .errors import DomainError, PreconditionError
from .events import global_sections
from .sset import SimplicialDistribution, sections, zeta_inverse


class LPProblem:
    """Equality constraints A x = b over nonnegative rational variables."""

    __slots__ = ("A", "b", "columns")

    def __init__(self, A, b, columns=None):
        self.A = [[rat(v) for v in row] for row in A]
        self.b = [rat(v) for v in b]
        if len(self.A) != len(self.b):
            raise DomainError("matrix and right-hand side sizes differ")
        width = {len(row) for row in self.A}
        if len(width) > 1:
            raise DomainError("ragged constraint matrix")
        self.columns = list(columns) if columns is not None else None
        if self.columns is not None and self.A and \
                len(self.columns) != len(self.A[0]):
            raise DomainError("column label count mismatch")

    @property
    def ncols(self):
        return len(self.A[0]) if self.A else 0


def lp_feasible(prob):
    """Decide A x = b, x >= 0 exactly.

    Returns ("feasible", x) or ("infeasible", y) where y is a Farkas
    certificate: yA <= 0 on every column and y.b > 0.
    """
    m = len(prob.A)
    n = prob.ncols
    if m == 0:
        return "feasible", [ZERO] * n
    sign = [ONE if prob.b[i] >= 0 else -ONE for i in range(m)]
    rows = []
    for i in range(m):
        row = [sign[i] * v for v in prob.A[i]]
        row += [ONE if k == i else ZERO for k in range(m)]
        row.append(sign[i] * prob.b[i])
        rows.append(row)
    obj = [sum(rows[i][j] for i in range(m)) for j in range(n + m + 1)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n) if obj[j] > 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            coef = rows[i][enter]
            if coef > 0:
                ratio = rows[i][-1] / coef
                if best is None or ratio < best[0] or \
                        (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # the phase-1 objective is bounded below by zero, so an
            # unbounded entering column cannot happen; guard anyway
            raise DomainError("phase-1 simplex detected an unbounded ray")
        _, leave = best
        piv = rows[leave][enter]
        rows[leave] = [v / piv for v in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                coef = rows[i][enter]
                rows[i] = [a - coef * b for a, b in zip(rows[i], rows[leave])]
        if obj[enter] != 0:
            coef = obj[enter]
            obj = [a - coef * b for a, b in zip(obj, rows[leave])]
        basis[leave] = enter
    if obj[-1] > 0:
        cert = [sign[i] * obj[n + i] for i in range(m)]
        return "infeasible", cert
    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][-1]
    return "feasible", x


def verify_certificate(prob, y):
    """Exact re-check of a Farkas certificate against the system."""
    y = [rat(v) for v in y]
    if len(y) != len(prob.A):
        return False
    for j in range(prob.ncols):
        if sum(y[i] * prob.A[i][j] for i in range(len(y))) > 0:
            return False
    return sum(y[i] * prob.b[i] for i in range(len(y))) > 0


def verify_witness(prob, x):
    x = [rat(v) for v in x]
    if len(x) != prob.ncols or any(v < 0 for v in x):
        return False
    return all(sum(row[j] * x[j] for j in range(prob.ncols)) == prob.b[i]
               for i, row in enumerate(prob.A))


# ---------------------------------------------------------------------------
# Empirical models on event scenarios


class EmpiricalModel:
    """One distribution per maximal simplex of an event scenario."""

    __slots__ = ("scn", "dists", "_derived")

    def __init__(self, scn, dists):
        self.scn = scn
        self.dists = {}
        for m in scn.base.maximal:
            p = dists.get(m)
            if p is None:
                raise DomainError("no distribution at %s" % skey(m))
            outs = set(scn.sets[m])
            if any(s not in outs for s in p.support()):
                raise DomainError("support at %s outside the outcome set"
                                  % skey(m))
            self.dists[m] = p
        self._derived = None

    def derived(self):
        """Distributions on every simplex, pushed down from the maximals.

        Raises on disagreement; validate_empirical reports instead.
        """
        if self._derived is None:
            out = {}
            for sigma in self.scn.base.simplices():
                for m in self.scn.base.maximal:
                    if sigma <= m:
                        res = self.scn.restriction_map(m, sigma)
                        q = pushforward(lambda s, _r=res: _r[s], self.dists[m])
                        if sigma in out and out[sigma] != q:
                            raise DomainError(
                                "incompatible marginals at %s" % skey(sigma))
                        out[sigma] = q
            self._derived = out
        return self._derived

    def at(self, sigma):
        return self.derived()[frozenset(sigma)]

    def __eq__(self, other):
        return (isinstance(other, EmpiricalModel) and self.scn == other.scn
                and self.dists == other.dists)

    def to_json(self):
        return {"kind": "model",
                "distributions": {skey(m): self.dists[m].to_json()
                                  for m in self.scn.base.maximal}}

    @classmethod
    def from_json(cls, scn, obj):
        dists = {}
        for key, table in obj["distributions"].items():
            from .complexes import simplex_from_key
            sigma = simplex_from_key(key)
            dists[sigma] = Dist({o: rat(v) for o, v in table.items()})
        return cls(scn, dists)


def validate_empirical(scn, dists):
    """Compatibility report: marginals of the context distributions must
    agree on every shared face.  Returns the derived face distributions."""
    failures = []
    derived = {}
    for m in scn.base.maximal:
        p = dists.get(m)
        if p is None:
            failures.append({"law": "coverage", "simplex": skey(m)})
            continue
        outs = set(scn.sets[m])
        if any(s not in outs for s in p.support()):
            failures.append({"law": "support", "simplex": skey(m)})
    if failures:
        return {"ok": False, "failures": failures, "derived": {}}
    for sigma in scn.base.simplices():
        for m in scn.base.maximal:
            if sigma <= m:
                res = scn.restriction_map(m, sigma)
                q = pushforward(lambda s, _r=res: _r[s], dists[m])
                if sigma in derived and derived[sigma] != q:
                    failures.append({"law": "compatibility",
                                     "face": skey(sigma), "via": skey(m)})
                derived[sigma] = q
    return {"ok": not failures, "failures": failures, "derived": derived}


def theta_event(scn, secs, q):
    """Mix the deterministic models of global sections with the weights of q
    (a Dist over section keys)."""
    bykey = {s.key(): s for s in secs}
    dists = {}
    for m in scn.base.maximal:
        dists[m] = mixture([(w, Dist([(bykey[k].value_at(m), ONE)]))
                            for k, w in q.items()])
    return EmpiricalModel(scn, dists)


def push_empirical(mor, model):
    """Transport a model along an event morphism."""
    if mor.source != model.scn:
        raise DomainError("model does not live on the morphism source")
    dists = {}
    for m in mor.target.base.maximal:
        u = mor.relation.induced(m)
        comp = mor.component(m)
        dists[m] = pushforward(lambda s, _c=comp: _c[s], model.at(u))
    return EmpiricalModel(mor.target, dists)


# ---------------------------------------------------------------------------
# Contextuality


class Verdict:
    """Outcome of the feasibility decision, with re-checkable evidence."""

    __slots__ = ("contextual", "witness", "certificate", "problem",
                 "section_keys")

    def __init__(self, contextual, witness, certificate, problem,
                 section_keys):
        self.contextual = contextual
        self.witness = witness            # Dist over section keys, or None
        self.certificate = certificate    # list of Fractions, or None
        self.problem = problem
        self.section_keys = section_keys

    def to_json(self):
        if self.contextual:
            return {"verdict": "contextual",
                    "certificate": {"y": [rat_str(v)
                                          for v in self.certificate]}}
        return {"verdict": "noncontextual",
                "witness": {k: rat_str(w)
                            for k, w in self.witness.items()}}


def _verdict_cert(prob, keys, cert):
    return Verdict(True, None, cert, prob, keys)


def check_contextuality(scn, model, cap=10 ** 6):
    """Decide whether a compatible model extends to a global distribution.

    Variables are weights over global sections; constraints say the mixture
    of deterministic models reproduces the model on every maximal simplex.
    """
    report = validate_empirical(scn, model.dists)
    if not report["ok"]:
        raise DomainError("model is not compatible: %s"
                          % report["failures"][:3])
    secs = global_sections(scn, cap=cap)
    keys = [s.key() for s in secs]
    A = [[ONE] * len(secs)]
    b = [ONE]
    for m in scn.base.maximal:
        for o in scn.sets[m]:
            A.append([ONE if s.value_at(m) == o else ZERO for s in secs])
            b.append(model.dists[m](o))
    prob = LPProblem(A, b, columns=keys)
    status, data = lp_feasible(prob)
    if status == "infeasible":
        if not verify_certificate(prob, data):
            raise DomainError("solver produced a non-verifying certificate")
        return _verdict_cert(prob, keys, data)
    if not verify_witness(prob, data):
        raise DomainError("solver produced a non-verifying witness")
    support = [(keys[j], data[j]) for j in range(len(keys)) if data[j] > 0]
    if not support:   # zero-section systems are caught as infeasible above
        raise DomainError("feasible solution with empty support")
    return Verdict(False, Dist(support), None, prob, keys)


def check_contextuality_simplicial(fmap, sd, cap=10 ** 6, full=False):
    """The simplicial flavor: variables over sections of the scenario map.

    By default constraints are imposed at the top degree only (every lower
    simplex is a face of one of its degeneracies, so the lower constraints
    follow from the face marginals of a valid simplicial distribution); pass
    full=True to constrain every degree.
    """
    from .sset import validate_simplicial_distribution
    report = validate_simplicial_distribution(fmap, sd)
    if not report["ok"]:
        raise DomainError("invalid simplicial distribution: %s"
                          % report["failures"][:3])
    secs = sections(fmap, cap=cap)
    keys = [s.key() for s in secs]
    X = fmap.target
    A = [[ONE] * len(secs)]
    b = [ONE]
    degrees = range(X.d + 1) if full else [X.d]
    fibs = {}
    for n in range(fmap.source.d + 1):
        for e in fmap.source.simp[n]:
            fibs.setdefault((n, fmap(n, e)), []).append(e)
    for n in degrees:
        for x in X.simp[n]:
            for e in fibs.get((n, x), []):
                A.append([ONE if s(n, x) == e else ZERO for s in secs])
                b.append(sd[(n, x)](e))
    prob = LPProblem(A, b, columns=keys)
    status, data = lp_feasible(prob)
    if status == "infeasible":
        if not verify_certificate(prob, data):
            raise DomainError("solver produced a non-verifying certificate")
        return _verdict_cert(prob, keys, data)
    if not verify_witness(prob, data):
        raise DomainError("solver produced a non-verifying witness")
    support = [(keys[j], data[j]) for j in range(len(keys)) if data[j] > 0]
    return Verdict(False, Dist(support), None, prob, keys)


# ---------------------------------------------------------------------------
# Transport between the event and simplicial settings


def simplicial_of_empirical(bnd, scn, model, nerve_scn):
    """Transfer a model on the event scenario of a bundle to a simplicial
    distribution on the bundle's nerve, via the fiber identification that
    sends a simplex over the union to its tuple of faces."""
    from .sset import nerve_tuple_id, EMPTY
    derived = model.derived()
    NT = nerve_scn.source
    NB = nerve_scn.target
    table = {}
    for n in range(NB.d + 1):
        for xid in NB.simp[n]:
            entries = NB.payload[(n, xid)]
            union = frozenset().union(*entries) if entries else frozenset()
            if not union:
                table[(n, xid)] = Dist([(nerve_tuple_id(
                    tuple(EMPTY for _ in entries)), ONE)])
                continue

            def lift(gkey, _entries=entries):
                from .complexes import simplex_from_key
                gamma = simplex_from_key(gkey)
                out = []
                for sigma in _entries:
                    if not sigma:
                        out.append(EMPTY)
                        continue
                    face = frozenset(v for v in gamma
                                     if bnd.vmap[v] in sigma)
                    out.append(face)
                return nerve_tuple_id(tuple(out))

            table[(n, xid)] = pushforward(lift, derived[union])
    return SimplicialDistribution(table)


# ---------------------------------------------------------------------------
# Decomposition of noncontextual mapping-space distributions


def decompose_noncontextual(mspace, sd, cap=10 ** 6):
    """Write a noncontextual distribution on the mapping space as a convex
    combination of deterministic morphisms.

    Raises a precondition error carrying the Farkas certificate when the
    distribution is contextual.
    """
    verdict = check_contextuality_simplicial(mspace.proj, sd, cap=cap)
    if verdict.contextual:
        err = PreconditionError("distribution on the mapping space is "
                                "contextual; no decomposition exists")
        err.certificate = verdict.certificate
        err.problem = verdict.problem
        raise err
    secs = {s.key(): s for s in sections(mspace.proj, cap=cap)}
    out = []
    for key, w in verdict.witness.items():
        out.append((w, zeta_inverse(mspace, secs[key])))
    return out
