"""Event scenarios: finite contravariant functors on the face poset of a
simplicial complex, with validation, morphisms, tensor products, global
sections, the category-of-elements bridge, and the mapping scenario.

Restriction maps are supplied only for codimension-1 inclusions; all other
restrictions are composites, with path independence checked by validation.
"""

from itertools import combinations, product

from .complexes import (SimplicialComplex, identity_relation, kleisli_compose,
                        pair_name, skey, split_key, tensor_complex,
                        unpair_name)
from .errors import CompositionError, DomainError, ResourceLimitError


def _codim1_faces(sigma):
    return [sigma - {x} for x in sorted(sigma)] if len(sigma) > 1 else []


class EventScenario:
    """Outcome sets per simplex plus codimension-1 restriction tables.

    The constructor demands well-formed tables (an outcome set for every
    simplex, total codim-1 maps with values in the face's set) and
    deterministically closes them under composition.  The three axioms are
    checked by validate_event_scenario, which reports rather than raises.
    """

    __slots__ = ("base", "sets", "codim1", "_res", "_profiles")

    def __init__(self, base, sets, codim1):
        self.base = base
        self.sets = {}
        for sigma in base.simplices():
            if sigma not in sets:
                raise DomainError("no outcome set for %s" % skey(sigma))
            self.sets[sigma] = tuple(sets[sigma])
        self.codim1 = {}
        for sigma in base.simplices():
            for tau in _codim1_faces(sigma):
                table = codim1.get((sigma, tau))
                if table is None:
                    raise DomainError(
                        "missing restriction %s > %s" % (skey(sigma), skey(tau)))
                tset = set(self.sets[tau])
                for s in self.sets[sigma]:
                    if s not in table:
                        raise DomainError(
                            "restriction %s > %s undefined at %r"
                            % (skey(sigma), skey(tau), s))
                    if table[s] not in tset:
                        raise DomainError(
                            "restriction %s > %s maps %r outside the face set"
                            % (skey(sigma), skey(tau), s))
                self.codim1[(sigma, tau)] = {s: table[s]
                                             for s in self.sets[sigma]}
        self._res = {}
        self._profiles = {}

    def outcomes(self, sigma):
        return self.sets[frozenset(sigma)]

    def restriction_map(self, sigma, tau):
        """The composite restriction F(sigma) -> F(tau) for tau <= sigma."""
        sigma, tau = frozenset(sigma), frozenset(tau)
        if sigma == tau:
            return {s: s for s in self.sets[sigma]}
        if not tau < sigma:
            raise DomainError("%s is not a face of %s" % (skey(tau), skey(sigma)))
        key = (sigma, tau)
        if key not in self._res:
            if len(sigma) - len(tau) == 1:
                self._res[key] = self.codim1[key]
            else:
                # deterministic path: drop the smallest vertex not in tau
                x = min(sorted(sigma - tau))
                mid = sigma - {x}
                first = self.codim1[(sigma, mid)]
                rest = self.restriction_map(mid, tau)
                self._res[key] = {s: rest[first[s]] for s in self.sets[sigma]}
        return self._res[key]

    def restrict(self, sigma, tau, s):
        return self.restriction_map(sigma, tau)[s]

    def vertex_profile(self, sigma, s):
        """Restrictions of s to each vertex of sigma, in sorted vertex order."""
        sigma = frozenset(sigma)
        return tuple(self.restrict(sigma, frozenset([x]), s)
                     for x in sorted(sigma))

    def profile_index(self, sigma):
        sigma = frozenset(sigma)
        if sigma not in self._profiles:
            self._profiles[sigma] = {self.vertex_profile(sigma, s): s
                                     for s in self.sets[sigma]}
        return self._profiles[sigma]

    def __eq__(self, other):
        return (isinstance(other, EventScenario)
                and self.base == other.base
                and self.sets == other.sets
                and self.codim1 == other.codim1)

    def to_json(self):
        return {
            "kind": "event",
            "complex": self.base.to_json(),
            "sets": {skey(s): list(v) for s, v in self.sets.items()},
            "restrictions": {
                "%s>%s" % (skey(s), skey(t)): dict(m)
                for (s, t), m in sorted(self.codim1.items(),
                                        key=lambda kv: (skey(kv[0][0]),
                                                        skey(kv[0][1])))},
        }

    @classmethod
    def from_json(cls, obj, check_names=True):
        base = SimplicialComplex.from_json(obj["complex"],
                                           check_names=check_names)
        sets = {frozenset(split_key(k)): tuple(v)
                for k, v in obj["sets"].items()}
        codim1 = {}
        for key, table in obj.get("restrictions", {}).items():
            big, small = key.split(">")
            codim1[(frozenset(split_key(big)),
                    frozenset(split_key(small)))] = dict(table)
        return cls(base, sets, codim1)


def validate_event_scenario(scn):
    """Check non-triviality, local surjectivity (with path independence),
    and locality via the vertex-product criterion.  Returns a report."""
    failures = []
    for sigma in scn.base.simplices():
        if not scn.sets[sigma]:
            failures.append({"axiom": "non-triviality", "simplex": skey(sigma)})
    for (sigma, tau), table in scn.codim1.items():
        if set(table.values()) != set(scn.sets[tau]):
            failures.append({"axiom": "local-surjectivity",
                             "simplex": skey(sigma), "face": skey(tau)})
    # path independence: every codim-1 first step gives the same composite
    for sigma in scn.base.simplices():
        if len(sigma) < 3:
            continue
        for tau in scn.base.simplices():
            if not tau < sigma or len(sigma) - len(tau) < 2:
                continue
            reference = scn.restriction_map(sigma, tau)
            for x in sorted(sigma - tau):
                mid = sigma - {x}
                step = scn.codim1[(sigma, mid)]
                rest = scn.restriction_map(mid, tau)
                if any(rest[step[s]] != reference[s] for s in scn.sets[sigma]):
                    failures.append({"axiom": "functoriality",
                                     "simplex": skey(sigma),
                                     "face": skey(tau), "via": x})
    for sigma in scn.base.simplices():
        if len(sigma) < 2:
            continue
        profiles = [scn.vertex_profile(sigma, s) for s in scn.sets[sigma]]
        if len(set(profiles)) != len(profiles):
            failures.append({"axiom": "locality", "simplex": skey(sigma)})
    return {"ok": not failures, "failures": failures}


def intersection_cover_objects(cover):
    """All nonempty intersections of nonempty subfamilies of the cover."""
    cover = [frozenset(c) for c in cover]
    out = set()
    for r in range(1, len(cover) + 1):
        for picks in product(*[[0, 1]] * len(cover)):
            if sum(picks) != r:
                continue
            inter = None
            for c, take in zip(cover, picks):
                if take:
                    inter = c if inter is None else inter & c
            if inter:
                out.add(inter)
    return sorted(out, key=lambda s: (len(s), skey(s)))


def cover_profile(scn, sigma, cover):
    """Restriction profile of each outcome at sigma over the intersection
    diagram of the cover; used to cross-check the locality criterion."""
    objs = intersection_cover_objects(cover)
    sigma = frozenset(sigma)
    return {s: tuple(scn.restrict(sigma, tau, s) for tau in objs)
            for s in scn.sets[sigma]}


# ---------------------------------------------------------------------------
# Standard scenarios and the event presheaf


class StandardScenario:
    """A measurement cover plus per-vertex outcome sets."""

    def __init__(self, contexts, outcomes):
        self.base = SimplicialComplex(contexts)
        self.outcomes = {x: tuple(outcomes[x]) for x in self.base.vertices}
        for x, vals in self.outcomes.items():
            if not vals:
                raise DomainError("empty outcome set at %s" % x)

    def to_json(self):
        return {"kind": "standard",
                "contexts": [sorted(m) for m in self.base.maximal],
                "outcomes": {x: list(v) for x, v in self.outcomes.items()}}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["contexts"], obj["outcomes"])


def product_outcome(components):
    return ",".join(components)


def event_presheaf(standard):
    """F(sigma) = product of the vertex outcome sets, with projections."""
    base = standard.base
    sets = {}
    tables = {}
    for sigma in base.simplices():
        verts = sorted(sigma)
        combos = list(product(*[standard.outcomes[x] for x in verts]))
        if len(sigma) == 1:
            sets[sigma] = tuple(c[0] for c in combos)
        else:
            sets[sigma] = tuple(product_outcome(c) for c in combos)
        for tau in _codim1_faces(sigma):
            tverts = sorted(tau)
            idx = [verts.index(x) for x in tverts]
            table = {}
            for c in combos:
                key = c[0] if len(sigma) == 1 else product_outcome(c)
                sub = tuple(c[i] for i in idx)
                table[key] = sub[0] if len(tau) == 1 else product_outcome(sub)
            tables[(sigma, tau)] = table
    return EventScenario(base, sets, tables)


# ---------------------------------------------------------------------------
# Reindexing and morphisms


def reindex(scn, rel):
    """Precompose with the induced simplex map of a relation into the base."""
    if rel.target != scn.base:
        raise DomainError("relation target is not the scenario base")
    base = rel.source
    sets = {}
    tables = {}
    for sigma in base.simplices():
        sets[sigma] = scn.sets[rel.induced(sigma)]
        for tau in _codim1_faces(sigma):
            tables[(sigma, tau)] = scn.restriction_map(rel.induced(sigma),
                                                       rel.induced(tau))
    return EventScenario(base, sets, tables)


class EventMorphism:
    """A relation between the bases plus components over each target simplex."""

    __slots__ = ("source", "target", "relation", "components")

    def __init__(self, source, target, relation, components, check=True):
        self.source = source        # F over Sigma
        self.target = target        # G over Sigma'
        self.relation = relation    # Sigma' -> Sigma
        self.components = {frozenset(s): dict(m) for s, m in components.items()}
        if check:
            if relation.source != target.base or relation.target != source.base:
                raise DomainError("relation does not match the scenario bases")
            for sigma in target.base.simplices():
                comp = self.components.get(sigma)
                if comp is None:
                    raise DomainError("missing component at %s" % skey(sigma))
                u = relation.induced(sigma)
                gset = set(target.sets[sigma])
                for s in source.sets[u]:
                    if comp.get(s) not in gset:
                        raise DomainError(
                            "component at %s is not a map F(%s) -> G(%s)"
                            % (skey(sigma), skey(u), skey(sigma)))

    def component(self, sigma):
        return self.components[frozenset(sigma)]


def validate_event_morphism(mor):
    """Naturality squares for all codimension-1 inclusions."""
    failures = []
    f, g, rel = mor.source, mor.target, mor.relation
    for (sigma, tau) in g.codim1:
        u, v = rel.induced(sigma), rel.induced(tau)
        down = g.restriction_map(sigma, tau)
        left = f.restriction_map(u, v)
        top = mor.component(sigma)
        bot = mor.component(tau)
        for s in f.sets[u]:
            if down[top[s]] != bot[left[s]]:
                failures.append({"square": (skey(sigma), skey(tau)),
                                 "at": s})
    return {"ok": not failures, "failures": failures}


def identity_event_morphism(scn):
    comps = {sigma: {s: s for s in scn.sets[sigma]}
             for sigma in scn.base.simplices()}
    return EventMorphism(scn, scn, identity_relation(scn.base), comps,
                         check=False)


def compose_event_morphisms(m1, m2):
    """m1: F -> G, m2: G -> H; the composite runs F -> H."""
    if m2.source is not m1.target and m2.source != m1.target:
        raise CompositionError("event morphisms do not compose")
    rel = kleisli_compose(m1.relation, m2.relation)
    comps = {}
    for sigma in m2.target.base.simplices():
        mid = m2.relation.induced(sigma)
        first = m1.component(mid)
        second = m2.component(sigma)
        u = rel.induced(sigma)
        comps[sigma] = {s: second[first[s]] for s in m1.source.sets[u]}
    return EventMorphism(m1.source, m2.target, rel, comps)


# ---------------------------------------------------------------------------
# Tensor product


def tensor_event(f1, f2):
    base = tensor_complex(f1.base, f2.base)
    sets = {}
    tables = {}
    parts = {}
    for sigma in base.simplices():
        p1 = frozenset(unpair_name(v)[0] for v in sigma)
        p2 = frozenset(unpair_name(v)[1] for v in sigma)
        parts[sigma] = (p1, p2)
        sets[sigma] = tuple(pair_name(a, b)
                            for a in f1.sets[p1] for b in f2.sets[p2])
    for sigma in base.simplices():
        p1, p2 = parts[sigma]
        for tau in _codim1_faces(sigma):
            q1, q2 = parts[tau]
            r1 = f1.restriction_map(p1, q1)
            r2 = f2.restriction_map(p2, q2)
            tables[(sigma, tau)] = {
                pair_name(a, b): pair_name(r1[a], r2[b])
                for a in f1.sets[p1] for b in f2.sets[p2]}
    return EventScenario(base, sets, tables)


def tensor_event_morphism(m1, m2):
    from .complexes import tensor_relation
    src = tensor_event(m1.source, m2.source)
    tgt = tensor_event(m1.target, m2.target)
    rel = tensor_relation(m1.relation, m2.relation)
    comps = {}
    for sigma in tgt.base.simplices():
        p1 = frozenset(unpair_name(v)[0] for v in sigma)
        p2 = frozenset(unpair_name(v)[1] for v in sigma)
        a1 = m1.component(p1)
        a2 = m2.component(p2)
        u1 = m1.relation.induced(p1)
        u2 = m2.relation.induced(p2)
        comps[sigma] = {
            pair_name(s, t): pair_name(a1[s], a2[t])
            for s in m1.source.sets[u1] for t in m2.source.sets[u2]}
    return EventMorphism(src, tgt, rel, comps)


# ---------------------------------------------------------------------------
# Global sections


class GlobalSection:
    """A vertex assignment together with its unique lift at every simplex."""

    __slots__ = ("assignment", "values")

    def __init__(self, assignment, values):
        self.assignment = dict(assignment)
        self.values = values

    def value_at(self, sigma):
        return self.values[frozenset(sigma)]

    def key(self):
        return ";".join("%s=%s" % (x, self.assignment[x])
                        for x in sorted(self.assignment))

    def __eq__(self, other):
        return isinstance(other, GlobalSection) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "GlobalSection(%s)" % self.key()


def global_sections(scn, cap=10 ** 6):
    """All vertex assignments lifting at every maximal simplex."""
    partials = [{}]
    for m in scn.base.maximal:
        index = scn.profile_index(m)
        verts = sorted(m)
        nxt = []
        for part in partials:
            for profile, s in sorted(index.items()):
                merged = dict(part)
                ok = True
                for x, o in zip(verts, profile):
                    if merged.get(x, o) != o:
                        ok = False
                        break
                    merged[x] = o
                if ok:
                    nxt.append(merged)
            if len(nxt) > cap:
                raise ResourceLimitError(
                    "more than %d partial sections" % cap, cap=cap)
        partials = nxt
    out = []
    for assignment in partials:
        values = {}
        for sigma in scn.base.simplices():
            parent = next(m for m in scn.base.maximal if sigma <= m)
            s = scn.profile_index(parent)[
                tuple(assignment[x] for x in sorted(parent))]
            values[sigma] = scn.restrict(parent, sigma, s)
        out.append(GlobalSection(assignment, values))
    out.sort(key=lambda s: s.key())
    return out


# ---------------------------------------------------------------------------
# Category of elements


def element_name(x, s):
    """Total-space vertex name for outcome s at base vertex x."""
    return pair_name(x, s)


def elements(scn):
    """The bundle scenario of the category of elements."""
    from .bundles import BundleScenario
    maxs = []
    for sigma in scn.base.maximal:
        for s in scn.sets[sigma]:
            maxs.append(frozenset(
                element_name(x, scn.restrict(sigma, frozenset([x]), s))
                for x in sorted(sigma)))
    total = SimplicialComplex(maxs)
    vmap = {v: unpair_name(v)[0] for v in total.vertices}
    return BundleScenario(total, scn.base, vmap)


# ---------------------------------------------------------------------------
# Mapping scenario [F, G]


class MappingElement:
    """A relation on one simplex plus the top component of a natural map."""

    __slots__ = ("sigma", "pi", "alpha", "_key")

    def __init__(self, sigma, pi, alpha):
        self.sigma = frozenset(sigma)
        self.pi = {x: frozenset(s) for x, s in pi.items()}
        self.alpha = dict(alpha)
        self._key = None

    @property
    def domain(self):
        out = frozenset()
        for s in self.pi.values():
            out |= s
        return out

    def key(self):
        if self._key is None:
            pipart = ";".join("%s>[%s]" % (x, skey(self.pi[x]))
                              for x in sorted(self.pi))
            alpart = ";".join("%s>%s" % (s, self.alpha[s])
                              for s in sorted(self.alpha))
            self._key = "(pi:%s|al:%s)" % (pipart, alpart)
        return self._key

    def __eq__(self, other):
        return isinstance(other, MappingElement) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _pi_choices(domain_cpx, sigma, cap):
    verts = sorted(sigma)
    sims = list(domain_cpx.simplices())
    if len(sims) ** len(verts) > cap:
        raise ResourceLimitError("too many relation candidates", cap=cap)
    for combo in product(sims, repeat=len(verts)):
        union = frozenset().union(*combo)
        if union in domain_cpx:
            yield dict(zip(verts, combo))


def _alpha_extends(scn_f, scn_g, sigma, pi, alpha):
    """Does the top map factor through every face's restriction kernel?"""
    u = frozenset().union(*pi.values())
    for r in range(1, len(sigma) + 1):
        for tau in combinations(sorted(sigma), r):
            tau = frozenset(tau)
            if tau == sigma:
                continue
            ubar = frozenset().union(*[pi[x] for x in tau])
            down_f = scn_f.restriction_map(u, ubar)
            down_g = scn_g.restriction_map(sigma, tau)
            seen = {}
            for s in scn_f.sets[u]:
                cls = down_f[s]
                img = down_g[alpha[s]]
                if seen.setdefault(cls, img) != img:
                    return False
    return True


def mapping_event_scenario(scn_f, scn_g, cap=200000):
    """The event scenario [F, G] over the base of G, together with a registry
    decoding each outcome id back to its (sigma, pi, alpha) element."""
    base = scn_g.base
    elems = {}
    sets = {}
    for sigma in base.simplices():
        found = []
        for pi in _pi_choices(scn_f.base, sigma, cap):
            u = frozenset().union(*pi.values())
            dom = scn_f.sets[u]
            codom = scn_g.sets[sigma]
            if len(codom) ** len(dom) > cap:
                raise ResourceLimitError(
                    "function space %d^%d over cap" % (len(codom), len(dom)),
                    cap=cap)
            for images in product(codom, repeat=len(dom)):
                alpha = dict(zip(dom, images))
                if _alpha_extends(scn_f, scn_g, sigma, pi, alpha):
                    found.append(MappingElement(sigma, pi, alpha))
        found.sort(key=lambda e: e.key())
        sets[sigma] = tuple(e.key() for e in found)
        for e in found:
            elems[(sigma, e.key())] = e
    tables = {}
    for sigma in base.simplices():
        for tau in _codim1_faces(sigma):
            table = {}
            for key in sets[sigma]:
                restricted = restrict_mapping_element(
                    scn_f, scn_g, elems[(sigma, key)], tau)
                if (tau, restricted.key()) not in elems:
                    raise DomainError(
                        "restricted mapping element missing at %s" % skey(tau))
                table[key] = restricted.key()
            tables[(sigma, tau)] = table
    return EventScenario(base, sets, tables), elems


def restrict_mapping_element(scn_f, scn_g, elem, tau):
    """Restrict (pi, alpha) from its simplex to a face tau."""
    tau = frozenset(tau)
    pi_t = {x: elem.pi[x] for x in tau}
    u = elem.domain
    ubar = frozenset().union(*pi_t.values())
    down_f = scn_f.restriction_map(u, ubar)
    down_g = scn_g.restriction_map(elem.sigma, tau)
    alpha_t = {}
    for s in scn_f.sets[u]:
        alpha_t[down_f[s]] = down_g[elem.alpha[s]]
    return MappingElement(tau, pi_t, alpha_t)
