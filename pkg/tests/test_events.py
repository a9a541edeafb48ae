"""Event scenarios: validation, sections, morphisms, tensor, mapping."""

import pytest

from conftest import (CHSH_CONTEXTS, PATH1_CONTEXTS, standard,
                      triangle_parity_scn)
from ctxlib.complexes import (SimplicialComplex, identity_relation, skey,
                              SimplicialRelation)
from ctxlib.errors import DomainError
from ctxlib.events import (EventMorphism, EventScenario, cover_profile,
                           compose_event_morphisms, elements, element_name,
                           event_presheaf, global_sections,
                           identity_event_morphism, mapping_event_scenario,
                           reindex, tensor_event, validate_event_morphism,
                           validate_event_scenario)
from ctxlib.laws import check_mapping


@pytest.fixture(scope="module")
def path(path_scn):
    return path_scn


class TestPresheaf:
    def test_outcome_set_sizes(self, path_scn):
        sizes = {skey(s): len(v) for s, v in path_scn.sets.items()}
        assert sizes == {"a1": 2, "b1": 2, "c1": 2, "a1,b1": 4, "b1,c1": 4}

    def test_restrictions_are_projections(self, path_scn):
        edge = frozenset(["a1", "b1"])
        assert path_scn.restrict(edge, frozenset(["a1"]), "0,1") == "0"
        assert path_scn.restrict(edge, frozenset(["b1"]), "0,1") == "1"

    def test_validates(self, path_scn):
        assert validate_event_scenario(path_scn)["ok"]

    def test_triangle_context_path_independence(self):
        scn = event_presheaf(standard([["a", "b", "c"]]))
        assert validate_event_scenario(scn)["ok"]
        top = frozenset(["a", "b", "c"])
        assert scn.restrict(top, frozenset(["c"]), "0,1,1") == "1"

    def test_json_round_trip(self, path_scn):
        assert EventScenario.from_json(path_scn.to_json()) == path_scn

    def test_missing_restriction_rejected(self):
        base = SimplicialComplex([{"a", "b"}])
        sets = {frozenset(["a"]): ("0",), frozenset(["b"]): ("0",),
                frozenset(["a", "b"]): ("0,0",)}
        with pytest.raises(DomainError):
            EventScenario(base, sets, {})


class TestValidation:
    def test_triangle_parity_is_valid(self, triangle_scn):
        assert validate_event_scenario(triangle_scn)["ok"]

    def test_local_surjectivity_failure(self):
        base = SimplicialComplex([{"a", "b"}])
        sets = {frozenset(["a"]): ("0", "1"), frozenset(["b"]): ("0",),
                frozenset(["a", "b"]): ("s",)}
        codim1 = {(frozenset(["a", "b"]), frozenset(["a"])): {"s": "0"},
                  (frozenset(["a", "b"]), frozenset(["b"])): {"s": "0"}}
        report = validate_event_scenario(EventScenario(base, sets, codim1))
        assert any(f["axiom"] == "local-surjectivity"
                   for f in report["failures"])

    def test_locality_failure_matches_cover_profile(self):
        # two outcomes at the edge with identical vertex profiles
        base = SimplicialComplex([{"a", "b"}])
        edge = frozenset(["a", "b"])
        sets = {frozenset(["a"]): ("0",), frozenset(["b"]): ("0",),
                edge: ("s", "t")}
        codim1 = {(edge, frozenset(["a"])): {"s": "0", "t": "0"},
                  (edge, frozenset(["b"])): {"s": "0", "t": "0"}}
        scn = EventScenario(base, sets, codim1)
        report = validate_event_scenario(scn)
        assert any(f["axiom"] == "locality" for f in report["failures"])
        profiles = cover_profile(scn, edge, [{"a"}, {"b"}])
        assert profiles["s"] == profiles["t"]

    def test_locality_holds_matches_cover_profile(self, path_scn):
        edge = frozenset(["a1", "b1"])
        profiles = cover_profile(path_scn, edge, [{"a1"}, {"b1"}])
        assert len(set(profiles.values())) == len(profiles)


class TestSections:
    def test_path_count(self, path_scn):
        assert len(global_sections(path_scn)) == 8

    def test_chsh_count(self, chsh_scn):
        assert len(global_sections(chsh_scn)) == 16

    def test_tensor_path_count(self, tensor_path_scn):
        assert len(global_sections(tensor_path_scn)) == 64

    def test_triangle_parity_has_none(self, triangle_scn):
        assert global_sections(triangle_scn) == []

    def test_section_values_match_assignment(self, path_scn):
        sec = global_sections(path_scn)[0]
        edge = frozenset(["a1", "b1"])
        assert sec.value_at(edge) == "%s,%s" % (sec.assignment["a1"],
                                                sec.assignment["b1"])

    def test_keys_sorted_and_stable(self, path_scn):
        keys = [s.key() for s in global_sections(path_scn)]
        assert keys == sorted(keys)
        assert keys[0] == "a1=0;b1=0;c1=0"


class TestReindex:
    def test_identity(self, path_scn):
        scn2 = reindex(path_scn, identity_relation(path_scn.base))
        assert scn2 == path_scn

    def test_collapse_vertex_to_edge(self, path_scn):
        src = SimplicialComplex([{"p"}])
        rel = SimplicialRelation(src, path_scn.base,
                                 {"p": {"a1", "b1"}})
        scn2 = reindex(path_scn, rel)
        assert scn2.sets[frozenset(["p"])] == \
            path_scn.sets[frozenset(["a1", "b1"])]


class TestMorphisms:
    def test_identity_validates_and_composes(self, path_scn):
        ident = identity_event_morphism(path_scn)
        assert validate_event_morphism(ident)["ok"]
        twice = compose_event_morphisms(ident, ident)
        assert validate_event_morphism(twice)["ok"]

    def test_broken_naturality_detected(self, path_scn):
        comps = {sigma: {s: s for s in path_scn.sets[sigma]}
                 for sigma in path_scn.base.simplices()}
        flip = {"0": "1", "1": "0"}
        comps[frozenset(["a1"])] = flip
        mor = EventMorphism(path_scn, path_scn,
                            identity_relation(path_scn.base), comps)
        assert not validate_event_morphism(mor)["ok"]


class TestTensor:
    def test_counts(self, tensor_path_scn):
        assert len(tensor_path_scn.base.vertices) == 9
        assert len(tensor_path_scn.base.maximal) == 4
        for m in tensor_path_scn.base.maximal:
            assert len(tensor_path_scn.sets[m]) == 16

    def test_validates(self, tensor_path_scn):
        assert validate_event_scenario(tensor_path_scn)["ok"]

    def test_outcome_names_pair_the_factors(self, tensor_path_scn):
        m = next(m for m in tensor_path_scn.base.maximal
                 if skey(m) == "(a1|a2),(a1|b2),(b1|a2),(b1|b2)")
        assert "(0,0|1,0)" in tensor_path_scn.sets[m]


class TestElements:
    def test_chsh_total_vertices(self, chsh_scn):
        bnd = elements(chsh_scn)
        assert len(bnd.total.vertices) == 8
        assert len(bnd.total.maximal) == 16

    def test_element_names(self, path_scn):
        bnd = elements(path_scn)
        assert element_name("a1", "0") in bnd.total.vertices
        assert bnd.vmap[element_name("a1", "0")] == "a1"


class TestMapping:
    def test_tiny_instance_counts(self):
        f = event_presheaf(standard([["a"]]))
        g = event_presheaf(standard([["u", "v"]]))
        mapped, elems = mapping_event_scenario(f, g)
        sizes = {skey(s): len(v) for s, v in mapped.sets.items()}
        assert sizes == {"u": 4, "v": 4, "u,v": 16}
        assert validate_event_scenario(mapped)["ok"]
        # registry decodes every listed outcome
        for sigma, keys in mapped.sets.items():
            for key in keys:
                elem = elems[(sigma, key)]
                assert elem.key() == key
                assert elem.sigma == sigma

    def test_element_key_format(self):
        f = event_presheaf(standard([["a"]]))
        g = event_presheaf(standard([["u", "v"]]))
        mapped, _ = mapping_event_scenario(f, g)
        assert mapped.sets[frozenset(["u"])][0] == \
            "(pi:u>[a]|al:0>0;1>0)"

    def test_mapping_suite(self):
        assert check_mapping(10, seed=5) == []
