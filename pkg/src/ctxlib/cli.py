"""Command-line front end.

One verb per construction: validate, convert, tensor, sections,
nerve-complex, nerve, map, push, check, decompose, verify-certificate, laws.
All payloads are JSON; output goes to stdout unless -o is given.  Exit codes:
0 success, 1 validation failure, 2 contextual verdict, 3 resource cap.
"""

import argparse
import json
import sys

from .bundles import BundleScenario, mapping_bundle_scenario, to_event, \
    validate_bundle
from .complexes import SimplicialComplex, SimplicialRelation, nerve_complex, \
    skey, simplex_from_key
from .dist import Dist, rat, rat_str
from .errors import DomainError, PreconditionError, ResourceLimitError
from .events import EventMorphism, EventScenario, StandardScenario, \
    elements, event_presheaf, global_sections, mapping_event_scenario, \
    tensor_event, validate_event_morphism, validate_event_scenario
from .laws import run_suite
from .sset import SimplicialDistribution, mapping_simplicial, nerve_bundle, \
    validate_sset_map
from .solve import EmpiricalModel, check_contextuality, \
    decompose_noncontextual, theta_event, push_empirical, \
    validate_empirical, verify_certificate


def _load(path):
    with open(path) as handle:
        return json.load(handle)


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def load_scenario(path):
    obj = _load(path)
    kind = obj.get("kind")
    if kind == "event":
        return EventScenario.from_json(obj)
    if kind == "standard":
        return event_presheaf(StandardScenario.from_json(obj))
    if kind == "bundle":
        return to_event(BundleScenario.from_json(obj))
    raise DomainError("file %s does not hold a scenario (kind=%r)"
                      % (path, kind))


def load_model(path, scn):
    obj = _load(path)
    if obj.get("kind") != "model":
        raise DomainError("file %s does not hold a model" % path)
    return EmpiricalModel.from_json(scn, obj)


def load_morphism(path):
    obj = _load(path)
    if obj.get("kind") != "morphism":
        raise DomainError("file %s does not hold a morphism" % path)
    source = EventScenario.from_json(obj["source"])
    target = EventScenario.from_json(obj["target"])
    rel = SimplicialRelation(target.base, source.base,
                             {x: frozenset(v)
                              for x, v in obj["relation"].items()})
    comps = {simplex_from_key(k): dict(v)
             for k, v in obj["components"].items()}
    return EventMorphism(source, target, rel, comps)


def sset_map_json(fmap):
    return {"kind": "sset-map",
            "d": fmap.source.d,
            "source": fmap.source.to_json(),
            "target": fmap.target.to_json(),
            "components": {str(n): {x: fmap.comp[n][x]
                                    for x in sorted(fmap.comp[n])}
                           for n in range(fmap.source.d + 1)}}


def cmd_validate(args):
    obj = _load(args.input)
    kind = obj.get("kind")
    if kind == "bundle":
        report = validate_bundle(BundleScenario.from_json(obj))
    elif kind in ("event", "standard"):
        report = validate_event_scenario(load_scenario(args.input))
    elif kind == "model":
        scn = load_scenario(args.scenario)
        model = load_model(args.input, scn)
        report = validate_empirical(scn, model.dists)
        report = {"ok": report["ok"], "failures": report["failures"]}
    elif "maximal" in obj:
        SimplicialComplex.from_json(obj)
        report = {"ok": True, "failures": []}
    else:
        raise DomainError("unrecognized input kind %r" % kind)
    _emit(report, args.output)
    return 0 if report["ok"] else 1


def cmd_convert(args):
    obj = _load(args.input)
    kind = obj.get("kind")
    target = args.to
    witness = {}
    if target == "event":
        scn = load_scenario(args.input)
        report = validate_event_scenario(scn)
        if not report["ok"]:
            _emit(report, args.output)
            return 1
        out = scn.to_json()
    elif target == "bundle":
        scn = load_scenario(args.input)
        report = validate_event_scenario(scn)
        if not report["ok"]:
            _emit(report, args.output)
            return 1
        bnd = elements(scn)
        out = bnd.to_json()
        if args.witness:
            witness = {"outcome-names": {
                skey(sigma): {s: skey(frozenset(
                    "(%s|%s)" % (x, scn.restrict(sigma, frozenset([x]), s))
                    for x in sigma)) for s in scn.sets[sigma]}
                for sigma in scn.base.simplices()}}
    else:
        raise DomainError("unknown conversion target %r" % target)
    if witness:
        out = {"converted": out, "witness": witness}
    _emit(out, args.output)
    return 0


def cmd_tensor(args):
    s1 = load_scenario(args.inputs[0])
    s2 = load_scenario(args.inputs[1])
    _emit(tensor_event(s1, s2).to_json(), args.output)
    return 0


def cmd_sections(args):
    scn = load_scenario(args.input)
    secs = global_sections(scn, cap=args.cap)
    _emit({"count": len(secs), "sections": [s.key() for s in secs]},
          args.output)
    return 0


def cmd_nerve_complex(args):
    cpx = SimplicialComplex.from_json(_load(args.input))
    _emit(nerve_complex(cpx).to_json(), args.output)
    return 0


def cmd_nerve(args):
    bnd = BundleScenario.from_json(_load(args.input))
    report = validate_bundle(bnd)
    if not report["ok"]:
        _emit(report, args.output)
        return 1
    fmap = nerve_bundle(bnd, d=args.truncate)
    _emit(sset_map_json(fmap), args.output)
    return 0


def cmd_map(args):
    if args.kind == "event":
        f = load_scenario(args.inputs[0])
        g = load_scenario(args.inputs[1])
        mapped, _ = mapping_event_scenario(f, g, cap=args.cap)
        _emit(mapped.to_json(), args.output)
    elif args.kind == "bundle":
        bf = BundleScenario.from_json(_load(args.inputs[0]))
        bg = BundleScenario.from_json(_load(args.inputs[1]))
        bnd, _, _ = mapping_bundle_scenario(bf, bg, cap=args.cap)
        _emit(bnd.to_json(), args.output)
    else:
        bf = BundleScenario.from_json(_load(args.inputs[0]))
        bg = BundleScenario.from_json(_load(args.inputs[1]))
        d = args.truncate
        nf = nerve_bundle(bf, d=d)
        ng = nerve_bundle(bg, d=d)
        ms = mapping_simplicial(nf, ng, cap=args.cap)
        _emit(sset_map_json(ms.proj), args.output)
    return 0


def cmd_push(args):
    mor = load_morphism(args.morphism)
    report = validate_event_morphism(mor)
    if not report["ok"]:
        _emit(report, args.output)
        return 1
    model = load_model(args.model, mor.source)
    _emit(push_empirical(mor, model).to_json(), args.output)
    return 0


def cmd_check(args):
    scn = load_scenario(args.scenario)
    model = load_model(args.model, scn)
    verdict = check_contextuality(scn, model, cap=args.cap)
    _emit(verdict.to_json(), args.output)
    return 2 if verdict.contextual else 0


def cmd_verify_certificate(args):
    scn = load_scenario(args.scenario)
    model = load_model(args.model, scn)
    verdict_obj = _load(args.input)
    secs = global_sections(scn, cap=args.cap)
    from .dist import ONE, ZERO
    from .solve import LPProblem, verify_witness
    keys = [s.key() for s in secs]
    A = [[ONE] * len(secs)]
    b = [ONE]
    for m in scn.base.maximal:
        for o in scn.sets[m]:
            A.append([ONE if s.value_at(m) == o else ZERO for s in secs])
            b.append(model.dists[m](o))
    prob = LPProblem(A, b, columns=keys)
    if verdict_obj.get("verdict") == "contextual":
        y = [rat(v) for v in verdict_obj["certificate"]["y"]]
        ok = verify_certificate(prob, y)
    else:
        w = verdict_obj["witness"]
        q = Dist({k: rat(v) for k, v in w.items()})
        if any(k not in set(keys) for k in w):
            ok = False
        else:
            ok = theta_event(scn, secs, q).dists == model.dists
    _emit({"verified": bool(ok)}, args.output)
    return 0 if ok else 1


def cmd_decompose(args):
    spec = _load(args.scenario)
    if spec.get("kind") != "mapping-bundles":
        raise DomainError("decompose expects a mapping-bundles file")
    bf = BundleScenario.from_json(spec["f"])
    bg = BundleScenario.from_json(spec["g"])
    d = spec.get("d", args.truncate)
    nf = nerve_bundle(bf, d=d)
    ng = nerve_bundle(bg, d=d)
    ms = mapping_simplicial(nf, ng, cap=args.cap)
    dist_obj = _load(args.model)
    table = {}
    for key, tab in dist_obj["distributions"].items():
        n, x = key.split(":", 1)
        table[(int(n), x)] = Dist({o: rat(v) for o, v in tab.items()})
    sd = SimplicialDistribution(table)
    try:
        parts = decompose_noncontextual(ms, sd, cap=args.cap)
    except PreconditionError as err:
        _emit({"verdict": "contextual",
               "certificate": {"y": [rat_str(v) for v in err.certificate]}},
              args.output)
        return 2
    _emit({"verdict": "noncontextual",
           "decomposition": [{"weight": rat_str(w),
                              "morphism": dm.key()}
                             for w, dm in parts]}, args.output)
    return 0


def cmd_laws(args):
    report = run_suite(args.suite, args.trials, args.seed)
    _emit(report, args.output)
    return 0 if report["ok"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ctx", description="scenario and contextuality toolkit")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("-o", "--output", default=None)
        p.add_argument("--cap", type=int, default=10 ** 6)
        p.add_argument("--truncate", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate")
    p.add_argument("input")
    p.add_argument("--scenario", default=None)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=["event", "bundle"])
    p.add_argument("--witness", action="store_true")
    common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("tensor")
    p.add_argument("inputs", nargs=2)
    common(p)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("sections")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_sections)

    p = sub.add_parser("nerve-complex")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_nerve_complex)

    p = sub.add_parser("nerve")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_nerve)

    p = sub.add_parser("map")
    p.add_argument("--kind", required=True,
                   choices=["event", "bundle", "simplicial"])
    p.add_argument("inputs", nargs=2)
    common(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("push")
    p.add_argument("--morphism", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_push)

    p = sub.add_parser("check")
    p.add_argument("--scenario", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify-certificate")
    p.add_argument("input")
    p.add_argument("--scenario", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_verify_certificate)

    p = sub.add_parser("decompose")
    p.add_argument("--scenario", required=True)
    p.add_argument("--model", required=True)
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("laws")
    p.add_argument("--suite", required=True,
                   choices=["gluing", "monad", "tensor", "equivalence",
                            "mapping"])
    p.add_argument("--trials", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_laws)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as err:
        print(json.dumps({"error": "resource-limit", "detail": str(err)}),
              file=sys.stderr)
        return 3
    except (DomainError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as err:
        print(json.dumps({"error": "invalid-input",
                          "detail": "%s: %s" % (type(err).__name__, err)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
