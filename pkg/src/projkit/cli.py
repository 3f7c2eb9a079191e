"""``projkit`` command-line interface."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import kernels
from .axioms import check_all
from .canoe import CanoePath, endpoints_audit, validate_canoe
from .complex import (bgi_audit, build_complex, standard_path_suite, tree_fidelity_audit)
from .constants import derive_parameters, inequality_ledger, validate_parameters
from .dot import complex_to_dot, skeleton_to_dot
from .errors import ProjkitError
from .family import (check_fairly_rotating, check_rotating, check_spinning, check_very_rotating,
                     spinning_bound_audit)
from .io import data_from_json, data_to_json, generate, load_instance, read_json, write_json
from .metric import BassSerreSpace
from .projection import ApexFamily, build_projection_data
from .reports import FAIL, PARTIAL, PASS, Report, combine, exit_code, to_jsonable
from .windmill import (canoe_between, certify_free_product, classify_element, run_windmill,
                       stage_report, window_apices)

log = logging.getLogger("projkit")


# ---------------------------------------------------------------------------
# run reports
# ---------------------------------------------------------------------------


def run_report(command: str, reports, parameters=None, started=None, **extra) -> dict:
    reports = list(reports)
    out = {
        "command": command,
        "parameters": parameters,
        "verdict": combine(reports),
        "reports": [r.to_dict() for r in reports],
        "timing": None if started is None else round(time.perf_counter() - started, 3),
    }
    out.update(extra)
    return to_jsonable(out)


def load_run_report(path_or_dict) -> tuple:
    """``(verdict, reports)`` recomputed from a saved run report."""
    d = read_json(path_or_dict) if isinstance(path_or_dict, str) else path_or_dict
    reports = [Report.from_dict(r) for r in d.get("reports", [])]
    return combine(reports), reports


def _emit(args, command, reports, parameters=None, started=None, **extra) -> int:
    reports = list(reports)
    for r in reports:
        print(r.line())
    verdict = combine(reports)
    for key, value in extra.items():
        if isinstance(value, (str, int)):
            print(f"{key}: {value}")
    print(f"verdict: {verdict}")
    if getattr(args, "report", None):
        write_json(args.report, run_report(command, reports, parameters, started, **extra))
    return exit_code(verdict)


# ---------------------------------------------------------------------------
# shared loaders
# ---------------------------------------------------------------------------


def _instance(args):
    inst = load_instance(args.instance)
    if getattr(args, "family", None):
        from .family import family_from_json
        inst.family = family_from_json(read_json(args.family), inst.space)
    if getattr(args, "v0", None):
        inst.v0 = inst.space.parse(args.v0)
    return inst


def _params(args):
    return derive_parameters(args.delta, args.rho)


def _data(args):
    return data_from_json(read_json(args.data))


def _complex(data, K=None, check=True):
    return build_complex(data, K, check=check)


def _build_data(inst, R, theta, delta, window=None, workers=None):
    fam = ApexFamily(inst.space, inst.apices, inst.rho, R, delta)
    return build_projection_data(fam, theta, window=window, workers=workers)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    opts = {}
    if args.kind == "bass_serre":
        opts = {"radius": args.radius, "truncation": args.truncation}
    inst = generate(args.kind, args.params, **opts)
    write_json(args.out, inst.to_json())
    print(f"wrote {args.out}: {inst.meta}, {len(inst.apices)} apices")
    return 0


def cmd_params(args) -> int:
    p = _params(args)
    rep = validate_parameters(p)
    if args.json:
        print(json.dumps(to_jsonable({"parameters": p.to_dict(), "report": rep.to_dict()}), indent=2))
        return exit_code(rep.verdict)
    for key in ("delta_op", "rho", "R", "theta", "K", "M", "L", "C"):
        print(f"{key} = {getattr(p, key)}")
    print(f"4M + K = {4 * p.M + p.K}")
    print("inequalities:")
    for q in inequality_ledger(p):
        print("  " + q.line())
    print(f"verdict: {rep.verdict}")
    return exit_code(rep.verdict)


def cmd_project(args) -> int:
    started = time.perf_counter()
    inst = _instance(args)
    if args.apices:
        inst.apices = [inst.space.parse(a) for a in args.apices]
    elif args.apex_radius is not None and isinstance(inst.space, BassSerreSpace):
        inst.apices = inst.space.vertices_within(inst.v0, args.apex_radius)
    rho = args.rho if args.rho is not None else inst.rho
    inst.rho = rho
    R = args.R if args.R is not None else derive_parameters(args.delta, rho).R
    theta = args.theta if args.theta is not None else 121 * args.delta
    data = _build_data(inst, R, theta, args.delta, window={"apices": len(inst.apices)},
                       workers=args.workers)
    write_json(args.out, data_to_json(data))
    print(f"wrote {args.out}: {len(data)} apices, R={R}, theta={theta}, "
          f"{time.perf_counter() - started:.2f}s")
    return 0


def _restrict_to_window(data, radius, center=None):
    if radius is None:
        return data
    pc = build_complex(data, check=False)
    v0 = data.apices[0] if center is None else center
    keep = window_apices(pc, v0, radius)
    out = data.restrict(keep)
    out.window = {"center": data.label(v0), "P_radius": radius, "apices": len(keep)}
    return out


def cmd_check_axioms(args) -> int:
    started = time.perf_counter()
    data = _data(args)
    if args.theta is not None:
        data = data.with_theta(args.theta)
    center = data.space.parse(args.v0) if args.v0 else None
    data = _restrict_to_window(data, args.window_radius, center)
    reports = check_all(data, strong=args.strong)
    return _emit(args, "check-axioms", reports, {"theta": data.theta, "R": data.R}, started,
                 window=data.window)


def cmd_build_pc(args) -> int:
    started = time.perf_counter()
    data = _data(args)
    pc = _complex(data, args.K)
    rep = Report("projection complex", window=data.window,
                 stats={"vertices": len(pc.apices), "edges": len(pc.edges), "K": pc.K, "M": pc.M})
    reports = [rep]
    if isinstance(data.space, BassSerreSpace):
        reports.append(tree_fidelity_audit(pc, data.space))
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(complex_to_dot(pc))
    if args.out:
        write_json(args.out, {"K": pc.K, "vertices": [pc.label(v) for v in pc.apices],
                              "edges": [[pc.label(u), pc.label(v)] for u, v in pc.edges]})
    return _emit(args, "build-pc", reports, {"K": pc.K}, started)


def cmd_standard_path(args) -> int:
    data = _data(args)
    pc = _complex(data, args.K)
    parse = data.space.parse
    X, Z = parse(args.X), parse(args.Z)
    path = pc.standard_path(X, Z)
    print(" -> ".join(pc.label(v) for v in path))
    print(f"length {len(path) - 1}, d_P = {pc.distance(X, Z)}")
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(complex_to_dot(pc, path))
    if args.all:
        return _emit(args, "standard-path", standard_path_suite(pc))
    return 0


def cmd_bgi_audit(args) -> int:
    started = time.perf_counter()
    data = _data(args)
    pc = _complex(data, args.K)
    targets = [data.space.parse(v) for v in args.vertex] if args.vertex else pc.apices
    reports = [bgi_audit(pc, Y, args.max_length) for Y in targets]
    worst = max(r.stats["max_observed"] for r in reports)
    summary = Report("bounded geodesic image (all targets)", window=pc.window,
                     stats={"targets": len(reports), "max_observed": worst, "M": pc.M,
                            "within_theta": worst <= pc.theta})
    for r in reports:
        for w in r.witnesses:
            summary.fail(w)
    return _emit(args, "bgi-audit", [summary.finish()], {"K": pc.K, "M": pc.M}, started)


def cmd_canoe_validate(args) -> int:
    data = _data(args)
    pc = _complex(data, args.K)
    path = CanoePath.from_json(read_json(args.path), data.space.parse)
    C = args.C if args.C is not None else path.C
    reports = [validate_canoe(pc, path, C)]
    if reports[0].passed:
        reports.append(endpoints_audit(pc, path, C))
    return _emit(args, "canoe-validate", reports, {"C": C})


def _pipeline_objects(args, inst):
    p = derive_parameters(args.delta, inst.rho)
    data = _build_data(inst, p.R, p.theta, p.delta_op, window={"apices": len(inst.apices)},
                       workers=args.workers)
    pc = build_complex(data, p.K)
    return p, data, pc


def _windmill_reports(state, cert_error=None):
    reports = stage_report(state)
    return reports


def cmd_windmill(args) -> int:
    started = time.perf_counter()
    inst = _instance(args)
    p, data, pc = _pipeline_objects(args, inst)
    state = run_windmill(pc, inst.family, inst.v0, args.stages, args.window, args.word_bound)
    reports = stage_report(state)
    cert_rep = Report("free product certificate", window={"center": pc.label(inst.v0),
                                                          "radius": args.window})
    cert = None
    try:
        cert = certify_free_product(state)
        cert_rep.stats["free_product"] = cert["free_product"]
    except ProjkitError as exc:
        cert_rep.fail({"reason": str(exc)})
    reports.append(cert_rep.finish())
    if args.dot_prefix:
        for st in state.stages:
            if st.skeleton is not None:
                with open(f"{args.dot_prefix}{st.k}.dot", "w") as fh:
                    fh.write(skeleton_to_dot(st.skeleton, pc.label, name=f"skeleton_{st.k}"))
    return _emit(args, "windmill", reports, p.to_dict(), started, certificate=cert,
                 free_product=cert["free_product"] if cert else None)


def cmd_classify(args) -> int:
    inst = _instance(args)
    p, data, pc = _pipeline_objects(args, inst)
    state = run_windmill(pc, inst.family, inst.v0, args.stages, args.window, args.word_bound)
    g = inst.space.group.parse(args.word)
    result = classify_element(pc, inst.family, g, args.n_max, state, args.word_bound)
    print(json.dumps(to_jsonable(result), indent=2))
    return 2 if result["kind"] == "unresolved" else 0


def pipeline(inst, stages=2, window=None, axiom_radius=6, delta=1, word_bound=6, workers=None,
             progress=print) -> tuple:
    """Parameters, projections, axioms, complex, family checks, windmill, certificate.

    Returns ``(reports, certificate)``; stops after the first failing stage.
    """
    reports = []

    def step(rs):
        rs = list(rs)
        for r in rs:
            progress(r.line())
        reports.extend(rs)
        return combine(rs) != FAIL

    try:
        p = derive_parameters(delta, inst.rho)
    except ProjkitError as exc:
        r = Report("parameter set", verdict=FAIL, witnesses=[{"reason": str(exc)}])
        step([r])
        return reports, None
    if not step([validate_parameters(p)]):
        return reports, None
    fam = ApexFamily(inst.space, inst.apices, inst.rho, p.R, p.delta_op)
    if not step([fam.validate()]):
        return reports, None
    data = build_projection_data(fam, p.theta, window={"apices": len(inst.apices)}, workers=workers,
                                 check_family=False)
    axiom_data = _restrict_to_window(data, axiom_radius, inst.v0 if inst.v0 in data.index else None)
    if not step(check_all(axiom_data, strong=True)):
        return reports, None
    pc = build_complex(data, p.K)
    checks = [Report("projection complex", window=data.window,
                     stats={"vertices": len(pc.apices), "edges": len(pc.edges)})]
    if isinstance(inst.space, BassSerreSpace):
        checks.append(tree_fidelity_audit(pc, inst.space))
    checks += standard_path_suite(pc, axiom_data.apices)
    if not step(checks):
        return reports, None
    if inst.family is None:
        return reports, None
    win = axiom_data.apices
    fam_checks = [check_rotating(inst.family, win), check_fairly_rotating(inst.family, win, p.delta_op),
                  check_very_rotating(inst.family, win, p.delta_op)]
    spin = check_spinning(pc, inst.family, p.L, win)
    fam_checks += [spin, spinning_bound_audit(inst.family, pc, win)]
    if not step(fam_checks):
        return reports, None
    radius = window if window is not None else inst.meta.get("radius", axiom_radius)
    state = run_windmill(pc, inst.family, inst.v0, stages, radius, word_bound, spinning=spin)
    step(stage_report(state))
    cert_rep = Report("free product certificate", window={"center": pc.label(inst.v0), "radius": radius})
    cert = None
    try:
        cert = certify_free_product(state)
        cert_rep.stats["free_product"] = cert["free_product"]
        cert_rep.stats["cross_validated_words"] = cert["cross_validation"]["words"]
    except ProjkitError as exc:
        cert_rep.fail({"reason": str(exc)})
    step([cert_rep.finish()])
    return reports, cert


def cmd_pipeline(args) -> int:
    started = time.perf_counter()
    inst = _instance(args)
    reports, cert = pipeline(inst, args.stages, args.window, args.axiom_radius, args.delta,
                             args.word_bound, args.workers, progress=lambda s: None)
    return _emit(args, "pipeline", reports, {"delta": args.delta, "rho": inst.rho}, started,
                 certificate=cert, free_product=cert["free_product"] if cert else None)


def cmd_export_dot(args) -> int:
    data = _data(args)
    pc = _complex(data, args.K, check=False)
    path = None
    if args.path:
        X, Z = (data.space.parse(v) for v in args.path)
        path = pc.standard_path(X, Z)
    text = complex_to_dot(pc, path)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p, data=False, instance=False):
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: PROJKIT_WORKERS or CPU count)")
    p.add_argument("--report", help="write a JSON run report here")
    if data:
        p.add_argument("--data", required=True, help="projection data JSON (from `project`)")
        p.add_argument("--K", type=int, default=None, help="complex constant (default 3 theta)")
    if instance:
        p.add_argument("--instance", "--space", dest="instance", required=True,
                       help="instance JSON (from `generate`)")
        p.add_argument("--family", help="family JSON overriding the instance family")
        p.add_argument("--v0", help="base vertex label")
        p.add_argument("--delta", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="projkit", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--seed", type=int, default=None,
                    help="seed for sampled checks (default runs are exhaustive)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an instance file")
    p.add_argument("kind", choices=["bass_serre", "cycle", "grid", "tree"])
    p.add_argument("params", nargs="+")
    p.add_argument("--radius", type=int, default=6, help="apex radius in tree steps (bass_serre)")
    p.add_argument("--truncation", type=int, default=None, help="syllable truncation (bass_serre)")
    p.add_argument("--out", default="instance.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("params", help="derive and validate the constant set")
    p.add_argument("--delta", type=int, default=1)
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("project", help="compute sphere projections")
    _add_common(p, instance=True)
    p.add_argument("--apices", nargs="*", help="apex labels (default: the instance apices)")
    p.add_argument("--apex-radius", type=int, default=None)
    p.add_argument("--R", type=int, default=None)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--rho", type=int, default=None)
    p.add_argument("--out", default="data.json")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check-axioms", help="P1, P2, P2+, P3 on a window")
    _add_common(p, data=True)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--window-radius", type=int, default=None)
    p.add_argument("--v0", default=None)
    p.add_argument("--strong", action="store_true", help="also check P2+")
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("build-pc", help="build the projection complex")
    _add_common(p, data=True)
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_build_pc)

    p = sub.add_parser("standard-path", help="standard path between two apices")
    _add_common(p, data=True)
    p.add_argument("X")
    p.add_argument("Z")
    p.add_argument("--dot")
    p.add_argument("--all", action="store_true", help="also run the audit suite on all pairs")
    p.set_defaults(func=cmd_standard_path)

    p = sub.add_parser("bgi-audit", help="bounded geodesic image audit")
    _add_common(p, data=True)
    p.add_argument("--vertex", nargs="*")
    p.add_argument("--max-length", type=int, default=6)
    p.set_defaults(func=cmd_bgi_audit)

    p = sub.add_parser("canoe-validate", help="validate a canoeing path")
    _add_common(p, data=True)
    p.add_argument("--path", required=True)
    p.add_argument("--C", type=int, default=None)
    p.set_defaults(func=cmd_canoe_validate)

    for name, func, helptext in (("windmill", cmd_windmill, "run windmill stages and certify"),
                                 ("classify", cmd_classify, "classify a group element")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p, instance=True)
        p.add_argument("--stages", type=int, default=2)
        p.add_argument("--window", type=int, default=8)
        p.add_argument("--word-bound", type=int, default=6)
        if name == "windmill":
            p.add_argument("--dot-prefix", help="write skeleton DOT files <prefix><k>.dot")
        else:
            p.add_argument("word", help="element as a word, e.g. h1k1")
            p.add_argument("--n-max", type=int, default=8)
        p.set_defaults(func=func)

    p = sub.add_parser("pipeline", help="full pipeline from parameters to certificate")
    _add_common(p, instance=True)
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--axiom-radius", type=int, default=6)
    p.add_argument("--word-bound", type=int, default=6)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("export-dot", help="DOT export of the projection complex")
    _add_common(p, data=True)
    p.add_argument("--path", nargs=2, metavar=("X", "Z"), help="highlight the standard path X..Z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", None):
        os.environ["PROJKIT_WORKERS"] = str(args.workers)
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        return args.func(args)
    except ProjkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
