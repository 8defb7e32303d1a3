"""Command line wiring for the whole pipeline.

Subcommands: build (write a model file), test (distribution vs model),
bound (observable bound), verify (recheck a certificate), sim (generate
data), gen-graph (synthetic network), trace (plot-ready feature sweeps).

Exit codes: 0 completed (covers both VIOLATION and NO VIOLATION), 2 input
error, 3 solver failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

import numpy as np

from . import models, simulator, stats
from .polynomial import Monomial, Polynomial
from .sdp_solver import SolverOptions
from .sos_compiler import (
    ModelSpec,
    NoBoundAtDegree,
    SolverFailure,
    Tolerances,
    bound_observable,
    center_model,
    load_certificate,
    run_test,
    save_certificate,
    verify_certificate,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

MODEL_FORMAT = "hvtest-model"


def _poly_terms(p: Polynomial) -> List:
    return [[c, list(m.dense(p.nvars))] for c, m in p.terms_sorted()]


def _poly_from_terms(nvars: int, rows, where: str) -> Polynomial:
    acc = {}
    for row in rows:
        if len(row) != 2 or len(row[1]) != nvars:
            raise ValueError("%s: malformed term %r (want [coeff, %d exponents])"
                             % (where, row, nvars))
        coeff = float(row[0])
        if not np.isfinite(coeff):
            raise ValueError("%s: non-finite coefficient %r" % (where, row[0]))
        mono = Monomial.from_dense([int(e) for e in row[1]])
        acc[mono] = acc.get(mono, 0.0) + coeff
    return Polynomial(nvars, acc)


def save_model(path, spec: ModelSpec, center_record: Optional[Dict] = None) -> None:
    """Write a model file; lazy feature sequences are materialized here."""
    doc = {
        "format": MODEL_FORMAT,
        "version": 1,
        "name": spec.name,
        "nvars": spec.nvars,
        "variables": ["x%d" % i for i in range(spec.nvars)],
        "domain": [_poly_terms(g) for g in spec.domain_polys],
        "features": [_poly_terms(f) for f in spec.features],
        "labels": list(spec.feature_labels) if spec.feature_labels else None,
        "box": None if spec.box is None
               else [[float(b[0]), float(b[1])] for b in spec.box],
        "var_groups": None if spec.var_groups is None
                      else [list(g) for g in spec.var_groups],
        "center": center_record,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("%s: not a model file (format=%r)" % (path, doc.get("format")))
    if doc.get("version") != 1:
        raise ValueError("%s: unsupported model file version %r" % (path, doc.get("version")))
    nvars = doc["nvars"]
    if not isinstance(nvars, int) or nvars < 1:
        raise ValueError("%s: bad nvars %r" % (path, nvars))
    feats = [_poly_from_terms(nvars, rows, "feature %d" % j)
             for j, rows in enumerate(doc["features"])]
    domain = [_poly_from_terms(nvars, rows, "domain polynomial %d" % j)
              for j, rows in enumerate(doc["domain"])]
    labels = doc.get("labels")
    if labels is not None:
        if len(labels) != len(feats):
            raise ValueError("%s: %d labels for %d features"
                             % (path, len(labels), len(feats)))
        if len(set(labels)) != len(labels):
            raise ValueError("%s: duplicate feature labels" % path)
        labels = tuple(labels)
    box = doc.get("box")
    if box is not None:
        arr = np.asarray(box, dtype=float)
        if arr.shape != (nvars, 2):
            raise ValueError("%s: box must hold one [lo, hi] pair per variable"
                             % path)
        box = tuple((float(lo), float(hi)) for lo, hi in arr)
    groups = doc.get("var_groups")
    if groups is not None:
        flat = [i for g in groups for i in g]
        if any(not 0 <= i < nvars for i in flat):
            raise ValueError("%s: var_groups index out of range" % path)
        groups = tuple(tuple(int(i) for i in g) for g in groups)
    center_rec = doc.get("center")
    center = None
    if center_rec is not None:
        center = np.asarray(center_rec["vector"], dtype=float)
        if center.shape != (len(feats),):
            raise ValueError("%s: centering vector length %d for %d features"
                             % (path, center.size, len(feats)))
    return ModelSpec(nvars=nvars, domain_polys=domain, features=feats,
                     feature_labels=labels, center=center, box=box,
                     var_groups=groups, name=doc.get("name", "model"))


def _solver_options(args) -> SolverOptions:
    return SolverOptions(tol_gap=args.tol_gap, tol_feas=min(args.tol_gap, 1e-7))


def _tolerances(args) -> Tolerances:
    return Tolerances(eps_psd=args.tol_psd, eps_res=args.tol_res)


def _emit(args, human_lines: List[str], doc: Dict) -> None:
    if args.json:
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def cmd_build(args) -> int:
    if args.family == "coin":
        spec = models.build_coin(args.k)
    elif args.family == "chsh":
        spec = models.build_chsh()
    else:
        obs = args.observables
        if obs != "indicators":
            obs = tuple(s.strip() for s in obs.split(",") if s.strip())
        spec = models.build_slh(args.T, mode=args.mode, observables=obs,
                                prior=args.prior)
    record = None
    if args.center:
        spec = center_model(spec, samples=args.center, seed=args.center_seed)
        record = {"vector": [float(v) for v in spec.center],
                  "samples": args.center, "seed": args.center_seed}
    save_model(args.out, spec, center_record=record)
    print("wrote %s: %s, %d parameters, %d features, %d domain polynomials"
          % (args.out, spec.name, spec.nvars, spec.n_features,
             len(spec.domain_polys)))
    return EXIT_OK


def cmd_test(args) -> int:
    spec = load_model(args.model)
    dist = simulator.load_distribution(args.dist)
    obs = stats.project(dist, spec)
    cert = run_test(spec, obs.values, args.degree,
                    options=_solver_options(args), samples=args.samples,
                    seed=args.seed, tolerances=_tolerances(args))
    report = verify_certificate(spec, cert, samples=args.samples,
                                seed=args.seed + 1)
    doc: Dict = {
        "model": spec.name,
        "degree": args.degree,
        "sample_size": obs.sample_size,
        "objective": cert.objective,
        "solver_status": cert.solver_status,
        "verification": {
            "passed": report.passed,
            "residual_sup": report.residual_sup,
            "min_eig": report.min_eig,
            "samples": report.samples,
        },
    }
    lines = [
        "model: %s (%d features, degree %d)" % (spec.name, spec.n_features, args.degree),
        "samples: %d" % obs.sample_size,
        "objective: %.9g  (threshold 1)" % cert.objective,
        "solver: %s" % cert.solver_status,
        "verification: residual %.3g, min eigenvalue %.3g over %d points"
        % (report.residual_sup, report.min_eig, report.samples),
    ]
    if not report.passed:
        doc["result"] = "VERIFICATION FAILED"
        lines.append("result: VERIFICATION FAILED (%s)" % "; ".join(report.notes))
        _emit(args, lines, doc)
        return EXIT_VERIFY
    if cert.violated:
        doc["result"] = "VIOLATION"
        lines.append("result: VIOLATION")
        caveats = [
            "the hyperplane was selected on the same sample that feeds the "
            "confidence bound",
            "the confidence computation assumes independent samples",
        ]
        try:
            lo, hi, delta = stats.observable_range(cert, spec)
            conf = stats.hoeffding_confidence(cert.objective, obs.sample_size, delta)
            tail = stats.hoeffding_tail_log10(cert.objective, obs.sample_size, delta)
            doc["confidence"] = {"value": conf, "log10_tail": tail,
                                 "observable_range": [lo, hi], "delta": delta,
                                 "caveats": caveats}
            lines.append("observable range: [%.4g, %.4g], delta %.4g" % (lo, hi, delta))
            lines.append("confidence: %.12g  (tail 1e%+.1f)" % (conf, tail))
            for c in caveats:
                lines.append("caveat: %s" % c)
        except ValueError as exc:
            doc["confidence"] = None
            lines.append("confidence: not computed (%s)" % exc)
    else:
        doc["result"] = "NO VIOLATION"
        lines.append("result: NO VIOLATION")
        lines.append("note: the degree-%d test is the loosest; rerun with a "
                     "higher --degree to tighten it" % args.degree)
    if args.out:
        save_certificate(args.out, cert)
        doc["certificate"] = args.out
        lines.append("certificate written to %s" % args.out)
    _emit(args, lines, doc)
    return EXIT_OK


def _observable_vector(name, spec: ModelSpec) -> np.ndarray:
    if name == "chsh-game":
        want = models.build_chsh().feature_labels
        if spec.feature_labels != want:
            raise ValueError("--observable chsh-game needs the standard 16 "
                             "correlation features")
        return models.chsh_observable()
    if name == "time-shift":
        labels = spec.feature_labels
        if labels is None or not all("|" in l and set(l) <= set("+-|") for l in labels):
            raise ValueError("--observable time-shift needs joint indicator features")
        T = len(labels[0].split("|")[0])
        c = models.time_shift_observable(T)
        if c.size != len(labels):
            raise ValueError("indicator set has %d outcomes, expected %d"
                             % (len(labels), c.size))
        return c
    # otherwise a file of "label coefficient" lines
    if spec.feature_labels is None:
        raise ValueError("model has no labels; cannot map an observable file")
    index = {l: j for j, l in enumerate(spec.feature_labels)}
    c = np.zeros(spec.n_features)
    with open(name, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.rsplit(None, 1)
            if len(parts) != 2:
                raise ValueError("%s:%d: expected 'label coefficient'" % (name, ln))
            if parts[0] not in index:
                raise ValueError("%s:%d: unknown feature label %r" % (name, ln, parts[0]))
            c[index[parts[0]]] = float(parts[1])
    return c


def cmd_bound(args) -> int:
    spec = load_model(args.model)
    c = _observable_vector(args.observable, spec)
    bound = bound_observable(spec, c, args.degree, options=_solver_options(args))
    _emit(args, ["bound: %.9g  (degree %d)" % (bound, args.degree)],
          {"bound": bound, "degree": args.degree, "model": spec.name})
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_model(args.model)
    cert = load_certificate(args.certificate)
    report = verify_certificate(spec, cert, samples=args.samples, seed=args.seed)
    doc = {
        "passed": report.passed,
        "psd_ok": report.psd_ok,
        "residual_ok": report.residual_ok,
        "residual_sup": report.residual_sup,
        "min_eig": report.min_eig,
        "samples": report.samples,
        "notes": report.notes,
    }
    lines = [
        "certificate: %s (model %s, degree %d)"
        % (args.certificate, cert.model_name, cert.degree),
        "gram matrices: %s" % ("positive semidefinite (min eigenvalue %.3g)"
                               % report.min_eig if report.psd_ok
                               else "NOT positive semidefinite (%.3g)" % report.min_eig),
        "identity residual: %.3g over %d points%s"
        % (report.residual_sup, report.samples,
           "" if report.residual_ok else " (TOO LARGE)"),
        "verdict: %s" % ("PASS" if report.passed else "FAIL"),
    ]
    _emit(args, lines, doc)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_sim(args) -> int:
    params = simulator.InfluenceParams(T=args.T, copy_prob=args.copy_prob,
                                       steps_between_slices=args.steps,
                                       seed=args.seed)
    if args.process == "pairwise":
        dist = simulator.simulate_pairwise(params, args.pairs)
    else:
        if not args.graph:
            raise ValueError("network simulation needs --graph")
        graph = simulator.load_edges(args.graph)
        dist = simulator.simulate_network(graph, params, frozen=args.frozen)
    simulator.save_distribution(args.out, dist)
    print("wrote %s: %d samples over %d outcomes"
          % (args.out, dist.sample_size, len(dist.counts)))
    return EXIT_OK


def cmd_gen_graph(args) -> int:
    graph = simulator.gen_graph(args.nodes, args.edges, args.seed)
    simulator.save_edges(args.out, graph)
    print("wrote %s: %d nodes, %d edges" % (args.out, graph.n_nodes, graph.m_edges))
    return EXIT_OK


def cmd_trace(args) -> int:
    spec = load_model(args.model)
    lo, hi = spec.box_arrays()
    if not 0 <= args.var < spec.nvars:
        raise ValueError("--var %d out of range for %d parameters"
                         % (args.var, spec.nvars))
    fixed = 0.5 * (lo + hi)
    if args.fix:
        vals = [float(v) for v in args.fix.split(",")]
        if len(vals) != spec.nvars:
            raise ValueError("--fix needs %d comma-separated values" % spec.nvars)
        fixed = np.asarray(vals)
    want = [s.strip() for s in args.features.split(",")]
    if len(want) != 2:
        raise ValueError("--features wants exactly two labels")
    if spec.feature_labels is None:
        raise ValueError("model has no feature labels")
    try:
        jx, jy = (spec.feature_labels.index(w) for w in want)
    except ValueError:
        raise ValueError("feature labels %r not all present" % (want,)) from None
    pts = np.tile(fixed, (args.points, 1))
    pts[:, args.var] = np.linspace(lo[args.var], hi[args.var], args.points)
    vals = spec.feature_values(pts)
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    try:
        out.write("# %s %s (sweep of x%d)\n" % (want[0], want[1], args.var))
        for row in vals[:, [jx, jy]]:
            out.write("%.12g %.12g\n" % (row[0], row[1]))
    finally:
        if out is not sys.stdout:
            out.close()
            print("wrote %s: %d points" % (args.out, args.points))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hvtest",
        description="Decide whether observed statistics are compatible with a "
                    "latent-variable model, with verifiable certificates.")
    sub = top.add_subparsers(dest="command", required=True)

    def common_solver(p):
        p.add_argument("--degree", type=int, default=2,
                       help="relaxation degree d (default 2)")
        p.add_argument("--tol-gap", type=float, default=1e-7,
                       help="solver duality-gap tolerance")
        p.add_argument("--tol-psd", type=float, default=1e-7,
                       help="verifier eigenvalue tolerance")
        p.add_argument("--tol-res", type=float, default=1e-6,
                       help="verifier identity-residual tolerance")
        p.add_argument("--samples", type=int, default=20000,
                       help="verification sample count")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")

    b = sub.add_parser("build", help="write a built-in model to a file")
    b.add_argument("family", choices=("coin", "chsh", "slh"))
    b.add_argument("--k", type=int, default=2, help="coin: sequence length")
    b.add_argument("--T", type=int, default=3, help="slh: time slices")
    b.add_argument("--mode", choices=("full", "symmetric"), default="full")
    b.add_argument("--observables", default="indicators",
                   help="slh: 'indicators' or comma-separated correlators "
                        "like 'A2*B3,A3*B2'")
    b.add_argument("--prior", type=float, default=0.125,
                   help="slh symmetric: start probability")
    b.add_argument("--center", type=int, default=0, metavar="SAMPLES",
                   help="center the model on its sampled mean")
    b.add_argument("--center-seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(fn=cmd_build)

    t = sub.add_parser("test", help="test a distribution against a model")
    t.add_argument("--model", required=True)
    t.add_argument("--dist", required=True)
    t.add_argument("--out", default=None, help="certificate output path")
    common_solver(t)
    t.set_defaults(fn=cmd_test)

    bo = sub.add_parser("bound", help="bound an observable over a model")
    bo.add_argument("--model", required=True)
    bo.add_argument("--observable", required=True,
                    help="'chsh-game', 'time-shift', or a file of "
                         "'label coefficient' lines")
    common_solver(bo)
    bo.set_defaults(fn=cmd_bound)

    v = sub.add_parser("verify", help="independently recheck a certificate")
    v.add_argument("--model", required=True)
    v.add_argument("--certificate", required=True)
    v.add_argument("--samples", type=int, default=100000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("sim", help="simulate influence dynamics")
    s.add_argument("process", choices=("pairwise", "network"))
    s.add_argument("--T", type=int, default=3)
    s.add_argument("--copy-prob", type=float, default=0.5)
    s.add_argument("--pairs", type=int, default=100000)
    s.add_argument("--graph", help="edge list file (network)")
    s.add_argument("--steps", type=int, default=None,
                   help="updates between slices (default: one per edge)")
    s.add_argument("--frozen", action="store_true",
                   help="network: skip all updates (control run)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_sim)

    g = sub.add_parser("gen-graph", help="generate a synthetic directed graph")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--edges", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen_graph)

    tr = sub.add_parser("trace", help="emit two feature columns along a sweep")
    tr.add_argument("--model", required=True)
    tr.add_argument("--var", type=int, default=0)
    tr.add_argument("--points", type=int, default=200)
    tr.add_argument("--fix", default=None,
                    help="comma-separated values for all parameters")
    tr.add_argument("--features", required=True,
                    help="two feature labels, comma-separated")
    tr.add_argument("--out", default="-")
    tr.set_defaults(fn=cmd_trace)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NoBoundAtDegree as exc:
        print("solver failure: %s; rerun with a higher --degree" % exc,
              file=sys.stderr)
        return EXIT_SOLVER
    except SolverFailure as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
