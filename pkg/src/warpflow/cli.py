"""Command-line entry point: ``warpflow {flow,isocheck,circles,symmetrize,perturb}``.

Exit codes: 0 success, 1 a checked property failed, 2 configuration
error, 3 numerical failure (bounds or domain violation).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import curve as crv
from . import spaceform as sf
from .config import RunConfig, harmonic_function
from .errors import ConfigError, WarpFlowError
from .flow import FlowFailure, evolve
from .symmetry import mollify, symmetrize
from .warp import WarpPotential

log = logging.getLogger("warpflow")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _emit(report: dict, out: Path | None, name: str) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def _load(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = RunConfig.load(args.config)
    if args.n is not None:
        cfg.n = args.n
    if getattr(args, "tmax", None) is not None:
        cfg.flow["t_max"] = args.tmax
    cfg.flow_config()
    return cfg


def flow_summary(trace, config: dict) -> dict:
    A = trace.column("A")
    L = trace.column("L")
    warp = trace.final.warp
    try:
        predicted = warp.radius_of_area(float(A[0]))
    except WarpFlowError:
        predicted = None
    return {
        "A0": float(A[0]),
        "A_final": float(A[-1]),
        "L0": float(L[0]),
        "L_final": float(L[-1]),
        "final_radius": float(np.mean(trace.final.rho)),
        "predicted_radius": predicted,
        "max_area_drift": float(np.max(np.abs(A - A[0])) / abs(A[0])),
        "L_monotone": bool(np.all(np.diff(L) <= 1e-9 * L[0])),
        "termination": trace.termination,
        "steps": trace.steps,
        "error": trace.error,
        "config": config,
    }


def cmd_flow(args) -> int:
    cfg = _load(args)
    curve = cfg.build_curve()
    out = Path(args.out) if args.out else None
    code = EXIT_OK
    try:
        trace = evolve(curve, cfg.flow_config())
    except FlowFailure as exc:
        log.error("flow failed: %s", exc)
        trace, code = exc.trace, EXIT_NUMERIC
    summary = flow_summary(trace, cfg.resolved())
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        trace.write_csv(out / "trace.csv")
        crv.write_curve_csv(trace.final, out / "final_curve.csv")
    _emit(summary, out, "summary.json")
    return code


def random_curve(warp: WarpPotential, n: int, rng: np.random.Generator, kmax: int = 8) -> crv.RadialCurve:
    """Random smooth radial graph with harmonics k <= kmax, kept in the central half of the domain."""
    lo, hi = warp.domain
    if math.isinf(hi):
        center = max(1.0, 2 * lo)
        budget = 0.5 * (center - lo)
    else:
        center = 0.5 * (lo + hi)
        budget = 0.25 * (hi - lo)
    k = np.arange(1, kmax + 1)
    c = rng.normal(size=kmax) / k**2
    s = rng.normal(size=kmax) / k**2
    scale = budget * rng.uniform(0.05, 1.0) / (np.sum(np.abs(c)) + np.sum(np.abs(s)))
    spec = {"r0": center, "cos": dict(zip(k.tolist(), (scale * c).tolist())),
            "sin": dict(zip(k.tolist(), (scale * s).tolist()))}
    return crv.RadialCurve.from_function(warp, n, harmonic_function(spec))


def _beta_in_unit_interval(warp: WarpPotential) -> bool:
    beta = warp.beta(warp.probe_grid())
    return bool(np.all(beta >= -1e-12) and np.all(beta <= 1 + 1e-12))


def cmd_isocheck(args) -> int:
    cfg = _load(args)
    warp = cfg.build_warp()
    m = int(cfg.isocheck.get("samples", 100) if args.samples is None else args.samples)
    seed = int(cfg.isocheck.get("seed", 0) if args.seed is None else args.seed)
    ok_beta = _beta_in_unit_interval(warp)
    if not ok_beta:
        log.warning("beta leaves [0, 1] on the domain; the inequality is not guaranteed")
    curves = []
    if cfg.initial:
        curves.append(("initial", cfg.build_curve(warp)))
    rng = np.random.default_rng(seed)
    for i in range(m):
        curves.append((f"random-{i}", random_curve(warp, cfg.n, rng)))
    rows = []
    for label, c in curves:
        L = crv.length(c)
        deficit = crv.iso_difference(c)
        rows.append({
            "label": label,
            "L": L,
            "A": crv.area(c),
            "deficit": deficit,
            "relative_deficit": deficit / (L * L),
            "negative": deficit < -1e-8 * L * L,
        })
    flagged = [r["label"] for r in rows if r["negative"]]
    report = {
        "seed": seed,
        "samples": m,
        "beta_in_unit_interval": ok_beta,
        "min_deficit": min((r["deficit"] for r in rows), default=None),
        "min_relative_deficit": min((r["relative_deficit"] for r in rows), default=None),
        "flagged": flagged,
        "rows": rows,
    }
    _emit(report, Path(args.out) if args.out else None, "isocheck.json")
    return EXIT_CHECK if (flagged and ok_beta) else EXIT_OK


def cmd_circles(args) -> int:
    model = args.model
    n = args.n or 512
    ds = args.ds
    report = {"model": model, "n": n, "ds": ds}
    if model == "euclidean":
        a, alpha, R = args.a, args.alpha, args.R
        spec = sf.CircleSpec("euclidean", a, alpha, R)
        curve = sf.euclidean_circle(a, alpha, R, n)
        warp = curve.warp
        i = int(np.argmax(curve.rho))
        p0 = (float(curve.rho[i]), float(curve.theta[i]))
        thresholds = {"residual": 1e-7, "closure": 1e-8}
    elif model == "sphere":
        b, R = args.b, args.R
        a, alpha = b, -math.pi / 2
        spec = sf.CircleSpec("sphere", b, alpha, R)
        curve = sf.spherical_circle(b, R, n)
        warp = curve.warp
        p0 = (float(curve.rho[n // 2]), math.pi)
        thresholds = {"residual": 1e-7, "closure": 1e-8}
    else:
        a, alpha = args.a, args.alpha
        warp = WarpPotential.hyperbolic()
        spec, curve = None, None
        p0 = (args.R, (math.pi / 2 - alpha) % (2 * math.pi))
        thresholds = {"closure": 1e-6}
    path = sf.integrate_characteristic(warp, a, alpha, p0, ds)
    report.update(a=a, alpha=alpha, p0=list(p0), closure_defect=path.closure_defect, arc_length=path.s_close)
    ok = path.closure_defect < thresholds["closure"]
    if curve is not None:
        fit = sf.rs_profile_residual(curve, a, alpha)
        deviation = float(np.max(np.abs(path.r - spec.radius(path.theta))))
        report.update(R=spec.R, profile_residual=fit.residual, ode_vs_explicit=deviation)
        ok = ok and fit.residual < thresholds["residual"] and deviation < 1e-6
    report["thresholds"] = thresholds
    report["pass"] = bool(ok)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        path.write_csv(out / "characteristic.csv")
        if curve is not None:
            crv.write_curve_csv(curve, out / "circle.csv")
    _emit(report, out, "circles.json")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_symmetrize(args) -> int:
    cfg = _load(args)
    curve = cfg.build_curve()
    h = cfg.symmetrize.get("mollify")
    if h:
        curve = mollify(curve, float(h))
    result = symmetrize(curve)
    report = result.report()
    report["config"] = cfg.resolved()
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        crv.write_curve_csv(result.curve1, out / "curve1.csv")
        crv.write_curve_csv(result.curve2, out / "curve2.csv")
    _emit(report, out, "symmetrize.json")
    ok = report["area_balance"] <= 1e-10 and report["length_sum_error"] <= 1e-10 and report["area_sum_error"] <= 1e-10
    return EXIT_OK if ok else EXIT_CHECK


def cmd_perturb(args) -> int:
    cfg = _load(args)
    warp = cfg.build_warp()
    p = cfg.perturb
    try:
        r0 = float(p["r0"])
        g = harmonic_function(p.get("g", {"cos": {"1": 1.0}}))
        eps = [float(e) for e in p.get("eps", [1e-2, 3e-3, 1e-3])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid perturb settings: {exc}") from exc
    res = crv.perturbation_coefficient(warp, r0, g, eps, n=cfg.n)
    report = {
        "r0": r0,
        "beta": float(warp.beta(r0)),
        "eps": res.eps,
        "measured": res.measured,
        "predicted": res.predicted,
        "predicted_unscaled": res.predicted_unscaled,
    }
    _emit(report, Path(args.out) if args.out else None, "perturb.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpflow", description="Area-preserving curve flow on warped-product surfaces")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tmax=False):
        p.add_argument("--config", help="run configuration (JSON)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--n", type=int, help="grid size (power of two)")
        if tmax:
            p.add_argument("--tmax", type=float)

    p = sub.add_parser("flow", help="evolve a curve, write trace.csv / summary.json / final_curve.csv")
    common(p, tmax=True)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("isocheck", help="isoperimetric deficit over random radial graphs")
    common(p)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_isocheck)

    p = sub.add_parser("circles", help="translated-circle profile and characteristic closure")
    common(p)
    p.add_argument("--model", choices=("euclidean", "sphere", "hyperbolic"), default="euclidean")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--ds", type=float, default=1e-3)
    p.set_defaults(func=cmd_circles)

    p = sub.add_parser("symmetrize", help="equal-area cut-and-reflect")
    common(p)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("perturb", help="second-order deficit coefficient")
    common(p)
    p.set_defaults(func=cmd_perturb)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except WarpFlowError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
