"""Command-line front door: wires the catalog, config files, and run
descriptors to the computational modules and exporters.

Exit codes: 0 success, 1 domain/verification failure (a residual above its
threshold), 2 usage error (unknown map, malformed JSON, bad flags).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import conjugacy, fatou, horn, maps, render
from .fatou import DEFAULT_CONFIG, FatouConfig, PetalSpec, sample_petal


@dataclass(frozen=True)
class RunDescriptor:
    """Canonicalizable description of one CLI invocation (digest source)."""

    command: str
    maps: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    outputs: tuple = ()

    def to_canonical(self) -> dict:
        return {
            "command": self.command,
            "maps": self.maps,
            "config": self.config,
            "parameters": self.parameters,
            "outputs": list(self.outputs),
        }

    @property
    def digest(self) -> str:
        return render.canonical_hash(self.to_canonical())


class UsageError(Exception):
    pass


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def _load_config(path: str | None, default: FatouConfig = DEFAULT_CONFIG) -> FatouConfig:
    if path is None:
        return default
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    return FatouConfig.from_json(doc)


def _catalog():
    try:
        return maps.load_catalog()
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot load catalog: {exc}") from exc


def _out_path(args, name: str) -> str:
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _add_common(p):
    p.add_argument("--config", help="JSON file with FatouConfig overrides")
    p.add_argument("--out", help="output directory for reports/images")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hornlab",
        description="Fatou coordinates, horn maps, and semi-conjugacy verification "
        "for parabolic germs",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("residue", help="iterative residue: formula vs contour integral")
    p.add_argument("--map", required=True)
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=256)
    _add_common(p)

    p = sub.add_parser("fatou-check", help="Abel equation residual on both petals")
    p.add_argument("--map", required=True)
    p.add_argument("--samples", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("horn", help="evaluate the horn map at one cylinder point")
    p.add_argument("--map", required=True)
    p.add_argument("--w", required=True, help="lift of the cylinder point, e.g. 0.3+3j")
    _add_common(p)

    p = sub.add_parser("expansion", help="decay of h toward its end translation")
    p.add_argument("--map", required=True)
    p.add_argument("--end", choices=["plus", "minus"], default="plus")
    p.add_argument("--levels", default="1.5,2,2.5", help="comma-separated |Im| levels")
    _add_common(p)

    p = sub.add_parser("domain", help="probe the horn-map domain over a cylinder band")
    p.add_argument("--map", required=True)
    p.add_argument("--im-min", type=float, default=-4.0)
    p.add_argument("--im-max", type=float, default=4.0)
    p.add_argument("--res", type=int, default=64)
    _add_common(p)

    p = sub.add_parser("conjugacy-verify", help="verify T_sigma o h1 = h2 o psi for a pair")
    p.add_argument("--pair", required=True)
    p.add_argument("--band", default="1,3", help="|Im w| band, e.g. 1,3")
    p.add_argument("--grid-re", type=int, default=8)
    p.add_argument("--grid-im", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("build-phi", help="reconstruct phi from extracted (sigma, psi)")
    p.add_argument("--pair", required=True)
    p.add_argument("--samples", type=int, default=50)
    _add_common(p)

    p = sub.add_parser("render", help="raster a basin checkerboard or horn domain band")
    p.add_argument("--map", required=True)
    p.add_argument("--kind", choices=["basin", "horn"], default="basin")
    p.add_argument("--viewport", default="-0.5,0,2,2", help="cx,cy,width,height")
    p.add_argument("--px", type=int, default=512)
    p.add_argument("--im-min", type=float, default=-4.0)
    p.add_argument("--im-max", type=float, default=4.0)
    _add_common(p)

    return ap


def _cmd_residue(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    tol = args.tol if args.tol is not None else 1e-9
    data = maps.germ_data(m)
    if data.degeneracy_p != 1:
        raise UsageError(f"map {args.map!r} is not simple parabolic; no residue formula")
    contour = maps.iterative_residue_contour(m, args.radius, args.samples)
    diff = abs(data.gamma - contour)
    desc = RunDescriptor(
        "residue",
        maps={"map": args.map},
        parameters={"radius": args.radius, "samples": args.samples},
    )
    print(f"gamma (formula) = {data.gamma}")
    print(f"gamma (contour) = {contour}")
    print(f"|difference|    = {diff:.3e}  (tolerance {tol:.1e})")
    if args.out:
        render.export(
            {
                "map": args.map,
                "gamma_formula": [data.gamma.real, data.gamma.imag],
                "gamma_contour": [contour.real, contour.imag],
                "difference": diff,
            },
            _out_path(args, f"residue_{args.map}.json"),
            "json",
            config_hash=desc.digest,
        )
    return 0 if diff < tol else 1


def _abel_residuals(m, cfg, samples):
    g = maps.germ_data(m)
    att, rep = fatou.series_pair(m, cfg.series_order_K)
    rng = np.random.default_rng(11)
    petal_a = PetalSpec("attracting", alpha=0.5 * math.pi, chart_radius=30.0)
    petal_r = PetalSpec("repelling", alpha=0.5 * math.pi, chart_radius=30.0)
    za = sample_petal(g, petal_a, samples, rng)
    v0, s0 = fatou.attracting_fatou(m, att, za, cfg)
    v1, s1 = fatou.attracting_fatou(m, att, m(za), cfg)
    if not (np.all(s0 == 0) and np.all(s1 == 0)):
        raise conjugacy.VerificationError("attracting petal sample failed to trap")
    res_a = float(np.max(np.abs(v1 - v0 - 1.0)))
    zr = sample_petal(g, petal_r, samples, rng)
    w0 = fatou.repelling_fatou(m, rep, zr, cfg)
    w1 = fatou.repelling_fatou(m, rep, m(zr), cfg)
    res_r = float(np.max(np.abs(w1 - w0 - 1.0)))
    return res_a, res_r


def _cmd_fatou_check(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    cfg = _load_config(args.config)
    tol = args.tol if args.tol is not None else 1e-9
    res_a, res_r = _abel_residuals(m, cfg, args.samples)
    print(f"Abel residual (attracting) = {res_a:.3e}")
    print(f"Abel residual (repelling)  = {res_r:.3e}  (tolerance {tol:.1e})")
    return 0 if max(res_a, res_r) < tol else 1


def _cmd_horn(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    cfg = _load_config(args.config)
    w = _parse_complex(args.w)
    series = fatou.series_pair(m, cfg.series_order_K)
    try:
        lifted = horn.lifted_horn_map(m, series, w, cfg)
    except (fatou.OrbitError, fatou.ConvergenceError) as exc:
        print(f"w outside the horn-map domain: {exc}", file=sys.stderr)
        return 1
    point = horn.CylinderPoint.from_lift(lifted)
    print(f"h(w) lifted         = {lifted}")
    print(f"h(w) representative = {point.representative}  [{point.end_hint}]")
    return 0


def _cmd_expansion(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    cfg = _load_config(args.config)
    try:
        levels = [float(t) for t in args.levels.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --levels {args.levels!r}") from exc
    report = horn.expansion_check(m, args.end, levels, cfg)
    for t, e in zip(report.im_levels, report.errors):
        print(f"E({t}) = {e:.6e}")
    print(f"fitted decay rate = {report.rate:.4f}  (2*pi = {2 * math.pi:.4f})")
    print(f"passed = {report.passed}")
    if args.out:
        desc = RunDescriptor(
            "expansion",
            maps={"map": args.map},
            config=cfg.to_json(),
            parameters={"end": args.end, "levels": levels},
        )
        render.export(
            {
                "map": args.map,
                "end": report.end,
                "levels": list(report.im_levels),
                "errors": list(report.errors),
                "rate": report.rate,
                "passed": report.passed,
            },
            _out_path(args, f"expansion_{args.map}_{args.end}.json"),
            "json",
            config_hash=desc.digest,
        )
    return 0 if report.passed else 1


def _cmd_domain(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    cfg = _load_config(args.config)
    grid = horn.domain_probe(m, (args.im_min, args.im_max), (args.res, args.res), cfg)
    desc = RunDescriptor(
        "domain",
        maps={"map": args.map},
        config=cfg.to_json(),
        parameters={"im": [args.im_min, args.im_max], "res": args.res},
    )
    path = _out_path(args, f"domain_{args.map}.json")
    render.export(grid, path, "json", config_hash=desc.digest)
    print(f"unknown cells: {grid.unknown_count}; all-converged above Im = {grid.converged_above_im}")
    print(f"wrote {path}")
    return 0


def _cmd_conjugacy_verify(args) -> int:
    cat = _catalog()
    pair = cat.pair(args.pair)
    cfg = _load_config(args.config)
    tol = args.tol if args.tol is not None else 1e-6
    try:
        lo, hi = (float(t) for t in args.band.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --band {args.band!r}") from exc
    spec = conjugacy.SemiConjugacySpec(pair["source"], pair["target"], pair["phi"])
    grid = conjugacy.band_grid((lo, hi), args.grid_re, args.grid_im)
    report = conjugacy.verify_equivalence(spec, grid, cfg)
    desc = RunDescriptor(
        "conjugacy-verify",
        maps={"pair": args.pair},
        config=cfg.to_json(),
        parameters={"band": [lo, hi], "grid": [args.grid_re, args.grid_im]},
    )
    path = _out_path(args, f"equivalence_{args.pair}.json")
    render.export(report, path, "json", config_hash=desc.digest)
    print(f"sigma lifted = {report.sigma_lifted}  (deviation {report.sigma_deviation:.3e})")
    print(f"residual_sup = {report.residual_sup:.3e}  (tolerance {tol:.1e})")
    print(f"rho+ = {report.rho_plus}, rho- = {report.rho_minus}")
    print(f"wrote {path}")
    return 0 if report.residual_sup < tol and not report.failures else 1


def _cmd_build_phi(args) -> int:
    cat = _catalog()
    pair = cat.pair(args.pair)
    cfg = _load_config(args.config)
    tol = args.tol if args.tol is not None else 1e-6
    spec = conjugacy.SemiConjugacySpec(pair["source"], pair["target"], pair["phi"])
    ctx = conjugacy.PairContext.prepare(spec, cfg)
    sigma, _ = conjugacy.lifted_phase_shift(ctx)
    psi_pair = (
        lambda w: conjugacy.extract_psi(ctx, w, "plus"),
        lambda w: conjugacy.extract_psi(ctx, w, "minus"),
    )
    built = conjugacy.build_phi(spec.source, spec.target, -sigma, psi_pair, cfg)
    rng = np.random.default_rng(3)
    petal = PetalSpec("attracting", alpha=0.5 * math.pi, chart_radius=30.0)
    zs = sample_petal(ctx.g1, petal, args.samples, rng)
    worst = max(abs(built.attracting_branch(complex(z)) - complex(spec.phi(z))) for z in zs)
    print(f"sigma lifted = {sigma}")
    print(f"max |phi_built - phi_catalog| over {args.samples} petal samples = {worst:.3e}")
    if args.out:
        desc = RunDescriptor(
            "build-phi", maps={"pair": args.pair}, config=cfg.to_json(),
            parameters={"samples": args.samples},
        )
        render.export(
            {
                "pair": args.pair,
                "sigma_lifted": [sigma.real, sigma.imag],
                "max_deviation": worst,
            },
            _out_path(args, f"build_phi_{args.pair}.json"),
            "json",
            config_hash=desc.digest,
        )
    return 0 if worst < tol else 1


def _cmd_render(args) -> int:
    cat = _catalog()
    m = cat.map(args.map)
    cfg = _load_config(args.config, default=replace(DEFAULT_CONFIG, max_iterations=4096))
    if args.kind == "basin":
        try:
            cx, cy, width, height = (float(t) for t in args.viewport.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --viewport {args.viewport!r}") from exc
        px = args.px
        py = max(1, round(px * height / width))
        vp = render.Viewport(complex(cx, cy), width, height, px, py)
        img = render.render_basin(m, vp, cfg, threads=args.threads, map_id=args.map)
        path = _out_path(args, f"basin_{args.map}.ppm")
    else:
        img = render.render_horn_domain(
            m, (args.im_min, args.im_max), (args.px, args.px), cfg,
            threads=args.threads, map_id=args.map,
        )
        path = _out_path(args, f"horn_{args.map}.ppm")
    render.export(img, path, "ppm")
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "residue": _cmd_residue,
    "fatou-check": _cmd_fatou_check,
    "horn": _cmd_horn,
    "expansion": _cmd_expansion,
    "domain": _cmd_domain,
    "conjugacy-verify": _cmd_conjugacy_verify,
    "build-phi": _cmd_build_phi,
    "render": _cmd_render,
}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (conjugacy.VerificationError, fatou.OrbitError, fatou.ConvergenceError, maps.NewtonError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
