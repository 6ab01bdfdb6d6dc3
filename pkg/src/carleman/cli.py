"""Command-line front end.

Subcommands: ``synth``, ``decompose``, ``mercer``, ``calculus``,
``verify``. Exit status:

== ==============================================
0  every check passed
1  an invariant check failed
2  kernel is not normal
3  kernel and eigensystem grids differ
4  unknown symbol
5  spectrum does not fit in a sector below pi
64 usage error (bad flags, missing/unreadable file)
== ==============================================
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import calculus, mercer
from .errors import (
    CarlemanError,
    GridTooCoarse,
    NotNormal,
    SectorTooWide,
    UnknownSymbol,
    ZeroOperator,
)
from .fileio import load_eigsys, load_kernel, save_eigsys, save_kernel
from .kernel import (
    KernelMatrix,
    check_k0,
    compose,
    hermitian_defect,
    modulus_proxy,
    rotated_hermitian_part,
    sup_entry,
)
from .presets import PRESETS, get_preset, synthesize_preset
from .spectral import (
    SLOPE_FLOOR,
    EigenSystem,
    Sector,
    check_normality,
    eig_hermitian,
    eig_normal,
    null_mask,
    orthonormality_defect,
    reconstruct,
    sector_fit,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NOT_NORMAL = 2
EXIT_GRID_MISMATCH = 3
EXIT_UNKNOWN_SYMBOL = 4
EXIT_SECTOR = 5
EXIT_USAGE = 64

SLACK_TOL = -1e-8
MONO_TOL = -1e-9
NORMAL_TOL = 1e-8
TAIL_TOL = 1e-6


class UsageError(Exception):
    pass


def _read(loader, path):
    """Load an input file; any failure to read or parse it is a usage error."""
    try:
        return loader(path)
    except Exception as exc:  # noqa: BLE001 - reported with the file name
        raise UsageError(f"cannot read {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _eps_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None


def build_parser():
    p = _Parser(prog="carleman", description="Mercer expansions of normal Carleman kernels.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write a preset kernel and its ground-truth eigensystem")
    s.add_argument("--preset", default="sector", choices=sorted(PRESETS))
    s.add_argument("--count", type=int)
    s.add_argument("--law", choices=["linear_growth", "inverse_square"])
    s.add_argument("--theta-max", type=float)
    s.add_argument("--center", type=float)
    s.add_argument("--angles", choices=["random", "alternate"])
    s.add_argument("--seed", type=int)
    s.add_argument("--scale", type=float)
    s.add_argument("--grid-n", type=int)
    s.add_argument("--grid-cutoff", type=float)
    s.add_argument("--rule", choices=["trapezoid", "gauss_legendre"])
    s.add_argument("--out", required=True, help="kernel JSON path")
    s.add_argument("--truth", help="eigensystem JSON path (default: OUT with .eigsys.json)")

    d = sub.add_parser("decompose", help="diagonalize a normal kernel")
    d.add_argument("kernel")
    d.add_argument("--out", required=True)

    m = sub.add_parser("mercer", help="bilinear-series convergence report")
    m.add_argument("eigsys")
    m.add_argument("kernel")
    m.add_argument("--report", required=True)

    c = sub.add_parser("calculus", help="principal-value functional calculus report")
    c.add_argument("eigsys")
    c.add_argument("--symbol", default="cayley")
    c.add_argument("--eps", type=_eps_list)
    c.add_argument("--report", required=True)

    v = sub.add_parser("verify", help="run every invariant check on a kernel file")
    v.add_argument("kernel")
    v.add_argument("--symbol", action="append", help="symbol(s) to test (default: all built-ins)")
    v.add_argument("--eps", type=_eps_list)
    return p


def _truth_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".eigsys.json") if out.suffix == ".json" else Path(str(out) + ".eigsys.json")


class Checklist:
    """Collects ``name margin PASS/FAIL`` lines."""

    def __init__(self, stream):
        self.stream = stream
        self.failed = False

    def line(self, name, margin, ok):
        self.failed |= not ok
        print(f"{name} {margin:.6e} {'PASS' if ok else 'FAIL'}", file=self.stream)

    def at_least(self, name, margin, floor):
        self.line(name, margin, margin >= floor)

    def at_most(self, name, value, ceiling):
        self.line(name, value, value <= ceiling)

    def info(self, name, value):
        print(f"{name} {value:.6e} INFO", file=self.stream)


def default_eps(alphas, num=16):
    mags = np.abs(np.asarray(alphas))
    mags = mags[~null_mask(mags)] if mags.size else mags
    if mags.size == 0:
        return [1.0]
    return np.geomspace(2.0 * mags.max(), 0.25 * mags.min(), num).tolist()


def _fit_or_trivial(alphas):
    try:
        return sector_fit(alphas)
    except ZeroOperator:
        return Sector(0.0, SLOPE_FLOOR)


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args, out=sys.stdout):
    preset = get_preset(args.preset)
    overrides = {
        "count": args.count,
        "law": args.law,
        "theta_max": args.theta_max,
        "center": args.center,
        "angles": args.angles,
        "seed": args.seed,
        "scale": args.scale,
        "nodes": args.grid_n,
        "cutoff": args.grid_cutoff,
        "rule": args.rule,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        preset = preset.with_(name="custom", **overrides)
    try:
        K, truth = synthesize_preset(preset)
    except GridTooCoarse as exc:
        print(f"grid-too-coarse: {exc}", file=sys.stderr)
        return EXIT_FAIL
    header = {
        "preset": preset.as_dict(),
        "k0": check_k0(K).as_dict(),
        "modulus_proxy": modulus_proxy(K),
        "normality_residual": check_normality(K),
        "family_raw_defect": truth.info["raw_defect"],
    }
    save_kernel(args.out, K, header)
    truth_path = Path(args.truth) if args.truth else _truth_path(args.out)
    save_eigsys(truth_path, truth)
    print(f"wrote {args.out} and {truth_path}", file=out)
    return EXIT_OK


def cmd_decompose(args, out=sys.stdout):
    K, _ = _read(load_kernel, args.kernel)
    try:
        E = eig_normal(K, normal_tol=NORMAL_TOL)
    except NotNormal as exc:
        print(f"not-normal: commutator residual {exc.residual:.6e}", file=sys.stderr)
        return EXIT_NOT_NORMAL
    E = E.select(~null_mask(E.alphas))
    save_eigsys(args.out, E)
    try:
        sec = sector_fit(E.alphas) if E.count else None
        if sec is not None:
            print(f"sector rotation={sec.rotation:.12g} slope={sec.slope:.12g}", file=out)
    except SectorTooWide:
        print("warning: spectrum does not fit in a sector of angle below pi", file=sys.stderr)
    for gap in E.info.get("ambiguous_gaps", []):
        print(f"warning: near-degenerate real parts (gap {gap:.3e})", file=sys.stderr)
    print(f"wrote {args.out} ({E.count} eigenpairs)", file=out)
    return EXIT_OK


def mercer_checks(K: KernelMatrix, E: EigenSystem, sector: Sector, checks: Checklist):
    """Run the bilinear-series checks; returns the convergence table."""
    table = mercer.mercer_report(K, E, sector)
    K_herm = rotated_hermitian_part(K, sector.rotation)
    E_herm = eig_hermitian(K_herm)
    x, _ = mercer.positive_part(E_herm)
    checks.at_least("diag_lower_bound", mercer.diag_lower_bound_check(K_herm, E_herm), SLACK_TOL)
    worst = 0.0
    for p in range(1, x.size + 1):
        for q in range(p, x.size + 1):
            worst = min(worst, mercer.cauchy_tail_bound_check(K_herm, E_herm, p, q))
    checks.at_least("cauchy_tail_bound", worst, SLACK_TOL)
    checks.at_least("bessel_bound", mercer.bessel_check(K_herm, E_herm), SLACK_TOL)
    dini = mercer.dini_table(K_herm, E_herm).column("diag_sup_err")
    rise = float(np.max(np.diff(dini))) if dini.size > 1 else 0.0
    checks.at_least("dini_monotone", 0.0 - max(rise, 0.0), -1e-10)
    checks.at_least("abs_tail_estimate", table.estimate_slack(), SLACK_TOL)
    return table


def cmd_mercer(args, out=sys.stdout):
    E = _read(load_eigsys, args.eigsys)
    K, _ = _read(load_kernel, args.kernel)
    if not K.grid.same_as(E.grid):
        print("grid mismatch between kernel and eigensystem", file=sys.stderr)
        return EXIT_GRID_MISMATCH
    try:
        sector = _fit_or_trivial(E.alphas)
    except SectorTooWide as exc:
        print(f"sector-too-wide: {exc}", file=sys.stderr)
        return EXIT_SECTOR
    checks = Checklist(out)
    table = mercer_checks(K, E, sector, checks)
    checks.info("full_order_sup_err", table.sup_err[-1])
    Path(args.report).write_text(table.to_csv())
    return EXIT_FAIL if checks.failed else EXIT_OK


def pv_table(E, sector, sym, eps):
    """PV table with reid and monotonicity columns over all earlier pairs."""
    _, table = calculus.phi_pv(E, sym, eps)
    reid, mono = [], []
    for k, ek in enumerate(table.eps):
        r = m = 0.0
        for ej in table.eps[: k + 1]:
            r = min(r, calculus.reid_bound_check(E, sector, sym, ek, ej))
            m = min(m, calculus.monotonicity_check(E, sector, ek, ej))
        reid.append(r)
        mono.append(m)
    table.reid_worst_slack = reid
    table.monotonicity_margin = mono
    return table


def _pv_ok(table, direct_scale):
    mono_tol = 1e-12 * max(1.0, direct_scale)
    return (
        table.is_nonincreasing(atol=mono_tol)
        and min(table.reid_worst_slack) >= SLACK_TOL
        and min(table.monotonicity_margin) >= SLACK_TOL
    )


def cmd_calculus(args, out=sys.stdout):
    try:
        sym = calculus.symbol_from_name(args.symbol)
    except UnknownSymbol:
        print(f"unknown symbol {args.symbol!r}; built-ins: {', '.join(calculus.BUILTIN_SYMBOLS)}", file=sys.stderr)
        return EXIT_UNKNOWN_SYMBOL
    E = _read(load_eigsys, args.eigsys)
    try:
        sector = _fit_or_trivial(E.alphas)
    except SectorTooWide as exc:
        print(f"sector-too-wide: {exc}", file=sys.stderr)
        return EXIT_SECTOR
    eps = args.eps if args.eps else default_eps(E.alphas)
    table = pv_table(E, sector, sym, eps)
    Path(args.report).write_text(table.to_csv())
    scale = sup_entry(calculus.phi_direct(E, sym))
    ok = _pv_ok(table, scale)
    checks = Checklist(out)
    checks.line("pv_distance_monotone", table.sup_dist_to_direct[-1], table.is_nonincreasing(atol=1e-12 * max(1.0, scale)))
    checks.at_least("reid_bound", min(table.reid_worst_slack), SLACK_TOL)
    checks.at_least("monotonicity", min(table.monotonicity_margin), SLACK_TOL)
    return EXIT_OK if ok and not checks.failed else EXIT_FAIL


def cmd_verify(args, out=sys.stdout):
    K, _ = _read(load_kernel, args.kernel)
    checks = Checklist(out)
    scale = sup_entry(K)
    residual = check_normality(K)
    if residual > NORMAL_TOL * max(scale, np.finfo(float).tiny):
        checks.line("normality", residual, False)
        return EXIT_NOT_NORMAL
    checks.line("normality", residual, True)
    checks.at_most("k0_tail_sup", check_k0(K).tail_sup, TAIL_TOL)

    E = eig_normal(K, normal_tol=NORMAL_TOL)
    checks.at_most("orthonormality", orthonormality_defect(E), 1e-8)
    checks.at_most("reconstruction", sup_entry(reconstruct(E).values - K.values), 1e-7 * (1 + scale))
    E = E.select(~null_mask(E.alphas))
    try:
        sector = _fit_or_trivial(E.alphas)
    except SectorTooWide:
        checks.line("sector", 0.0, False)
        return EXIT_SECTOR
    checks.info("sector_rotation", sector.rotation)
    checks.info("sector_slope", sector.slope)

    table = mercer_checks(K, E, sector, checks)
    checks.at_most("full_order_sup_err", table.sup_err[-1], 1e-7 * (1 + scale))

    eps = args.eps if args.eps else default_eps(E.alphas)
    mags = np.abs(E.alphas)
    names = args.symbol or ["identity", "cayley", "phase", f"clip:{float(np.median(mags)) if mags.size else 1.0:.6g}"]
    for name in names:
        try:
            sym = calculus.symbol_from_name(name)
        except UnknownSymbol:
            print(f"unknown symbol {name!r}", file=sys.stderr)
            return EXIT_UNKNOWN_SYMBOL
        table = pv_table(E, sector, sym, eps)
        direct_scale = sup_entry(calculus.phi_direct(E, sym))
        checks.line(f"pv_monotone[{name}]", table.sup_dist_to_direct[-1], table.is_nonincreasing(atol=1e-12 * max(1.0, direct_scale)))
        if mags.size and eps[-1] < mags.min():
            checks.at_most(f"pv_limit[{name}]", table.sup_dist_to_direct[-1], 1e-9)
        checks.at_least(f"reid_bound[{name}]", min(table.reid_worst_slack), SLACK_TOL)
        checks.at_least(f"monotonicity[{name}]", min(table.monotonicity_margin), SLACK_TOL)

    herm = idem = ident = 0.0
    for e in eps:
        omega = calculus.Region.outside_disk(e)
        P = calculus.spectral_function(E, omega)
        herm = max(herm, hermitian_defect(P))
        idem = max(idem, sup_entry(compose(P, P).values - P.values))
        ident = max(ident, calculus.projector_identity_check(E, omega))
    checks.at_most("projection_hermitian", herm, 1e-12)
    checks.at_most("projection_idempotent", idem, 1e-9)
    checks.at_most("projection_identity", ident, 1e-9)
    return EXIT_FAIL if checks.failed else EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "decompose": cmd_decompose,
    "mercer": cmd_mercer,
    "calculus": cmd_calculus,
    "verify": cmd_verify,
}


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out=out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CarlemanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
