"""Command-line entry point.

Exit codes: 0 success, 2 invalid input or violated precondition,
3 numerical failure (including uncertified results under ``--strict``).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import harness
from .arcs import classify_arcs, decompose_arcs, main_lemma_check
from .circle import (
    DEFAULT_STEP_TOL,
    TraceError,
    UnsupportedRepresentation,
    doubling_exponent,
    omega_big,
    omega_small,
    trace_circle,
)
from .functions import SingularityError, SpecError, build_function, eval_log, zeros_within
from .sectors import MAX_DEPTH as MAX_TREE_DEPTH
from .sectors import Sector, area_adaptive, sector_grid
from .specio import SpecParseError, document_to_object, parse_document

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_NUMERICAL = 3


class NumericalFailure(RuntimeError):
    """A result could not be certified and ``--strict`` was requested."""


def _clean(x):
    """JSON-safe copy: non-finite floats become null, arrays become lists."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _sector(args) -> Sector:
    return Sector(args.theta1, args.alpha)


def _load(args):
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from None
    doc = parse_document(text)
    return doc, build_function(doc.spec, doc.order)


def _openings(args) -> list:
    return _floats(args.openings) if args.openings else list(harness.DEFAULT_OPENINGS)


def _check(args, certified: bool, what: str):
    if args.strict and not certified:
        raise NumericalFailure(f"{what} is not certified")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_eval(args, f):
    z = complex(args.z.replace(" ", ""))
    lv = eval_log(f, z)
    return {"z": z, "logModulus": float(lv.log_modulus), "arg": float(lv.arg)}


def cmd_trace(args, f):
    tr = trace_circle(f, args.r, args.step_tol)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("theta,arg,logModulus\n")
            for th, a, lm in zip(tr.thetas, tr.arg_values, tr.log_mod_values):
                fh.write(f"{float(th)!r},{float(a)!r},{float(lm)!r}\n")
    return {"radius": tr.radius, "requestedRadius": tr.requested_radius, "nudged": tr.nudged,
            "totalIncrement": tr.total_increment, "winding": tr.winding,
            "samples": tr.n_samples, "refinementDepth": tr.refinement_depth,
            "stepBound": tr.step_bound}


def cmd_omega(args, f):
    if f.explicit_zeros:
        rep = omega_big(f, args.r, args.step_tol)
        return {"omega": rep.omega, "omegaBig": rep.omega_big, "zeroCount": rep.zero_count,
                "imGOscillation": rep.im_g_osc, "arc": list(rep.maximizing_arc),
                "radius": rep.radius}
    tr = trace_circle(f, args.r, args.step_tol)
    om, arc = omega_small(tr)
    return {"omega": om, "omegaBig": None, "zeroCount": zeros_within(f, tr.radius).count,
            "arc": list(arc), "radius": tr.radius}


def cmd_beta(args, f):
    beta, beta_star = doubling_exponent(f, args.r)
    return {"beta": beta, "betaStar": beta_star}


def cmd_area(args, f):
    e = area_adaptive(f, args.r, _sector(args), args.err, args.max_depth)
    _check(args, e.certified, "area")
    return {"inMass": e.in_mass, "undecidedMass": e.undecided_mass, "areaLow": e.low,
            "areaHigh": e.high, "certified": e.certified, "cellsVisited": e.cells_visited}


def cmd_arcs(args, f):
    tr = trace_circle(f, args.r, args.step_tol)
    dec = decompose_arcs(tr, _sector(args), f)
    out = {
        "radius": dec.radius, "M": dec.M,
        "tArcs": [[a.theta_start, a.theta_end, a.branch] for a in dec.t_arcs],
        "sArcs": [[a.theta_start, a.theta_end, a.branch, a.parent] for a in dec.s_arcs],
    }
    if dec.M >= 1:
        mods = f.zero_moduli if f.explicit_zeros else ()
        cls = classify_arcs(dec, args.t, dec.M, args.eta, args.delta, mods)
        out.update(short=cls.short, veryShort=cls.very_short, exceptional=cls.exceptional)
    return out


def cmd_lemma(args, f):
    rep = main_lemma_check(f, args.t, _sector(args), args.radial_samples, args.err)
    return {"hypothesisOmegaInf": rep.hypothesis_omega_inf,
            "hypothesisOmegaRatio": rep.hypothesis_omega_ratio,
            "omegaInf": rep.omega_inf, "omegaBigT": rep.omega_big_t, "omegaBig1": rep.omega_big_1,
            "measuredArea": rep.measured_area, "areaLow": rep.area_low,
            "areaHigh": rep.area_high, "ratio": rep.ratio, "ratioLow": rep.ratio_low,
            "rawRatio": rep.raw_ratio}


def cmd_sweep(args, f):
    extra = {}
    if args.auto_radius:
        r_delta, R = harness.select_radius_order_zero(f, args.delta, args.U)
        radii = [R]
        extra = {"rDelta": r_delta, "analysisR": R}
    elif args.radii:
        radii = _floats(args.radii)
    else:
        raise SpecError("sweep needs --radii or --auto-radius")
    table = harness.equidistribution_sweep(f, radii, args.sectors, _openings(args), args.err,
                                           function_id=args.spec, threads=args.threads)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table.to_csv())
    verdicts = harness.kappa_estimate(table)
    flagged = [{"r": row.r, "theta1": row.sector.theta1, "alpha": row.sector.alpha,
                "flags": list(row.flags)} for row in table.rows if row.flags]
    _check(args, all(row.certified for row in table.rows), "sweep")
    out = dict(extra)
    out.update(rows=len(table.rows), flaggedRows=flagged, metadata=table.metadata,
               verdicts=[vars(v) for v in verdicts])
    if not args.out:
        out["csv"] = table.to_csv()
    return out


def cmd_thm1(args, f):
    radii = harness.find_thm1_radii(f, args.rho, args.r_min, args.r_max, args.samples)
    return {"radii": radii}


def cmd_thm4(args, f):
    res = harness.thm4_check(f, sector_grid(args.sectors, _openings(args)), args.err)
    _check(args, res.certified, "thm4")
    return {"cEmpirical": res.c_empirical, "worstSector": [res.worst_sector.theta1,
            res.worst_sector.alpha], "beta": res.beta, "betaStar": res.beta_star,
            "certified": res.certified}


def cmd_orderzero(args, f):
    r_delta, R = harness.select_radius_order_zero(f, args.delta, args.U)
    return {"rDelta": r_delta, "analysisR": R}


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="argsector",
                                description="Sector-preimage areas and argument oscillation.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, radius=True, sector=False, err=False):
        sp = sub.add_parser(name, help=help_text,
                            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sp.add_argument("--spec", required=True, help="JSON function spec file")
        sp.add_argument("--strict", action="store_true",
                        help="exit 3 when a result is not certified")
        sp.add_argument("--out", default=None, help="CSV output file")
        sp.add_argument("--step-tol", type=float, default=DEFAULT_STEP_TOL,
                        help="arg step tolerance for circle traces")
        if radius:
            sp.add_argument("--r", type=float, required=True, help="circle radius")
        if sector:
            sp.add_argument("--theta1", type=float, required=True, help="sector lower edge")
            sp.add_argument("--alpha", type=float, required=True, help="sector opening")
        if err:
            sp.add_argument("--err", type=float, default=1e-3, help="undecided-mass budget")
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "log|f| and arg f at one point", radius=False)
    sp.add_argument("--z", required=True, help="complex point, e.g. 0.5+1j")
    add("trace", cmd_trace, "trace arg f around a circle")
    add("omega", cmd_omega, "omega and Omega at a radius")
    add("beta", cmd_beta, "doubling exponent")
    sp = add("area", cmd_area, "certified A(r, S, f)", sector=True, err=True)
    sp.add_argument("--max-depth", type=int, default=MAX_TREE_DEPTH, help="quadtree depth cap")
    sp = add("arcs", cmd_arcs, "T-arcs and S-arcs", sector=True)
    sp.add_argument("--t", type=float, default=0.5, help="inner radius for classification")
    sp.add_argument("--eta", type=float, default=0.01, help="short-arc constant")
    sp.add_argument("--delta", type=float, default=0.01, help="very-short-arc constant")
    sp = add("lemma", cmd_lemma, "empirical Main-Lemma check", radius=False, sector=True, err=True)
    sp.add_argument("--t", type=float, default=0.5, help="inner radius")
    sp.add_argument("--radial-samples", type=int, default=16, help="radii sampled in [t, 1]")
    sp = add("sweep", cmd_sweep, "radius x sector sweep", radius=False, err=True)
    sp.add_argument("--radii", default=None, help="comma-separated radii")
    sp.add_argument("--auto-radius", action="store_true",
                    help="use the order-zero analysis radius")
    sp.add_argument("--U", type=float, default=10.0, help="annulus factor for --auto-radius")
    sp.add_argument("--delta", type=float, default=0.1, help="exponent for --auto-radius")
    sp.add_argument("--sectors", type=int, default=harness.DEFAULT_ROTATIONS,
                    help="rotations per opening")
    sp.add_argument("--openings", default=None, help="comma-separated openings")
    sp.add_argument("--threads", type=int, default=None, help="worker threads")
    sp = add("thm1", cmd_thm1, "radii meeting the growth and oscillation conditions",
             radius=False)
    sp.add_argument("--rho", type=float, required=True, help="declared order")
    sp.add_argument("--r-min", type=float, required=True)
    sp.add_argument("--r-max", type=float, required=True)
    sp.add_argument("--samples", type=int, default=20)
    sp = add("thm4", cmd_thm4, "empirical constant on the unit disc", radius=False, err=True)
    sp.add_argument("--sectors", type=int, default=harness.DEFAULT_ROTATIONS,
                    help="rotations per opening")
    sp.add_argument("--openings", default=None, help="comma-separated openings")
    sp = add("orderzero", cmd_orderzero, "radius maximizing n(r)/r^delta", radius=False)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--U", type=float, default=10.0)
    return p


def run_command(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PRECONDITION
    config = {k: v for k, v in vars(args).items() if k != "func"}
    try:
        doc, f = _load(args)
        config["function"] = document_to_object(doc)
        result = args.func(args, f)
        code = EXIT_OK
    except (NumericalFailure, TraceError, SingularityError, ArithmeticError) as exc:
        result, code = {"error": str(exc), "errorType": type(exc).__name__}, EXIT_NUMERICAL
    except (SpecParseError, SpecError, UnsupportedRepresentation, ValueError) as exc:
        result = {"error": str(exc), "errorType": type(exc).__name__}
        if isinstance(exc, SpecParseError):
            result["code"] = exc.code
        code = EXIT_PRECONDITION
    payload = {"command": args.command, "config": config, "result": result}
    stdout.write(json.dumps(_clean(payload), allow_nan=False) + "\n")
    return code


def main(argv=None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
