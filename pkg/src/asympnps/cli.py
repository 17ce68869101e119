"""Command-line front end.

Verbs
-----
run        solve one case and write fields.csv, axial.csv, summary.csv, meta.txt
sweep      solve a case over a list of dphi, dp or nbulk values, write sweep.csv
presets    list the built-in cases or print one as a config file
decompose  flow and current decompositions of a cylindrical case

Precedence: a ``--config`` file overrides command-line flags, which override
the preset.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import observables as obs
from .config import PRESET_NAMES, CaseSpec, case_from_ini, case_to_ini, load_preset
from .coupler import SteadySolution, solve_steady
from .errors import (InvalidInputError, NonConvergenceError, ProfileFormatError,
                     UnsolvableError, UnsupportedGeometryError)

logger = logging.getLogger("asympnps")

EXIT_INPUT = 1
EXIT_NONCONVERGED = 2
EXIT_FAILED = 3


def fmt(value) -> str:
    """17 significant digits, so the text round-trips to the same float."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


# ---- unit conversion -----------------------------------------------------

def si_factors(case: CaseSpec) -> dict:
    """Multipliers from dimensionless columns to SI units, keyed by column."""
    sc = case.scales
    names = [s.name for s in case.mixture.build().species]
    f = {"z": sc.L0, "r": sc.R0, "z_u_max": sc.L0, "phi": sc.phiR, "phi_z": sc.phiR,
         "dphi": sc.phiR, "zeta_mean": sc.phiR * sc.R0**2 * sc.L0,
         "zeta_int": sc.phiR * sc.R0**2, "p": sc.pR, "p_z": sc.pR, "dp": sc.pR,
         "u": sc.uR, "u_max": sc.uR, "w": sc.uR * sc.R0 / sc.L0, "Q_eo": sc.QR,
         "u_mean": sc.QR * sc.L0, "n_bulk": sc.nR, "I": sc.IR}
    for name in names:
        f[f"n_{name}"] = sc.nR
        f[f"Q_{name}"] = sc.nR
        f[f"I_{name}"] = sc.IR
    return f


def _scale_row(header, row, factors):
    return [v * factors[h] if h in factors and not isinstance(v, str) else v
            for h, v in zip(header, row)]


# ---- case assembly -------------------------------------------------------

def build_case(args) -> CaseSpec:
    case = load_preset(args.preset, groups=args.groups)
    case = case.with_overrides(dphi=args.dphi, dp=args.dp, nbulk=args.nbulk, a=args.a,
                               variant=args.variant, geometry=args.geometry, nr=args.nr,
                               nz=args.nz, tol=args.tol)
    if args.config:
        case = case_from_ini(Path(args.config).read_text(), base=case)
    return case


def _solve(case: CaseSpec) -> tuple[SteadySolution, str | None]:
    try:
        return solve_steady(case.problem()), None
    except NonConvergenceError as exc:
        sol = exc.context.get("solution")
        if sol is None:
            raise
        return sol, str(exc)


# ---- run -----------------------------------------------------------------

def write_artifacts(case: CaseSpec, sol: SteadySolution, out: Path, si: bool,
                    failure: str | None = None) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    factors = si_factors(case) if si else {}
    names = [s.name for s in sol.problem.mixture.species]
    n_sp = len(names)
    geo = sol.geometry

    header = ["z", "r", "phi"] + [f"n_{n}" for n in names] + ["p", "u", "w"]
    r = sol.r
    w = sol.flow.w if sol.flow.w is not None else np.zeros_like(sol.u)
    cols = ([np.broadcast_to(geo.z[:, None], r.shape), r, sol.phi]
            + [sol.composition.n[a] for a in range(n_sp)] + [sol.pressure.p, sol.u, w])
    flat = np.stack([np.ravel(c) for c in cols], axis=1)
    write_csv(out / "fields.csv", header, (_scale_row(header, list(row), factors) for row in flat))

    header = (["z"] + [f"Q_{n}" for n in names] + ["phi_z", "p_z", "zeta_int"]
              + [f"I_{n}" for n in names] + ["I"])
    I_nodes = np.array([np.interp(geo.z, sol.face_z, I) for I in sol.currents])
    cols = ([geo.z] + list(sol.Q) + [sol.potential.phi_z, sol.pressure.p_z, sol.kernels.zeta_int]
            + list(I_nodes) + [I_nodes.sum(axis=0)])
    write_csv(out / "axial.csv", header,
              (_scale_row(header, list(row), factors) for row in np.stack(cols, axis=1)))

    summ = obs.summary(sol)
    write_csv(out / "summary.csv", list(summ), [_scale_row(list(summ), list(summ.values()), factors)])

    lines = ["[status]", f"converged = {int(sol.converged and failure is None)}",
             f"iterations = {sol.iterations}", f"units = {'SI' if si else 'dimensionless'}"]
    if failure:
        lines.append(f"failure = {failure}")
        lines.append("partial = 1")
    lines += ["", "[err_trace]"] + [f"{i + 1} = {fmt(e)}" for i, e in enumerate(sol.err_trace)]
    lines += ["", case_to_ini(case).rstrip()]
    (out / "meta.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return summ


def cmd_run(args) -> int:
    case = build_case(args)
    sol, failure = _solve(case)
    summ = write_artifacts(case, sol, Path(args.out), args.si, failure)
    for key, value in summ.items():
        print(f"{key} = {fmt(value)}")
    if failure:
        logger.error(failure)
        return EXIT_NONCONVERGED
    return 0


# ---- sweep ---------------------------------------------------------------

SWEEP_AXES = ("dphi", "dp", "nbulk")


def sweep_values(args) -> list[float]:
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    elif args.range:
        start, stop, count = args.range
        values = list(np.linspace(float(start), float(stop), int(count)))
    else:
        raise SystemExit("sweep needs --values or --range")
    if not values or not all(math.isfinite(v) for v in values):
        raise SystemExit("sweep values must be a non-empty list of finite numbers")
    return values


def _scaled(case: CaseSpec, summ: dict) -> dict:
    """Scaled flow, current and pressure used for master curves."""
    nan = float("nan")
    C_u = summ.get("C_u", nan)
    dphi = summ["dphi"]
    zeta = summ["zeta_mean"]
    ok = dphi != 0
    return {"u_scaled": summ["u_mean"] / (C_u * zeta * dphi * (case.geometry.R**4 / 16)) if ok else nan,
            "u_per_Cu_dphi": summ["u_mean"] / (C_u * dphi) if ok else nan,
            "I_per_dphi": summ["I"] / dphi if ok else nan,
            "dp_per_Cu_dphi": summ["dp"] / (C_u * dphi) if ok else nan,
            "dp_scaled": summ["dp"] / (C_u * zeta * dphi) if ok else nan}


def sweep_point(case: CaseSpec, axis: str, value: float) -> dict:
    try:
        point = case.with_overrides(**{axis: value})
        sol, failure = _solve(point)
    except Exception as exc:  # per-point failures are recorded and the sweep continues
        return {"value": value, "status": f"error: {type(exc).__name__}: {exc}"}
    summ = obs.summary(sol)
    summ.update(_scaled(point, summ))
    return {"value": value, "status": "ok" if failure is None else "nonconverged", **summ}


def run_sweep(case: CaseSpec, axis: str, values, workers: int = 1) -> list[dict]:
    if axis not in SWEEP_AXES:
        raise ValueError(f"sweep axis must be one of {SWEEP_AXES}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(sweep_point, [case] * len(values), [axis] * len(values), values))
    return [sweep_point(case, axis, v) for v in values]


def write_sweep(path: Path, rows: list[dict], factors: dict) -> None:
    header = ["value", "status"]
    for row in rows:
        header += [k for k in row if k not in header]
    nan = float("nan")
    table = [[row.get(h, nan) for h in header] for row in rows]
    write_csv(path, header, (_scale_row(header, r, factors) for r in table))


def cmd_sweep(args) -> int:
    case = build_case(args)
    rows = run_sweep(case, args.axis, sweep_values(args), args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep(out / "sweep.csv", rows, si_factors(case) if args.si else {})
    bad = [r for r in rows if r["status"] != "ok"]
    for r in rows:
        print(f"{args.axis} = {fmt(r['value'])}: {r['status']}")
    return EXIT_FAILED if bad else 0


# ---- presets / decompose -------------------------------------------------

def cmd_presets(args) -> int:
    if args.show:
        sys.stdout.write(case_to_ini(load_preset(args.show, groups=args.groups)))
        return 0
    for name in PRESET_NAMES:
        print(f"{name:12s} {load_preset(name).notes}")
    return 0


def cmd_decompose(args) -> int:
    case = build_case(args)
    sol, failure = _solve(case)
    flow = obs.flow_decomposition(sol)
    cur = obs.current_decomposition(sol)
    names = [s.name for s in sol.problem.mixture.species]
    row = {"dphi": case.bc.dphi, "dp": case.bc.dp, "zeta_mean": obs.zeta_mean(sol),
           "u_PF": flow.PF, "u_HS": flow.HS, "u_EDL": flow.EDL, "u_total": flow.total,
           "u_defect": flow.defect}
    for a, n in enumerate(names):
        row.update({f"I_E_{n}": cur.I_E[a], f"I_P_{n}": cur.I_P[a], f"I_C_{n}": cur.I_C[a],
                    f"I_{n}": cur.actual[a], f"C_{n}": cur.threshold[a]})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "decomposition.csv", list(row), [list(row.values())])
    for key, value in row.items():
        print(f"{key} = {fmt(value)}")
    if failure:
        logger.error(failure)
        return EXIT_NONCONVERGED
    return 0


# ---- parser --------------------------------------------------------------

def _case_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default="general", choices=PRESET_NAMES)
    p.add_argument("--groups", default="derived", choices=("derived", "table"),
                   help="derive the groups from the reference scales or use the rounded table values")
    p.add_argument("--config", help="INI file; its keys override all flags")
    p.add_argument("--geometry", help="cylinder, trumpet, profile or profile:<path>")
    p.add_argument("--variant", choices=("classical", "bikerman", "mixture"))
    p.add_argument("--dphi", type=float, help="potential difference phi_in - phi_out")
    p.add_argument("--dp", type=float, help="pressure difference p_in - p_out")
    p.add_argument("--nbulk", type=float, help="bulk concentration at both ends")
    p.add_argument("--a", type=float, help="volume ratio of the solvated ions")
    p.add_argument("--nr", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--tol", type=float, help="fixed-point tolerance")
    p.add_argument("--out", default="out")
    p.add_argument("--si", action="store_true", help="write outputs in SI units")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asympnps", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="solve one case")
    _case_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="solve a case over a parameter range")
    _case_flags(p)
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", help="comma-separated values")
    p.add_argument("--range", nargs=3, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="list presets or print one as INI")
    p.add_argument("--show", choices=PRESET_NAMES)
    p.add_argument("--groups", default="derived", choices=("derived", "table"))
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("decompose", help="flow and current decompositions of a cylinder case")
    _case_flags(p)
    p.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidInputError, ProfileFormatError, UnsolvableError, UnsupportedGeometryError,
            OSError) as exc:
        print(f"asympnps {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
