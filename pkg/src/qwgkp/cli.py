"""Command-line front end: ``qwgkp {wigner,encode,fidelity,fidelity-map,check}``.

Every command that writes files also writes ``<out>.manifest.json`` with the
full parameter set, library version, cutoffs, tail residuals, wall time and
SHA-256 digests of the outputs.  CSV floats use 17 significant digits.

Exit codes: 0 ok, 1 invariant failure, 2 usage error, 3 truncation or
convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytic, checks, encoder, fidelity, fock
from .exceptions import ConvergenceError, TruncationError

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("qwgkp")


class UsageError(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, command: str, args, outputs, started: float, dim=None, tail=None) -> Path:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
    manifest = {
        "command": command,
        "params": params,
        "version": __version__,
        "dim": dim,
        "tail_residuals": tail,
        "wall_time_s": time.perf_counter() - started,
        "outputs": {str(p): sha256(p) for p in outputs},
    }
    path = out.with_name(out.name + ".manifest.json")
    write_json(path, manifest)
    return path


def parse_range(text: str) -> np.ndarray:
    """``"lo:hi:n"`` -> ``linspace(lo, hi, n)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must look like lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"range {text!r}: {exc}") from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError(f"range {text!r} needs finite bounds and n >= 1")
    return np.linspace(lo, hi, n)


def parse_grid(text: str) -> tuple[np.ndarray, np.ndarray]:
    """``"x0:x1:nx,p0:p1:np"``."""
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"grid {text!r} must look like x0:x1:nx,p0:p1:np")
    return parse_range(parts[0]), parse_range(parts[1])


def resolve_alpha_phi(text: str) -> float:
    if text == "gkp":
        return fidelity.GKP_DISPLACEMENT
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--alpha-phi expects a number or 'gkp', got {text!r}") from None


def resolve_zeta(text: str, runs: int) -> float:
    if text == "auto":
        return fidelity.zeta_for_runs(runs)
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--zeta expects a number or 'auto', got {text!r}") from None


# --------------------------------------------------------------------------
# commands


def cmd_wigner(args) -> int:
    started = time.perf_counter()
    xs, ps = parse_grid(args.grid)
    a_phi = resolve_alpha_phi(args.alpha_phi)
    zeta = resolve_zeta(args.zeta, args.runs)
    x, p = np.meshgrid(xs, ps, indexing="ij")
    dim, tail = None, None
    if args.method == "analytic":
        w = analytic.wigner_analytic(args.runs, a_phi, zeta, x, p)
        mx = analytic.marginals(args.runs, a_phi, zeta, "x", xs)
        mp = analytic.marginals(args.runs, a_phi, zeta, "p", ps)
    else:
        state = analytic.to_fock(analytic.codeword(args.runs, a_phi, zeta), args.dim)
        dim, tail = state.dims[0], state.tail_mass
        w = fock.wigner_numeric(state, x, p)
        mx = np.abs(fock.position_wavefunction(state, xs)) ** 2
        # momentum wavefunction: rotate by -pi/2 in phase space
        rot = fock.FockState(state.amplitudes * (-1j) ** np.arange(dim), normalized=True)
        mp = np.abs(fock.position_wavefunction(rot, ps)) ** 2
    out = Path(args.out)
    write_csv(out, ["x", "p", "wigner"], zip(x.ravel(), p.ravel(), w.ravel()))
    marg = out.with_name(out.stem + "_marginals" + (out.suffix or ".csv"))
    rows = [("x", c, v) for c, v in zip(xs, mx)] + [("p", c, v) for c, v in zip(ps, mp)]
    write_csv(marg, ["axis", "coordinate", "density"], rows)
    write_manifest(out, "wigner", args, [out, marg], started, dim, tail)
    return EXIT_OK


def _report_outputs(report, out: Path) -> list[Path]:
    state_path = out.with_name(out.stem + "_state.json")
    write_json(state_path, report.final_state.to_dict())
    write_json(out, report.to_dict(final_state_ref=state_path.name))
    return [out, state_path]


def cmd_encode(args) -> int:
    started = time.perf_counter()
    depths = _parse_depths(args.depth)
    out = Path(args.out)
    if len(depths) == 1:
        cfg = encoder.EncoderConfig(args.runs, args.alpha, args.phi, args.zeta, depths[0], args.dim, args.postselect)
        report = encoder.run_cmzi_encoding(cfg)
        outputs = _report_outputs(report, out)
        tail = report.final_state.tail_mass
        write_manifest(out, "encode", args, outputs, started, report.dim, tail)
        print(json.dumps(report.to_dict(final_state_ref=outputs[1].name), indent=2, sort_keys=True))
        return EXIT_OK
    # depth sweep at fixed step: phi_M = phi / M keeps M * alpha * phi_M / 2 fixed
    outputs, rows, dims, tails = [], [], [], []
    for m in depths:
        cfg = encoder.EncoderConfig(args.runs, args.alpha, args.phi / m, args.zeta, m, args.dim, args.postselect)
        report = encoder.run_cmzi_encoding(cfg)
        outputs += _report_outputs(report, out.with_name(f"{out.stem}_depth{m}.json"))
        last = report.per_run[-1]
        rows.append((m, cfg.phi, cfg.step, report.dim, report.cumulative_success, last.fidelity, last.purity))
        dims.append(report.dim)
        tails.append(report.final_state.tail_mass)
    table = out.with_suffix(".csv")
    write_csv(table, ["depth", "phi", "step", "dim", "cumulative_success", "final_fidelity", "final_purity"], rows)
    outputs.append(table)
    write_manifest(out, "encode", args, outputs, started, dims, tails)
    return EXIT_OK


def _parse_depths(text: str) -> list[int]:
    try:
        depths = [int(t) for t in str(text).split(",")]
    except ValueError:
        raise UsageError(f"--depth expects integers, got {text!r}") from None
    if any(d < 1 for d in depths):
        raise UsageError("--depth values must be >= 1")
    return depths


def cmd_fidelity(args) -> int:
    started = time.perf_counter()
    params = fidelity.MziParams(args.alpha, args.phi, args.zeta)
    g = fidelity.derived_params(params)
    result = {
        "params": {"alpha": params.alpha, "phi": params.phi, "zeta": params.zeta},
        "analytic": fidelity.fidelity_analytic(params),
        "derived_params": {k: getattr(g, k) for k in g.__dataclass_fields__},
        "squeezing_db": fidelity.squeezing_db(params.zeta),
    }
    if params.zeta == 0:
        result["coherent_overlap"] = math.exp(-0.5 * (g.alpha_s**2 + g.alpha_c**2))
    dims = None
    if args.exact or args.ordered:
        dims = fidelity._resolve_dims(params, args.dim)
    if args.exact:
        result["exact"] = fidelity.fidelity_exact(params, dims, check_convergence=args.check_convergence)
    if args.ordered:
        result["ordered"] = fidelity.fidelity_ordered(params, dims)
    result["dims"] = list(dims) if dims else None
    print(json.dumps(result, indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        write_json(out, result)
        write_manifest(out, "fidelity", args, [out], started, result["dims"])
    return EXIT_OK


def cmd_fidelity_map(args) -> int:
    started = time.perf_counter()
    alphas = parse_range(args.alpha_range)
    if args.phi_range is None:
        phis = np.linspace(0.8 / 80, 0.8, 80)
    else:
        phis = parse_range(args.phi_range)
    zeta = fidelity.zeta_for_runs(args.runs) if args.zeta is None else args.zeta
    table = fidelity.fidelity_grid(alphas, phis, zeta, method=args.method, jobs=args.jobs, dim=args.dim)
    out = Path(args.out)
    write_csv(out, list(fidelity.GRID_DTYPE.names), (tuple(r) for r in table))
    write_manifest(out, "fidelity-map", args, [out], started, args.dim)
    return EXIT_OK


def cmd_check(args) -> int:
    names = checks.SUITES if args.suite == "all" else (args.suite,)
    rows = []
    for name in names:
        if name == "ordering":
            rows += checks.ordering_suite(args.perturbative_phi)
        else:
            rows += checks.run_suites([name])
    print(checks.format_rows(rows))
    failed = [r for r in rows if r.enforced and not r.passed]
    return EXIT_INVARIANT if failed else EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwgkp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", help="codeword Wigner function on a grid")
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--alpha-phi", default="gkp", help="step length or 'gkp' for sqrt(pi/2)")
    p.add_argument("--zeta", default="auto", help="squeezing or 'auto' for ln(N pi)/2")
    p.add_argument("--grid", required=True, help="x0:x1:nx,p0:p1:np")
    p.add_argument("--method", choices=("analytic", "fock"), default="analytic")
    p.add_argument("--dim", type=int, default=None, help="Fock cutoff for --method fock")
    p.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; evaluation is vectorized")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("encode", help="exact interferometer encoding pipeline")
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--depth", default="1", help="depth M, or a comma list for a fixed-step sweep")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--postselect", choices=("even", "cat"), default="even")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("fidelity", help="interferometer map fidelity at one point")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--ordered", action="store_true")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--check-convergence", action="store_true", help="recompute --exact at doubled cutoff")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("fidelity-map", help="fidelity over an (alpha, phi) grid")
    p.add_argument("--runs", type=int, required=True, help="sets zeta = ln(N pi)/2")
    p.add_argument("--alpha-range", required=True, help="a0:a1:na")
    p.add_argument("--phi-range", default=None, help="p0:p1:np (default 80 points on (0, 0.8])")
    p.add_argument("--zeta", type=float, default=None, help="override the zeta implied by --runs")
    p.add_argument("--method", choices=("analytic", "exact"), default="analytic")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="max concurrent evaluations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fidelity_map)

    p = sub.add_parser("check", help="run self-check suites")
    p.add_argument("--suite", choices=(*checks.SUITES, "all"), default="all")
    p.add_argument("--perturbative-phi", type=float, default=0.8, help="phi for the reported perturbative residual")
    p.set_defaults(func=cmd_check)
    return parser


RANGE_FLAGS = ("--grid", "--alpha-range", "--phi-range")


def _join_range_values(argv: list[str]) -> list[str]:
    """Turn ``--grid -5:5:41,...`` into ``--grid=-5:5:41,...`` so argparse accepts a leading minus."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_range_values(argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "runs", 1) is not None and getattr(args, "runs", 1) < 1:
        parser.error("--runs must be >= 1")
    try:
        return args.func(args)
    except (TruncationError, ConvergenceError) as exc:
        print(f"qwgkp: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"qwgkp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
