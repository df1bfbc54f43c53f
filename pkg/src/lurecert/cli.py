"""Command-line front end.

Exit codes: 0 certified/success, 1 analysis finished but not certified,
2 usage error, 3 input or runtime error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .iqc import (
    FrequencyGrid,
    UnstablePlantError,
    fdi_values,
    log_grid,
    parse_grid,
    require_stable,
    tail_value,
)
from .lti import TransferFunction, freq_response, load_plant
from .multiplier import (
    MultiplierBasis,
    load_multiplier,
    make_multiplier,
    multiplier_freq_response,
    multiplier_valid_for_class,
)
from .nonlin import CLASS_TAGS, SLOPE_CLASSES, parse_shape
from .search import (
    NoCertifiableSlope,
    SearchConfig,
    bisect_alpha,
    certify,
    circle_baseline,
    default_poles,
    lp_feasibility,
)
from .sim import make_input, simulate_lure, time_scales

__all__ = ["parse_args", "run", "main", "emit_fdi_csv"]

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

SUBCOMMANDS = ("certify", "circle", "search", "bisect", "simulate", "check-multiplier", "fdi-data")


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _poles(text: str) -> tuple:
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pole list {text!r}") from None
    if any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("poles must be positive")
    return vals


def _grid(text: str) -> FrequencyGrid:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lurecert", description="Zames-Falb stability certificates for Lur'e loops")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, alpha_required=False):
        sp.add_argument("--plant", required=True)
        sp.add_argument("--class", dest="class_tag", choices=CLASS_TAGS, default="slope")
        sp.add_argument("--alpha", type=_positive, required=alpha_required)
        sp.add_argument("--grid", type=_grid, default=None, help="wmin:wmax:n (log spaced)")

    sp = sub.add_parser("certify", help="verify a given multiplier")
    common(sp)
    sp.add_argument("--multiplier", help="multiplier JSON (default M = 1)")
    sp.add_argument("--out")
    sp.add_argument("--emit-fdi", dest="emit_fdi")

    sp = sub.add_parser("circle", help="largest slope certified by M = 1")
    sp.add_argument("--plant", required=True)
    sp.add_argument("--grid", type=_grid, default=None)

    sp = sub.add_parser("search", help="fixed-pole LP search at one slope")
    common(sp, alpha_required=True)
    sp.add_argument("--poles", type=_poles)
    sp.add_argument("--anticausal-poles", dest="anticausal_poles", type=_poles)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    sp.add_argument("--out")

    sp = sub.add_parser("bisect", help="largest certifiable slope")
    sp.add_argument("--plant", required=True)
    sp.add_argument("--class", dest="class_tag", choices=CLASS_TAGS, default="slope")
    sp.add_argument("--strategy", choices=("zf", "circle"), default="zf")
    sp.add_argument("--tol", type=_positive, default=1e-3)
    sp.add_argument("--alpha-lo", dest="alpha_lo", type=_positive)
    sp.add_argument("--alpha-hi", dest="alpha_hi", type=_positive)
    sp.add_argument("--poles", type=_poles)
    sp.add_argument("--anticausal-poles", dest="anticausal_poles", type=_poles)
    sp.add_argument("--grid", type=_grid, default=None)
    sp.add_argument("--out")

    sp = sub.add_parser("simulate", help="simulate the loop with one nonlinearity")
    sp.add_argument("--plant", required=True)
    sp.add_argument("--phi", required=True, help="sat:L | dz:d | pwl:x,y;... | lin:k | sig:g")
    sp.add_argument("--input", dest="input_kind", default="pulse", help="pulse | expdecay:tau | chirp")
    sp.add_argument("--dt", type=_positive)
    sp.add_argument("--T", dest="T", type=_positive)
    sp.add_argument("--out")

    sp = sub.add_parser("check-multiplier", help="L1 and positivity checks")
    sp.add_argument("--multiplier", required=True)
    sp.add_argument("--class", dest="class_tag", choices=CLASS_TAGS, default="slope")

    sp = sub.add_parser("fdi-data", help="write the frequency condition as CSV")
    common(sp)
    sp.add_argument("--multiplier")
    sp.add_argument("--out", required=True)
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse a command line; usage errors exit with status 2."""
    ns = _build_parser().parse_args(argv)
    if getattr(ns, "class_tag", None) in SLOPE_CLASSES and ns.command in ("certify", "fdi-data"):
        if ns.alpha is None:
            _build_parser().error(f"--alpha is required for class {ns.class_tag}")
    if ns.command == "bisect" and ns.class_tag not in SLOPE_CLASSES:
        _build_parser().error("bisect needs a slope class")
    return ns


def emit_fdi_csv(G: TransferFunction, m: MultiplierBasis, alpha, class_tag: str, grid: FrequencyGrid, path) -> None:
    """Rows ``omega,re_G,im_G,re_M,im_M,fdi_value``: w = 0, the grid, then the ``inf`` tail."""
    require_stable(G)
    a = alpha if alpha is not None else 1.0
    w = np.concatenate(([0.0], grid.omegas))
    g = freq_response(G, w)
    M = multiplier_freq_response(m, w)
    v = fdi_values(G, m, a, class_tag, w)
    fmt = lambda x: f"{x:.12g}"
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["omega", "re_G", "im_G", "re_M", "im_M", "fdi_value"])
        for row in zip(w, g.real, g.imag, M.real, M.imag, v):
            wr.writerow([fmt(x) for x in row])
        wr.writerow(["inf", fmt(G.high_freq_gain), fmt(0.0), fmt(1.0), fmt(0.0), fmt(tail_value(G, a, class_tag))])


def _summary(cert) -> str:
    w = "inf" if math.isinf(cert.worst_omega) else f"{cert.worst_omega:.6g}"
    alpha = "-" if cert.alpha is None else f"{cert.alpha:.6g}"
    lines = [
        f"verdict: {cert.verdict}",
        f"alpha:   {alpha}",
        f"margin:  {cert.worst_margin:.6g} (eps {cert.epsilon:.3g})",
        f"L1:      {cert.l1:.6g}",
        f"worst w: {w}",
    ]
    lines += [f"reason:  {r}" for r in cert.reasons]
    return "\n".join(lines)


def _write_cert(cert, out) -> None:
    if out:
        cert.save(out)


def _check_files(ns) -> None:
    for attr in ("plant", "multiplier"):
        path = getattr(ns, attr, None)
        if path is not None and not Path(path).is_file():
            raise FileNotFoundError(f"{attr} file not found: {path}")


def _config(G, ns, grid) -> SearchConfig:
    poles = default_poles(G)
    return SearchConfig(
        causal_poles=ns.poles if ns.poles is not None else poles,
        anticausal_poles=ns.anticausal_poles if ns.anticausal_poles is not None else poles,
        grid=grid,
        class_tag=ns.class_tag,
        max_iter=getattr(ns, "max_iter", 5000),
        tol=getattr(ns, "tol", 1e-3),
    )


def _dispatch(ns) -> int:
    _check_files(ns)
    grid = getattr(ns, "grid", None) or log_grid()
    cmd = ns.command

    if cmd == "check-multiplier":
        m = load_multiplier(ns.multiplier)
        rep = multiplier_valid_for_class(m, ns.class_tag)
        print(f"valid:       {rep.passed}")
        print(f"L1:          {rep.l1:.6g}")
        print(f"h >= 0:      {rep.nonnegative}")
        for r in rep.reasons:
            print(f"reason:      {r}")
        return EXIT_OK if rep.passed else EXIT_NOT_CERTIFIED

    G = load_plant(ns.plant)

    if cmd == "circle":
        a = circle_baseline(G, grid)
        print(f"alpha_circle: {a:.9g}" if math.isfinite(a) else "alpha_circle: inf (Re G <= 0 everywhere)")
        return EXIT_OK

    if cmd == "simulate":
        shape = parse_shape(ns.phi)
        tau, _ = time_scales(G)
        T = ns.T if ns.T is not None else 50.0 * tau
        trace = simulate_lure(G, shape, make_input(ns.input_kind, T), ns.dt, T)
        if ns.out:
            with open(ns.out, "w", newline="") as fh:
                wr = csv.writer(fh, lineterminator="\n")
                wr.writerow(["t", "r", "u", "y"])
                for row in zip(trace.t, trace.r, trace.u, trace.y):
                    wr.writerow([f"{x:.12g}" for x in row])
        print(f"diverged: {trace.diverged}")
        print(f"||y||_2:  {trace.l2_y[-1]:.6g}")
        print(f"||u||_2:  {trace.l2_u[-1]:.6g}")
        return EXIT_NOT_CERTIFIED if trace.diverged else EXIT_OK

    if cmd in ("certify", "fdi-data"):
        m = load_multiplier(ns.multiplier) if ns.multiplier else make_multiplier()
        if cmd == "fdi-data":
            emit_fdi_csv(G, m, ns.alpha, ns.class_tag, grid, ns.out)
            return EXIT_OK
        cert = certify(G, ns.alpha, m, ns.class_tag, grid)
        _write_cert(cert, ns.out)
        if ns.emit_fdi:
            emit_fdi_csv(G, m, ns.alpha, ns.class_tag, grid, ns.emit_fdi)
        print(_summary(cert))
        return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED

    if cmd == "search":
        cfg = _config(G, ns, grid)
        lp = lp_feasibility(G, ns.alpha, cfg)
        print(f"lp:      {lp.verdict} (optimum {lp.worst_margin:.6g}, {lp.iterations} pivots)")
        if lp.multiplier is None:
            return EXIT_NOT_CERTIFIED
        info = cfg.describe() | {"lp_verdict": lp.verdict, "lp_margin": lp.worst_margin}
        cert = certify(G, ns.alpha, lp.multiplier, ns.class_tag, grid, search=info)
        _write_cert(cert, ns.out)
        print(_summary(cert))
        return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED

    if cmd == "bisect":
        cfg = _config(G, ns, grid)
        res = bisect_alpha(G, ns.alpha_lo, ns.alpha_hi, ns.strategy, cfg)
        cert = res.certificate
        cert.search = (cert.search or {}) | {
            "strategy": ns.strategy,
            "trace": [[a, ok] for a, ok in res.trace],
            "capped": res.capped,
        }
        _write_cert(cert, ns.out)
        print(f"alpha*:  {res.alpha_star:.9g} (largest found, {len(res.trace)} evaluations)")
        print(_summary(cert))
        return EXIT_OK
    raise AssertionError(cmd)


def run(ns: argparse.Namespace) -> int:
    try:
        return _dispatch(ns)
    except NoCertifiableSlope as exc:
        print(f"not certified: {exc}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    except (OSError, ValueError, ArithmeticError, UnstablePlantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(ns)


if __name__ == "__main__":
    sys.exit(main())
