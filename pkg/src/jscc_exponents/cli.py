"""Command-line entry point: reports as JSON, sweeps as CSV."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .bounds import JsccProblem, Tightness, classify, primal_oracle
from .channel import RHO_CAP, NumericalError
from .channels import QuantizerConfig, awgn_quantized, bec, bsc, gallager_6x4, optimize_step, qary_symmetric, rayleigh_quantized
from .lossy import LossyProblem, lossy_bounds, lossy_primal_oracle, lossy_threshold, rate_distortion_binary, rho_zero
from .probability import ValidationError, is_unbounded, load_problem
from . import sweeps

EXIT_OK, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2


def fmt(x) -> str:
    """One CSV cell to 9 significant digits; unbounded values print as "inf"."""
    if x is None:
        return ""
    if is_unbounded(x):
        return "inf"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.9g}"
    return str(x)


def _jsonable(x):
    if is_unbounded(x):
        return "inf"
    if isinstance(x, Tightness):
        return x.value
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    return x


def write_csv(rows, columns, params, out):
    buf = io.StringIO()
    buf.write("# " + json.dumps(_jsonable(params), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    _emit(buf.getvalue(), out)


def write_json(doc, out):
    _emit(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", out)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _floats(s):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {s!r}") from None


def _problem(args):
    if not args.input:
        raise ValidationError("--input is required")
    source, channel, t = load_problem(args.input)
    if args.t is not None:
        t = args.t
    missing = [k for k, v in (("source", source), ("channel", channel), ("t", t)) if v is None]
    if missing:
        raise ValidationError(f"{args.input}: missing {', '.join(missing)}")
    return source, channel, t


def _opts(args):
    return dict(rho_max=args.rho_max, rate_tol=args.tol)


def cmd_bounds(args):
    source, channel, t = _problem(args)
    p = JsccProblem(source, channel, t)
    rep = classify(p, args.rho_step, **_opts(args))
    doc = rep.to_dict()
    if args.r_step is not None:
        doc["primal_rc"] = primal_oracle(p, "rc", args.r_step * t, args.rho_step)[0]
        doc["primal_sp"] = primal_oracle(p, "sp", args.r_step * t, args.rho_step)[0]
    write_json(doc, args.out)
    return EXIT_OK if rep.converged else EXIT_NUMERIC


def cmd_lossy_bounds(args):
    if args.input:
        source, channel, t = load_problem(args.input)
        if channel is None:
            raise ValidationError(f"{args.input}: missing channel")
        if source is not None and args.q is None:
            if source.alphabet_size != 2:
                raise ValidationError("lossy mode needs a binary source")
            args.q = float(min(source.probs))
    else:
        channel, t = bsc(args.param), None
    t = args.t if args.t is not None else (t if t is not None else 1.0)
    if args.q is None:
        raise ValidationError("give --q or a binary source in --input")
    p = LossyProblem(args.q, channel, t, args.delta)
    rep = lossy_bounds(p, args.rho_step, **_opts(args))
    doc = rep.to_dict()
    r0 = rho_zero(p.q, p.delta)
    doc.update(rate_distortion=rate_distortion_binary(p.q, p.delta), rho_zero=r0,
               delta_threshold=lossy_threshold(p.q))
    if args.r_step is not None:
        doc["primal_rc"] = lossy_primal_oracle(p, "rc", args.r_step * t, args.rho_step)[0]
        doc["primal_sp"] = lossy_primal_oracle(p, "sp", args.r_step * t, args.rho_step)[0]
    write_json(doc, args.out)
    return EXIT_OK if rep.converged else EXIT_NUMERIC


def cmd_region(args):
    pname = sweeps.FAMILIES[args.family][0]
    t = 1.0 if args.t is None else args.t
    job = sweeps.SweepJob("region", (sweeps.Axis(pname, args.p_lo, args.p_hi, args.grid),
                                     sweeps.Axis("q", args.q_lo, args.q_hi, args.grid)),
                          {"family": args.family, "t": t, "map": args.map, "delta": args.delta}, args.out)
    rows = sweeps.run_region(job, rho_step=args.rho_step, rho_max=args.rho_max, rate_tol=args.tol)
    if args.map == "compare":
        cols = [pname, "q", "label", "rate_test", "ex_test", "e0_test"]
    else:
        cols = [pname, "q", "label", "lower", "upper"]
    params = dict(job.fixed, grid=args.grid, p_range=[args.p_lo, args.p_hi], q_range=[args.q_lo, args.q_hi],
                  rho_step=args.rho_step, rho_max=args.rho_max, tol=args.tol)
    write_csv(rows, cols, params, args.out)
    return EXIT_OK


def cmd_ratio_table(args):
    eps = _floats(args.eps) if args.eps else sweeps.TABLE_EPS
    if args.cols:
        vals = _floats(args.cols)
        if len(vals) % 2:
            raise ValidationError("--cols takes t,q pairs")
        cols = tuple(zip(vals[::2], vals[1::2]))
    else:
        cols = sweeps.TABLE_COLS
    rows = sweeps.ratio_table(eps, cols, args.rho_step)
    params = {"epsilon": list(eps), "cols": [list(c) for c in cols], "rho_step": args.rho_step}
    write_csv(rows, ["epsilon", "t", "q", "ratio", "lower_bound", "cell"], params, args.out)
    return EXIT_OK


def cmd_power_gain(args):
    t = 0.75 if args.t is None else args.t
    snr = sweeps.snr_grid(args.snr_lo, args.snr_hi, args.snr_step)
    rows = []
    for m in sorted({int(v) for v in _floats(args.bits)}):
        c = sweeps.power_curve(args.kind, m, t, args.q, snr, args.rho_step)
        shift = c.row_shift()
        for i, s in enumerate(c.snr_db):
            rows.append({"bits": m, "snr_db": float(s), "step": float(c.steps[i]), "E_J": float(c.E_J[i]),
                         "E_T": float(c.E_T[i]), "E_J_exact": bool(c.J_exact[i]),
                         "E_T_exact": bool(c.T_exact[i]), "db_shift": float(shift[i])})
    params = {"kind": args.kind, "bits": args.bits, "t": t, "q": args.q,
              "snr": [args.snr_lo, args.snr_hi, args.snr_step], "rho_step": args.rho_step}
    write_csv(rows, ["bits", "snr_db", "step", "E_J", "E_T", "E_J_exact", "E_T_exact", "db_shift"], params, args.out)
    return EXIT_OK


def cmd_channel_export(args):
    fam = args.family
    meta = {"family": fam}
    if fam == "bsc":
        W = bsc(args.param)
    elif fam == "bec":
        W = bec(args.param)
    elif fam == "qary":
        W = qary_symmetric(args.size, args.param)
    elif fam == "gallager6x4":
        W = gallager_6x4(args.param)
    else:
        cfg = (QuantizerConfig(args.bits, args.step, args.snr_db) if args.step is not None
               else optimize_step(args.snr_db, args.bits, fam))
        W = (awgn_quantized if fam == "awgn" else rayleigh_quantized)(cfg)
        meta.update(bits=cfg.bits, step_size=cfg.step_size, snr_db=cfg.snr_db)
    if fam in ("bsc", "bec", "qary", "gallager6x4"):
        meta["param"] = args.param
    doc = {"channel": {"matrix": W.matrix.tolist()}, "meta": meta}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jscc-exponents", description="Joint source-channel error exponent bounds.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", help="problem JSON with source, channel and t")
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--t", type=float, help="transmission rate (source symbols per channel use)")
        p.add_argument("--grid", type=int, default=50, help="grid points per sweep axis")
        p.add_argument("--rho-step", type=float, default=1e-3, help="E0 sampling step on [0, 1]")
        p.add_argument("--r-step", type=float, help="relative rate step for a primal grid cross-check")
        p.add_argument("--rho-max", type=float, default=RHO_CAP, help="cap on the sphere-packing tilt search")
        p.add_argument("--tol", type=float, default=1e-6, help="rate tolerance in the exactness test")
        return p

    p = common(sub.add_parser("bounds", help="bounds and tightness for one problem"))
    p.set_defaults(func=cmd_bounds)

    p = common(sub.add_parser("lossy-bounds", help="excess-distortion bounds for a binary source"))
    p.add_argument("--q", type=float, help="source probability q <= 1/2")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--param", type=float, default=0.1, help="BSC crossover when no --input is given")
    p.set_defaults(func=cmd_lossy_bounds)

    p = common(sub.add_parser("region", help="region labels over a (channel parameter, q) grid"))
    p.add_argument("--family", choices=sorted(sweeps.FAMILIES), default="bsc")
    p.add_argument("--map", choices=sweeps.MAPS, default="exact")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--p-lo", type=float, default=0.005)
    p.add_argument("--p-hi", type=float, default=0.495)
    p.add_argument("--q-lo", type=float, default=0.01)
    p.add_argument("--q-hi", type=float, default=0.49)
    p.set_defaults(func=cmd_region)

    p = common(sub.add_parser("ratio-table", help="E_J / E_T for binary sources over BSCs"))
    p.add_argument("--eps", help="comma-separated crossover probabilities")
    p.add_argument("--cols", help="comma-separated t,q pairs")
    p.set_defaults(func=cmd_ratio_table)

    p = common(sub.add_parser("power-gain", help="E_J and E_T against SNR for quantized BPSK"))
    p.add_argument("--kind", choices=["awgn", "rayleigh"], default="awgn")
    p.add_argument("--bits", default="1,2,3")
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--snr-lo", type=float, default=-2.0)
    p.add_argument("--snr-hi", type=float, default=12.0)
    p.add_argument("--snr-step", type=float, default=0.25)
    p.set_defaults(func=cmd_power_gain)

    p = common(sub.add_parser("channel-export", help="write a channel matrix as problem JSON"))
    p.add_argument("--family", choices=["bsc", "bec", "qary", "gallager6x4", "awgn", "rayleigh"], default="bsc")
    p.add_argument("--param", type=float, default=0.1)
    p.add_argument("--size", type=int, default=4, help="alphabet size for qary")
    p.add_argument("--bits", type=int, default=2)
    p.add_argument("--snr-db", type=float, default=4.0)
    p.add_argument("--step", type=float, help="quantizer step; optimized for capacity when omitted")
    p.set_defaults(func=cmd_channel_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, FloatingPointError, ArithmeticError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
