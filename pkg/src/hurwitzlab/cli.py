"""Command-line front end: ``hurwitzlab <command> [options]``.

Bad arguments exit with 2, numerical or domain errors with 3.
Every JSON artifact echoes the config (seed included) next to schema_version;
wall-clock timings live under a separate "timing" key.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import decomp, lab, multizeta, twist
from .config import RunConfig, load_config
from .errors import LabError
from .hurwitz import HurwitzParam, character_table, hurwitz_afe, hurwitz_zeta

SCHEMA_VERSION = 1


# ----------------------------------------------------------------- parsing


def _complex_pair(text: str) -> complex:
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}") from None


def _param(text: str) -> HurwitzParam:
    try:
        return HurwitzParam.parse(text)
    except (LabError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _free_value(text: str) -> tuple[int, complex]:
    try:
        key, val = text.split(":")
        return int(key), _complex_pair(val)
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"expected index:re,im but got {text!r}") from None


def _target(text: str):
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        pass
    try:
        return decomp.parse_polynomial(text)
    except LabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (default: $HURWITZLAB_CONFIG)")
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--threads", type=int)
    p.add_argument("--xi", type=float)


def _box_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--center", type=_complex_pair, help="square box centre re,im")
    p.add_argument("--half-width", type=float, default=0.02)
    p.add_argument("--sigma", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--t", dest="t_box", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hurwitzlab", description="Multiple Hurwitz zeta laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate zeta_n at one point")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=_complex_pair, nargs="+", required=True)
    p.add_argument("--alpha", type=_param, nargs="+", required=True)
    p.add_argument("--method", choices=["trunc", "smoothed", "afe", "mb", "diag"], default="afe")
    p.add_argument("--N", type=int, default=10_000, help="truncation point for trunc")
    p.add_argument("--T", type=float)

    p = sub.add_parser("scan", help="scan vertical shifts against a target")
    _common(p)
    p.add_argument("--alpha", type=_param, nargs="+", required=True)
    p.add_argument("--mode", choices=["continuous", "discrete", "line"], default="continuous")
    p.add_argument("--step", type=float, nargs="+", default=[0.05])
    p.add_argument("--direction", type=float, nargs="+")
    p.add_argument("--t-range", type=float, nargs=2, default=[0.0, 1000.0])
    p.add_argument("--target", type=_target, default=1.0)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--samples", type=int)
    p.add_argument("--joint-alpha", action="append", default=[], help="comma-separated parameters of an extra pair")
    p.add_argument("--joint-target", type=_target, action="append", default=[])
    _box_args(p)

    p = sub.add_parser("meansquare", help="mean square on the critical hyperplane")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--alpha", type=_param, nargs="+", required=True)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("zeros", help="locate zeros in a box")
    _common(p)
    p.add_argument("--alpha", type=_param, nargs="+", required=True)
    p.add_argument("--sigma", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--t", dest="t_box", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--resolution", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("decomp", help="monomial tableau of a polynomial")
    _common(p)
    p.add_argument("--poly", type=str, required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--sigma", type=float, nargs=2, default=[0.55, 0.95], metavar=("LO", "HI"))
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--grid", type=int)

    p = sub.add_parser("twist", help="build a twist and report diagnostics")
    _common(p)
    p.add_argument("--alpha", type=_param, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--char-index", type=int, nargs="+", help="character index (default: first non-principal)")
    p.add_argument("--N0", type=int, required=True)
    p.add_argument("--free", type=_free_value, nargs="*", default=[])
    p.add_argument("--growth", type=int, help="N_max for the partial-sum growth fit")
    p.add_argument("--weyl-delta", type=float)
    p.add_argument("--weyl-N", type=float, default=3.0)
    p.add_argument("--weyl-T", type=float, default=1e5)
    p.add_argument("--weyl-samples", type=int, default=100_000)
    return parser


# ---------------------------------------------------------------- helpers


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    return cfg.replace(seed=args.seed, output_dir=args.output_dir, threads=args.threads, xi=args.xi,
                       grid=getattr(args, "grid", None))


def _envelope(command: str, cfg: RunConfig, body: dict, runtime: float | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, **body,
           "config_echo": cfg.to_dict(), "seed": cfg.seed}
    if runtime is not None:
        doc["timing"] = {"runtime_seconds": runtime}
    return doc


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable)


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(type(x).__name__)


def _write(cfg: RunConfig, name: str, text: str) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _box(args, cfg: RunConfig, n: int) -> multizeta.CompactBox:
    if args.sigma is not None or args.t_box is not None:
        sig = tuple(args.sigma or (0.55, 0.95))
        tt = tuple(args.t_box or (-1.0, 1.0))
        return multizeta.CompactBox((sig,) * n, (tt,) * n, cfg.grid)
    center = args.center if args.center is not None else 0.75 + 0j
    return multizeta.CompactBox.square(center, args.half_width, n, cfg.grid)


def _value(v: complex) -> dict:
    return {"re": v.real, "im": v.imag}


# --------------------------------------------------------------- commands


def cmd_eval(args, parser) -> int:
    cfg = _config(args)
    if len(args.s) != args.n:
        parser.error(f"--s needs {args.n} points")
    alpha = args.alpha * args.n if len(args.alpha) == 1 else args.alpha
    if len(alpha) != args.n:
        parser.error(f"--alpha needs 1 or {args.n} values")
    s = tuple(args.s)
    err = None
    if args.method == "trunc":
        val = multizeta.zeta_trunc(s, alpha, args.N)
    elif args.method == "smoothed":
        res = multizeta.zeta_eval(s, alpha, cfg.xi, args.T, completion=False, cutoff=cfg.cutoff,
                                  bound=(cfg.bound_A, cfg.bound_B), re_bound=cfg.re_bound, cost_cap=cfg.cost_cap)
        val, err = res.value, res.error_estimate
    elif args.method == "afe" and args.n == 1:
        T = args.T if args.T is not None else max(multizeta._T_FLOOR, abs(s[0].imag))
        val = hurwitz_afe(s[0], alpha[0].alpha, T, cfg.xi, cfg.re_bound, cfg.cutoff).value
        err = 1e3 * np.finfo(float).eps * max(1.0, abs(val))
    elif args.method == "afe":
        res = multizeta.zeta_eval(s, alpha, cfg.xi, args.T, cutoff=cfg.cutoff,
                                  bound=(cfg.bound_A, cfg.bound_B), re_bound=cfg.re_bound, cost_cap=cfg.cost_cap)
        val, err = res.value, res.error_estimate
    elif args.method == "mb":
        val = multizeta.zeta_mb(s, alpha, xi=cfg.xi, T=args.T)
    else:
        if len(set(s)) != 1 or len({a.alpha for a in alpha}) != 1:
            raise LabError("diag needs equal coordinates and equal parameters")
        val = hurwitz_zeta(s[0], alpha[0].alpha) if args.n == 1 else multizeta.zeta_diag_powersum(s[0], alpha[0], args.n, None)
    body = {"method": args.method, "n": args.n, "s": [_value(z) for z in s],
            "alpha": [a.label() for a in alpha], "value": _value(complex(val)), "error_estimate": err}
    print(_dump(_envelope("eval", cfg, body)))
    return 0


def cmd_scan(args, parser) -> int:
    cfg = _config(args)
    n = len(args.alpha)
    if len(args.joint_alpha) != len(args.joint_target):
        parser.error("--joint-alpha and --joint-target must pair up")
    joint = []
    for a_text, tgt in zip(args.joint_alpha, args.joint_target):
        try:
            joint.append((tuple(_param(x) for x in a_text.split(",")), tgt))
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    if args.mode == "continuous":
        mode = lab.Continuous(tuple(args.step))
    elif args.mode == "discrete":
        mode = lab.Discrete(tuple(args.step))
    else:
        mode = lab.Line(tuple(args.direction or [1.0] * n), args.step[0])
    spec = lab.ScanSpec(tuple(args.alpha), mode, tuple(args.t_range), args.target, _box(args, cfg, n), args.eps,
                        tuple(joint), args.samples, cfg.seed, cfg.xi, None, cfg.max_evaluations, cfg.threads)
    res = lab.scan_shifts(spec)
    csv_path = _write(cfg, "scan.csv", res.csv_text())
    summary = res.summary()
    timing = summary.pop("timing")
    doc = _envelope("scan", cfg, {**summary, "csv": os.path.basename(csv_path)})
    doc["timing"] = timing
    _write(cfg, "scan.json", _dump(doc) + "\n")
    print(_dump(doc))
    return 0


def cmd_meansquare(args, parser) -> int:
    cfg = _config(args)
    alpha = args.alpha * args.n if len(args.alpha) == 1 else args.alpha
    start = time.perf_counter()
    res = lab.mean_square(alpha, args.n, args.T, cfg.xi, args.samples, cfg.seed)
    doc = _envelope("meansquare", cfg, {"alpha": [a.label() for a in alpha], **res.to_dict()},
                    time.perf_counter() - start)
    _write(cfg, "meansquare.json", _dump(doc) + "\n")
    print(_dump(doc))
    return 0


def cmd_zeros(args, parser) -> int:
    cfg = _config(args)
    n = len(args.alpha)
    box = multizeta.CompactBox((tuple(args.sigma),) * n, (tuple(args.t_box),) * n, cfg.grid)
    start = time.perf_counter()
    recs = lab.find_zeros(tuple(args.alpha), box, args.resolution, args.tol)
    lines = [",".join([f"re_{j + 1},im_{j + 1}" for j in range(n)] + ["residual", "winding", "winding_wide"])]
    for r in recs:
        cells = [f"{z.real!r},{z.imag!r}" for z in r.location]
        lines.append(",".join(cells + [repr(r.residual), str(r.winding), str(r.winding_wide)]))
    _write(cfg, "zeros.csv", "\n".join(lines) + "\n")
    doc = _envelope("zeros", cfg, {"alpha": [a.label() for a in args.alpha], "box": box.to_dict(),
                                   "count": len(recs), "zeros": [r.to_dict() for r in recs]},
                    time.perf_counter() - start)
    _write(cfg, "zeros.json", _dump(doc) + "\n")
    print(_dump(doc))
    return 0


def cmd_decomp(args, parser) -> int:
    cfg = _config(args)
    poly = decomp.parse_polynomial(args.poly)
    box = multizeta.CompactBox.symmetric(tuple(args.sigma), args.R, poly.arity, cfg.grid)
    tab = decomp.decompose(poly, args.C, box)
    report = decomp.verify_tableau(tab, poly, args.C, box)
    body = {"polynomial": str(poly), "C": args.C, "box": box.to_dict(),
            "tableau": json.loads(tab.to_json()), "verification": report.to_dict()}
    doc = _envelope("decomp", cfg, body)
    _write(cfg, "tableau.json", tab.to_json() + "\n")
    print(_dump(doc))
    return 0 if report.passed else 3


def cmd_twist(args, parser) -> int:
    cfg = _config(args)
    chars = character_table(args.q)
    if args.char_index is None:
        chi = next((c for c in chars if not c.principal), chars[0])
    else:
        match = [c for c in chars if list(c.index) == args.char_index]
        if not match:
            parser.error(f"no character with index {args.char_index} mod {args.q}")
        chi = match[0]
    a = twist.make_twist(args.alpha, chi, args.N0, dict(args.free))
    sample = twist.twist_values(a, 1000)
    body = {"twist": json.loads(a.to_json()), "max_unimodular_deviation": float(np.max(np.abs(np.abs(sample) - 1)))}
    if args.growth:
        body["growth"] = twist.partial_sum_growth(a, args.growth).to_dict()
    if args.weyl_delta is not None:
        spec = twist.WeylTargetSpec(args.weyl_delta, args.weyl_N)
        body["weyl_density"] = twist.weyl_set_measure(args.alpha, spec, args.weyl_T, args.weyl_samples, cfg.seed)
    doc = _envelope("twist", cfg, body)
    _write(cfg, "twist.json", _dump(doc) + "\n")
    print(_dump(doc))
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "scan": cmd_scan,
    "meansquare": cmd_meansquare,
    "zeros": cmd_zeros,
    "decomp": cmd_decomp,
    "twist": cmd_twist,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, parser)
    except LabError as exc:
        print(f"hurwitzlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"hurwitzlab: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
