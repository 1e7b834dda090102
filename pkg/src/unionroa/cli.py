"""Command line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 no certificate at
the start (unstable linearization or gamma step infeasible), 3 verification
failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import bench, certfile, config
from .boundary import contour_2d, points_csv, polylines_csv, straddling_cells
from .lyap import NotHurwitz
from .shapes import NoIntersection
from .verify import check_certificate, coverage, oracle_roa_mask, sublevel_bounding_box, sublevel_mask
from .vsiter import ConfigError, InfeasibleAtZero, ShapeInfeasible, run_multiround, trace_csv

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("unionroa")

CSV_HELP = """\
output files:
  certificate.txt        final certificate (text, version header)
  round<k>.txt           certificate at the end of round k
  trace.csv              round,iter,gamma,beta1..betaN,sdp_count,sdp_iterations
  timing.csv             round,iter,wall_time (seconds; not reproducible)
  violations.csv         kind,x1..xn,detail (only when verification fails)
  boundary.csv (2-D)     polyline,x1,x2 (closed curves repeat the first point)
  boundary.csv (3-D)     x1,x2,x3 centers of grid cells straddling V = gamma
  compare.csv            name,area,oracle_area,ratio,outside_cells
"""


class _Fail(Exception):
    def __init__(self, code: int, msg: str):
        self.code = code
        super().__init__(msg)


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def _load_cert(path):
    try:
        return certfile.load(path)
    except OSError as e:
        raise _Fail(EXIT_CONFIG, f"cannot read certificate {path}: {e.strerror}") from None
    except certfile.CertificateFormatError as e:
        raise _Fail(EXIT_CONFIG, f"{path}: {e}") from None


def _parse_box(text, n):
    if text is None:
        return None
    try:
        vals = [float(t) for t in text.replace(";", ",").split(",")]
    except ValueError:
        raise _Fail(EXIT_CONFIG, f"--box: cannot parse {text!r}") from None
    if len(vals) != 2 * n:
        raise _Fail(EXIT_CONFIG, f"--box: expected {2 * n} numbers lo1,hi1,...")
    box = np.array(vals).reshape(n, 2)
    if np.any(box[:, 0] >= box[:, 1]):
        raise _Fail(EXIT_CONFIG, "--box: every lo must be below its hi")
    return box


def _timing_csv(trace) -> str:
    lines = ["round,iter,wall_time"]
    lines += [f"{r.round_index},{r.iteration},{r.wall_time:.3f}" for r in trace]
    return "\n".join(lines) + "\n"


def cmd_estimate(args) -> int:
    try:
        rc = config.load(args.config)
    except ConfigError as e:
        raise _Fail(EXIT_CONFIG, str(e)) from None
    if args.seed is not None:
        rc.seed = args.seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _say(args, f"estimating ROA of {rc.system.name} ({len(rc.rounds)} rounds)")
    t0 = time.perf_counter()
    try:
        result = run_multiround(rc.system, rc.rounds, rc.iteration)
    except (NotHurwitz, InfeasibleAtZero, ShapeInfeasible, NoIntersection) as e:
        raise _Fail(EXIT_INFEASIBLE, f"no certificate at the start: {e}") from None
    elapsed = time.perf_counter() - t0

    cert = result.certificate
    (out / "config.json").write_text(rc.dumps())
    for r in result.rounds:
        certfile.save(out / f"round{r.certificate.round_index}.txt", r.certificate, rc.system)
    certfile.save(out / "certificate.txt", cert, rc.system)
    (out / "trace.csv").write_text(trace_csv(result.trace))
    (out / "timing.csv").write_text(_timing_csv(result.trace))
    summary = {
        "system": rc.system.name,
        "rounds": [
            {
                "round": r.certificate.round_index,
                "iterations": len(r.trace),
                "stop": r.stop_reason,
                "gamma": r.certificate.gamma,
                "betas": r.certificate.betas,
            }
            for r in result.rounds
        ],
        "global_stability": cert.global_stability,
        "seed": rc.seed,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for r in result.rounds:
        _say(args, f"round {r.certificate.round_index}: {len(r.trace)} iterations, stop={r.stop_reason}, "
                   f"betas={[round(b, 6) for b in r.certificate.betas]}")
    _say(args, f"search finished in {elapsed:.1f} s; verifying with {args.samples} samples")

    rep = check_certificate(cert, rc.system, args.samples, rc.seed)
    if not rep.ok:
        (out / "violations.csv").write_text(rep.to_csv())
        raise _Fail(EXIT_VERIFY, f"certificate failed verification: {rep.counts()}")
    _say(args, f"certificate written to {out / 'certificate.txt'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cert, sys_ = _load_cert(args.certificate)
    rep = check_certificate(cert, sys_, args.samples, args.seed or 0)
    if rep.ok:
        _say(args, f"ok: {args.samples} samples, {rep.n_convergence_checked} simulated, "
                   f"{rep.n_shape_samples} shape samples")
        return EXIT_OK
    report = Path(args.out) if args.out else Path(args.certificate).with_suffix(".violations.csv")
    report.write_text(rep.to_csv())
    _say(args, f"FAILED: {rep.counts()}; details in {report}")
    return EXIT_VERIFY


def cmd_boundary(args) -> int:
    cert, sys_ = _load_cert(args.certificate)
    n = cert.nvars
    box = _parse_box(args.box, n)
    if box is None:
        box = sublevel_bounding_box(cert.V, cert.gamma)
    res = args.resolution or (401 if n == 2 else 61)
    header = {"certificate": args.certificate, "gamma": repr(cert.gamma), "resolution": res,
              "box": np.asarray(box).tolist()}
    if n == 2:
        text = polylines_csv(contour_2d(cert.V, cert.gamma, box, res), header)
    else:
        text = points_csv(straddling_cells(cert.V, cert.gamma, box, res), header)
    out = Path(args.out) if args.out else Path(args.certificate).with_suffix(".boundary.csv")
    out.write_text(text)
    _say(args, f"boundary written to {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    loaded = [(p, *_load_cert(p)) for p in args.certificates]
    sys_ = loaded[0][2]
    preset = None
    if args.system:
        try:
            preset = bench.get(args.system)
        except KeyError as e:
            raise _Fail(EXIT_CONFIG, e.args[0]) from None
        sys_ = preset.system
    n = sys_.nvars
    box = _parse_box(args.box, n)
    if box is None:
        if preset is None:
            raise _Fail(EXIT_CONFIG, "compare needs --box or --system")
        box = preset.box
    res = args.resolution or (151 if n == 2 else 41)
    oracle = None if args.no_oracle else oracle_roa_mask(sys_, box, res)
    rows = []
    for path, cert, _ in loaded:
        if oracle is not None:
            c = coverage(cert, sys_, box, res, oracle)
            rows.append((path, c.estimated_area, c.oracle_area, c.ratio, c.violations))
        else:
            a = sublevel_mask(cert.V, cert.gamma, box, res).area
            rows.append((path, a, float("nan"), float("nan"), 0))
    lines = ["name,area,oracle_area,ratio,outside_cells"]
    lines += [f"{p},{float(a)!r},{float(o)!r},{float(r)!r},{int(v)}" for p, a, o, r, v in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if not args.quiet:
        width = max(len(r[0]) for r in rows)
        print(f"{'certificate':<{width}}  {'area':>10}  {'ratio':>7}  outside")
        for p, a, _, r, v in rows:
            print(f"{p:<{width}}  {a:10.4f}  {r:7.4f}  {v}")
        print("pairwise area ratios (row / column):")
        for p, a, *_ in rows:
            print(f"{p:<{width}}  " + "  ".join(f"{a / b[1]:7.4f}" for b in rows))
    return EXIT_OK


def cmd_list(args) -> int:
    for item in bench.list_presets():
        print(f"{item['name']:<5} nvars={item['nvars']} rounds={item['rounds']}  {item['summary']}")
    if args.emit:
        d = Path(args.emit)
        d.mkdir(parents=True, exist_ok=True)
        for name in bench.names():
            (d / f"{name}.json").write_text(config.preset_config(name).dumps())
        _say(args, f"preset configs written to {d}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="unionroa",
        description="ROA estimation with a union of shape functions",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--quiet", action="store_true", help="print nothing on success")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    e = sub.add_parser("estimate", parents=[common], help="run the search from a config file")
    e.add_argument("--config", required=True)
    e.add_argument("--out", default="unionroa-out")
    e.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    e.add_argument("--samples", type=int, default=1000, help="verification samples")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("verify", parents=[common], help="sample-check a certificate")
    v.add_argument("certificate")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="violation report (default: next to the certificate)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("boundary", parents=[common], help="export the level set V = gamma")
    b.add_argument("certificate")
    b.add_argument("--resolution", type=int, default=None)
    b.add_argument("--box", help="lo1,hi1,lo2,hi2[,lo3,hi3]")
    b.add_argument("--out")
    b.set_defaults(func=cmd_boundary)

    c = sub.add_parser("compare", parents=[common], help="areas and coverage of several certificates")
    c.add_argument("certificates", nargs="+")
    c.add_argument("--system", help="preset providing dynamics and box")
    c.add_argument("--box")
    c.add_argument("--resolution", type=int, default=None)
    c.add_argument("--no-oracle", action="store_true", help="skip the simulation oracle")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    ls = sub.add_parser("list-systems", parents=[common], help="list benchmark presets")
    ls.add_argument("--emit", metavar="DIR", help="also write each preset as a config file")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    raw = list(sys.argv[1:] if argv is None else argv)
    # box values start with '-' for negative bounds; argparse would read them as flags
    argv, k = [], 0
    while k < len(raw):
        if raw[k] == "--box" and k + 1 < len(raw):
            argv.append(f"--box={raw[k + 1]}")
            k += 2
        else:
            argv.append(raw[k])
            k += 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except _Fail as f:
        print(f"unionroa: {f}", file=sys.stderr)
        return f.code


if __name__ == "__main__":
    sys.exit(main())
