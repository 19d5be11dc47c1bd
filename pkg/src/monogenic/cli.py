"""Batch command-line front end.

Subcommands:

* detect   one or more images -> edge map + gradient image + manifest
* compare  one image, several methods -> per-method edge maps, montage, CSV
* sweep    one image, one method, several scales -> edge maps, CSV
* verify   run identity-check suites -> CSV (+ optional heat maps)

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 verification
failure.  Pipelines are deterministic; reruns on identical inputs emit
byte-identical images and CSVs.  The manifest additionally records
wall-clock timings, which naturally vary between runs.

MONOGENIC_THREADS caps how many input images `detect` processes
concurrently (default 1).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import edgeops, imageio, verify
from .errors import (MonogenicError, UnreadableInputError,
                     UnsupportedFormatError, ValidationError)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_VERIFY = 3


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

class RunManifest:
    """Record of one CLI run: inputs, config, artifacts, stage timings."""

    def __init__(self, command: str, inputs, config: dict):
        self.command = command
        self.inputs = [str(p) for p in inputs]
        self.config = config
        self.outputs: list[str] = []
        self.timings: dict[str, float] = {}

    def add_output(self, path) -> None:
        self.outputs.append(str(path))

    def time_stage(self, name: str, t0: float) -> None:
        self.timings[name] = round(time.perf_counter() - t0, 6)

    def write(self, out_dir: Path) -> Path:
        p = out_dir / "manifest.json"
        payload = {"command": self.command, "inputs": self.inputs,
                   "config": self.config, "outputs": self.outputs,
                   "timings_sec": self.timings}
        p.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return p


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _config_from_args(args) -> edgeops.DetectorConfig:
    kw = {}
    for name in ("method", "scale", "fd_step", "mask_eps", "nms_radius",
                 "low", "high", "pad"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    if kw.get("fd_step") is not None:
        kw["derivative_mode"] = "fd"
    return edgeops.DetectorConfig(**kw)


def _add_common(parser: argparse.ArgumentParser, with_method=True):
    if with_method:
        parser.add_argument("--method", choices=edgeops.METHODS, default="mdpc")
    parser.add_argument("--scale", type=float, default=0.5,
                        help="Poisson scale s (default 0.5)")
    parser.add_argument("--fd-step", dest="fd_step", type=float, default=None,
                        help="finite-difference scale step; supplying it "
                             "switches the scale derivative to finite differences")
    parser.add_argument("--mask-eps", dest="mask_eps", type=float, default=None)
    parser.add_argument("--nms-radius", dest="nms_radius", type=float, default=1.5)
    parser.add_argument("--low", type=float, default=1.0)
    parser.add_argument("--high", type=float, default=3.5)
    parser.add_argument("--pad", type=int, default=16,
                        help="mirror-pad margin in pixels (default 16)")
    parser.add_argument("--out-dir", dest="out_dir", type=Path,
                        default=Path("monogenic_out"))
    parser.add_argument("--format", choices=("pgm", "png"), default="pgm")


def _ensure_out(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cfg_dict(cfg: edgeops.DetectorConfig) -> dict:
    return dataclasses.asdict(cfg)


def _write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_detect(args) -> int:
    out = _ensure_out(args)
    cfg = _config_from_args(args)
    manifest = RunManifest("detect", args.inputs, _cfg_dict(cfg))
    threads = max(1, int(os.environ.get("MONOGENIC_THREADS", "1")))

    t0 = time.perf_counter()
    images = [imageio.load_image(p) for p in args.inputs]
    manifest.time_stage("load", t0)

    t0 = time.perf_counter()
    if threads > 1 and len(images) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda im: edgeops.detect(im, cfg), images))
    else:
        results = [edgeops.detect(im, cfg) for im in images]
    manifest.time_stage("detect", t0)

    t0 = time.perf_counter()
    for path, res in zip(args.inputs, results):
        stem = Path(path).stem
        ext = args.format
        p1 = imageio.save_edges(out / f"{stem}.edges.{ext}", res.edges.mask, ext)
        p2 = imageio.save_gray(out / f"{stem}.gradient.{ext}",
                               imageio.normalized(res.gradient.magnitude.data), ext)
        manifest.add_output(p1)
        manifest.add_output(p2)
    manifest.time_stage("write", t0)
    manifest.write(out)
    return EXIT_OK


def cmd_compare(args) -> int:
    methods = list(dict.fromkeys(args.methods))  # dedupe, keep order
    if len(methods) < len(args.methods):
        print("warning: duplicate methods ignored", file=sys.stderr)
    if len(methods) < 2:
        raise ValidationError("compare needs at least two distinct methods")
    out = _ensure_out(args)
    base = _config_from_args(args)
    manifest = RunManifest("compare", [args.input],
                           dict(_cfg_dict(base), methods=methods))

    t0 = time.perf_counter()
    img = imageio.load_image(args.input)
    manifest.time_stage("load", t0)

    stem = Path(args.input).stem
    ext = args.format
    rows = []
    masks = []
    for m in methods:
        t0 = time.perf_counter()
        res = edgeops.detect(img, base.replace(method=m))
        manifest.time_stage(f"detect-{m}", t0)
        p = imageio.save_edges(out / f"{stem}.{m}.edges.{ext}", res.edges.mask, ext)
        manifest.add_output(p)
        rows.append([m, res.edges.count()])
        masks.append(res.edges.mask)

    t0 = time.perf_counter()
    pm = imageio.save_gray(out / f"{stem}.montage.{ext}", imageio.montage(masks), ext)
    pc = _write_csv(out / f"{stem}.counts.csv", ["method", "edge_pixels"], rows)
    manifest.add_output(pm)
    manifest.add_output(pc)
    manifest.time_stage("write", t0)
    manifest.write(out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if any(s <= 0 for s in args.scales):
        raise ValidationError("all scales must be positive")
    out = _ensure_out(args)
    base = _config_from_args(args)
    manifest = RunManifest("sweep", [args.input],
                           dict(_cfg_dict(base), scales=list(args.scales)))

    img = imageio.load_image(args.input)
    stem = Path(args.input).stem
    ext = args.format
    rows = []
    for s in args.scales:
        t0 = time.perf_counter()
        res = edgeops.detect(img, base.replace(scale=s))
        manifest.time_stage(f"detect-s{s:g}", t0)
        p = imageio.save_edges(out / f"{stem}.s{s:g}.edges.{ext}",
                               res.edges.mask, ext)
        manifest.add_output(p)
        rows.append([s, res.edges.count()])
    pc = _write_csv(out / f"{stem}.sweep.csv", ["scale", "edge_pixels"], rows)
    manifest.add_output(pc)
    manifest.write(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    out = _ensure_out(args)
    manifest = RunManifest("verify", [], {"suite": args.suite,
                                          "tolerance_scale": args.tolerance_scale})
    t0 = time.perf_counter()
    reports = verify.run_suite(args.suite, args.tolerance_scale)
    manifest.time_stage("checks", t0)
    p = verify.write_reports_csv(reports, out / "verify_reports.csv")
    manifest.add_output(p)
    if args.heatmaps:
        for r in reports:
            if r.residual.ndim != 2:
                continue
            hp = imageio.save_gray(out / f"residual.{r.name}.{args.format}",
                                   imageio.normalized(np.where(r.mask, r.residual, 0.0)),
                                   args.format)
            manifest.add_output(hp)
    manifest.write(out)
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.name}: {r.statistic}={r.value:.3e} "
              f"{'<=' if r.comparison == 'le' else '>'} {r.tolerance:g}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="monogenic-edge",
        description="Phase-based edge detection in the Poisson scale-space.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect edges in one or more images")
    d.add_argument("inputs", nargs="+")
    _add_common(d)
    d.set_defaults(fn=cmd_detect)

    c = sub.add_parser("compare", help="run several methods on one image")
    c.add_argument("input")
    c.add_argument("--methods", nargs="+", choices=edgeops.METHODS,
                   default=list(edgeops.METHODS))
    _add_common(c, with_method=False)
    c.set_defaults(fn=cmd_compare)

    s = sub.add_parser("sweep", help="run one method over several scales")
    s.add_argument("input")
    s.add_argument("--scales", nargs="+", type=float,
                   default=[0.1, 0.5, 1.0, 5.0])
    _add_common(s)
    s.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("verify", help="numerically check the analytic identities")
    v.add_argument("--suite", default="all",
                   choices=("all",) + tuple(verify.SUITES))
    v.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                   default=1.0, help="multiply every tolerance by this factor")
    v.add_argument("--heatmaps", action="store_true",
                   help="also write residual heat-map images")
    v.add_argument("--out-dir", dest="out_dir", type=Path,
                   default=Path("monogenic_out"))
    v.add_argument("--format", choices=("pgm", "png"), default="pgm")
    v.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage; map to the validation code
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (UnreadableInputError, UnsupportedFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except MonogenicError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
