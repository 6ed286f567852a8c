"""Command-line entry point: ``sonoseg {phantom,segment,evaluate,vocal,overlay}``.

Failures print one line ``ERROR <CODE>: <detail>`` to stderr and exit non-zero.
"""

import argparse
import glob
import json
import os
import sys
import time

from .growing import ACCEPTANCE_MODES, GrowParams
from .levelset import ChanVeseParams, PhaseCollapse
from .metrics import similarity
from .phantom import PhantomSpec, generate_phantom
from .pipeline import EmptyRegion, PipelineConfig, segment_pipeline
from .volume import (
    BinaryMask,
    VolumeFormatError,
    export_overlay,
    load_mask,
    load_volume,
    save_mask,
    save_volume,
)
from .vocal import CANONICAL_ANGLES, NotStarShaped, PlanarContour, mask_centroid_xy, slice_at_angle, vocal_reconstruct

# exit status per error code; 0 is success
EXIT_CODES = {
    "USAGE": 2,
    "IO": 3,
    "FORMAT": 4,
    "INVALID": 5,
    "PHASE_COLLAPSE": 6,
    "EMPTY_REGION": 7,
    "NOT_STAR_SHAPED": 8,
}


class CliError(Exception):
    def __init__(self, code, detail):
        super().__init__(detail)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("USAGE", message)


def _ints(text, n=3):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers, got {text!r}")
    return tuple(vals)


def _floats2(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return tuple(vals)


def _write_json(obj, path):
    text = json.dumps(obj, indent=2)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


# ------------------------------------------------------------------ commands


def cmd_phantom(args):
    spec = PhantomSpec.from_json(args.spec) if args.spec else PhantomSpec()
    vol, gt = generate_phantom(args.dims, spec)
    save_volume(vol, args.out)
    save_mask(gt, args.out + "_gt")
    if args.json:
        _write_json({"dims": list(vol.dims), "gt_voxels": gt.count(), "spec": spec.to_dict()}, args.json)


def cmd_segment(args):
    vol = load_volume(args.inp)
    cv = ChanVeseParams(
        mu=args.mu,
        nu=args.nu,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        dt=args.dt,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        redistance_every=args.redistance_every,
        stop_tol=args.stop_tol,
    )
    config = PipelineConfig(
        seed=args.seed,
        grow=GrowParams(args.threshold, args.acceptance),
        se_width=args.se_width,
        sigma=args.sigma,
        cv=cv,
        blur_before_grow=args.blur_before_grow,
    )
    stages = {}
    t0 = time.perf_counter()
    mask, trace = segment_pipeline(vol, config, threads=args.threads, debug_dir=args.debug_dir, stages=stages)
    mask = BinaryMask(mask.bits, vol.spacing)
    save_mask(mask, args.out)
    if args.trace:
        trace.to_csv(args.trace)
    if args.json:
        last = trace.rows[-1] if trace.rows else None
        _write_json(
            {
                "seed": list(config.seed),
                "initial_voxels": stages["grown"].count(),
                "closed_voxels": stages["closed"].count(),
                "final_voxels": mask.count(),
                "iterations": last[0] if last else 0,
                "c1": last[1] if last else None,
                "c2": last[2] if last else None,
                "timings_s": {**stages["timings"], "total": time.perf_counter() - t0},
            },
            args.json,
        )


def cmd_evaluate(args):
    ref, seg = load_mask(args.ref), load_mask(args.seg)
    report = similarity(ref, seg)
    if args.json:
        report.to_json(args.json)
    else:
        print(report.to_json())


def cmd_vocal_slice(args):
    mask = load_mask(args.inp)
    axis = args.axis_point or mask_centroid_xy(mask)
    os.makedirs(args.out_dir, exist_ok=True)
    for a in CANONICAL_ANGLES:
        slice_at_angle(mask, axis, a).save(os.path.join(args.out_dir, f"contour_{a:03d}.json"))
    print(json.dumps({"axis_point": list(axis), "dims": list(mask.dims)}))


def cmd_vocal_reconstruct(args):
    paths = args.contours
    if len(paths) == 1 and os.path.isdir(paths[0]):
        paths = sorted(glob.glob(os.path.join(paths[0], "*.json")))
    contours = [PlanarContour.load(p) for p in paths]
    mask = vocal_reconstruct(contours, args.dims, args.axis_point, outermost=args.outermost)
    save_mask(mask, args.out)


def cmd_overlay(args):
    export_overlay(load_volume(args.inp), load_mask(args.mask), args.axis, args.index, args.out)


# -------------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="sonoseg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ph = sub.add_parser("phantom", help="write a synthetic volume and its ground-truth mask")
    ph.add_argument("--dims", type=_ints, default=(64, 64, 64))
    ph.add_argument("--spec", help="PhantomSpec JSON file (defaults used when omitted)")
    ph.add_argument("--out", required=True, help="output basename; mask goes to <out>_gt")
    ph.add_argument("--json")
    ph.set_defaults(func=cmd_phantom)

    d = ChanVeseParams()
    sg = sub.add_parser("segment", help="run region growing, closing, blur and Chan-Vese")
    sg.add_argument("--in", dest="inp", required=True)
    sg.add_argument("--out", required=True)
    sg.add_argument("--seed", type=_ints, required=True)
    sg.add_argument("--threshold", type=float, default=GrowParams().threshold)
    sg.add_argument("--acceptance", choices=ACCEPTANCE_MODES, default=GrowParams().acceptance)
    sg.add_argument("--se-width", type=int, default=21, help="even widths are rounded up to odd")
    sg.add_argument("--sigma", type=float, default=1.5)
    sg.add_argument("--mu", type=float, default=d.mu)
    sg.add_argument("--nu", type=float, default=d.nu)
    sg.add_argument("--lambda1", type=float, default=d.lambda1)
    sg.add_argument("--lambda2", type=float, default=d.lambda2)
    sg.add_argument("--dt", type=float, default=d.dt)
    sg.add_argument("--epsilon", type=float, default=d.epsilon)
    sg.add_argument("--max-iters", type=int, default=d.max_iters)
    sg.add_argument("--stop-tol", type=float, default=d.stop_tol)
    sg.add_argument("--redistance-every", type=int, default=d.redistance_every)
    sg.add_argument("--blur-before-grow", action="store_true")
    sg.add_argument("--threads", type=int, default=1)
    sg.add_argument("--debug-dir")
    sg.add_argument("--trace", help="write the per-iteration trace as CSV")
    sg.add_argument("--json", help="write a run summary with stage timings")
    sg.set_defaults(func=cmd_segment)

    ev = sub.add_parser("evaluate", help="SI / OF / OV / EF of a segmentation against a reference")
    ev.add_argument("--ref", required=True)
    ev.add_argument("--seg", required=True)
    ev.add_argument("--json")
    ev.set_defaults(func=cmd_evaluate)

    vc = sub.add_parser("vocal", help="rotational contouring comparator")
    vsub = vc.add_subparsers(dest="vocal_command", required=True, parser_class=_Parser)
    vs = vsub.add_parser("slice", help="mask -> six contour JSON files")
    vs.add_argument("--in", dest="inp", required=True)
    vs.add_argument("--out-dir", required=True)
    vs.add_argument("--axis-point", type=_floats2, help="x,y of the rotation axis (default: mask centroid)")
    vs.set_defaults(func=cmd_vocal_slice)
    vr = vsub.add_parser("reconstruct", help="six contour JSON files -> mask")
    vr.add_argument("--contours", nargs="+", required=True, help="six JSON files, or one directory")
    vr.add_argument("--dims", type=_ints, required=True)
    vr.add_argument("--axis-point", type=_floats2, required=True)
    vr.add_argument("--outermost", action="store_true", help="accept non-star-shaped contours")
    vr.add_argument("--out", required=True)
    vr.set_defaults(func=cmd_vocal_reconstruct)

    ov = sub.add_parser("overlay", help="export one slice with the mask outline as PGM")
    ov.add_argument("--in", dest="inp", required=True)
    ov.add_argument("--mask", required=True)
    ov.add_argument("--axis", choices=("x", "y", "z"), default="z")
    ov.add_argument("--index", type=int, required=True)
    ov.add_argument("--out", required=True)
    ov.set_defaults(func=cmd_overlay)
    return p


def _classify(exc):
    if isinstance(exc, CliError):
        return exc.code
    if isinstance(exc, PhaseCollapse):
        return "PHASE_COLLAPSE"
    if isinstance(exc, EmptyRegion):
        return "EMPTY_REGION"
    if isinstance(exc, NotStarShaped):
        return "NOT_STAR_SHAPED"
    if isinstance(exc, (VolumeFormatError, json.JSONDecodeError, KeyError)):
        return "FORMAT"
    if isinstance(exc, OSError):
        return "IO"
    if isinstance(exc, (ValueError, IndexError, TypeError)):
        return "INVALID"
    return None


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except Exception as exc:  # noqa: BLE001
        code = _classify(exc)
        if code is None:
            raise
        detail = " ".join(str(exc).split()) or type(exc).__name__
        print(f"ERROR {code}: {detail}", file=sys.stderr)
        return EXIT_CODES[code]
    return 0


if __name__ == "__main__":
    sys.exit(main())
