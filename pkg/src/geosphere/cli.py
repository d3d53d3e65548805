"""Command-line interface: ``geosphere <subcommand> ...``.

Angles on the command line are degrees; files store radians.
Exit status is 0 on success, 1 on runtime or I/O failure and 2 on bad usage.
"""

import argparse
import functools
import math
import os
import sys

import numpy as np

from . import _parallel, distortion, io
from .errors import CapacityError, DomainError, FormatError, GeosphereError
from .geodesic import MAX_ORDER, build_icosphere, mean_edge_angle, write_off
from .projection import Kind, LonLat, ProjectionSpec
from .resample import equirect_to_sphere, mean_iou, sphere_to_equirect
from .sphereconv import build_operator, convolve, equirect_pattern, gnomonic_pattern


class UsageError(Exception):
    pass


@functools.lru_cache(maxsize=4)
def _sphere(order):
    return build_icosphere(order)


def nearest_equirect(nverts):
    """Power-of-two ``H x 2H`` panorama whose pixel count is closest to ``nverts``."""
    best = None
    h = 1
    while 2 * h * h <= 4 * nverts:
        cand = (abs(2 * h * h - nverts), h)
        if best is None or cand < best:
            best = cand
        h *= 2
    return best[1], 2 * best[1]


def _check_order(order, max_order=MAX_ORDER):
    if order < 0:
        raise UsageError("--order must be >= 0")
    if order > max_order:
        raise CapacityError(
            f"order {order} exceeds the memory guard of {max_order}; "
            "raise --max-order to override")


def _positive(name, value):
    if value < 1:
        raise UsageError(f"{name} must be >= 1")


def cmd_build(args):
    _check_order(args.order, args.max_order)
    sphere = build_icosphere(args.order, max_order=args.max_order)
    if args.output:
        write_off(sphere, args.output)
    print(f"vertices={sphere.num_vertices} faces={sphere.num_faces} "
          f"edges={sphere.num_edges}")
    h, w = nearest_equirect(sphere.num_vertices)
    print(f"nearest_equirect={h}x{w} pixels={h * w}")
    return 0


def cmd_resample(args):
    _check_order(args.order)
    img = io.read_png(args.input, raw=args.raw)
    h, w, c = img.shape
    if w != 2 * h and not args.any_aspect:
        raise UsageError(
            f"{args.input}: {h}x{w} is not a 2:1 panorama (use --any-aspect)")
    sphere = _sphere(args.order)
    mode = "nearest" if args.nearest else "bilinear"
    sig = equirect_to_sphere(img.astype(np.float64), sphere, mode=mode)
    io.write_isph(args.output, sig)
    print(f"pixels={h * w} vertices={sphere.num_vertices} channels={c} "
          f"order={sphere.order}")
    return 0


def cmd_render(args):
    _positive("--height", args.height)
    _positive("--width", args.width)
    if args.height < 2 or args.width < 2:
        raise UsageError("--height and --width must be >= 2")
    sig = io.read_isph(args.input, _sphere)
    mode = "nearest_vertex" if args.mode == "nearest" else "barycentric"
    img = sphere_to_equirect(sig, args.height, args.width, mode=mode,
                             threads=args.threads)
    if sig.channels not in (1, 3):
        raise UsageError(f"cannot write {sig.channels} channels to PNG")
    io.write_png(args.output, img, bitdepth=args.bitdepth, raw=args.raw)
    print(f"pixels={args.height * args.width} vertices={sig.sphere.num_vertices} "
          f"channels={sig.channels} mode={mode}")
    return 0


def cmd_tissot(args):
    _positive("--lon-steps", args.lon_steps)
    _positive("--lat-steps", args.lat_steps)
    if args.projection == "icosphere":
        _check_order(args.order)
        _positive("--samples-per-face", args.samples_per_face)
        res = distortion.tissot_icosphere(_sphere(args.order), args.samples_per_face)
        samples = res.samples
        st = res.stats
        print(f"samples={len(samples)} order={args.order} "
              f"max_a_over_b={st['a_over_b_max']:.17g} "
              f"area_ratio={st['area_ratio']:.17g}")
    else:
        if not 0 < args.lat_clamp < 90:
            raise UsageError("--lat-clamp must lie in (0, 90)")
        if not -90 <= args.center_lat <= 90:
            raise UsageError("--center-lat must lie in [-90, 90]")
        spec = ProjectionSpec(
            Kind(args.projection),
            LonLat(math.radians(args.center_lon), math.radians(args.center_lat)),
            math.radians(args.lat_clamp))
        grid = distortion.tissot_grid(spec, args.lon_steps, args.lat_steps)
        samples = grid.samples
        if len(samples):
            print(f"samples={len(samples)} skipped={len(grid.skipped)} "
                  f"max_omega={np.max(samples.omega):.17g} "
                  f"max_abs_area_minus_1={np.max(np.abs(samples.area_scale - 1)):.17g} "
                  f"max_a_over_b={np.max(samples.a / samples.b):.17g}")
        else:
            print(f"samples=0 skipped={len(grid.skipped)}")
    if args.output:
        distortion.write_csv(samples, args.output)
    return 0


def cmd_pattern(args):
    for name in ("kh", "kw"):
        v = getattr(args, name)
        if v < 1 or v % 2 == 0:
            raise UsageError(f"--{name} must be an odd positive integer")
    if args.spacing is not None:
        spacing = math.radians(args.spacing)
    else:
        _check_order(args.order)
        spacing = mean_edge_angle(_sphere(args.order))
    center = LonLat(math.radians(args.center_lon), math.radians(args.center_lat))
    build = gnomonic_pattern if args.kind == "gnomonic" else equirect_pattern
    try:
        pattern = build(center, args.kh, args.kw, spacing)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.output:
        io.write_pattern_csv(args.output, pattern)
        print(f"taps={len(pattern.m)} spacing={spacing:.17g}")
    else:
        io.write_pattern_csv(sys.stdout, pattern)
    return 0


def _load_operator(sphere, kernel, spacing, cache, threads):
    if cache and os.path.exists(cache):
        try:
            op = io.read_isop(cache)
        except FormatError as exc:
            print(f"ignoring unreadable cache {cache}: {exc}", file=sys.stderr)
        else:
            if (op.order, op.kh, op.kw, op.spacing) == (
                    sphere.order, kernel.kh, kernel.kw, spacing):
                print(f"cache=hit path={cache}")
                return op
            print(f"cache=stale path={cache}")
    op = build_operator(sphere, kernel.kh, kernel.kw, spacing, threads=threads)
    if cache:
        io.write_isop(cache, op)
        print(f"cache=written path={cache}")
    return op


def cmd_conv(args):
    sig = io.read_isph(args.input, _sphere)
    kernel = io.read_kernel(args.kernel)
    if kernel.c_in != sig.channels:
        raise UsageError(
            f"kernel expects {kernel.c_in} channels, signal has {sig.channels}")
    if args.spacing is not None:
        if args.spacing <= 0:
            raise UsageError("--spacing must be positive")
        spacing = math.radians(args.spacing)
    else:
        spacing = mean_edge_angle(sig.sphere)
    op = _load_operator(sig.sphere, kernel, spacing, args.cache, args.threads)
    out = convolve(op, sig, kernel)
    io.write_isph(args.output, out)
    print(f"vertices={sig.sphere.num_vertices} c_in={kernel.c_in} "
          f"c_out={kernel.c_out} taps={kernel.kh * kernel.kw}")
    return 0


def format_iou_table(res, names=None):
    classes = [i for i in range(len(res.per_class))]
    names = names or [str(i) for i in classes]
    head = ["Class"] + names + ["All Classes"]
    vals = ["mIOU"] + [
        "-" if np.isnan(v) else f"{v:.4f}" for v in res.per_class
    ] + ["-" if np.isnan(res.overall) else f"{res.overall:.4f}"]
    widths = [max(len(a), len(b)) for a, b in zip(head, vals)]
    line = lambda cells: " | ".join(c.rjust(w) for c, w in zip(cells, widths))
    return "\n".join([line(head), line(vals)])


def cmd_miou(args):
    _positive("--classes", args.classes)
    pred = io.read_png(args.pred, raw=True)
    label = io.read_png(args.label, raw=True)
    try:
        res = mean_iou(pred, label, args.classes, ignore=args.ignore)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    print(format_iou_table(res))
    print(f"overall={res.overall:.17g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geosphere",
        description="Icosphere spherical-image toolkit.")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker cap (default: ${_parallel.ENV_VAR} or CPU count)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an icosphere and write OFF")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--output", "-o")
    p.add_argument("--max-order", type=int, default=MAX_ORDER)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("resample", help="equirectangular PNG -> ISPH")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--raw", action="store_true", help="keep integer values (class ids)")
    p.add_argument("--nearest", action="store_true", help="nearest-pixel sampling")
    p.add_argument("--any-aspect", action="store_true", help="accept non 2:1 images")
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("render", help="ISPH -> equirectangular PNG")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--mode", choices=["barycentric", "nearest"], default="barycentric")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--raw", action="store_true", help="write values as integers")
    p.add_argument("--bitdepth", type=int, choices=[8, 16], default=8)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("tissot", help="Tissot indicatrix report as CSV")
    p.add_argument("--projection", required=True,
                   choices=[k.value for k in Kind] + ["icosphere"])
    p.add_argument("--lon-steps", type=int, default=36)
    p.add_argument("--lat-steps", type=int, default=19)
    p.add_argument("--center-lon", type=float, default=0.0)
    p.add_argument("--center-lat", type=float, default=0.0)
    p.add_argument("--lat-clamp", type=float, default=85.0)
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--samples-per-face", type=int, default=1)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tissot)

    p = sub.add_parser("pattern", help="dump a kernel sampling pattern as CSV")
    p.add_argument("--center-lon", type=float, default=0.0)
    p.add_argument("--center-lat", type=float, default=0.0)
    p.add_argument("--kind", choices=["gnomonic", "equirect"], default="gnomonic")
    p.add_argument("--kh", type=int, default=3)
    p.add_argument("--kw", type=int, default=3)
    p.add_argument("--spacing", type=float, help="degrees (default: mean edge angle)")
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("conv", help="convolve an ISPH signal with a kernel file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--kernel", "-k", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--cache", help="ISOP operator cache path")
    p.add_argument("--spacing", type=float, help="degrees (default: mean edge angle)")
    p.set_defaults(func=cmd_conv)

    p = sub.add_parser("miou", help="per-class IOU of two class-id PNGs")
    p.add_argument("--pred", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--ignore", type=int)
    p.set_defaults(func=cmd_miou)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    _parallel.set_default_threads(args.threads)
    try:
        return args.func(args)
    except (UsageError, CapacityError) as exc:
        print(f"geosphere {args.command}: {exc}", file=sys.stderr)
        return 2
    except (GeosphereError, OSError, ValueError) as exc:
        print(f"geosphere {args.command}: {exc}", file=sys.stderr)
        return 1
    finally:
        _parallel.set_default_threads(None)


if __name__ == "__main__":
    sys.exit(main())
