"""
The pwrot command.

Every subcommand parses its arguments, calls one library entry point and
prints the report: JSON for documents, CSV for tables, PGM for images.
Exit codes: 0 success, 1 domain error or failed check, 2 usage error.
"""
import argparse
import sys
from typing import List, Optional, Sequence, Tuple

from pwrot import __version__
from pwrot.config import get_config
from pwrot.core_map import PiecewiseRotation, normalize
from pwrot.diophantine import cf_expand
from pwrot.errors import CertificateFailedError, PwrotError
from pwrot.models.angle import parse_angle_text
from pwrot.models.params import load_parameters
from pwrot.raster import default_escape_radius, render_attr, render_born, write_pgm
from pwrot.services import report_service
from pwrot.services.verify_service import VerifyService
from pwrot.utils.logger import configure_logging, get_logger
from pwrot.utils.parallel import resolve_threads

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _floats(text: str, count: int, what: str) -> Tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(part) for part in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be numeric, got {text!r}")


def window_arg(text: str) -> Tuple[float, float, float, float]:
    return _floats(text, 4, "window")


def point_arg(text: str) -> complex:
    re, im = _floats(text, 2, "point")
    return complex(re, im)


def size_arg(text: str) -> Tuple[int, int]:
    width, sep, height = text.lower().partition("x")
    try:
        size = (int(width), int(height))
    except ValueError:
        size = None
    if not sep or size is None or min(size) < 1:
        raise argparse.ArgumentTypeError(f"size must look like WxH with W, H >= 1, got {text!r}")
    return size


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def angle_arg(text: str):
    try:
        return parse_angle_text(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=positive_int, default=None,
                        help="Worker cap (default: PWROT_THREADS or config)")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--params", required=True, help="Parameter file (JSON)")

    parser = argparse.ArgumentParser(
        prog="pwrot",
        description="Piecewise rotations of the plane: classification, bounds, orbits, islands, rasters.",
    )
    parser.add_argument("--version", action="version", version=f"pwrot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common, params], help="Injective / Surjective / Bijective")
    p.add_argument("--tolerance", type=float, default=None, help="Bijectivity band override")

    p = sub.add_parser("convergents", parents=[common], help="Continued fraction convergents as CSV")
    p.add_argument("--alpha", type=angle_arg, required=True, help="rat:p/q, surd:p,q,d,r or radians")
    p.add_argument("--depth", type=positive_int, default=None)

    p = sub.add_parser("bound", parents=[common, params], help="Certified limit-set radius")
    p.add_argument("--depth", type=positive_int, default=None)
    p.add_argument("--no-shift", action="store_true", help="Skip the origin-shift improvement")

    p = sub.add_parser("orbit", parents=[common, params], help="Orbit as CSV rows k,re,im,code")
    p.add_argument("--z", type=point_arg, required=True, help="Start point re,im")
    p.add_argument("--steps", type=non_negative_int, required=True)

    p = sub.add_parser("islands", parents=[common, params], help="Verified periodic islands")
    p.add_argument("--max-period", type=positive_int, required=True)
    p.add_argument("--window", type=window_arg, required=True, help="x0,y0,x1,y1")
    p.add_argument("--grid-step", type=float, required=True)
    p.add_argument("--exhaustive", action="store_true", help="Try every primitive word")

    p = sub.add_parser("certify", parents=[common, params], help="Escape / attract certificate")
    p.add_argument("--mode", choices=["escape", "attract"], required=True)
    p.add_argument("--samples", type=positive_int, default=None)
    p.add_argument("--horizon", type=positive_int, default=None)

    p = sub.add_parser("render", parents=[common, params], help="Limit-set raster as PGM")
    p.add_argument("--mode", choices=["born", "attr"], required=True)
    p.add_argument("--window", type=window_arg, required=True, help="x0,y0,x1,y1")
    p.add_argument("--size", type=size_arg, required=True, help="WxH")
    p.add_argument("--iters", type=non_negative_int, required=True)
    p.add_argument("--escape", type=float, default=None,
                   help="Escape radius (born) or ball radius M (attr); default from the bound")
    p.add_argument("--out", default="-", help="Output path (default: stdout)")

    p = sub.add_parser("verify", parents=[common], help="Replay the bundled worked examples")
    p.add_argument("--suite", choices=["irrational-example", "rational-example", "all"], default="all")

    return parser


def _load_map(args) -> PiecewiseRotation:
    return normalize(load_parameters(args.params))


def _write(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _dispatch(args) -> int:
    config = get_config()
    threads = args.threads

    if args.command == "classify":
        _write(report_service.dumps(report_service.classification_document(_load_map(args), args.tolerance)))

    elif args.command == "convergents":
        depth = args.depth or config.diophantine.default_depth
        _write(report_service.convergents_csv(cf_expand(args.alpha, depth, strict=False)))

    elif args.command == "bound":
        depth = args.depth or config.diophantine.default_depth
        report = report_service.bound_report(_load_map(args), depth, shift=not args.no_shift)
        _write(report_service.dumps(report.to_dict()))

    elif args.command == "orbit":
        _write(report_service.orbit_report(_load_map(args), args.z, args.steps))

    elif args.command == "islands":
        document = report_service.islands_document(
            _load_map(args), args.max_period, args.window, args.grid_step,
            exhaustive=args.exhaustive, threads=threads,
        )
        _write(report_service.dumps(document))

    elif args.command == "certify":
        try:
            report = report_service.certificate_report(
                _load_map(args), args.mode, samples=args.samples, horizon=args.horizon, threads=threads
            )
        except CertificateFailedError as exc:
            _write(report_service.dumps(exc.report.to_dict()))
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        _write(report_service.dumps(report.to_dict()))

    elif args.command == "render":
        T = _load_map(args)
        radius = args.escape if args.escape is not None else default_escape_radius(T)
        if args.mode == "born":
            grid = render_born(T, args.window, args.size, args.iters, radius, threads=threads)
        else:
            grid = render_attr(T, radius, args.window, args.size, args.iters, threads=threads)
        write_pgm(grid, args.out)

    elif args.command == "verify":
        result = VerifyService().run(args.suite)
        _write(report_service.dumps(result.to_dict()))
        return EXIT_OK if result.passed else EXIT_FAILURE

    return EXIT_OK


def _check_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Cross-option rules argparse cannot express; violations exit with status 2."""
    if args.command == "render" and args.mode == "born" and args.iters < 1:
        parser.error("born rendering needs --iters >= 1")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        _check_args(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        config = get_config()
        resolve_threads(args.threads)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"pwrot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(config.logging, verbose=args.verbose)

    try:
        return _dispatch(args)
    except (PwrotError, ValueError, OSError) as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
