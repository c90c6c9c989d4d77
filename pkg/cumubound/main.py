import logging
import sys
from argparse import ArgumentParser

from cumubound import __version__
from cumubound.cli import commands
from cumubound.cli.output import FORMATS, render
from cumubound.constants import A_CEN_SWEEP, CLASS_NAMES, DEFAULT_SEED, ENUMERATION_LIMIT
from cumubound.errors import CumulantError


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table", help="Output format")
    common.add_argument("-v", "--verbose", help="Log diagnostics to stderr", action="store_true")

    parser = ArgumentParser(prog="cumubound", description="Exact cumulant bounds and coefficient tables")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    coeffs = subparsers.add_parser("coeffs", parents=[common], help="Coefficient tables")
    coeffs.add_argument(
        "--class",
        dest="partition_class",
        choices=[*CLASS_NAMES.values(), commands.ALL_THREE],
        default=commands.ALL_THREE,
    )
    coeffs.add_argument("--max-n", type=int, default=9)
    coeffs.add_argument("--asymptotic", help="Add the leading-order approximant and ratio", action="store_true")
    coeffs.add_argument("--scientific", help="Print approximants as decimal strings past float range",
                        action="store_true")
    coeffs.add_argument("--provenance", choices=["recurrence", "egf", "brute-force"], default="recurrence")
    coeffs.add_argument("--enum-limit", type=int, default=ENUMERATION_LIMIT)
    coeffs.set_defaults(handler=commands.cmd_coeffs)

    transform = subparsers.add_parser("transform", parents=[common], help="Moment <-> cumulant conversion")
    source = transform.add_mutually_exclusive_group(required=True)
    source.add_argument("--moments", help="Comma-separated raw moments m_1,m_2,...")
    source.add_argument("--cumulants", help="Comma-separated cumulants k_1,k_2,...")
    transform.add_argument("--direction", choices=["to-cumulants", "to-moments"])
    transform.set_defaults(handler=commands.cmd_transform)

    bound = subparsers.add_parser("bound", parents=[common], help="Forward and converse bound reports")
    law_or_moments = bound.add_mutually_exclusive_group(required=True)
    law_or_moments.add_argument("--law", help="Reference law, e.g. gaussian:sigma=1")
    law_or_moments.add_argument("--moments", help="Comma-separated raw moments")
    bound.add_argument("--abs-moments", help="Comma-separated absolute moments, with --moments")
    bound.add_argument("--symmetric", action="store_true", help="Treat --moments as a symmetric law")
    bound.add_argument("--centered", action="store_true", help="Treat --moments as a centered law")
    bound.add_argument("--max-n", type=int, default=8)
    bound.add_argument("--converse", action="store_true", help="Add converse envelope checks")
    bound.set_defaults(handler=commands.cmd_bound)

    tail = subparsers.add_parser("tail", parents=[common], help="Bernstein tail bounds")
    tail.add_argument("--v")
    tail.add_argument("--b")
    tail.add_argument("--x", help="Comma-separated deviations")
    tail.add_argument("--two-sided", action="store_true")
    tail.add_argument("--derive", help="Derive (v', b) from 'v,L'")
    tail.add_argument("--law", help="Check the growth assumption against a reference law")
    tail.add_argument("--sweep", type=int, default=A_CEN_SWEEP, help="Depth of the A_cen sweep")
    tail.set_defaults(handler=commands.cmd_tail)

    rates = subparsers.add_parser("rates", parents=[common], help="Rate constants")
    rates.add_argument("--precision", type=int, default=6)
    rates.set_defaults(handler=commands.cmd_rates)

    sampler = subparsers.add_parser("sample", parents=[common], help="Empirical moments from a seeded sample")
    sampler.add_argument("--law", required=True)
    sampler.add_argument("--count", type=int, default=100_000)
    sampler.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sampler.add_argument("--max-n", type=int, default=4)
    sampler.set_defaults(handler=commands.cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )

    try:
        record = args.handler(args)
    except CumulantError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    sys.stdout.write(render(record))
    return 1 if record.failed else 0


if __name__ == "__main__":
    sys.exit(main())
