"""Command line surface: verify, table, expand, manifold, divisibility.

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 malformed input, 2 a verification failed.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import Any, Optional, Sequence, TextIO

import pandas as pd

from .core_algebra import GenusKind
from .errors import GeneraError
from .genera import genus_table, z_expand
from .manifolds import divisibility_check, manifold_summary, parse_model
from .settings import Settings, load_settings
from .symmetric import Partition
from .verification import TARGETS, IdentityVerifier

logger = logging.getLogger(__name__)

KIND_CHOICES = [kind.value for kind in GenusKind]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports malformed flags as exit 1 instead of exiting 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="genera",
        description="Exact chi_y, twisted A-hat and twisted L genera as Chern-number combinations")
    parser.add_argument("--config", help="alternative config.yaml")
    parser.add_argument("--log-level", help="override the configured log level")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="verify the identities over a range of n")
    verify.add_argument("--target", choices=TARGETS, default="all")
    verify.add_argument("--n-min", type=int)
    verify.add_argument("--n-max", type=int)
    verify.add_argument("--workers", type=int)
    verify.add_argument("--json", action="store_true")

    table = commands.add_parser("table", help="Chern-number rows of a genus table")
    table.add_argument("--kind", choices=KIND_CHOICES, required=True)
    table.add_argument("--n", type=int, required=True)
    table.add_argument("--max-n", type=int)
    table.add_argument("--json", action="store_true")

    expand = commands.add_parser("expand", help="expansion of a genus in z = 1 + y")
    expand.add_argument("--kind", choices=KIND_CHOICES, required=True)
    expand.add_argument("--n", type=int, required=True)
    expand.add_argument("--order", type=int, required=True)
    expand.add_argument("--max-n", type=int)
    expand.add_argument("--json", action="store_true")

    manifold = commands.add_parser("manifold", help="Chern numbers and index table of a model")
    manifold.add_argument("--model", required=True, help='"cp:3", "prod:cp1,cp3" or JSON Chern data')
    manifold.add_argument("--kind", choices=KIND_CHOICES, required=True)
    manifold.add_argument("--json", action="store_true")

    divisibility = commands.add_parser("divisibility", help="2(n-1)c1c_{n-1} + c1^2c_{n-2} mod 8")
    divisibility.add_argument("--model", required=True)
    divisibility.add_argument("--json", action="store_true")

    return parser


def _emit_json(payload: Any, out: TextIO) -> None:
    print(json.dumps(payload, indent=2), file=out)


def _configure_logging(settings: Settings) -> None:
    logging.basicConfig(
        level=settings.log_level.upper(),
        format=settings.log_format,
        stream=sys.stderr,
        force=True,
    )


def _run_verify(args, settings: Settings, out: TextIO) -> int:
    n_min = settings.verify_n_min if args.n_min is None else args.n_min
    n_max = settings.verify_n_max if args.n_max is None else args.n_max
    workers = settings.workers if args.workers is None else args.workers
    verifier = IdentityVerifier(n_min, n_max, workers=workers, max_n=settings.max_n)
    results = verifier.run(args.target)

    if args.json:
        _emit_json([check.to_dict() for check in verifier.checks()], out)
    else:
        for result in results:
            print(result.format(), file=out)
            for check in result.checks:
                if not check.passed:
                    print(f"  {check.identity}: lhs={check.lhs.format()} rhs={check.rhs.format()}",
                          file=out)
    logger.info("Verification summary:\n" + verifier.summary_frame().to_string(index=False))
    return EXIT_OK if verifier.passed else EXIT_FAILED


def _run_table(args, settings: Settings, out: TextIO) -> int:
    table = genus_table(args.kind, args.n, args.max_n or settings.max_n)
    if args.json:
        _emit_json(table.to_dict(), out)
        return EXIT_OK
    print(f"{table.kind.value} table, n={table.n}", file=out)
    for p, row in enumerate(table.rows):
        print(f"row{p}: {row.format()}", file=out)
    return EXIT_OK


def _run_expand(args, settings: Settings, out: TextIO) -> int:
    expansion = z_expand(args.kind, args.n, args.order, args.max_n or settings.max_n)
    if args.json:
        _emit_json(expansion.to_dict(), out)
        return EXIT_OK
    print(f"{expansion.kind.value} in z = 1 + y, n={expansion.n}, order {expansion.order}", file=out)
    for k, coeff in enumerate(expansion.coeffs):
        print(f"z^{k}: {coeff.format()}", file=out)
    return EXIT_OK


def _flag(value: Optional[bool]) -> str:
    return "unknown" if value is None else str(value).lower()


def _run_manifold(args, settings: Settings, out: TextIO) -> int:
    model = parse_model(args.model)
    summary = manifold_summary(model, args.kind, settings.max_n)
    if args.json:
        _emit_json(summary, out)
        return EXIT_OK

    print(f"model: {summary['model']} (n={summary['n']}, spin={_flag(summary['spin'])})", file=out)
    numbers = pd.DataFrame([
        {
            "partition": str(Partition.from_parts(term["partition"])),
            "chern number": Partition.from_parts(term["partition"]).label(),
            "value": term["coeff"],
        }
        for term in summary["chern_numbers"]["terms"]
    ])
    print("chern numbers:", file=out)
    print(numbers.to_string(index=False), file=out)

    table = summary["index_table"]
    indices = pd.DataFrame({
        "p": range(len(table["values"])),
        "index": table["values"],
        "integral": table["integral"],
    })
    print(f"{table['kind']} index table:", file=out)
    print(indices.to_string(index=False), file=out)

    lw = summary["libgober_wood"]
    print(f"libgober-wood number: {lw['value']} (integral={_flag(lw['integral'])})", file=out)
    if "recovered" in summary:
        recovered = pd.DataFrame(summary["recovered"]["entries"])
        print("recovered from index tables:", file=out)
        print(recovered[["number", "recovered", "direct", "match"]].to_string(index=False), file=out)
    return EXIT_OK


def _run_divisibility(args, settings: Settings, out: TextIO) -> int:
    record = divisibility_check(parse_model(args.model))
    if args.json:
        _emit_json(record.to_dict(), out)
    else:
        print(record.format(), file=out)
    return EXIT_FAILED if record.violates else EXIT_OK


HANDLERS = {
    "verify": _run_verify,
    "table": _run_table,
    "expand": _run_expand,
    "manifold": _run_manifold,
    "divisibility": _run_divisibility,
}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Parse argv, run one subcommand, return the exit code"""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        settings = load_settings(args.config)
        if args.log_level:
            settings = replace(settings, log_level=args.log_level).validate()
    except GeneraError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(settings)

    try:
        return HANDLERS[args.command](args, settings, out)
    except (GeneraError, ValueError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
