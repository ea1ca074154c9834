"""rate and entropy subcommands."""

import argparse
import math
from typing import Dict

from fracpoisson.cli.commands import add_frac_options, float_list, frac_params
from fracpoisson.cli.output import CommandResult
from fracpoisson.schemas.params import EntropyQuery
from fracpoisson.schemas.run import RunConfig
from fracpoisson.services.entropy import entropy_rate, relative_entropy_finite_t
from fracpoisson.services.rates import composition_rate, rate_A, rate_M, rate_T

RATE_COLUMNS = ["x", "value", "method", "argmax_theta", "argmin_y"]


def rate(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Rate function values on a grid of x."""
    p = frac_params(args)
    rows = []
    for x in args.x:
        if args.kind == "T":
            evaluation = rate_T(p, x, numeric=args.numeric)
        elif args.kind == "A":
            evaluation = rate_A(p.nu, p.lam, x, numeric=args.numeric)
        elif args.kind == "composition":
            evaluation = composition_rate(p.lam, x)
        else:
            evaluation = rate_M(p, x, numeric=args.numeric)
        rows.append(evaluation.model_dump())
    return CommandResult(columns=RATE_COLUMNS, rows=rows)


def entropy(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """H/t on a t grid next to its limit, or the raw H with --raw."""
    limit = entropy_rate(EntropyQuery(nu=args.nu, lambda1=args.lambda1, lambda2=args.lambda2))
    rows = []
    for t in args.t_grid or []:
        value = relative_entropy_finite_t(
            EntropyQuery(nu=args.nu, lambda1=args.lambda1, lambda2=args.lambda2, t=t)
        )
        if args.raw:
            rows.append({"t": t, "estimate": value})
        else:
            gap = limit - value / t if math.isfinite(limit) and math.isfinite(value) else None
            rows.append({"t": t, "estimate": value / t, "limit": limit, "gap": gap})
    return CommandResult(columns=["t", "estimate", "limit", "gap"], rows=rows, summary={"limit": limit})


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    rate_parser = subparsers.add_parser("rate", parents=[common], allow_abbrev=False, help="LDP rate functions")
    add_frac_options(rate_parser)
    rate_parser.add_argument("--x", type=float_list, required=True)
    rate_parser.add_argument(
        "--kind",
        choices=["M", "T", "A", "composition"],
        default="M",
        help="M(t)/t, mean holding time, A(t)/t or the subordinated composition",
    )
    rate_parser.add_argument("--numeric", action="store_true", help="force numeric conjugation")
    rate_parser.set_defaults(handler=rate)

    entropy_parser = subparsers.add_parser("entropy", parents=[common], allow_abbrev=False, help="weighted-Poisson relative entropy")
    entropy_parser.add_argument("--nu", type=float, required=True)
    entropy_parser.add_argument("--lambda1", type=float, required=True)
    entropy_parser.add_argument("--lambda2", type=float, required=True)
    entropy_parser.add_argument("--t-grid", type=float_list, default=None)
    entropy_parser.add_argument("--raw", action="store_true", help="emit H instead of H/t")
    entropy_parser.set_defaults(handler=entropy)

    return {"rate": rate_parser, "entropy": entropy_parser}
