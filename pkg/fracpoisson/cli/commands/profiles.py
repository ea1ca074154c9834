"""ldp-profile and compare-subordinated subcommands."""

import argparse
from typing import Dict

from fracpoisson.cli.commands import add_frac_options, float_list, frac_params
from fracpoisson.cli.output import CommandResult
from fracpoisson.schemas.run import RunConfig
from fracpoisson.tasks.simulate import compare_subordinated, ldp_profile_renewal, ldp_profile_weighted

PROFILE_COLUMNS = ["t", "estimate", "stderr_or_bound_flag", "limit", "gap"]


def ldp_profile(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    if args.version == "weighted":
        profile = ldp_profile_weighted(args.nu, args.lam, args.x, args.t_grid)
    else:
        exact = {"auto": None, "exact": True, "monte-carlo": False}[args.method]
        profile = ldp_profile_renewal(
            frac_params(args), args.x, args.t_grid, config.n_rep, config.seed, config.workers, exact=exact
        )
    rows = [
        {
            "t": row.t,
            "estimate": row.estimate,
            "stderr_or_bound_flag": row.std_error if row.kind == "point" else row.kind,
            "limit": row.limit,
            "gap": row.gap,
        }
        for row in profile
    ]
    return CommandResult(columns=PROFILE_COLUMNS, rows=rows)


def subordinated(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    rows, summary = compare_subordinated(args.lam, args.t, config.n_rep, config.seed, config.workers)
    return CommandResult(columns=["k", "empirical", "exact"], rows=rows, summary=summary)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    profile_parser = subparsers.add_parser("ldp-profile", parents=[common], allow_abbrev=False, help="-(1/t) log P(X(t)/t >= x)")
    add_frac_options(profile_parser)
    profile_parser.add_argument("--version", choices=["renewal", "weighted"], default="renewal")
    profile_parser.add_argument("--method", choices=["auto", "exact", "monte-carlo"], default="auto")
    profile_parser.add_argument("--x", type=float, required=True)
    profile_parser.add_argument("--t-grid", type=float_list, required=True)
    profile_parser.set_defaults(handler=ldp_profile)

    compare_parser = subparsers.add_parser(
        "compare-subordinated", parents=[common], allow_abbrev=False, help="M_{1/2,1,lambda}(t) against N_lambda(|B(2t)|)"
    )
    compare_parser.add_argument("--lambda", dest="lam", type=float, required=True)
    compare_parser.add_argument("--t", type=float, required=True)
    compare_parser.set_defaults(handler=subordinated)

    return {"ldp-profile": profile_parser, "compare-subordinated": compare_parser}
