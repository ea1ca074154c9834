"""ruin subcommand."""

import argparse
from typing import Any, Dict, List

from fracpoisson.cli.commands import add_frac_options, float_list, frac_params
from fracpoisson.cli.output import CommandResult
from fracpoisson.schemas.ruin import RuinModel, parse_claim_law
from fracpoisson.schemas.run import RunConfig
from fracpoisson.tasks.ruin import lundberg_root, lundberg_slope_check, ruin_crude, ruin_is


def ruin(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Importance-sampling ruin estimates on a u grid.

    With three or more capitals the Lundberg slope check is added to the
    summary; ``--step-horizon`` adds crude estimates for comparison.
    """
    model = RuinModel(frac=frac_params(args), c=args.c, claims=parse_claim_law(args.claims))
    w = lundberg_root(model)
    summary: Dict[str, Any] = {"w": w}
    if len(args.u_grid) >= 3:
        check = lundberg_slope_check(model, args.u_grid, config.n_rep, config.seed, config.workers)
        estimates, std_errors = check.estimates, check.std_errors
        summary.update(slope=check.slope, rel_gap=check.rel_gap, acceptance_rate=check.acceptance_rate)
    else:
        runs = [ruin_is(model, u, config.n_rep, config.seed, config.workers, w=w) for u in args.u_grid]
        estimates = [est.value for est in runs]
        std_errors = [est.std_error for est in runs]
        summary["acceptance_rate"] = runs[0].diagnostics.get("acceptance_rate")
    summary["estimates"] = estimates

    columns: List[str] = ["u", "estimate", "std_error"]
    rows = [{"u": u, "estimate": est, "std_error": se} for u, est, se in zip(args.u_grid, estimates, std_errors)]
    if args.step_horizon > 0:
        columns += ["crude", "crude_std_error", "crude_hits"]
        for row in rows:
            crude = ruin_crude(model, row["u"], config.n_rep, args.step_horizon, config.seed, config.workers)
            row.update(crude=crude.value, crude_std_error=crude.std_error, crude_hits=crude.hits)
    return CommandResult(columns=columns, rows=rows, summary=summary)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    parser = subparsers.add_parser("ruin", parents=[common], allow_abbrev=False, help="ruin probabilities by importance sampling")
    add_frac_options(parser)
    parser.add_argument("--c", type=float, required=True, help="premium rate")
    parser.add_argument("--claims", required=True, help="exp:MU, gamma:SHAPE,RATE or det:M")
    parser.add_argument("--u-grid", type=float_list, required=True)
    parser.add_argument("--step-horizon", type=int, default=0, help="crude comparison horizon (0 disables)")
    parser.set_defaults(handler=ruin)
    return {"ruin": parser}
