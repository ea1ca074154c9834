"""ml-eval, pmf and sample subcommands."""

import argparse
import math
from typing import Dict

import numpy as np

from fracpoisson.cli.commands import add_frac_options, float_list, frac_params
from fracpoisson.cli.output import CommandResult
from fracpoisson.schemas.params import WeightedPoissonLaw
from fracpoisson.schemas.run import RunConfig
from fracpoisson.services.laws import wp_log_pmf_grid, wp_mean, wp_support
from fracpoisson.services.special_fn import log_ml, ml, ml_generalized
from fracpoisson.tasks.simulate import draw_samples


def ml_eval(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Mittag-Leffler values on a list of arguments."""
    rows = []
    for z in args.z:
        if args.log:
            value = log_ml(args.alpha, args.beta, z)
        elif args.gamma is not None:
            value = ml_generalized(args.alpha, args.beta, args.gamma, z)
        else:
            value = ml(args.alpha, args.beta, z)
        rows.append({"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "z": z, "value": value})
    return CommandResult(columns=["alpha", "beta", "gamma", "z", "value"], rows=rows)


def pmf(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Weighted-Poisson pmf of A(t), on 0..k_max or the truncated support."""
    law = WeightedPoissonLaw(nu=args.nu, lam=args.lam, t=args.t)
    if args.k_max is None:
        ks, logs = wp_support(law)
    else:
        ks = np.arange(args.k_max + 1)
        logs = wp_log_pmf_grid(law, ks)
    rows = [
        {"k": int(k), "pmf": math.exp(log_p), "log_pmf": float(log_p)}
        for k, log_p in zip(ks, logs)
    ]
    return CommandResult(columns=["k", "pmf", "log_pmf"], rows=rows, summary={"mean": wp_mean(law)})


def sample(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Draws reproducible from (seed, n_rep) whatever the worker count."""
    draws = draw_samples(args.kind, frac_params(args), args.t, config.n_rep, config.seed, config.workers)
    values = draws.tolist()
    rows = [{"index": i, "value": v} for i, v in enumerate(values)]
    summary: Dict[str, float] = {"mean": math.fsum(values) / len(values)}
    return CommandResult(columns=["index", "value"], rows=rows, summary=summary)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    ml_parser = subparsers.add_parser("ml-eval", parents=[common], allow_abbrev=False, help="evaluate Mittag-Leffler functions")
    ml_parser.add_argument("--alpha", type=float, required=True)
    ml_parser.add_argument("--beta", type=float, default=1.0)
    ml_parser.add_argument("--gamma", type=float, default=None, help="generalized (Prabhakar) parameter")
    ml_parser.add_argument("--z", type=float_list, required=True)
    ml_parser.add_argument("--log", action="store_true", help="log E_{alpha,beta}(z) for z >= 0")
    ml_parser.set_defaults(handler=ml_eval)

    pmf_parser = subparsers.add_parser("pmf", parents=[common], allow_abbrev=False, help="weighted-Poisson pmf of A(t)")
    add_frac_options(pmf_parser, with_h=False)
    pmf_parser.add_argument("--t", type=float, required=True)
    pmf_parser.add_argument("--k-max", type=int, default=None)
    pmf_parser.set_defaults(handler=pmf)

    sample_parser = subparsers.add_parser("sample", parents=[common], allow_abbrev=False, help="draw holding times or counts")
    add_frac_options(sample_parser)
    sample_parser.add_argument("--kind", choices=["holding", "count", "weighted"], default="count")
    sample_parser.add_argument("--t", type=float, default=None)
    sample_parser.set_defaults(handler=sample)

    return {"ml-eval": ml_parser, "pmf": pmf_parser, "sample": sample_parser}
