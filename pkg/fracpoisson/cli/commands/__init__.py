"""Subcommand modules; each exposes ``register(subparsers, common)``."""

import argparse
from typing import List

from fracpoisson.schemas.params import FracParams


def float_list(text: str) -> List[float]:
    """argparse type for comma-separated floats such as ``10,20,40``."""
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def add_frac_options(parser: argparse.ArgumentParser, with_h: bool = True) -> None:
    """The (nu, h, lambda) triple shared by most subcommands."""
    parser.add_argument("--nu", type=float, required=True, help="fractional index in (0, 1]")
    if with_h:
        parser.add_argument("--h", type=float, default=1.0, help="holding-time shape")
    parser.add_argument("--lambda", dest="lam", type=float, required=True, help="intensity")


def frac_params(args: argparse.Namespace) -> FracParams:
    return FracParams(nu=args.nu, h=getattr(args, "h", 1.0), lam=args.lam)
