"""Ratio ||Op(a) f|| / (||a|| ||f||) for amplitude operators on modulation spaces."""
import math

from _common import parser, run

from modspace.psdo import ContinuityConfig, continuity_experiment


def exponent(text: str) -> float:
    return math.inf if text == "inf" else float(text)


if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--p", type=exponent, default=math.inf)
    p.add_argument("--q", type=exponent, default=1.0)
    p.add_argument("--family-size", type=int, default=10)
    args = p.parse_args()
    cfg = ContinuityConfig(p=args.p, q=args.q, family_size=args.family_size, seed=args.seed)
    if args.resolutions:
        cfg.resolutions = tuple(args.resolutions)
    run(lambda: continuity_experiment(cfg), args)
