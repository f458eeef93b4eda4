"""Schatten quasi-norm of amplitude operators against their amplitude norm."""
from _common import parser, run

from modspace.spectral import SchattenConfig, schatten_bound_experiment

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--family-size", type=int, default=10)
    p.add_argument("--strides", type=int, nargs=2, default=(1, 1))
    args = p.parse_args()
    cfg = SchattenConfig(p=args.p, q=args.q, family_size=args.family_size,
                         seed=args.seed, strides=tuple(args.strides))
    if args.resolutions:
        cfg.resolutions = tuple(args.resolutions)
    run(lambda: schatten_bound_experiment(cfg), args)
